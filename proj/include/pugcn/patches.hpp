#pragma once

#include <string>
#include <vector>

#include "pugcn/geometry.hpp"

namespace pugcn {

// One training example: a sparse input patch and its dense ground truth,
// jointly normalized. The input points are a subset of the ground truth by
// construction.
struct PatchPair {
    PointCloud input;
    PointCloud gt;
    NormalizeTransform transform;
    std::string source_id;
    std::int32_t seed_point = -1;
};

struct ManifestEntry {
    std::string mesh_path;
    std::vector<std::string> patch_input_paths;
    std::vector<std::string> patch_gt_paths;
    std::string test_input_path;
    std::string test_gt_path;
};

struct DatasetManifest {
    std::vector<ManifestEntry> meshes;
    std::uint64_t seed = 0;
    int generator_version = 1;
    int patches_per_model = 0;

    std::int64_t patch_pair_count() const {
        std::int64_t n = 0;
        for (const auto& m : meshes) n += static_cast<std::int64_t>(m.patch_input_paths.size());
        return n;
    }
};

}  // namespace pugcn
