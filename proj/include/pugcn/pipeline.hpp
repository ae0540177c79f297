#pragma once

#include <string>
#include <vector>

#include "pugcn/patches.hpp"
#include "pugcn/training.hpp"

namespace pugcn {

struct DatasetConfig {
    int dense_points = 8192;       // dense Poisson cloud per mesh, also the test gt
    int patches_per_model = 50;
    int patch_gt_points = 1024;
    int patch_input_points = 256;
    int test_input_points = 2048;

    void validate() const;
};

// Per mesh: a dense Poisson cloud, FPS patch seeds, one normalized
// (input, gt) patch pair per seed, plus an unnormalized test pair. Pure
// function of (meshes, seed, config); identical seeds give byte-identical
// files.
DatasetManifest generate_dataset(const std::string& mesh_dir, const std::string& out_dir,
                                 const DatasetConfig& cfg, std::uint64_t seed);

void write_manifest(const std::string& path, const DatasetManifest& manifest);
// Paths in the returned manifest are resolved relative to the manifest file.
DatasetManifest read_manifest(const std::string& path);

std::vector<PatchPair> load_patch_pairs(const DatasetManifest& manifest);

// Patch-based inference: FPS seed points with 3x coverage, 256-point patches
// normalized per patch, forwarded, merged, and FPS-resampled to ratio * N.
PointCloud upsample_cloud(const PointCloud& cloud, const ModelParams& params,
                          const ModelConfig& cfg, int patch_size = 256);

// Mean wall time of one 256-point forward pass over `runs` runs after one
// warm-up.
double time_forward_ms(const ModelParams& params, const ModelConfig& cfg, int runs = 5);

// Flat key = value settings covering model, training, and dataset knobs.
struct Settings {
    ModelConfig model;
    TrainConfig train;
    DatasetConfig data;
};

void apply_setting(Settings& settings, const std::string& key, const std::string& value);
Settings load_settings(const std::string& config_path);  // defaults when path is empty

}  // namespace pugcn
