#include "pugcn/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "json.hpp"
#include "pugcn/io.hpp"
#include "pugcn/synthetic.hpp"

namespace pugcn {

namespace fs = std::filesystem;
using nlohmann::json;

void DatasetConfig::validate() const {
    if (dense_points < 1 || patches_per_model < 1 || patch_gt_points < 1 ||
        patch_input_points < 1 || test_input_points < 1)
        throw ConfigError("DatasetConfig: all counts must be positive");
    if (patch_gt_points > dense_points)
        throw ConfigError("DatasetConfig: patch_gt_points exceeds dense_points");
    if (patch_input_points > patch_gt_points)
        throw ConfigError("DatasetConfig: patch_input_points exceeds patch_gt_points");
    if (patches_per_model > dense_points)
        throw ConfigError("DatasetConfig: patches_per_model exceeds dense_points");
}

namespace {

PointCloud select(const PointCloud& cloud, const std::vector<std::int32_t>& indices) {
    PointCloud out;
    out.points.reserve(indices.size());
    for (std::int32_t i : indices) out.points.push_back(cloud[i]);
    return out;
}

}  // namespace

DatasetManifest generate_dataset(const std::string& mesh_dir, const std::string& out_dir,
                                 const DatasetConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    std::vector<std::string> mesh_files;
    for (const auto& entry : fs::directory_iterator(mesh_dir))
        if (entry.is_regular_file() && entry.path().extension() == ".off")
            mesh_files.push_back(entry.path().string());
    std::sort(mesh_files.begin(), mesh_files.end());
    if (mesh_files.empty())
        throw DataError(strformat("generate_dataset: no .off meshes in %s", mesh_dir.c_str()));

    fs::create_directories(out_dir);
    DatasetManifest manifest;
    manifest.seed = seed;
    manifest.patches_per_model = cfg.patches_per_model;

    for (std::size_t ordinal = 0; ordinal < mesh_files.size(); ++ordinal) {
        const std::string& mesh_path = mesh_files[ordinal];
        Mesh mesh;
        try {
            mesh = read_off(mesh_path);
        } catch (const Error& e) {
            std::fprintf(stderr, "warning: skipping %s: %s\n", mesh_path.c_str(), e.what());
            continue;
        }
        const std::uint64_t mesh_seed = Rng::derive_seed(seed, ordinal);
        const PointCloud dense = poisson_sample(mesh, cfg.dense_points,
                                                Rng::derive_seed(mesh_seed, 0));
        const PointCloud test_input = poisson_sample(mesh, cfg.test_input_points,
                                                     Rng::derive_seed(mesh_seed, 1));

        const std::string stem = fs::path(mesh_path).stem().string();
        const fs::path mesh_out = fs::path(out_dir) / stem;
        fs::create_directories(mesh_out);

        ManifestEntry entry;
        entry.mesh_path = mesh_path;
        entry.test_input_path = (mesh_out / "test_input.xyz").string();
        entry.test_gt_path = (mesh_out / "test_gt.xyz").string();
        write_xyz(entry.test_input_path, test_input);
        write_xyz(entry.test_gt_path, dense);

        const auto seeds =
            farthest_point_sample(dense, cfg.patches_per_model, farthest_from_centroid(dense));
        for (std::size_t s = 0; s < seeds.size(); ++s) {
            const auto gt_indices = nearest_indices(dense, dense[seeds[s]], cfg.patch_gt_points);
            const PointCloud gt_patch = select(dense, gt_indices);
            // the seed sits at distance zero, so FPS from row 0 starts there
            const auto input_indices =
                farthest_point_sample(gt_patch, cfg.patch_input_points, 0);
            const PointCloud input_patch = select(gt_patch, input_indices);

            auto [gt_norm, transform] = normalize(gt_patch);
            const PointCloud input_norm = apply_transform(input_patch, transform);

            const std::string input_path =
                (mesh_out / strformat("patch_%04zu_input.xyz", s)).string();
            const std::string gt_path = (mesh_out / strformat("patch_%04zu_gt.xyz", s)).string();
            write_xyz(input_path, input_norm);
            write_xyz(gt_path, gt_norm);
            entry.patch_input_paths.push_back(input_path);
            entry.patch_gt_paths.push_back(gt_path);
        }
        manifest.meshes.push_back(std::move(entry));
    }
    if (manifest.meshes.empty()) throw DataError("generate_dataset: no usable meshes");

    write_manifest((fs::path(out_dir) / "manifest.json").string(), manifest);
    return manifest;
}

namespace {

std::string relativize(const std::string& path, const fs::path& base) {
    return fs::relative(path, base).string();
}

}  // namespace

void write_manifest(const std::string& path, const DatasetManifest& manifest) {
    const fs::path base = fs::path(path).parent_path();
    json doc;
    doc["generator_version"] = manifest.generator_version;
    doc["seed"] = manifest.seed;
    doc["patches_per_model"] = manifest.patches_per_model;
    json meshes = json::array();
    for (const auto& entry : manifest.meshes) {
        json m;
        m["mesh"] = entry.mesh_path;
        m["test_input"] = relativize(entry.test_input_path, base);
        m["test_gt"] = relativize(entry.test_gt_path, base);
        json patches = json::array();
        for (std::size_t i = 0; i < entry.patch_input_paths.size(); ++i)
            patches.push_back({{"input", relativize(entry.patch_input_paths[i], base)},
                               {"gt", relativize(entry.patch_gt_paths[i], base)}});
        m["patches"] = std::move(patches);
        meshes.push_back(std::move(m));
    }
    doc["meshes"] = std::move(meshes);

    std::ofstream out(path);
    if (!out) throw DataError(strformat("cannot open %s for writing", path.c_str()));
    out << doc.dump(2) << "\n";
    if (!out) throw DataError(strformat("write failed: %s", path.c_str()));
}

DatasetManifest read_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError(strformat("cannot open %s for reading", path.c_str()));
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw FormatError(strformat("%s: %s", path.c_str(), e.what()));
    }
    const fs::path base = fs::path(path).parent_path();
    auto resolve = [&](const std::string& p) { return (base / p).lexically_normal().string(); };

    DatasetManifest manifest;
    try {
        manifest.generator_version = doc.at("generator_version").get<int>();
        manifest.seed = doc.at("seed").get<std::uint64_t>();
        manifest.patches_per_model = doc.at("patches_per_model").get<int>();
        for (const auto& m : doc.at("meshes")) {
            ManifestEntry entry;
            entry.mesh_path = m.at("mesh").get<std::string>();
            entry.test_input_path = resolve(m.at("test_input").get<std::string>());
            entry.test_gt_path = resolve(m.at("test_gt").get<std::string>());
            for (const auto& p : m.at("patches")) {
                entry.patch_input_paths.push_back(resolve(p.at("input").get<std::string>()));
                entry.patch_gt_paths.push_back(resolve(p.at("gt").get<std::string>()));
            }
            manifest.meshes.push_back(std::move(entry));
        }
    } catch (const json::exception& e) {
        throw FormatError(strformat("%s: %s", path.c_str(), e.what()));
    }
    return manifest;
}

std::vector<PatchPair> load_patch_pairs(const DatasetManifest& manifest) {
    std::vector<PatchPair> pairs;
    for (const auto& entry : manifest.meshes) {
        for (std::size_t i = 0; i < entry.patch_input_paths.size(); ++i) {
            PatchPair pair;
            pair.input = read_xyz(entry.patch_input_paths[i]);
            pair.gt = read_xyz(entry.patch_gt_paths[i]);
            pair.source_id = entry.patch_input_paths[i];
            pairs.push_back(std::move(pair));
        }
    }
    if (pairs.empty()) throw DataError("load_patch_pairs: manifest lists no patches");
    return pairs;
}

PointCloud upsample_cloud(const PointCloud& cloud, const ModelParams& params,
                          const ModelConfig& cfg, int patch_size) {
    if (cloud.empty()) throw ArgumentError("upsample_cloud: empty cloud");
    if (patch_size < cfg.min_points())
        throw ArgumentError(strformat("upsample_cloud: patch size %d below the model minimum %d",
                                      patch_size, cfg.min_points()));

    if (cloud.size() < patch_size) {
        // single-patch fallback: the whole cloud is one patch
        auto [normalized, transform] = normalize(cloud);
        return denormalize(upsample_patch(normalized, params, cfg), transform);
    }

    // seed count with 3x coverage overlap
    const std::int64_t groups = (cloud.size() + patch_size - 1) / patch_size;
    const std::int64_t num_seeds = std::min<std::int64_t>(cloud.size(), groups * 3);
    const auto seeds = farthest_point_sample(cloud, num_seeds, farthest_from_centroid(cloud));

    PointCloud merged;
    merged.points.reserve(num_seeds * patch_size * cfg.ratio);
    std::int64_t outliers = 0;
    for (const std::int32_t seed : seeds) {
        const auto patch_indices = nearest_indices(cloud, cloud[seed], patch_size);
        auto [patch, transform] = normalize(select(cloud, patch_indices));
        const PointCloud up = upsample_patch(patch, params, cfg);
        // soft outlier guard: patch inputs live in the unit sphere
        for (const Vec3& p : up.points)
            if (norm(p) > 1.1) ++outliers;
        const PointCloud restored = denormalize(up, transform);
        merged.points.insert(merged.points.end(), restored.points.begin(),
                             restored.points.end());
    }
    if (outliers > 0)
        std::fprintf(stderr,
                     "warning: upsample_cloud: %lld of %zu patch outputs fall outside the "
                     "1.1-radius ball of their normalized patch\n",
                     static_cast<long long>(outliers),
                     static_cast<std::size_t>(merged.points.size()));

    const std::int64_t target = cloud.size() * cfg.ratio;
    const auto final_indices =
        farthest_point_sample(merged, target, farthest_from_centroid(merged));
    return select(merged, final_indices);
}

double time_forward_ms(const ModelParams& params, const ModelConfig& cfg, int runs) {
    runs = std::max(runs, 5);
    auto mesh = make_sphere();
    auto [patch, transform] =
        normalize(poisson_sample(mesh, std::max(256, cfg.min_points()), 0));
    upsample_patch(patch, params, cfg);  // warm-up
    double total_ms = 0.0;
    for (int i = 0; i < runs; ++i) {
        const auto start = std::chrono::steady_clock::now();
        upsample_patch(patch, params, cfg);
        const auto end = std::chrono::steady_clock::now();
        total_ms += std::chrono::duration<double, std::milli>(end - start).count();
    }
    return total_ms / runs;
}

namespace {

int parse_int(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const int v = std::stoi(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError(strformat("setting %s: \"%s\" is not an integer", key.c_str(),
                                    value.c_str()));
    }
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError(strformat("setting %s: \"%s\" is not a number", key.c_str(),
                                    value.c_str()));
    }
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "on") return true;
    if (value == "false" || value == "0" || value == "off") return false;
    throw ConfigError(strformat("setting %s: \"%s\" is not a boolean", key.c_str(),
                                value.c_str()));
}

}  // namespace

void apply_setting(Settings& s, const std::string& key, const std::string& value) {
    // model
    if (key == "ratio") s.model.ratio = parse_int(key, value);
    else if (key == "num_inception") s.model.num_inception = parse_int(key, value);
    else if (key == "upsampler") s.model.upsampler = upsampler_variant_from_string(value);
    else if (key == "embed_channels") s.model.embed_channels = parse_int(key, value);
    else if (key == "bottleneck_channels") s.model.bottleneck_channels = parse_int(key, value);
    else if (key == "growth") s.model.growth = parse_int(key, value);
    else if (key == "k") s.model.k = parse_int(key, value);
    else if (key == "dilation1") s.model.dilation1 = parse_int(key, value);
    else if (key == "dilation2") s.model.dilation2 = parse_int(key, value);
    else if (key == "compress_channels") s.model.compress_channels = parse_int(key, value);
    // training
    else if (key == "lr") s.train.adam.lr = parse_double(key, value);
    else if (key == "beta1") s.train.adam.beta1 = parse_double(key, value);
    else if (key == "beta2") s.train.adam.beta2 = parse_double(key, value);
    else if (key == "eps") s.train.adam.eps = parse_double(key, value);
    else if (key == "batch_size") s.train.batch_size = parse_int(key, value);
    else if (key == "epochs") s.train.epochs = parse_int(key, value);
    else if (key == "augment_rotate") s.train.aug_rotate = parse_bool(key, value);
    else if (key == "augment_scale") s.train.aug_scale = parse_bool(key, value);
    else if (key == "augment_jitter") s.train.aug_jitter = parse_bool(key, value);
    else if (key == "seed") s.train.seed = static_cast<std::uint64_t>(parse_int(key, value));
    else if (key == "checkpoint_every") s.train.checkpoint_every = parse_int(key, value);
    // dataset
    else if (key == "dense_points") s.data.dense_points = parse_int(key, value);
    else if (key == "patches_per_model") s.data.patches_per_model = parse_int(key, value);
    else if (key == "patch_gt_points") s.data.patch_gt_points = parse_int(key, value);
    else if (key == "patch_input_points") s.data.patch_input_points = parse_int(key, value);
    else if (key == "test_input_points") s.data.test_input_points = parse_int(key, value);
    else
        throw ConfigError(strformat("unknown setting \"%s\"", key.c_str()));
}

Settings load_settings(const std::string& config_path) {
    Settings settings;
    if (!config_path.empty())
        for (const auto& [key, value] : read_config_file(config_path))
            apply_setting(settings, key, value);
    return settings;
}

}  // namespace pugcn
