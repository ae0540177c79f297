#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include "doctest.h"
#include "pugcn/io.hpp"
#include "pugcn/losses.hpp"
#include "pugcn/pipeline.hpp"
#include "pugcn/synthetic.hpp"

using namespace pugcn;
namespace fs = std::filesystem;

namespace {

ModelConfig tiny_config(int ratio = 2) {
    ModelConfig cfg;
    cfg.ratio = ratio;
    cfg.k = 4;
    cfg.growth = 8;
    cfg.embed_channels = 8;
    cfg.bottleneck_channels = 8;
    cfg.compress_channels = 8;
    return cfg;
}

DatasetConfig small_data_config() {
    DatasetConfig cfg;
    cfg.dense_points = 1024;
    cfg.patches_per_model = 5;
    cfg.patch_gt_points = 256;
    cfg.patch_input_points = 64;
    cfg.test_input_points = 256;
    return cfg;
}

fs::path fresh_dir(const char* name) {
    const fs::path dir = fs::temp_directory_path() / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

void write_mesh_pack(const fs::path& dir, int count) {
    for (const auto& named : synthetic_mesh_pack(count))
        write_off((dir / (named.name + ".off")).string(), named.mesh);
}

std::string file_bytes(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

PointCloud random_cloud(std::int64_t n, Rng& rng) {
    PointCloud cloud;
    for (std::int64_t i = 0; i < n; ++i)
        cloud.points.push_back({rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)});
    return cloud;
}

bool contains_point(const PointCloud& cloud, const Vec3& p) {
    for (const Vec3& q : cloud.points)
        if (q.x == p.x && q.y == p.y && q.z == p.z) return true;
    return false;
}

}  // namespace

TEST_CASE("dataset generation emits the expected patch pairs per mesh") {
    const auto mesh_dir = fresh_dir("pugcn_meshes_a");
    const auto out_dir = fresh_dir("pugcn_dataset_a");
    write_mesh_pack(mesh_dir, 2);

    const auto cfg = small_data_config();
    const auto manifest = generate_dataset(mesh_dir.string(), out_dir.string(), cfg, 42);
    CHECK(manifest.meshes.size() == 2);
    CHECK(manifest.patch_pair_count() == 10);
    for (const auto& entry : manifest.meshes) {
        CHECK(entry.patch_input_paths.size() == 5);
        CHECK(fs::exists(entry.test_input_path));
        CHECK(fs::exists(entry.test_gt_path));
        CHECK(read_xyz(entry.test_input_path).size() == cfg.test_input_points);
        CHECK(read_xyz(entry.test_gt_path).size() == cfg.dense_points);
    }

    // every input point appears in its ground-truth patch
    const auto pairs = load_patch_pairs(manifest);
    REQUIRE(pairs.size() == 10);
    for (const auto& pair : pairs) {
        CHECK(pair.input.size() == cfg.patch_input_points);
        CHECK(pair.gt.size() == cfg.patch_gt_points);
        for (const Vec3& p : pair.input.points) CHECK(contains_point(pair.gt, p));
    }

    // normalized patches live in the unit sphere
    for (const auto& pair : pairs) {
        double max_norm = 0.0;
        for (const Vec3& p : pair.gt.points) max_norm = std::max(max_norm, norm(p));
        CHECK(max_norm == doctest::Approx(1.0).epsilon(1e-9));
    }

    fs::remove_all(mesh_dir);
    fs::remove_all(out_dir);
}

TEST_CASE("dataset generation is byte-identical for a fixed seed") {
    const auto mesh_dir = fresh_dir("pugcn_meshes_b");
    write_mesh_pack(mesh_dir, 1);
    const auto out1 = fresh_dir("pugcn_dataset_b1");
    const auto out2 = fresh_dir("pugcn_dataset_b2");

    const auto cfg = small_data_config();
    const auto m1 = generate_dataset(mesh_dir.string(), out1.string(), cfg, 7);
    const auto m2 = generate_dataset(mesh_dir.string(), out2.string(), cfg, 7);
    REQUIRE(m1.meshes.size() == m2.meshes.size());
    for (std::size_t i = 0; i < m1.meshes[0].patch_input_paths.size(); ++i) {
        CHECK(file_bytes(m1.meshes[0].patch_input_paths[i]) ==
              file_bytes(m2.meshes[0].patch_input_paths[i]));
        CHECK(file_bytes(m1.meshes[0].patch_gt_paths[i]) ==
              file_bytes(m2.meshes[0].patch_gt_paths[i]));
    }
    CHECK(file_bytes(m1.meshes[0].test_input_path) == file_bytes(m2.meshes[0].test_input_path));

    // different seed, different files
    const auto out3 = fresh_dir("pugcn_dataset_b3");
    const auto m3 = generate_dataset(mesh_dir.string(), out3.string(), cfg, 8);
    CHECK(file_bytes(m1.meshes[0].test_input_path) != file_bytes(m3.meshes[0].test_input_path));

    fs::remove_all(mesh_dir);
    fs::remove_all(out1);
    fs::remove_all(out2);
    fs::remove_all(out3);
}

TEST_CASE("manifest json round-trips") {
    const auto mesh_dir = fresh_dir("pugcn_meshes_c");
    const auto out_dir = fresh_dir("pugcn_dataset_c");
    write_mesh_pack(mesh_dir, 1);
    const auto cfg = small_data_config();
    const auto manifest = generate_dataset(mesh_dir.string(), out_dir.string(), cfg, 3);

    const auto loaded = read_manifest((out_dir / "manifest.json").string());
    CHECK(loaded.seed == manifest.seed);
    CHECK(loaded.patches_per_model == manifest.patches_per_model);
    REQUIRE(loaded.meshes.size() == manifest.meshes.size());
    CHECK(loaded.meshes[0].patch_input_paths.size() ==
          manifest.meshes[0].patch_input_paths.size());
    // resolved paths point at real files
    for (const auto& p : loaded.meshes[0].patch_input_paths) CHECK(fs::exists(p));

    fs::remove_all(mesh_dir);
    fs::remove_all(out_dir);
}

TEST_CASE("generation skips unreadable meshes with a warning but fails on zero") {
    const auto mesh_dir = fresh_dir("pugcn_meshes_d");
    const auto out_dir = fresh_dir("pugcn_dataset_d");
    {
        std::ofstream bad(mesh_dir / "broken.off");
        bad << "garbage\n";
    }
    CHECK_THROWS_AS(generate_dataset(mesh_dir.string(), out_dir.string(), small_data_config(), 1),
                    DataError);

    write_mesh_pack(mesh_dir, 1);
    const auto manifest =
        generate_dataset(mesh_dir.string(), out_dir.string(), small_data_config(), 1);
    CHECK(manifest.meshes.size() == 1);  // the broken file was skipped

    fs::remove_all(mesh_dir);
    fs::remove_all(out_dir);
}

TEST_CASE("upsample_cloud covers the input and hits the target count") {
    auto cfg = tiny_config();
    auto params = init_params(cfg, 1);

    Rng rng(2);
    auto cloud = random_cloud(300, rng);
    const int patch_size = 64;
    auto out = upsample_cloud(cloud, params, cfg, patch_size);
    CHECK(out.size() == cloud.size() * cfg.ratio);

    // the decided seed schedule: ceil(N / patch) * 3 overlapping patches
    const std::int64_t expected_seeds = ((300 + patch_size - 1) / patch_size) * 3;
    const auto seeds =
        farthest_point_sample(cloud, expected_seeds, farthest_from_centroid(cloud));
    std::set<std::int32_t> covered;
    for (const std::int32_t seed : seeds)
        for (std::int32_t idx : nearest_indices(cloud, cloud[seed], patch_size))
            covered.insert(idx);
    CHECK(covered.size() == static_cast<std::size_t>(cloud.size()));
}

TEST_CASE("upsample_cloud coverage holds over randomized clouds") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Rng rng(seed);
        const std::int64_t n = 150 + static_cast<std::int64_t>(rng.uniform_index(200));
        auto cloud = random_cloud(n, rng);
        const int patch_size = 64;
        const std::int64_t num_seeds =
            std::min<std::int64_t>(n, ((n + patch_size - 1) / patch_size) * 3);
        const auto seeds = farthest_point_sample(cloud, num_seeds, farthest_from_centroid(cloud));
        std::set<std::int32_t> covered;
        for (const std::int32_t s : seeds)
            for (std::int32_t idx : nearest_indices(cloud, cloud[s], patch_size))
                covered.insert(idx);
        CHECK(covered.size() == static_cast<std::size_t>(n));
    }
}

TEST_CASE("upsample_cloud falls back to a single patch for small clouds") {
    auto cfg = tiny_config();
    auto params = init_params(cfg, 3);
    Rng rng(4);
    auto cloud = random_cloud(50, rng);
    auto out = upsample_cloud(cloud, params, cfg, 256);
    CHECK(out.size() == 100);
}

TEST_CASE("upsample_cloud with ratio 1 preserves the point count") {
    auto cfg = tiny_config(1);
    auto params = init_params(cfg, 5);
    Rng rng(6);
    auto cloud = random_cloud(200, rng);
    auto out = upsample_cloud(cloud, params, cfg, 64);
    CHECK(out.size() == 200);
}

TEST_CASE("upsampled outputs stay within a sane radius of the normalized input") {
    auto cfg = tiny_config();
    auto params = init_params(cfg, 7);
    Rng rng(8);
    auto [cloud, transform] = normalize(random_cloud(128, rng));
    auto out = upsample_cloud(cloud, params, cfg, 64);
    for (const Vec3& p : out.points) CHECK(std::isfinite(norm(p)));
    // random-init outputs may drift, but the merge pipeline must not explode
    double max_norm = 0.0;
    for (const Vec3& p : out.points) max_norm = std::max(max_norm, norm(p));
    CHECK(max_norm < 50.0);
}

TEST_CASE("settings parse and reject unknown keys") {
    Settings s;
    apply_setting(s, "ratio", "2");
    apply_setting(s, "upsampler", "duplicate");
    apply_setting(s, "lr", "0.01");
    apply_setting(s, "augment_jitter", "false");
    apply_setting(s, "patches_per_model", "7");
    CHECK(s.model.ratio == 2);
    CHECK(s.model.upsampler == UpsamplerVariant::Duplicate);
    CHECK(s.train.adam.lr == 0.01);
    CHECK(s.train.aug_jitter == false);
    CHECK(s.data.patches_per_model == 7);

    CHECK_THROWS_AS(apply_setting(s, "no_such_key", "1"), ConfigError);
    CHECK_THROWS_AS(apply_setting(s, "ratio", "abc"), ConfigError);
    CHECK_THROWS_AS(apply_setting(s, "lr", "fast"), ConfigError);
    CHECK_THROWS_AS(apply_setting(s, "augment_scale", "maybe"), ConfigError);

    const auto path = (fs::temp_directory_path() / "pugcn_settings.cfg").string();
    {
        std::ofstream out(path);
        out << "# test\nratio = 4\nepochs = 3\n";
    }
    auto loaded = load_settings(path);
    CHECK(loaded.model.ratio == 4);
    CHECK(loaded.train.epochs == 3);
    fs::remove(path);
}

TEST_CASE("forward timing reports a positive mean") {
    auto cfg = tiny_config();
    auto params = init_params(cfg, 9);
    const double ms = time_forward_ms(params, cfg, 5);
    CHECK(ms > 0.0);
}
