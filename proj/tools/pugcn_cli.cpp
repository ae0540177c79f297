#include <cstdio>
#include <filesystem>
#include <iostream>

#include "CLI11.hpp"
#include "pugcn/io.hpp"
#include "pugcn/losses.hpp"
#include "pugcn/pipeline.hpp"
#include "pugcn/selfcheck.hpp"
#include "pugcn/synthetic.hpp"

namespace fs = std::filesystem;
using namespace pugcn;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumerical = 3;

struct CommonOpts {
    std::string config_path;
};

Settings settings_for(const CommonOpts& opts) { return load_settings(opts.config_path); }

int cmd_gen_data(const std::string& mesh_dir, const std::string& out_dir, int synthetic_count,
                 std::uint64_t seed, const CommonOpts& opts) {
    Settings settings = settings_for(opts);
    std::string meshes = mesh_dir;
    if (synthetic_count > 0) {
        meshes = (fs::path(out_dir) / "meshes").string();
        fs::create_directories(meshes);
        for (const auto& named : synthetic_mesh_pack(synthetic_count))
            write_off((fs::path(meshes) / (named.name + ".off")).string(), named.mesh);
    }
    if (meshes.empty()) {
        std::fprintf(stderr, "gen-data: need --meshes or --synthetic\n");
        return kExitUsage;
    }
    const auto manifest = generate_dataset(meshes, out_dir, settings.data, seed);
    std::printf("wrote %lld patch pairs and %zu test pairs to %s\n",
                static_cast<long long>(manifest.patch_pair_count()), manifest.meshes.size(),
                out_dir.c_str());
    return kExitOk;
}

int cmd_train(const std::string& manifest_path, const std::string& ckpt_path,
              const std::string& loss_log, const CommonOpts& opts) {
    Settings settings = settings_for(opts);
    settings.train.checkpoint_path = ckpt_path;
    settings.train.loss_log_path = loss_log;
    const auto manifest = read_manifest(manifest_path);
    const auto pairs = load_patch_pairs(manifest);
    std::printf("training on %zu pairs for %d epochs (batch %d)\n", pairs.size(),
                settings.train.epochs, settings.train.batch_size);
    const auto result = train(pairs, settings.model, settings.train);
    if (!result.epoch_loss.empty())
        std::printf("final epoch mean chamfer: %.6g\n", result.epoch_loss.back());
    std::printf("checkpoint written to %s\n", ckpt_path.c_str());
    return kExitOk;
}

int cmd_upsample(const std::string& in_path, const std::string& ckpt_path, int ratio,
                 const std::string& out_path) {
    const auto ckpt = load_checkpoint(ckpt_path);
    const int model_ratio = ckpt.config.ratio;
    int passes = 1;
    if (ratio == model_ratio) {
        passes = 1;
    } else if (model_ratio > 1 && ratio == model_ratio * model_ratio) {
        passes = 2;  // chain the model twice for the squared ratio
    } else {
        std::fprintf(stderr,
                     "upsample: requested ratio %d is neither the model ratio %d nor its "
                     "square\n",
                     ratio, model_ratio);
        return kExitUsage;
    }
    PointCloud cloud = read_xyz(in_path);
    for (int pass = 0; pass < passes; ++pass)
        cloud = upsample_cloud(cloud, ckpt.params, ckpt.config);
    write_xyz(out_path, cloud);
    std::printf("wrote %lld points to %s\n", static_cast<long long>(cloud.size()),
                out_path.c_str());
    return kExitOk;
}

int cmd_eval(const std::string& pred_path, const std::string& gt_path,
             const std::string& mesh_path, const std::string& ckpt_path,
             const std::string& csv_path) {
    const PointCloud pred = read_xyz(pred_path);
    const PointCloud gt = read_xyz(gt_path);
    Mesh mesh;
    const Mesh* mesh_ptr = nullptr;
    if (!mesh_path.empty()) {
        mesh = read_off(mesh_path);
        mesh_ptr = &mesh;
    }
    std::int64_t params = 0;
    double time_ms = 0.0;
    if (!ckpt_path.empty()) {
        const auto ckpt = load_checkpoint(ckpt_path);
        params = param_count(ckpt.params);
        time_ms = time_forward_ms(ckpt.params, ckpt.config);
    }
    const MetricsReport report = evaluate(pred, gt, mesh_ptr, params, time_ms);
    std::fputs(report.display().c_str(), stdout);
    if (!csv_path.empty()) write_metrics_csv(csv_path, {report});
    return kExitOk;
}

int cmd_params(const CommonOpts& opts) {
    Settings settings = settings_for(opts);
    const auto params = init_params(settings.model, 0);
    std::printf("%lld\n", static_cast<long long>(param_count(params)));
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"point cloud upsampling toolkit"};
    app.require_subcommand(1);
    CommonOpts common;

    auto* gen = app.add_subcommand("gen-data", "generate patch pairs from meshes");
    std::string mesh_dir, out_dir;
    int synthetic_count = 0;
    std::uint64_t seed = 0;
    gen->add_option("--meshes", mesh_dir, "directory of OFF meshes");
    gen->add_option("--out", out_dir, "output dataset directory")->required();
    gen->add_option("--synthetic", synthetic_count,
                    "generate this many synthetic meshes instead of reading --meshes");
    gen->add_option("--seed", seed, "generation seed");
    gen->add_option("--config", common.config_path, "key = value settings file");

    auto* tr = app.add_subcommand("train", "train on a generated dataset");
    std::string manifest_path, ckpt_out = "model.ckpt", loss_log;
    tr->add_option("--manifest", manifest_path, "dataset manifest.json")->required();
    tr->add_option("--out", ckpt_out, "checkpoint output path");
    tr->add_option("--loss-log", loss_log, "per-epoch loss CSV path");
    tr->add_option("--config", common.config_path, "key = value settings file");

    auto* up = app.add_subcommand("upsample", "upsample an XYZ cloud");
    std::string in_path, ckpt_path, out_path;
    int ratio = 4;
    up->add_option("--in", in_path, "input XYZ file")->required();
    up->add_option("--ckpt", ckpt_path, "model checkpoint")->required();
    up->add_option("--ratio", ratio, "upsampling ratio (model ratio or its square)");
    up->add_option("--out", out_path, "output XYZ file")->required();

    auto* ev = app.add_subcommand("eval", "evaluate a predicted cloud against ground truth");
    std::string pred_path, gt_path, mesh_path, eval_ckpt, csv_path;
    ev->add_option("--pred", pred_path, "predicted XYZ file")->required();
    ev->add_option("--gt", gt_path, "ground-truth XYZ file")->required();
    ev->add_option("--mesh", mesh_path, "ground-truth OFF mesh for P2F");
    ev->add_option("--ckpt", eval_ckpt, "checkpoint for the params/time columns");
    ev->add_option("--csv", csv_path, "write the report as CSV");

    auto* pc = app.add_subcommand("params", "print the model parameter count");
    pc->add_option("--config", common.config_path, "key = value settings file");

    app.add_subcommand("selfcheck", "run the oracle/gradient property suite");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (gen->parsed()) return cmd_gen_data(mesh_dir, out_dir, synthetic_count, seed, common);
        if (tr->parsed()) return cmd_train(manifest_path, ckpt_out, loss_log, common);
        if (up->parsed()) return cmd_upsample(in_path, ckpt_path, ratio, out_path);
        if (ev->parsed()) return cmd_eval(pred_path, gt_path, mesh_path, eval_ckpt, csv_path);
        if (pc->parsed()) return cmd_params(common);
        return run_selfcheck(std::cout) == 0 ? kExitOk : kExitNumerical;
    } catch (const NumericalError& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return kExitNumerical;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    } catch (const ArgumentError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitData;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitData;
    }
}
