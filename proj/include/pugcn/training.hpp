#pragma once

#include <map>
#include <string>
#include <vector>

#include "pugcn/model.hpp"
#include "pugcn/patches.hpp"

namespace pugcn {

struct AdamConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

struct AdamState {
    struct Moments {
        std::vector<double> m, v;
    };
    std::vector<std::pair<std::string, Moments>> slots;  // ModelParams::for_each order
    std::int64_t step = 0;
};

AdamState init_adam_state(const ModelParams& params);

// Bias-corrected update of one parameter vector; `step` counts from 1.
void adam_update(std::vector<double>& values, const std::vector<double>& grads,
                 AdamState::Moments& moments, std::int64_t step, const AdamConfig& cfg);

using GradMap = std::map<std::string, std::vector<double>>;

// One optimizer step over every model parameter. Throws ContractError naming
// the parameter if its gradient is missing.
void adam_step(ModelParams& params, const GradMap& grads, AdamState& state,
               const AdamConfig& cfg);

struct TrainConfig {
    AdamConfig adam;
    int batch_size = 64;
    int epochs = 100;
    bool aug_rotate = true;
    bool aug_scale = true;
    bool aug_jitter = true;
    std::uint64_t seed = 0;
    int checkpoint_every = 10;        // epochs; <= 0 disables periodic checkpoints
    std::string checkpoint_path;      // empty: keep the result in memory only
    std::string loss_log_path;        // empty: no CSV written

    void validate() const;
};

struct TrainResult {
    ModelParams params;
    AdamState state;
    std::vector<double> epoch_loss;  // mean per-pair Chamfer per epoch
};

// Patch-pair training loop: seeded shuffle per epoch, shared augmentation per
// pair, Chamfer loss averaged over each batch, Adam update per batch.
TrainResult train(const std::vector<PatchPair>& pairs, const ModelConfig& model_cfg,
                  const TrainConfig& train_cfg);

void write_loss_log(const std::string& path, const std::vector<double>& epoch_loss);

// ---- checkpoints -----------------------------------------------------------

struct Checkpoint {
    ModelConfig config;
    ModelParams params;
    AdamState state;
};

// Binary container: "PUGC" magic, format version, config block, then one
// record per tensor (name, rank, extents, little-endian doubles).
void save_checkpoint(const ModelParams& params, const AdamState& state, const ModelConfig& cfg,
                     const std::string& path);
// `expected`, when given, must match the stored config exactly.
Checkpoint load_checkpoint(const std::string& path, const ModelConfig* expected = nullptr);

}  // namespace pugcn
