#pragma once

#include <functional>
#include <string>
#include <vector>

#include "pugcn/upsamplers.hpp"

namespace pugcn {

struct ModelConfig {
    int ratio = 4;
    int num_inception = 2;
    UpsamplerVariant upsampler = UpsamplerVariant::NodeShuffle;
    int embed_channels = 32;      // embedding GCN output width
    int bottleneck_channels = 32; // inception bottleneck width
    int growth = 32;              // dense block growth rate
    int k = 20;                   // graph kernel size
    int dilation1 = 1;
    int dilation2 = 2;
    int compress_channels = 32;   // upsampler feature width

    // width of every inception block output (the residual sum operand)
    int feature_width() const {
        return 2 * (bottleneck_channels + 3 * growth) + bottleneck_channels + embed_channels;
    }
    // smallest usable cloud: the widest dilated graph plus the query point
    int min_points() const { return k * std::max(dilation1, dilation2) + 1; }

    void validate() const;
};

struct ModelParams {
    EdgeConvParams embed;
    std::vector<InceptionParams> inception;
    TensorPtr up_bottleneck_w, up_bottleneck_b;
    UpsamplerParams upsampler;
    TensorPtr compress1_w, compress1_b;
    TensorPtr compress2_w, compress2_b;
    TensorPtr recon1_w, recon1_b;
    TensorPtr recon2_w, recon2_b;

    // Visits every parameter tensor in a fixed order with a stable name.
    void for_each(const std::function<void(const std::string&, TensorPtr&)>& fn);
    void for_each(const std::function<void(const std::string&, const TensorPtr&)>& fn) const;
};

// Glorot-uniform weights, zero biases; deterministic per seed.
ModelParams init_params(const ModelConfig& cfg, std::uint64_t seed);

std::int64_t param_count(const ModelParams& params);

TensorPtr cloud_to_tensor(const PointCloud& cloud);
PointCloud tensor_to_cloud(const TensorPtr& t);

// N x 3 -> (r*N) x 3. Differentiable when run under an active tape.
TensorPtr pugcn_forward(const PointCloud& cloud, const ModelParams& params,
                        const ModelConfig& cfg);
PointCloud upsample_patch(const PointCloud& cloud, const ModelParams& params,
                          const ModelConfig& cfg);

}  // namespace pugcn
