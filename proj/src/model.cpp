#include "pugcn/model.hpp"

#include <cmath>

namespace pugcn {

void ModelConfig::validate() const {
    if (ratio < 1) throw ConfigError("ModelConfig: ratio must be >= 1");
    if (num_inception < 1) throw ConfigError("ModelConfig: num_inception must be >= 1");
    if (embed_channels < 1 || bottleneck_channels < 1 || growth < 1 || compress_channels < 1)
        throw ConfigError("ModelConfig: channel widths must be positive");
    if (k < 1 || dilation1 < 1 || dilation2 < 1)
        throw ConfigError("ModelConfig: k and dilations must be >= 1");
    if (num_inception > 1 && embed_channels != bottleneck_channels)
        throw ConfigError("ModelConfig: stacked inception blocks need embed_channels == "
                          "bottleneck_channels so the residual sum operands match");
}

namespace {

struct GlorotInit {
    Rng rng;

    explicit GlorotInit(std::uint64_t seed) : rng(seed) {}

    TensorPtr weight(std::int64_t fan_in, std::int64_t fan_out) {
        const double a = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
        std::vector<double> v(fan_in * fan_out);
        for (auto& x : v) x = rng.uniform(-a, a);
        return Tensor::create(Shape(fan_in, fan_out), std::move(v), true);
    }
    TensorPtr bias(std::int64_t n) { return Tensor::zeros(Shape(n), true); }

    EdgeConvParams edge_conv(std::int64_t cin, std::int64_t cout) {
        return {weight(2 * cin, cout), bias(cout)};
    }
    DenseGcnParams dense_block(std::int64_t cin, std::int64_t growth, int k, int d) {
        DenseGcnParams p;
        p.k = k;
        p.dilation = d;
        p.layers[0] = edge_conv(cin, growth);
        p.layers[1] = edge_conv(cin + growth, growth);
        p.layers[2] = edge_conv(cin + 2 * growth, growth);
        return p;
    }
};

}  // namespace

ModelParams init_params(const ModelConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    GlorotInit init(seed);
    ModelParams params;
    params.embed = init.edge_conv(3, cfg.embed_channels);

    std::int64_t cin = cfg.embed_channels;
    for (int i = 0; i < cfg.num_inception; ++i) {
        InceptionParams block;
        block.bottleneck_w = init.weight(cin, cfg.bottleneck_channels);
        block.bottleneck_b = init.bias(cfg.bottleneck_channels);
        block.branch1 = init.dense_block(cfg.bottleneck_channels, cfg.growth, cfg.k, cfg.dilation1);
        block.branch2 = init.dense_block(cfg.bottleneck_channels, cfg.growth, cfg.k, cfg.dilation2);
        block.skip_compressed = i > 0;
        params.inception.push_back(std::move(block));
        cin = cfg.feature_width();
    }

    const std::int64_t c = cfg.compress_channels;
    params.up_bottleneck_w = init.weight(cfg.feature_width(), c);
    params.up_bottleneck_b = init.bias(c);

    params.upsampler.variant = cfg.upsampler;
    params.upsampler.ratio = cfg.ratio;
    switch (cfg.upsampler) {
        case UpsamplerVariant::NodeShuffle:
            params.upsampler.expansion = init.edge_conv(c, cfg.ratio * c);
            break;
        case UpsamplerVariant::MlpShuffle:
            params.upsampler.mlp_w = init.weight(c, cfg.ratio * c);
            params.upsampler.mlp_b = init.bias(cfg.ratio * c);
            break;
        case UpsamplerVariant::Duplicate:
            params.upsampler.codes = init.weight(cfg.ratio, 2);
            params.upsampler.compress_w = init.weight(c + 2, c);
            params.upsampler.compress_b = init.bias(c);
            break;
    }

    params.compress1_w = init.weight(c, c);
    params.compress1_b = init.bias(c);
    params.compress2_w = init.weight(c, c);
    params.compress2_b = init.bias(c);
    params.recon1_w = init.weight(c, c);
    params.recon1_b = init.bias(c);
    params.recon2_w = init.weight(c, 3);
    params.recon2_b = init.bias(3);
    return params;
}

void ModelParams::for_each(const std::function<void(const std::string&, TensorPtr&)>& fn) {
    fn("embed.w", embed.W);
    fn("embed.b", embed.b);
    for (std::size_t i = 0; i < inception.size(); ++i) {
        const std::string prefix = strformat("inception%zu.", i + 1);
        auto& block = inception[i];
        fn(prefix + "bottleneck.w", block.bottleneck_w);
        fn(prefix + "bottleneck.b", block.bottleneck_b);
        for (int branch = 0; branch < 2; ++branch) {
            auto& dense = branch == 0 ? block.branch1 : block.branch2;
            for (int layer = 0; layer < 3; ++layer) {
                const std::string base =
                    strformat("%sbranch%d.layer%d.", prefix.c_str(), branch + 1, layer + 1);
                fn(base + "w", dense.layers[layer].W);
                fn(base + "b", dense.layers[layer].b);
            }
        }
    }
    fn("up_bottleneck.w", up_bottleneck_w);
    fn("up_bottleneck.b", up_bottleneck_b);
    switch (upsampler.variant) {
        case UpsamplerVariant::NodeShuffle:
            fn("upsampler.expansion.w", upsampler.expansion.W);
            fn("upsampler.expansion.b", upsampler.expansion.b);
            break;
        case UpsamplerVariant::MlpShuffle:
            fn("upsampler.mlp.w", upsampler.mlp_w);
            fn("upsampler.mlp.b", upsampler.mlp_b);
            break;
        case UpsamplerVariant::Duplicate:
            fn("upsampler.codes", upsampler.codes);
            fn("upsampler.compress.w", upsampler.compress_w);
            fn("upsampler.compress.b", upsampler.compress_b);
            break;
    }
    fn("compress1.w", compress1_w);
    fn("compress1.b", compress1_b);
    fn("compress2.w", compress2_w);
    fn("compress2.b", compress2_b);
    fn("recon1.w", recon1_w);
    fn("recon1.b", recon1_b);
    fn("recon2.w", recon2_w);
    fn("recon2.b", recon2_b);
}

void ModelParams::for_each(
    const std::function<void(const std::string&, const TensorPtr&)>& fn) const {
    const_cast<ModelParams*>(this)->for_each(
        [&](const std::string& name, TensorPtr& t) { fn(name, t); });
}

std::int64_t param_count(const ModelParams& params) {
    std::int64_t count = 0;
    params.for_each([&](const std::string&, const TensorPtr& t) { count += t->numel(); });
    return count;
}

TensorPtr cloud_to_tensor(const PointCloud& cloud) {
    std::vector<double> v;
    v.reserve(cloud.size() * 3);
    for (const Vec3& p : cloud.points) {
        v.push_back(p.x);
        v.push_back(p.y);
        v.push_back(p.z);
    }
    return Tensor::create(Shape(cloud.size(), 3), std::move(v));
}

PointCloud tensor_to_cloud(const TensorPtr& t) {
    if (t->shape().rank() != 2 || t->shape().dim(1) != 3)
        throw DimensionError(strformat("tensor_to_cloud: expected Nx3, got %s",
                                       t->shape().str().c_str()));
    PointCloud cloud;
    cloud.points.reserve(t->shape().dim(0));
    for (std::int64_t i = 0; i < t->shape().dim(0); ++i)
        cloud.points.push_back({t->at(i, 0), t->at(i, 1), t->at(i, 2)});
    return cloud;
}

TensorPtr pugcn_forward(const PointCloud& cloud, const ModelParams& params,
                        const ModelConfig& cfg) {
    cfg.validate();
    if (cloud.size() < cfg.min_points())
        throw ArgumentError(strformat("pugcn_forward: %lld points, need at least %d for the "
                                      "k=%d dilated graphs",
                                      static_cast<long long>(cloud.size()), cfg.min_points(),
                                      cfg.k));

    auto coords = cloud_to_tensor(cloud);
    auto embed_graph = dilated_neighbors(cloud, cfg.k, 1);
    auto features = edge_conv(coords, embed_graph, params.embed);

    // inception blocks chained, outputs combined by residual sum
    TensorPtr combined;
    TensorPtr cur = features;
    for (const auto& block : params.inception) {
        cur = inception_densegcn(cur, cloud, block);
        combined = combined ? add(combined, cur) : cur;
    }

    auto squeezed = relu(linear(combined, params.up_bottleneck_w, params.up_bottleneck_b));
    auto expanded = upsample_features(squeezed, &embed_graph, params.upsampler);
    auto compressed = linear(relu(linear(expanded, params.compress1_w, params.compress1_b)),
                             params.compress2_w, params.compress2_b);
    auto hidden = relu(linear(compressed, params.recon1_w, params.recon1_b));
    return linear(hidden, params.recon2_w, params.recon2_b);  // no final activation
}

PointCloud upsample_patch(const PointCloud& cloud, const ModelParams& params,
                          const ModelConfig& cfg) {
    return tensor_to_cloud(pugcn_forward(cloud, params, cfg));
}

}  // namespace pugcn
