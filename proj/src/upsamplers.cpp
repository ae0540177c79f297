#include "pugcn/upsamplers.hpp"

namespace pugcn {

const char* to_string(UpsamplerVariant v) {
    switch (v) {
        case UpsamplerVariant::NodeShuffle: return "nodeshuffle";
        case UpsamplerVariant::MlpShuffle: return "mlpshuffle";
        case UpsamplerVariant::Duplicate: return "duplicate";
    }
    return "unknown";
}

UpsamplerVariant upsampler_variant_from_string(const std::string& name) {
    if (name == "nodeshuffle") return UpsamplerVariant::NodeShuffle;
    if (name == "mlpshuffle") return UpsamplerVariant::MlpShuffle;
    if (name == "duplicate") return UpsamplerVariant::Duplicate;
    throw ConfigError(strformat("unknown upsampler variant \"%s\"", name.c_str()));
}

namespace {

void check_variant(const UpsamplerParams& p, UpsamplerVariant expected, const char* op) {
    if (p.variant != expected)
        throw ContractError(strformat("%s: params are for variant %s", op,
                                      to_string(p.variant)));
    if (p.ratio < 1) throw ArgumentError(strformat("%s: ratio must be >= 1", op));
}

void check_expanded(const TensorPtr& x, std::int64_t expanded_c, int ratio, const char* op) {
    if (expanded_c % ratio != 0 || expanded_c / ratio != x->shape().dim(1))
        throw DimensionError(strformat(
            "%s: expansion to %lld channels is not ratio %d times the %lld input channels", op,
            static_cast<long long>(expanded_c), ratio,
            static_cast<long long>(x->shape().dim(1))));
}

}  // namespace

TensorPtr node_shuffle(const TensorPtr& x, const NeighborIndex& nbrs, const UpsamplerParams& p) {
    check_variant(p, UpsamplerVariant::NodeShuffle, "node_shuffle");
    check_expanded(x, p.expansion.out_channels(), p.ratio, "node_shuffle");
    return periodic_shuffle(edge_conv(x, nbrs, p.expansion), p.ratio);
}

TensorPtr mlp_shuffle(const TensorPtr& x, const UpsamplerParams& p) {
    check_variant(p, UpsamplerVariant::MlpShuffle, "mlp_shuffle");
    check_expanded(x, p.mlp_w->shape().dim(1), p.ratio, "mlp_shuffle");
    return periodic_shuffle(relu(linear(x, p.mlp_w, p.mlp_b)), p.ratio);
}

TensorPtr duplicate_expand(const TensorPtr& x, const UpsamplerParams& p) {
    check_variant(p, UpsamplerVariant::Duplicate, "duplicate_expand");
    if (p.codes->shape().dim(0) != p.ratio)
        throw DimensionError(strformat("duplicate_expand: %lld codes for ratio %d",
                                       static_cast<long long>(p.codes->shape().dim(0)), p.ratio));
    const std::int64_t n = x->shape().dim(0);
    std::vector<TensorPtr> replicas;
    replicas.reserve(p.ratio);
    for (int s = 0; s < p.ratio; ++s)
        replicas.push_back(concat_channels({x, tile_rows(slice_rows(p.codes, s, 1), n)}));
    return periodic_shuffle(concat_channels(replicas), p.ratio);
}

TensorPtr duplicate_upsample(const TensorPtr& x, const UpsamplerParams& p) {
    auto expanded = duplicate_expand(x, p);
    if (p.compress_w->shape().dim(0) != expanded->shape().dim(1) ||
        p.compress_w->shape().dim(1) != x->shape().dim(1))
        throw DimensionError(strformat("duplicate_upsample: compression %s does not map %lld+2 "
                                       "channels back to %lld",
                                       p.compress_w->shape().str().c_str(),
                                       static_cast<long long>(x->shape().dim(1)),
                                       static_cast<long long>(x->shape().dim(1))));
    return relu(linear(expanded, p.compress_w, p.compress_b));
}

TensorPtr upsample_features(const TensorPtr& x, const NeighborIndex* nbrs,
                            const UpsamplerParams& p) {
    switch (p.variant) {
        case UpsamplerVariant::NodeShuffle:
            if (!nbrs) throw ContractError("upsample_features: NodeShuffle needs a graph");
            return node_shuffle(x, *nbrs, p);
        case UpsamplerVariant::MlpShuffle: return mlp_shuffle(x, p);
        case UpsamplerVariant::Duplicate: return duplicate_upsample(x, p);
    }
    throw ContractError("upsample_features: unknown variant");
}

}  // namespace pugcn
