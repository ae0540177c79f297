#pragma once

#include "pugcn/graph_layers.hpp"

namespace pugcn {

enum class UpsamplerVariant { NodeShuffle, MlpShuffle, Duplicate };

const char* to_string(UpsamplerVariant v);
UpsamplerVariant upsampler_variant_from_string(const std::string& name);

// Feature-space expansion N x C -> r*N x C. Output rows [i*r, (i+1)*r) are the
// r children of input point i for every variant.
struct UpsamplerParams {
    UpsamplerVariant variant = UpsamplerVariant::NodeShuffle;
    int ratio = 4;

    EdgeConvParams expansion;          // NodeShuffle: C -> r*C via one GCN layer
    TensorPtr mlp_w, mlp_b;            // MlpShuffle: C -> r*C per point
    TensorPtr codes;                   // Duplicate: [r x 2] learned replica codes
    TensorPtr compress_w, compress_b;  // Duplicate: (C+2) -> C
};

TensorPtr node_shuffle(const TensorPtr& x, const NeighborIndex& nbrs, const UpsamplerParams& p);
TensorPtr mlp_shuffle(const TensorPtr& x, const UpsamplerParams& p);
TensorPtr duplicate_upsample(const TensorPtr& x, const UpsamplerParams& p);
// Duplicate's pre-compression stage: r*N x (C+2) rows [x_i || code_s].
TensorPtr duplicate_expand(const TensorPtr& x, const UpsamplerParams& p);

// Dispatch on p.variant; nbrs is only consulted by NodeShuffle.
TensorPtr upsample_features(const TensorPtr& x, const NeighborIndex* nbrs,
                            const UpsamplerParams& p);

}  // namespace pugcn
