#pragma once

#include <array>

#include "pugcn/geometry.hpp"
#include "pugcn/tensor.hpp"

namespace pugcn {

// Single graph-convolution layer over edge features (center || neighbor - center),
// aggregated per point by channel-wise max.
struct EdgeConvParams {
    TensorPtr W;  // [2*Cin x Cout]
    TensorPtr b;  // [Cout]

    std::int64_t in_channels() const { return W->shape().dim(0) / 2; }
    std::int64_t out_channels() const { return W->shape().dim(1); }
};

TensorPtr edge_conv(const TensorPtr& x, const NeighborIndex& nbrs, const EdgeConvParams& p);

// Three densely connected EdgeConv layers with growth rate c: layer i consumes
// [x || h_1 || ... || h_{i-1}] and the block returns [x || h_1 || h_2 || h_3].
struct DenseGcnParams {
    std::array<EdgeConvParams, 3> layers;
    int k = 20;
    int dilation = 1;

    std::int64_t growth() const { return layers[0].out_channels(); }
};

TensorPtr dense_gcn_block(const TensorPtr& x, const NeighborIndex& nbrs, const DenseGcnParams& p);

// Bottleneck MLP feeding two parallel DenseGCN branches (dilations 1 and 2)
// plus a tiled global max pool; the outputs are concatenated with a skip
// path. The skip is the raw input by default; blocks consuming an already
// wide feature map concatenate the compressed bottleneck output instead so
// stacked blocks keep a fixed output width.
struct InceptionParams {
    TensorPtr bottleneck_w;  // [Cin x Cb]
    TensorPtr bottleneck_b;  // [Cb]
    DenseGcnParams branch1;  // dilation 1
    DenseGcnParams branch2;  // dilation 2
    bool skip_compressed = false;

    std::int64_t bottleneck_channels() const { return bottleneck_w->shape().dim(1); }
    std::int64_t out_channels(std::int64_t cin) const {
        const std::int64_t cb = bottleneck_channels();
        const std::int64_t dense = cb + 3 * branch1.growth();
        return 2 * dense + cb + (skip_compressed ? cb : cin);
    }
};

TensorPtr inception_densegcn(const TensorPtr& x, const PointCloud& cloud,
                             const InceptionParams& p);

}  // namespace pugcn
