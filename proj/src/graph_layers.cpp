#include "pugcn/graph_layers.hpp"

namespace pugcn {

TensorPtr edge_conv(const TensorPtr& x, const NeighborIndex& nbrs, const EdgeConvParams& p) {
    if (x->shape().rank() != 2)
        throw DimensionError(strformat("edge_conv: expected NxC input, got %s",
                                       x->shape().str().c_str()));
    if (x->shape().dim(1) != p.in_channels())
        throw DimensionError(strformat("edge_conv: input has %lld channels, params expect %lld",
                                       static_cast<long long>(x->shape().dim(1)),
                                       static_cast<long long>(p.in_channels())));
    auto center = tile_neighbors(x, nbrs.k);
    auto neighbor = gather_neighbors(x, nbrs);
    auto edge = concat_channels({center, sub(neighbor, center)});
    return max_over_neighbors(relu(linear(edge, p.W, p.b)));
}

TensorPtr dense_gcn_block(const TensorPtr& x, const NeighborIndex& nbrs,
                          const DenseGcnParams& p) {
    if (nbrs.k != p.k || nbrs.dilation != p.dilation)
        throw ContractError(strformat("dense_gcn_block: graph (k=%d,d=%d) does not match params "
                                      "(k=%d,d=%d)",
                                      nbrs.k, nbrs.dilation, p.k, p.dilation));
    auto h1 = edge_conv(x, nbrs, p.layers[0]);
    auto h2 = edge_conv(concat_channels({x, h1}), nbrs, p.layers[1]);
    auto h3 = edge_conv(concat_channels({x, h1, h2}), nbrs, p.layers[2]);
    return concat_channels({x, h1, h2, h3});
}

TensorPtr inception_densegcn(const TensorPtr& x, const PointCloud& cloud,
                             const InceptionParams& p) {
    if (x->shape().rank() != 2 || x->shape().dim(0) != cloud.size())
        throw DimensionError(strformat("inception_densegcn: features %s do not match %lld points",
                                       x->shape().str().c_str(),
                                       static_cast<long long>(cloud.size())));
    const int needed = std::max(p.branch1.k * p.branch1.dilation,
                                p.branch2.k * p.branch2.dilation);
    if (cloud.size() <= needed)
        throw ArgumentError(strformat("inception_densegcn: %lld points, but k*d=%d neighbors "
                                      "are required",
                                      static_cast<long long>(cloud.size()), needed));

    auto z = relu(linear(x, p.bottleneck_w, p.bottleneck_b));
    // the graph is built once per branch and shared by that branch's layers
    auto nbrs1 = dilated_neighbors(cloud, p.branch1.k, p.branch1.dilation);
    auto nbrs2 = dilated_neighbors(cloud, p.branch2.k, p.branch2.dilation);
    auto y1 = dense_gcn_block(z, nbrs1, p.branch1);
    auto y2 = dense_gcn_block(z, nbrs2, p.branch2);
    auto pooled = tile_rows(global_max_pool(z), cloud.size());
    return concat_channels({y1, y2, pooled, p.skip_compressed ? z : x});
}

}  // namespace pugcn
