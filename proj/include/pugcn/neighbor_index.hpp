#pragma once

#include <cstdint>
#include <vector>

#include "pugcn/common.hpp"

namespace pugcn {

// N x k table of point indices defining a kNN graph. Row n lists the
// neighbors of point n sorted by ascending distance (ties by ascending
// index), as built by the geometry module.
struct NeighborIndex {
    std::int64_t n = 0;
    int k = 0;
    int dilation = 1;
    std::vector<std::int32_t> indices;  // row-major, n * k entries

    std::int32_t at(std::int64_t row, int j) const { return indices[row * k + j]; }

    void validate() const {
        if (static_cast<std::int64_t>(indices.size()) != n * k)
            throw ContractError(strformat("NeighborIndex: %lld rows x %d cols != %zu entries",
                                          static_cast<long long>(n), k, indices.size()));
        for (std::int64_t i = 0; i < n * k; ++i)
            if (indices[i] < 0 || indices[i] >= n)
                throw IndexError(strformat("NeighborIndex: entry (%lld,%lld) = %d out of [0,%lld)",
                                           static_cast<long long>(i / k), static_cast<long long>(i % k),
                                           indices[i], static_cast<long long>(n)));
    }
};

}  // namespace pugcn
