#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "pugcn/common.hpp"
#include "pugcn/neighbor_index.hpp"

namespace pugcn {

// Shape of a dense tensor, rank 1..3.
class Shape {
public:
    Shape() = default;
    explicit Shape(std::int64_t n) : rank_(1), d_{n, 1, 1} {}
    Shape(std::int64_t n, std::int64_t c) : rank_(2), d_{n, c, 1} {}
    Shape(std::int64_t n, std::int64_t k, std::int64_t c) : rank_(3), d_{n, k, c} {}

    int rank() const { return rank_; }
    std::int64_t dim(int i) const { return d_[i]; }
    std::int64_t numel() const {
        std::int64_t p = 1;
        for (int i = 0; i < rank_; ++i) p *= d_[i];
        return p;
    }
    // Size of the trailing axis; the axis all channel-wise ops act on.
    std::int64_t channels() const { return d_[rank_ - 1]; }
    // Product of all leading axes (rows seen by per-channel ops).
    std::int64_t rows() const { return numel() / channels(); }

    bool operator==(const Shape& o) const {
        if (rank_ != o.rank_) return false;
        for (int i = 0; i < rank_; ++i)
            if (d_[i] != o.d_[i]) return false;
        return true;
    }
    bool operator!=(const Shape& o) const { return !(*this == o); }

    std::string str() const {
        std::string s = "[";
        for (int i = 0; i < rank_; ++i) {
            if (i) s += "x";
            s += std::to_string(d_[i]);
        }
        return s + "]";
    }

private:
    int rank_ = 1;
    std::array<std::int64_t, 3> d_{1, 1, 1};
};

class Tensor;
using TensorPtr = std::shared_ptr<Tensor>;

// Dense row-major 64-bit tensor. Values are immutable after construction;
// the grad slot is filled in by Tape::backward. Construction rejects
// non-finite values.
class Tensor {
public:
    Tensor(Shape shape, std::vector<double> values, bool requires_grad = false);

    static TensorPtr create(Shape shape, std::vector<double> values, bool requires_grad = false);
    static TensorPtr zeros(Shape shape, bool requires_grad = false);
    static TensorPtr full(Shape shape, double value, bool requires_grad = false);
    static TensorPtr scalar(double value, bool requires_grad = false);

    const Shape& shape() const { return shape_; }
    std::int64_t numel() const { return shape_.numel(); }
    const std::vector<double>& values() const { return values_; }
    double operator[](std::int64_t i) const { return values_[i]; }
    double at(std::int64_t r, std::int64_t c) const { return values_[r * shape_.dim(1) + c]; }
    double at(std::int64_t n, std::int64_t j, std::int64_t c) const {
        return values_[(n * shape_.dim(1) + j) * shape_.dim(2) + c];
    }

    bool requires_grad() const { return requires_grad_; }
    bool has_grad() const { return !grad_.empty(); }
    const std::vector<double>& grad() const {
        if (grad_.empty()) throw ContractError("Tensor: grad accessed before backward");
        return grad_;
    }

    // Backward plumbing: grad buffer, zero-initialized on first access.
    std::vector<double>& accum_grad() {
        if (grad_.empty()) grad_.assign(values_.size(), 0.0);
        return grad_;
    }
    void clear_grad() { grad_.clear(); }

private:
    Shape shape_;
    std::vector<double> values_;
    std::vector<double> grad_;
    bool requires_grad_ = false;
};

// Reverse-mode tape. Ops record themselves on the thread-local active tape
// (if any); backward() replays the records in reverse. One tape is
// single-threaded; independent tapes on different threads do not interact.
class Tape {
public:
    struct Record {
        std::vector<TensorPtr> inputs;
        TensorPtr output;
        std::function<void()> backward;  // reads output->grad, accumulates into inputs
    };

    // RAII activation of a tape on the current thread.
    class Scope {
    public:
        explicit Scope(Tape& tape);
        ~Scope();
        Scope(const Scope&) = delete;
        Scope& operator=(const Scope&) = delete;

    private:
        Tape* prev_;
    };

    static Tape* current();

    void record(std::vector<TensorPtr> inputs, TensorPtr output, std::function<void()> backward);

    // Populates grad for every tensor on the tape with d(loss)/d(tensor).
    // Tensors recorded but not on a path to the loss get exact zeros.
    void backward(const TensorPtr& loss);

    std::size_t size() const { return records_.size(); }
    void clear();

private:
    std::vector<Record> records_;
};

// ---- differentiable operations -------------------------------------------

// out[n,j] = sum_i x[n,i] * W[i,j] + b[j]; x may be rank 2 or 3 (the linear
// map is applied along the trailing axis).
TensorPtr linear(const TensorPtr& x, const TensorPtr& W, const TensorPtr& b);

TensorPtr relu(const TensorPtr& x);

// Concatenate along the trailing axis; all leading extents must match.
TensorPtr concat_channels(const std::vector<TensorPtr>& xs);

// out[n,j,:] = x[idx[n,j],:]; backward scatter-adds into source rows.
TensorPtr gather_neighbors(const TensorPtr& x, const NeighborIndex& idx);

// out[n,j,:] = x[n,:] for j in [0,k): center features repeated per neighbor slot.
TensorPtr tile_neighbors(const TensorPtr& x, int k);

// Channel-wise max over the middle axis; gradient routed to the argmax slot,
// ties to the lowest j.
TensorPtr max_over_neighbors(const TensorPtr& x);

// Channel-wise max over all rows -> 1xC; ties to the lowest row.
TensorPtr global_max_pool(const TensorPtr& x);

// Repeat a 1xC row n times -> nxC; backward sums over rows.
TensorPtr tile_rows(const TensorPtr& x, std::int64_t n);

// Rows [begin, begin+count) of a rank-2 tensor.
TensorPtr slice_rows(const TensorPtr& x, std::int64_t begin, std::int64_t count);

// N x (r*C) -> (r*N) x C; output row i*r+s takes channel group s of input
// row i. Backward (and inverse_shuffle) apply the exact inverse permutation.
TensorPtr periodic_shuffle(const TensorPtr& x, int r);
TensorPtr inverse_shuffle(const TensorPtr& x, int r);

TensorPtr add(const TensorPtr& a, const TensorPtr& b);
TensorPtr sub(const TensorPtr& a, const TensorPtr& b);
TensorPtr mul(const TensorPtr& a, const TensorPtr& b);  // elementwise, same shape
TensorPtr scale(const TensorPtr& x, double s);

// Sum of all entries -> scalar (shape [1]).
TensorPtr sum(const TensorPtr& x);

// Max over coordinates of |analytic - numeric| / max(1e-8, |analytic| + |numeric|)
// comparing the tape gradient of f at x against central finite differences.
double grad_check(const std::function<TensorPtr(const TensorPtr&)>& f, const TensorPtr& x,
                  double eps);

}  // namespace pugcn
