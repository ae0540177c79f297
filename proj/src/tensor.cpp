#include "pugcn/tensor.hpp"

#include <algorithm>
#include <unordered_set>
#include <cmath>
#include <cstring>

namespace pugcn {

namespace {

thread_local Tape* g_active_tape = nullptr;

void check_finite(const std::vector<double>& values) {
    for (std::size_t i = 0; i < values.size(); ++i)
        if (!std::isfinite(values[i]))
            throw NumericalError(strformat("Tensor: non-finite value %g at flat index %zu",
                                           values[i], i));
}

// Record an op on the active tape, if any.
void record(std::vector<TensorPtr> inputs, const TensorPtr& output, std::function<void()> backward) {
    if (Tape* t = Tape::current())
        t->record(std::move(inputs), output, std::move(backward));
}

}  // namespace

Tensor::Tensor(Shape shape, std::vector<double> values, bool requires_grad)
    : shape_(shape), values_(std::move(values)), requires_grad_(requires_grad) {
    if (static_cast<std::int64_t>(values_.size()) != shape_.numel())
        throw DimensionError(strformat("Tensor: %zu values for shape %s", values_.size(),
                                       shape_.str().c_str()));
    check_finite(values_);
}

TensorPtr Tensor::create(Shape shape, std::vector<double> values, bool requires_grad) {
    return std::make_shared<Tensor>(shape, std::move(values), requires_grad);
}

TensorPtr Tensor::zeros(Shape shape, bool requires_grad) {
    return create(shape, std::vector<double>(shape.numel(), 0.0), requires_grad);
}

TensorPtr Tensor::full(Shape shape, double value, bool requires_grad) {
    return create(shape, std::vector<double>(shape.numel(), value), requires_grad);
}

TensorPtr Tensor::scalar(double value, bool requires_grad) {
    return create(Shape(1), {value}, requires_grad);
}

Tape::Scope::Scope(Tape& tape) : prev_(g_active_tape) { g_active_tape = &tape; }
Tape::Scope::~Scope() { g_active_tape = prev_; }

Tape* Tape::current() { return g_active_tape; }

void Tape::record(std::vector<TensorPtr> inputs, TensorPtr output, std::function<void()> backward) {
    records_.push_back({std::move(inputs), std::move(output), std::move(backward)});
}

void Tape::clear() { records_.clear(); }

void Tape::backward(const TensorPtr& loss) {
    if (loss->numel() != 1)
        throw ContractError(strformat("Tape::backward: loss must be scalar, got shape %s",
                                      loss->shape().str().c_str()));
    // Reset every tensor the tape touched (once each) so disconnected
    // parameters end up with exact-zero gradients and stale grads from
    // earlier backward passes cannot leak in.
    std::unordered_set<Tensor*> seen;
    auto reset = [&](const TensorPtr& t) {
        if (seen.insert(t.get()).second) {
            auto& g = t->accum_grad();
            std::fill(g.begin(), g.end(), 0.0);
        }
    };
    for (auto& rec : records_) {
        reset(rec.output);
        for (auto& in : rec.inputs) reset(in);
    }
    reset(loss);
    loss->accum_grad()[0] = 1.0;
    for (auto it = records_.rbegin(); it != records_.rend(); ++it) it->backward();
}

// ---- op implementations ----------------------------------------------------

namespace {

// Row-major matmul with the output block held in registers; W rows are
// contiguous so the inner loops vectorize. `bias` may be null (zero init);
// with `accumulate` the block is added into `out` instead of stored.
void matmul_rows(const double* __restrict__ xv, const double* __restrict__ wv,
                 const double* __restrict__ bias, double* __restrict__ out, std::int64_t rows,
                 std::int64_t cin, std::int64_t cout, bool accumulate = false) {
    constexpr std::int64_t kBlock = 16;
    double acc[kBlock];
    for (std::int64_t n = 0; n < rows; ++n) {
        const double* xr = xv + n * cin;
        double* o = out + n * cout;
        for (std::int64_t j0 = 0; j0 < cout; j0 += kBlock) {
            const std::int64_t jn = std::min(kBlock, cout - j0);
            if (jn == kBlock) {
                for (std::int64_t j = 0; j < kBlock; ++j) acc[j] = bias ? bias[j0 + j] : 0.0;
                for (std::int64_t i = 0; i < cin; ++i) {
                    const double xi = xr[i];
                    const double* __restrict__ wr = wv + i * cout + j0;
                    for (std::int64_t j = 0; j < kBlock; ++j) acc[j] += xi * wr[j];
                }
                if (accumulate)
                    for (std::int64_t j = 0; j < kBlock; ++j) o[j0 + j] += acc[j];
                else
                    for (std::int64_t j = 0; j < kBlock; ++j) o[j0 + j] = acc[j];
            } else {
                for (std::int64_t j = 0; j < jn; ++j) acc[j] = bias ? bias[j0 + j] : 0.0;
                for (std::int64_t i = 0; i < cin; ++i) {
                    const double xi = xr[i];
                    const double* __restrict__ wr = wv + i * cout + j0;
                    for (std::int64_t j = 0; j < jn; ++j) acc[j] += xi * wr[j];
                }
                if (accumulate)
                    for (std::int64_t j = 0; j < jn; ++j) o[j0 + j] += acc[j];
                else
                    for (std::int64_t j = 0; j < jn; ++j) o[j0 + j] = acc[j];
            }
        }
    }
}

}  // namespace

TensorPtr linear(const TensorPtr& x, const TensorPtr& W, const TensorPtr& b) {
    if (W->shape().rank() != 2)
        throw DimensionError(strformat("linear: weight must be rank 2, got %s",
                                       W->shape().str().c_str()));
    const std::int64_t cin = W->shape().dim(0);
    const std::int64_t cout = W->shape().dim(1);
    if (x->shape().channels() != cin)
        throw DimensionError(strformat("linear: input %s has %lld channels, weight %s expects %lld",
                                       x->shape().str().c_str(),
                                       static_cast<long long>(x->shape().channels()),
                                       W->shape().str().c_str(), static_cast<long long>(cin)));
    if (b->shape().rank() != 1 || b->shape().dim(0) != cout)
        throw DimensionError(strformat("linear: bias %s does not match weight %s",
                                       b->shape().str().c_str(), W->shape().str().c_str()));

    const std::int64_t rows = x->shape().rows();
    std::vector<double> out(rows * cout);
    matmul_rows(x->values().data(), W->values().data(), b->values().data(), out.data(), rows,
                cin, cout);
    Shape os = x->shape().rank() == 2 ? Shape(x->shape().dim(0), cout)
                                      : Shape(x->shape().dim(0), x->shape().dim(1), cout);
    auto y = Tensor::create(os, std::move(out));
    record({x, W, b}, y, [x, W, b, y, rows, cin, cout]() {
        const double* __restrict__ g = y->grad().data();
        const double* __restrict__ xv = x->values().data();
        const double* __restrict__ wv = W->values().data();
        double* __restrict__ gw = W->accum_grad().data();
        double* __restrict__ gb = b->accum_grad().data();

        // dX = g * W^T, as a row-major matmul against the transposed weights
        std::vector<double> wt(cin * cout);
        for (std::int64_t i = 0; i < cin; ++i)
            for (std::int64_t j = 0; j < cout; ++j) wt[j * cin + i] = wv[i * cout + j];
        matmul_rows(g, wt.data(), nullptr, x->accum_grad().data(), rows, cout, cin,
                    /*accumulate=*/true);

        // dW = X^T * g, tiled so the accumulator block stays in registers
        // across the row sweep
        constexpr std::int64_t kTileI = 4, kTileJ = 8;
        double acc[kTileI][kTileJ];
        for (std::int64_t i0 = 0; i0 < cin; i0 += kTileI) {
            const std::int64_t in_count = std::min(kTileI, cin - i0);
            for (std::int64_t j0 = 0; j0 < cout; j0 += kTileJ) {
                const std::int64_t jn = std::min(kTileJ, cout - j0);
                for (std::int64_t ii = 0; ii < in_count; ++ii)
                    for (std::int64_t jj = 0; jj < jn; ++jj) acc[ii][jj] = 0.0;
                if (in_count == kTileI && jn == kTileJ) {
                    for (std::int64_t n = 0; n < rows; ++n) {
                        const double* __restrict__ xr = xv + n * cin + i0;
                        const double* __restrict__ gr = g + n * cout + j0;
                        for (std::int64_t ii = 0; ii < kTileI; ++ii)
                            for (std::int64_t jj = 0; jj < kTileJ; ++jj)
                                acc[ii][jj] += xr[ii] * gr[jj];
                    }
                } else {
                    for (std::int64_t n = 0; n < rows; ++n) {
                        const double* __restrict__ xr = xv + n * cin + i0;
                        const double* __restrict__ gr = g + n * cout + j0;
                        for (std::int64_t ii = 0; ii < in_count; ++ii)
                            for (std::int64_t jj = 0; jj < jn; ++jj)
                                acc[ii][jj] += xr[ii] * gr[jj];
                    }
                }
                for (std::int64_t ii = 0; ii < in_count; ++ii)
                    for (std::int64_t jj = 0; jj < jn; ++jj)
                        gw[(i0 + ii) * cout + j0 + jj] += acc[ii][jj];
            }
        }
        for (std::int64_t n = 0; n < rows; ++n) {
            const double* __restrict__ gr = g + n * cout;
            for (std::int64_t j = 0; j < cout; ++j) gb[j] += gr[j];
        }
    });
    return y;
}

TensorPtr relu(const TensorPtr& x) {
    std::vector<double> out(x->numel());
    const auto& v = x->values();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = v[i] > 0.0 ? v[i] : 0.0;
    auto y = Tensor::create(x->shape(), std::move(out));
    record({x}, y, [x, y]() {
        const double* g = y->grad().data();
        const auto& v = x->values();
        double* gx = x->accum_grad().data();
        // subgradient at exactly 0 is 0
        for (std::size_t i = 0; i < v.size(); ++i)
            if (v[i] > 0.0) gx[i] += g[i];
    });
    return y;
}

TensorPtr concat_channels(const std::vector<TensorPtr>& xs) {
    if (xs.empty()) throw ArgumentError("concat_channels: no inputs");
    const Shape& s0 = xs[0]->shape();
    std::int64_t total_c = 0;
    for (const auto& x : xs) {
        const Shape& s = x->shape();
        if (s.rank() != s0.rank() || s.rows() != s0.rows() ||
            (s.rank() == 3 && (s.dim(0) != s0.dim(0) || s.dim(1) != s0.dim(1))) ||
            (s.rank() == 2 && s.dim(0) != s0.dim(0)))
            throw DimensionError(strformat("concat_channels: leading extents differ, %s vs %s",
                                           s0.str().c_str(), s.str().c_str()));
        total_c += s.channels();
    }
    const std::int64_t rows = s0.rows();
    std::vector<double> out(rows * total_c);
    std::int64_t off = 0;
    for (const auto& x : xs) {
        const std::int64_t c = x->shape().channels();
        const double* v = x->values().data();
        for (std::int64_t n = 0; n < rows; ++n)
            std::memcpy(out.data() + n * total_c + off, v + n * c, c * sizeof(double));
        off += c;
    }
    Shape os = s0.rank() == 2 ? Shape(s0.dim(0), total_c) : Shape(s0.dim(0), s0.dim(1), total_c);
    auto y = Tensor::create(os, std::move(out));
    std::vector<TensorPtr> inputs = xs;
    record(inputs, y, [inputs, y, rows, total_c]() {
        const double* g = y->grad().data();
        std::int64_t off = 0;
        for (const auto& x : inputs) {
            const std::int64_t c = x->shape().channels();
            double* gx = x->accum_grad().data();
            for (std::int64_t n = 0; n < rows; ++n) {
                const double* gr = g + n * total_c + off;
                double* gxr = gx + n * c;
                for (std::int64_t i = 0; i < c; ++i) gxr[i] += gr[i];
            }
            off += c;
        }
    });
    return y;
}

TensorPtr gather_neighbors(const TensorPtr& x, const NeighborIndex& idx) {
    if (x->shape().rank() != 2)
        throw DimensionError(strformat("gather_neighbors: expected rank-2 input, got %s",
                                       x->shape().str().c_str()));
    const std::int64_t n = x->shape().dim(0);
    const std::int64_t c = x->shape().dim(1);
    if (idx.n != n)
        throw DimensionError(strformat("gather_neighbors: index has %lld rows, input %lld",
                                       static_cast<long long>(idx.n), static_cast<long long>(n)));
    const int k = idx.k;
    std::vector<double> out(n * k * c);
    const double* v = x->values().data();
    for (std::int64_t i = 0; i < n; ++i) {
        for (int j = 0; j < k; ++j) {
            const std::int32_t src = idx.at(i, j);
            if (src < 0 || src >= n)
                throw IndexError(strformat("gather_neighbors: index (%lld,%d) = %d out of [0,%lld)",
                                           static_cast<long long>(i), j, src,
                                           static_cast<long long>(n)));
            std::memcpy(out.data() + (i * k + j) * c, v + src * c, c * sizeof(double));
        }
    }
    auto y = Tensor::create(Shape(n, k, c), std::move(out));
    // copy the index table; the caller may free theirs before backward
    std::vector<std::int32_t> table(idx.indices.begin(), idx.indices.end());
    record({x}, y, [x, y, table = std::move(table), n, k, c]() {
        const double* g = y->grad().data();
        double* gx = x->accum_grad().data();
        for (std::int64_t i = 0; i < n; ++i) {
            for (int j = 0; j < k; ++j) {
                double* dst = gx + static_cast<std::int64_t>(table[i * k + j]) * c;
                const double* gr = g + (i * k + j) * c;
                for (std::int64_t t = 0; t < c; ++t) dst[t] += gr[t];
            }
        }
    });
    return y;
}

TensorPtr tile_neighbors(const TensorPtr& x, int k) {
    if (x->shape().rank() != 2)
        throw DimensionError(strformat("tile_neighbors: expected rank-2 input, got %s",
                                       x->shape().str().c_str()));
    if (k < 1) throw ArgumentError("tile_neighbors: k must be >= 1");
    const std::int64_t n = x->shape().dim(0);
    const std::int64_t c = x->shape().dim(1);
    std::vector<double> out(n * k * c);
    const double* v = x->values().data();
    for (std::int64_t i = 0; i < n; ++i)
        for (int j = 0; j < k; ++j)
            std::memcpy(out.data() + (i * k + j) * c, v + i * c, c * sizeof(double));
    auto y = Tensor::create(Shape(n, k, c), std::move(out));
    record({x}, y, [x, y, n, k, c]() {
        const double* g = y->grad().data();
        double* gx = x->accum_grad().data();
        for (std::int64_t i = 0; i < n; ++i)
            for (int j = 0; j < k; ++j) {
                const double* gr = g + (i * k + j) * c;
                double* dst = gx + i * c;
                for (std::int64_t t = 0; t < c; ++t) dst[t] += gr[t];
            }
    });
    return y;
}

TensorPtr max_over_neighbors(const TensorPtr& x) {
    if (x->shape().rank() != 3)
        throw DimensionError(strformat("max_over_neighbors: expected rank-3 input, got %s",
                                       x->shape().str().c_str()));
    const std::int64_t n = x->shape().dim(0);
    const std::int64_t k = x->shape().dim(1);
    const std::int64_t c = x->shape().dim(2);
    std::vector<double> out(n * c);
    std::vector<std::int32_t> arg(n * c, 0);
    const double* v = x->values().data();
    for (std::int64_t i = 0; i < n; ++i) {
        const double* base = v + i * k * c;
        double* o = out.data() + i * c;
        std::int32_t* a = arg.data() + i * c;
        std::memcpy(o, base, c * sizeof(double));
        for (std::int64_t j = 1; j < k; ++j) {
            const double* row = base + j * c;
            for (std::int64_t t = 0; t < c; ++t)
                if (row[t] > o[t]) {  // strict: ties keep the lowest j
                    o[t] = row[t];
                    a[t] = static_cast<std::int32_t>(j);
                }
        }
    }
    auto y = Tensor::create(Shape(n, c), std::move(out));
    record({x}, y, [x, y, arg = std::move(arg), n, k, c]() {
        const double* g = y->grad().data();
        double* gx = x->accum_grad().data();
        for (std::int64_t i = 0; i < n; ++i)
            for (std::int64_t t = 0; t < c; ++t)
                gx[(i * k + arg[i * c + t]) * c + t] += g[i * c + t];
    });
    return y;
}

TensorPtr global_max_pool(const TensorPtr& x) {
    if (x->shape().rank() != 2)
        throw DimensionError(strformat("global_max_pool: expected rank-2 input, got %s",
                                       x->shape().str().c_str()));
    const std::int64_t n = x->shape().dim(0);
    const std::int64_t c = x->shape().dim(1);
    std::vector<double> out(c);
    std::vector<std::int32_t> arg(c, 0);
    const double* v = x->values().data();
    std::memcpy(out.data(), v, c * sizeof(double));
    for (std::int64_t i = 1; i < n; ++i) {
        const double* row = v + i * c;
        for (std::int64_t t = 0; t < c; ++t)
            if (row[t] > out[t]) {  // ties keep the lowest row
                out[t] = row[t];
                arg[t] = static_cast<std::int32_t>(i);
            }
    }
    auto y = Tensor::create(Shape(1, c), std::move(out));
    record({x}, y, [x, y, arg = std::move(arg), c]() {
        const double* g = y->grad().data();
        double* gx = x->accum_grad().data();
        for (std::int64_t t = 0; t < c; ++t) gx[arg[t] * c + t] += g[t];
    });
    return y;
}

TensorPtr tile_rows(const TensorPtr& x, std::int64_t n) {
    if (x->shape().rank() != 2 || x->shape().dim(0) != 1)
        throw DimensionError(strformat("tile_rows: expected 1xC input, got %s",
                                       x->shape().str().c_str()));
    if (n < 1) throw ArgumentError("tile_rows: n must be >= 1");
    const std::int64_t c = x->shape().dim(1);
    std::vector<double> out(n * c);
    for (std::int64_t i = 0; i < n; ++i)
        std::memcpy(out.data() + i * c, x->values().data(), c * sizeof(double));
    auto y = Tensor::create(Shape(n, c), std::move(out));
    record({x}, y, [x, y, n, c]() {
        const double* g = y->grad().data();
        double* gx = x->accum_grad().data();
        for (std::int64_t i = 0; i < n; ++i)
            for (std::int64_t t = 0; t < c; ++t) gx[t] += g[i * c + t];
    });
    return y;
}

TensorPtr slice_rows(const TensorPtr& x, std::int64_t begin, std::int64_t count) {
    if (x->shape().rank() != 2)
        throw DimensionError(strformat("slice_rows: expected rank-2 input, got %s",
                                       x->shape().str().c_str()));
    const std::int64_t n = x->shape().dim(0);
    const std::int64_t c = x->shape().dim(1);
    if (begin < 0 || count < 1 || begin + count > n)
        throw IndexError(strformat("slice_rows: range [%lld,%lld) out of %lld rows",
                                   static_cast<long long>(begin),
                                   static_cast<long long>(begin + count),
                                   static_cast<long long>(n)));
    std::vector<double> out(count * c);
    std::memcpy(out.data(), x->values().data() + begin * c, count * c * sizeof(double));
    auto y = Tensor::create(Shape(count, c), std::move(out));
    record({x}, y, [x, y, begin, count, c]() {
        const double* g = y->grad().data();
        double* gx = x->accum_grad().data() + begin * c;
        for (std::int64_t i = 0; i < count * c; ++i) gx[i] += g[i];
    });
    return y;
}

TensorPtr periodic_shuffle(const TensorPtr& x, int r) {
    if (r < 1) throw ArgumentError("periodic_shuffle: ratio must be >= 1");
    if (x->shape().rank() != 2)
        throw DimensionError(strformat("periodic_shuffle: expected rank-2 input, got %s",
                                       x->shape().str().c_str()));
    const std::int64_t n = x->shape().dim(0);
    const std::int64_t rc = x->shape().dim(1);
    if (rc % r != 0)
        throw DimensionError(strformat("periodic_shuffle: %lld channels not divisible by r=%d",
                                       static_cast<long long>(rc), r));
    const std::int64_t c = rc / r;
    std::vector<double> out(n * rc);
    const double* v = x->values().data();
    for (std::int64_t i = 0; i < n; ++i)
        for (int s = 0; s < r; ++s)
            std::memcpy(out.data() + (i * r + s) * c, v + i * rc + s * c, c * sizeof(double));
    auto y = Tensor::create(Shape(n * r, c), std::move(out));
    record({x}, y, [x, y, n, r, c]() {
        const double* g = y->grad().data();
        double* gx = x->accum_grad().data();
        const std::int64_t rc = static_cast<std::int64_t>(r) * c;
        for (std::int64_t i = 0; i < n; ++i)
            for (int s = 0; s < r; ++s) {
                const double* gr = g + (i * r + s) * c;
                double* dst = gx + i * rc + s * c;
                for (std::int64_t t = 0; t < c; ++t) dst[t] += gr[t];
            }
    });
    return y;
}

TensorPtr inverse_shuffle(const TensorPtr& x, int r) {
    if (r < 1) throw ArgumentError("inverse_shuffle: ratio must be >= 1");
    if (x->shape().rank() != 2)
        throw DimensionError(strformat("inverse_shuffle: expected rank-2 input, got %s",
                                       x->shape().str().c_str()));
    const std::int64_t rn = x->shape().dim(0);
    const std::int64_t c = x->shape().dim(1);
    if (rn % r != 0)
        throw DimensionError(strformat("inverse_shuffle: %lld rows not divisible by r=%d",
                                       static_cast<long long>(rn), r));
    const std::int64_t n = rn / r;
    std::vector<double> out(rn * c);
    const double* v = x->values().data();
    for (std::int64_t i = 0; i < n; ++i)
        for (int s = 0; s < r; ++s)
            std::memcpy(out.data() + i * r * c + s * c, v + (i * r + s) * c, c * sizeof(double));
    auto y = Tensor::create(Shape(n, r * c), std::move(out));
    record({x}, y, [x, y, n, r, c]() {
        const double* g = y->grad().data();
        double* gx = x->accum_grad().data();
        for (std::int64_t i = 0; i < n; ++i)
            for (int s = 0; s < r; ++s) {
                const double* gr = g + i * r * c + s * c;
                double* dst = gx + (i * r + s) * c;
                for (std::int64_t t = 0; t < c; ++t) dst[t] += gr[t];
            }
    });
    return y;
}

namespace {

void check_same_shape(const TensorPtr& a, const TensorPtr& b, const char* op) {
    if (a->shape() != b->shape())
        throw DimensionError(strformat("%s: shapes %s and %s differ", op,
                                       a->shape().str().c_str(), b->shape().str().c_str()));
}

}  // namespace

TensorPtr add(const TensorPtr& a, const TensorPtr& b) {
    check_same_shape(a, b, "add");
    std::vector<double> out(a->numel());
    for (std::int64_t i = 0; i < a->numel(); ++i) out[i] = a->values()[i] + b->values()[i];
    auto y = Tensor::create(a->shape(), std::move(out));
    record({a, b}, y, [a, b, y]() {
        const double* g = y->grad().data();
        double* ga = a->accum_grad().data();
        double* gb = b->accum_grad().data();
        for (std::int64_t i = 0; i < y->numel(); ++i) {
            ga[i] += g[i];
            gb[i] += g[i];
        }
    });
    return y;
}

TensorPtr sub(const TensorPtr& a, const TensorPtr& b) {
    check_same_shape(a, b, "sub");
    std::vector<double> out(a->numel());
    for (std::int64_t i = 0; i < a->numel(); ++i) out[i] = a->values()[i] - b->values()[i];
    auto y = Tensor::create(a->shape(), std::move(out));
    record({a, b}, y, [a, b, y]() {
        const double* g = y->grad().data();
        double* ga = a->accum_grad().data();
        double* gb = b->accum_grad().data();
        for (std::int64_t i = 0; i < y->numel(); ++i) {
            ga[i] += g[i];
            gb[i] -= g[i];
        }
    });
    return y;
}

TensorPtr mul(const TensorPtr& a, const TensorPtr& b) {
    check_same_shape(a, b, "mul");
    std::vector<double> out(a->numel());
    for (std::int64_t i = 0; i < a->numel(); ++i) out[i] = a->values()[i] * b->values()[i];
    auto y = Tensor::create(a->shape(), std::move(out));
    record({a, b}, y, [a, b, y]() {
        const double* g = y->grad().data();
        double* ga = a->accum_grad().data();
        double* gb = b->accum_grad().data();
        for (std::int64_t i = 0; i < y->numel(); ++i) {
            ga[i] += g[i] * b->values()[i];
            gb[i] += g[i] * a->values()[i];
        }
    });
    return y;
}

TensorPtr scale(const TensorPtr& x, double s) {
    std::vector<double> out(x->numel());
    for (std::int64_t i = 0; i < x->numel(); ++i) out[i] = x->values()[i] * s;
    auto y = Tensor::create(x->shape(), std::move(out));
    record({x}, y, [x, y, s]() {
        const double* g = y->grad().data();
        double* gx = x->accum_grad().data();
        for (std::int64_t i = 0; i < y->numel(); ++i) gx[i] += s * g[i];
    });
    return y;
}

TensorPtr sum(const TensorPtr& x) {
    double acc = 0.0;
    for (double v : x->values()) acc += v;
    auto y = Tensor::scalar(acc);
    record({x}, y, [x, y]() {
        const double g = y->grad()[0];
        double* gx = x->accum_grad().data();
        for (std::int64_t i = 0; i < x->numel(); ++i) gx[i] += g;
    });
    return y;
}

double grad_check(const std::function<TensorPtr(const TensorPtr&)>& f, const TensorPtr& x,
                  double eps) {
    // analytic gradient
    Tape tape;
    std::vector<double> analytic;
    {
        Tape::Scope scope(tape);
        auto loss = f(x);
        tape.backward(loss);
        analytic = x->grad();
    }
    // central finite differences, one coordinate at a time, forward-only
    double max_err = 0.0;
    for (std::int64_t i = 0; i < x->numel(); ++i) {
        auto eval_at = [&](double delta) {
            std::vector<double> v = x->values();
            v[i] += delta;
            auto xp = Tensor::create(x->shape(), std::move(v), x->requires_grad());
            return f(xp)->values()[0];
        };
        const double numeric = (eval_at(eps) - eval_at(-eps)) / (2.0 * eps);
        const double denom = std::max(1e-8, std::abs(analytic[i]) + std::abs(numeric));
        max_err = std::max(max_err, std::abs(analytic[i] - numeric) / denom);
    }
    return max_err;
}

}  // namespace pugcn
