#include "pugcn/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>

namespace pugcn {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// (squared distance, index) with the ascending-index tie-break.
using Cand = std::pair<double, std::int32_t>;

void check_cloud(const PointCloud& cloud, const char* op) {
    if (cloud.empty()) throw ArgumentError(strformat("%s: empty point cloud", op));
}

}  // namespace

// ---- PointGrid -------------------------------------------------------------

PointGrid::PointGrid(const PointCloud& cloud) : cloud_(cloud) {
    check_cloud(cloud, "PointGrid");
    Vec3 lo = cloud[0], hi = cloud[0];
    for (const Vec3& p : cloud.points) {
        lo.x = std::min(lo.x, p.x); lo.y = std::min(lo.y, p.y); lo.z = std::min(lo.z, p.z);
        hi.x = std::max(hi.x, p.x); hi.y = std::max(hi.y, p.y); hi.z = std::max(hi.z, p.z);
    }
    origin_ = lo;
    const Vec3 ext = hi - lo;
    const double max_ext = std::max({ext.x, ext.y, ext.z});
    const int m = std::max<int>(1, static_cast<int>(std::cbrt(static_cast<double>(cloud.size()))));
    cell_ = max_ext > 0.0 ? max_ext / m : 1.0;
    const double e[3] = {ext.x, ext.y, ext.z};
    for (int a = 0; a < 3; ++a)
        dims_[a] = std::max<int>(1, static_cast<int>(std::floor(e[a] / cell_)) + 1);
    cells_.resize(static_cast<std::size_t>(dims_[0]) * dims_[1] * dims_[2]);
    for (std::int64_t i = 0; i < cloud.size(); ++i) {
        const Vec3& p = cloud[i];
        const int cx = std::clamp(cell_of(p, 0), 0, dims_[0] - 1);
        const int cy = std::clamp(cell_of(p, 1), 0, dims_[1] - 1);
        const int cz = std::clamp(cell_of(p, 2), 0, dims_[2] - 1);
        cells_[flat(cx, cy, cz)].push_back(static_cast<std::int32_t>(i));
    }
}

int PointGrid::cell_of(const Vec3& p, int axis) const {
    const double v = axis == 0 ? p.x - origin_.x : axis == 1 ? p.y - origin_.y : p.z - origin_.z;
    return static_cast<int>(std::floor(v / cell_));
}

// Ring search around the query's (virtual, unclamped) cell. A cell at
// Chebyshev ring R is at least (R-1)*cell_ away from any point of the query
// cell, so expansion stops once that lower bound exceeds the current bound.
template <typename Visit>
void PointGrid::search(const Vec3& q, Visit&& visit, double& bound2) const {
    const int c0[3] = {cell_of(q, 0), cell_of(q, 1), cell_of(q, 2)};
    int rmax = 0;
    for (int a = 0; a < 3; ++a)
        rmax = std::max(rmax, std::max(c0[a], dims_[a] - 1 - c0[a]));

    auto scan_cell = [&](int cx, int cy, int cz) {
        for (std::int32_t idx : cells_[flat(cx, cy, cz)]) visit(idx);
    };
    // one axis pinned to `fixed`, the other two clamped to the grid so rings
    // outside the volume cost nothing
    auto scan_face = [&](int axis, int fixed, int alo, int ahi, int blo, int bhi) {
        if (fixed < 0 || fixed >= dims_[axis]) return;
        const int a_axis = axis == 0 ? 1 : 0;
        const int b_axis = axis == 2 ? 1 : 2;
        alo = std::max(alo, 0);
        ahi = std::min(ahi, dims_[a_axis] - 1);
        blo = std::max(blo, 0);
        bhi = std::min(bhi, dims_[b_axis] - 1);
        int c[3];
        c[axis] = fixed;
        for (int a = alo; a <= ahi; ++a)
            for (int b = blo; b <= bhi; ++b) {
                c[a_axis] = a;
                c[b_axis] = b;
                scan_cell(c[0], c[1], c[2]);
            }
    };

    for (int R = 0; R <= rmax; ++R) {
        if (R >= 2) {
            const double gap = (R - 1) * cell_;
            if (gap * gap > bound2) return;
        }
        if (R == 0) {
            if (c0[0] >= 0 && c0[0] < dims_[0] && c0[1] >= 0 && c0[1] < dims_[1] &&
                c0[2] >= 0 && c0[2] < dims_[2])
                scan_cell(c0[0], c0[1], c0[2]);
            continue;
        }
        scan_face(0, c0[0] - R, c0[1] - R, c0[1] + R, c0[2] - R, c0[2] + R);
        scan_face(0, c0[0] + R, c0[1] - R, c0[1] + R, c0[2] - R, c0[2] + R);
        scan_face(1, c0[1] - R, c0[0] - R + 1, c0[0] + R - 1, c0[2] - R, c0[2] + R);
        scan_face(1, c0[1] + R, c0[0] - R + 1, c0[0] + R - 1, c0[2] - R, c0[2] + R);
        scan_face(2, c0[2] - R, c0[0] - R + 1, c0[0] + R - 1, c0[1] - R + 1, c0[1] + R - 1);
        scan_face(2, c0[2] + R, c0[0] - R + 1, c0[0] + R - 1, c0[1] - R + 1, c0[1] + R - 1);
    }
}

std::pair<std::int32_t, double> PointGrid::nearest(const Vec3& q, std::int32_t exclude,
                                                   const std::vector<char>* alive) const {
    Cand best{kInf, -1};
    double bound2 = kInf;
    search(q,
           [&](std::int32_t idx) {
               if (idx == exclude) return;
               if (alive && !(*alive)[idx]) return;
               const Cand cand{dist2(cloud_[idx], q), idx};
               if (cand < best) {
                   best = cand;
                   bound2 = best.first;
               }
           },
           bound2);
    return {best.second, best.first};
}

std::vector<std::int32_t> PointGrid::knearest(const Vec3& q, int k, std::int32_t exclude) const {
    // max-heap of the k best candidates ordered by (squared distance, index)
    std::vector<Cand> heap;
    heap.reserve(k + 1);
    double bound2 = kInf;
    search(q,
           [&](std::int32_t idx) {
               if (idx == exclude) return;
               const Cand cand{dist2(cloud_[idx], q), idx};
               if (static_cast<int>(heap.size()) < k) {
                   heap.push_back(cand);
                   std::push_heap(heap.begin(), heap.end());
                   if (static_cast<int>(heap.size()) == k) bound2 = heap.front().first;
               } else if (cand < heap.front()) {
                   std::pop_heap(heap.begin(), heap.end());
                   heap.back() = cand;
                   std::push_heap(heap.begin(), heap.end());
                   bound2 = heap.front().first;
               }
           },
           bound2);
    std::sort(heap.begin(), heap.end());
    std::vector<std::int32_t> out(heap.size());
    for (std::size_t i = 0; i < heap.size(); ++i) out[i] = heap[i].second;
    return out;
}

void PointGrid::remove(std::int32_t index) {
    const Vec3& p = cloud_[index];
    const int cx = std::clamp(cell_of(p, 0), 0, dims_[0] - 1);
    const int cy = std::clamp(cell_of(p, 1), 0, dims_[1] - 1);
    const int cz = std::clamp(cell_of(p, 2), 0, dims_[2] - 1);
    auto& cell = cells_[flat(cx, cy, cz)];
    cell.erase(std::find(cell.begin(), cell.end(), index));
}

// ---- kNN -------------------------------------------------------------------

namespace {

void check_knn_args(const PointCloud& cloud, int k, bool include_self, const char* op) {
    check_cloud(cloud, op);
    if (k < 1) throw ArgumentError(strformat("%s: k must be >= 1, got %d", op, k));
    const std::int64_t avail = cloud.size() - (include_self ? 0 : 1);
    if (k > avail)
        throw ArgumentError(strformat("%s: k=%d exceeds the %lld available points", op, k,
                                      static_cast<long long>(avail)));
}

}  // namespace

NeighborIndex knn_brute_force(const PointCloud& cloud, int k, bool include_self) {
    check_knn_args(cloud, k, include_self, "knn_brute_force");
    const std::int64_t n = cloud.size();
    NeighborIndex out;
    out.n = n;
    out.k = k;
    out.indices.resize(n * k);
    std::vector<Cand> cands;
    cands.reserve(n);
    for (std::int64_t i = 0; i < n; ++i) {
        cands.clear();
        for (std::int64_t j = 0; j < n; ++j) {
            if (!include_self && j == i) continue;
            cands.emplace_back(dist2(cloud[j], cloud[i]), static_cast<std::int32_t>(j));
        }
        std::nth_element(cands.begin(), cands.begin() + (k - 1), cands.end());
        std::sort(cands.begin(), cands.begin() + k);
        for (int t = 0; t < k; ++t) out.indices[i * k + t] = cands[t].second;
    }
    return out;
}

NeighborIndex knn_grid(const PointCloud& cloud, int k, bool include_self) {
    check_knn_args(cloud, k, include_self, "knn_grid");
    const std::int64_t n = cloud.size();
    PointGrid grid(cloud);
    NeighborIndex out;
    out.n = n;
    out.k = k;
    out.indices.resize(n * k);
    for (std::int64_t i = 0; i < n; ++i) {
        auto nbrs = grid.knearest(cloud[i], k, include_self ? -1 : static_cast<std::int32_t>(i));
        std::copy(nbrs.begin(), nbrs.end(), out.indices.begin() + i * k);
    }
    return out;
}

NeighborIndex knn(const PointCloud& cloud, int k, bool include_self) {
    // patches are small enough for brute force; the grid pays off on dense
    // evaluation clouds
    return cloud.size() <= 1024 ? knn_brute_force(cloud, k, include_self)
                                : knn_grid(cloud, k, include_self);
}

NeighborIndex dilated_neighbors(const PointCloud& cloud, int k, int d) {
    check_cloud(cloud, "dilated_neighbors");
    if (k < 1 || d < 1)
        throw ArgumentError(strformat("dilated_neighbors: k=%d, d=%d must be >= 1", k, d));
    if (static_cast<std::int64_t>(k) * d > cloud.size())
        throw ArgumentError(strformat("dilated_neighbors: k*d=%d exceeds cloud size %lld", k * d,
                                      static_cast<long long>(cloud.size())));
    NeighborIndex dense = knn(cloud, k * d, /*include_self=*/false);
    if (d == 1) {
        dense.dilation = 1;
        return dense;
    }
    NeighborIndex out;
    out.n = dense.n;
    out.k = k;
    out.dilation = d;
    out.indices.resize(dense.n * k);
    for (std::int64_t i = 0; i < dense.n; ++i)
        for (int t = 0; t < k; ++t) out.indices[i * k + t] = dense.at(i, t * d);
    return out;
}

std::vector<std::int32_t> nearest_indices(const PointCloud& cloud, const Vec3& q, int count) {
    check_cloud(cloud, "nearest_indices");
    if (count < 1 || count > cloud.size())
        throw ArgumentError(strformat("nearest_indices: count=%d out of [1,%lld]", count,
                                      static_cast<long long>(cloud.size())));
    std::vector<Cand> cands;
    cands.reserve(cloud.size());
    for (std::int64_t j = 0; j < cloud.size(); ++j)
        cands.emplace_back(dist2(cloud[j], q), static_cast<std::int32_t>(j));
    std::nth_element(cands.begin(), cands.begin() + (count - 1), cands.end());
    std::sort(cands.begin(), cands.begin() + count);
    std::vector<std::int32_t> out(count);
    for (int t = 0; t < count; ++t) out[t] = cands[t].second;
    return out;
}

std::vector<std::int32_t> farthest_point_sample(const PointCloud& cloud, std::int64_t m,
                                                std::int32_t start) {
    check_cloud(cloud, "farthest_point_sample");
    const std::int64_t n = cloud.size();
    if (m < 1 || m > n)
        throw ArgumentError(strformat("farthest_point_sample: m=%lld out of [1,%lld]",
                                      static_cast<long long>(m), static_cast<long long>(n)));
    if (start < 0 || start >= n)
        throw ArgumentError(strformat("farthest_point_sample: start=%d out of [0,%lld)", start,
                                      static_cast<long long>(n)));
    std::vector<std::int32_t> selected;
    selected.reserve(m);
    selected.push_back(start);
    std::vector<double> mind(n);
    for (std::int64_t i = 0; i < n; ++i) mind[i] = dist2(cloud[i], cloud[start]);
    while (static_cast<std::int64_t>(selected.size()) < m) {
        std::int64_t best = 0;
        for (std::int64_t i = 1; i < n; ++i)
            if (mind[i] > mind[best]) best = i;  // strict: ties keep the lowest index
        selected.push_back(static_cast<std::int32_t>(best));
        for (std::int64_t i = 0; i < n; ++i)
            mind[i] = std::min(mind[i], dist2(cloud[i], cloud[best]));
    }
    return selected;
}

std::int32_t farthest_from_centroid(const PointCloud& cloud) {
    check_cloud(cloud, "farthest_from_centroid");
    Vec3 c{};
    for (const Vec3& p : cloud.points) c += p;
    c = c / static_cast<double>(cloud.size());
    std::int64_t best = 0;
    double best_d = dist2(cloud[0], c);
    for (std::int64_t i = 1; i < cloud.size(); ++i) {
        const double d = dist2(cloud[i], c);
        if (d > best_d) {
            best_d = d;
            best = i;
        }
    }
    return static_cast<std::int32_t>(best);
}

// ---- normalization ---------------------------------------------------------

std::pair<PointCloud, NormalizeTransform> normalize(const PointCloud& cloud) {
    check_cloud(cloud, "normalize");
    NormalizeTransform t;
    Vec3 c{};
    for (const Vec3& p : cloud.points) c += p;
    t.centroid = c / static_cast<double>(cloud.size());
    double r = 0.0;
    for (const Vec3& p : cloud.points) r = std::max(r, norm(p - t.centroid));
    t.scale = r > 0.0 ? r : 1.0;  // degenerate cloud: clamp to identity scale
    return {apply_transform(cloud, t), t};
}

PointCloud apply_transform(const PointCloud& cloud, const NormalizeTransform& t) {
    PointCloud out;
    out.points.reserve(cloud.points.size());
    for (const Vec3& p : cloud.points) out.points.push_back(t.apply(p));
    return out;
}

PointCloud denormalize(const PointCloud& cloud, const NormalizeTransform& t) {
    PointCloud out;
    out.points.reserve(cloud.points.size());
    for (const Vec3& p : cloud.points) out.points.push_back(t.invert(p));
    return out;
}

// ---- Poisson-disk sampling via sample elimination ---------------------------

PointCloud poisson_sample(const Mesh& mesh, std::int64_t n, std::uint64_t seed) {
    if (mesh.empty()) throw ArgumentError("poisson_sample: empty mesh");
    if (n < 1) throw ArgumentError("poisson_sample: n must be >= 1");

    std::vector<double> cumulative(mesh.face_count());
    double total = 0.0;
    for (std::int64_t f = 0; f < mesh.face_count(); ++f) {
        total += mesh.face_area(f);
        cumulative[f] = total;
    }
    if (total <= 0.0) throw ArgumentError("poisson_sample: mesh has zero surface area");

    // area-weighted uniform candidates, 10x oversampled
    const std::int64_t m = 10 * n;
    Rng rng(seed);
    PointCloud candidates;
    candidates.points.reserve(m);
    for (std::int64_t i = 0; i < m; ++i) {
        const double u = rng.uniform() * total;
        const std::int64_t f =
            std::lower_bound(cumulative.begin(), cumulative.end(), u) - cumulative.begin();
        const auto& tri = mesh.faces[std::min<std::int64_t>(f, mesh.face_count() - 1)];
        const double r1 = std::sqrt(rng.uniform());
        const double r2 = rng.uniform();
        const Vec3& a = mesh.vertices[tri[0]];
        const Vec3& b = mesh.vertices[tri[1]];
        const Vec3& c = mesh.vertices[tri[2]];
        candidates.points.push_back(a * (1.0 - r1) + b * (r1 * (1.0 - r2)) + c * (r1 * r2));
    }
    if (n >= m) return candidates;

    // greedy elimination: repeatedly drop the point closest to a survivor
    PointGrid grid(candidates);
    std::vector<char> alive(m, 1);
    std::vector<std::int32_t> near(m);
    std::vector<double> near_d2(m);
    std::vector<std::vector<std::int32_t>> reverse(m);
    std::priority_queue<Cand, std::vector<Cand>, std::greater<Cand>> heap;
    for (std::int64_t i = 0; i < m; ++i) {
        auto [j, d2] = grid.nearest(candidates[i], static_cast<std::int32_t>(i));
        near[i] = j;
        near_d2[i] = d2;
        reverse[j].push_back(static_cast<std::int32_t>(i));
        heap.emplace(d2, static_cast<std::int32_t>(i));
    }

    std::int64_t alive_count = m;
    while (alive_count > n) {
        const auto [d2, u] = heap.top();
        heap.pop();
        if (!alive[u] || d2 != near_d2[u]) continue;  // stale entry
        alive[u] = 0;
        --alive_count;
        grid.remove(u);
        if (alive_count == n) break;
        for (std::int32_t i : reverse[u]) {
            if (!alive[i] || near[i] != u) continue;
            auto [j, nd2] = grid.nearest(candidates[i], i);
            near[i] = j;
            near_d2[i] = nd2;
            reverse[j].push_back(i);
            heap.emplace(nd2, i);
        }
        reverse[u].clear();
    }

    PointCloud out;
    out.points.reserve(n);
    for (std::int64_t i = 0; i < m; ++i)
        if (alive[i]) out.points.push_back(candidates[i]);
    return out;
}

// ---- point-triangle distance -----------------------------------------------

Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
    const Vec3 ab = b - a, ac = c - a;
    if (norm2(cross(ab, ac)) == 0.0)
        throw ArgumentError("point_triangle_distance: degenerate triangle");

    const Vec3 ap = p - a;
    const double d1 = dot(ab, ap), d2 = dot(ac, ap);
    if (d1 <= 0.0 && d2 <= 0.0) return a;

    const Vec3 bp = p - b;
    const double d3 = dot(ab, bp), d4 = dot(ac, bp);
    if (d3 >= 0.0 && d4 <= d3) return b;

    const double vc = d1 * d4 - d3 * d2;
    if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) return a + ab * (d1 / (d1 - d3));

    const Vec3 cp = p - c;
    const double d5 = dot(ab, cp), d6 = dot(ac, cp);
    if (d6 >= 0.0 && d5 <= d6) return c;

    const double vb = d5 * d2 - d1 * d6;
    if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) return a + ac * (d2 / (d2 - d6));

    const double va = d3 * d6 - d5 * d4;
    if (va <= 0.0 && d4 - d3 >= 0.0 && d5 - d6 >= 0.0) {
        const double w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
        return b + (c - b) * w;
    }

    const double denom = 1.0 / (va + vb + vc);
    return a + ab * (vb * denom) + ac * (vc * denom);
}

double point_triangle_distance(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
    return norm(p - closest_point_on_triangle(p, a, b, c));
}

// ---- TriangleBvh -----------------------------------------------------------

namespace {

double face_dist2(const Mesh& mesh, std::int64_t f, const Vec3& p) {
    const auto& t = mesh.faces[f];
    return norm2(p - closest_point_on_triangle(p, mesh.vertices[t[0]], mesh.vertices[t[1]],
                                               mesh.vertices[t[2]]));
}

double box_dist2(const Vec3& p, const Vec3& lo, const Vec3& hi) {
    const double dx = std::max({lo.x - p.x, 0.0, p.x - hi.x});
    const double dy = std::max({lo.y - p.y, 0.0, p.y - hi.y});
    const double dz = std::max({lo.z - p.z, 0.0, p.z - hi.z});
    return dx * dx + dy * dy + dz * dz;
}

}  // namespace

TriangleBvh::TriangleBvh(const Mesh& mesh) : mesh_(mesh) {
    if (mesh.empty()) throw ArgumentError("TriangleBvh: empty mesh");
    const std::int64_t f = mesh.face_count();
    order_.resize(f);
    std::iota(order_.begin(), order_.end(), 0);
    centroids_.resize(f);
    for (std::int64_t i = 0; i < f; ++i) {
        const auto& t = mesh.faces[i];
        centroids_[i] =
            (mesh.vertices[t[0]] + mesh.vertices[t[1]] + mesh.vertices[t[2]]) / 3.0;
    }
    nodes_.reserve(2 * f);
    root_ = build(0, static_cast<std::int32_t>(f));
}

std::int32_t TriangleBvh::build(std::int32_t begin, std::int32_t end) {
    Node node;
    node.lo = {kInf, kInf, kInf};
    node.hi = {-kInf, -kInf, -kInf};
    for (std::int32_t i = begin; i < end; ++i) {
        const auto& t = mesh_.faces[order_[i]];
        for (int v = 0; v < 3; ++v) {
            const Vec3& p = mesh_.vertices[t[v]];
            node.lo.x = std::min(node.lo.x, p.x); node.lo.y = std::min(node.lo.y, p.y);
            node.lo.z = std::min(node.lo.z, p.z);
            node.hi.x = std::max(node.hi.x, p.x); node.hi.y = std::max(node.hi.y, p.y);
            node.hi.z = std::max(node.hi.z, p.z);
        }
    }
    if (end - begin <= 4) {
        node.begin = begin;
        node.end = end;
        nodes_.push_back(node);
        return static_cast<std::int32_t>(nodes_.size()) - 1;
    }
    const Vec3 ext = node.hi - node.lo;
    const int axis = ext.x >= ext.y && ext.x >= ext.z ? 0 : ext.y >= ext.z ? 1 : 2;
    const std::int32_t mid = (begin + end) / 2;
    std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                     [&](std::int32_t a, std::int32_t b) {
                         const Vec3 &ca = centroids_[a], &cb = centroids_[b];
                         const double va = axis == 0 ? ca.x : axis == 1 ? ca.y : ca.z;
                         const double vb = axis == 0 ? cb.x : axis == 1 ? cb.y : cb.z;
                         return va < vb || (va == vb && a < b);
                     });
    const std::int32_t self = static_cast<std::int32_t>(nodes_.size());
    nodes_.push_back(node);
    const std::int32_t left = build(begin, mid);
    const std::int32_t right = build(mid, end);
    nodes_[self].left = left;
    nodes_[self].right = right;
    return self;
}

double TriangleBvh::distance(const Vec3& p) const {
    double best2 = kInf;
    // explicit stack, nearer child first
    std::vector<std::int32_t> stack{root_};
    while (!stack.empty()) {
        const std::int32_t ni = stack.back();
        stack.pop_back();
        const Node& node = nodes_[ni];
        if (box_dist2(p, node.lo, node.hi) >= best2) continue;
        if (node.left < 0) {
            for (std::int32_t i = node.begin; i < node.end; ++i)
                best2 = std::min(best2, face_dist2(mesh_, order_[i], p));
            continue;
        }
        const double dl = box_dist2(p, nodes_[node.left].lo, nodes_[node.left].hi);
        const double dr = box_dist2(p, nodes_[node.right].lo, nodes_[node.right].hi);
        if (dl <= dr) {
            stack.push_back(node.right);
            stack.push_back(node.left);
        } else {
            stack.push_back(node.left);
            stack.push_back(node.right);
        }
    }
    return std::sqrt(best2);
}

double TriangleBvh::distance_brute(const Vec3& p) const {
    double best2 = kInf;
    for (std::int64_t f = 0; f < mesh_.face_count(); ++f)
        best2 = std::min(best2, face_dist2(mesh_, f, p));
    return std::sqrt(best2);
}

// ---- augmentation ----------------------------------------------------------

namespace {

struct Mat3 {
    double m[3][3];
    Vec3 apply(const Vec3& p) const {
        return {m[0][0] * p.x + m[0][1] * p.y + m[0][2] * p.z,
                m[1][0] * p.x + m[1][1] * p.y + m[1][2] * p.z,
                m[2][0] * p.x + m[2][1] * p.y + m[2][2] * p.z};
    }
};

// uniform random rotation from a uniform quaternion (Shoemake's method)
Mat3 random_rotation(Rng& rng) {
    const double u1 = rng.uniform(), u2 = rng.uniform(), u3 = rng.uniform();
    const double two_pi = 2.0 * 3.14159265358979323846;
    const double x = std::sqrt(1.0 - u1) * std::sin(two_pi * u2);
    const double y = std::sqrt(1.0 - u1) * std::cos(two_pi * u2);
    const double z = std::sqrt(u1) * std::sin(two_pi * u3);
    const double w = std::sqrt(u1) * std::cos(two_pi * u3);
    Mat3 r;
    r.m[0][0] = 1 - 2 * (y * y + z * z); r.m[0][1] = 2 * (x * y - z * w); r.m[0][2] = 2 * (x * z + y * w);
    r.m[1][0] = 2 * (x * y + z * w); r.m[1][1] = 1 - 2 * (x * x + z * z); r.m[1][2] = 2 * (y * z - x * w);
    r.m[2][0] = 2 * (x * z - y * w); r.m[2][1] = 2 * (y * z + x * w); r.m[2][2] = 1 - 2 * (x * x + y * y);
    return r;
}

}  // namespace

std::pair<PointCloud, PointCloud> augment(const PointCloud& input, const PointCloud& gt, Rng& rng,
                                          const AugmentConfig& cfg) {
    check_cloud(input, "augment");
    check_cloud(gt, "augment");
    Mat3 rot{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};
    if (cfg.rotate) rot = random_rotation(rng);
    double s = 1.0;
    if (cfg.scale) s = rng.uniform(cfg.scale_min, cfg.scale_max);

    auto transform = [&](const PointCloud& cloud) {
        PointCloud out;
        out.points.reserve(cloud.points.size());
        for (const Vec3& p : cloud.points) out.points.push_back(rot.apply(p) * s);
        return out;
    };
    PointCloud in_out = transform(input);
    PointCloud gt_out = transform(gt);
    if (cfg.jitter) {
        for (Vec3& p : in_out.points) {
            const double jx = std::clamp(cfg.jitter_sigma * rng.normal(), -cfg.jitter_clip, cfg.jitter_clip);
            const double jy = std::clamp(cfg.jitter_sigma * rng.normal(), -cfg.jitter_clip, cfg.jitter_clip);
            const double jz = std::clamp(cfg.jitter_sigma * rng.normal(), -cfg.jitter_clip, cfg.jitter_clip);
            p = {p.x + jx, p.y + jy, p.z + jz};
        }
    }
    return {std::move(in_out), std::move(gt_out)};
}

}  // namespace pugcn
