#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "pugcn/common.hpp"
#include "pugcn/neighbor_index.hpp"

namespace pugcn {

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
    Vec3& operator+=(const Vec3& o) {
        x += o.x; y += o.y; z += o.z;
        return *this;
    }
};

inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm2(const Vec3& a) { return dot(a, a); }
inline double norm(const Vec3& a) { return std::sqrt(norm2(a)); }
inline double dist2(const Vec3& a, const Vec3& b) { return norm2(a - b); }

struct PointCloud {
    std::vector<Vec3> points;

    PointCloud() = default;
    explicit PointCloud(std::vector<Vec3> pts) : points(std::move(pts)) {}

    std::int64_t size() const { return static_cast<std::int64_t>(points.size()); }
    bool empty() const { return points.empty(); }
    const Vec3& operator[](std::int64_t i) const { return points[i]; }
    Vec3& operator[](std::int64_t i) { return points[i]; }
};

struct Mesh {
    std::vector<Vec3> vertices;
    std::vector<std::array<std::int32_t, 3>> faces;

    std::int64_t face_count() const { return static_cast<std::int64_t>(faces.size()); }
    bool empty() const { return faces.empty(); }
    double face_area(std::int64_t f) const {
        const auto& t = faces[f];
        return 0.5 * norm(cross(vertices[t[1]] - vertices[t[0]], vertices[t[2]] - vertices[t[0]]));
    }
};

// Unit-sphere normalization: subtract centroid, divide by max point norm.
struct NormalizeTransform {
    Vec3 centroid{};
    double scale = 1.0;

    Vec3 apply(const Vec3& p) const { return (p - centroid) / scale; }
    Vec3 invert(const Vec3& p) const { return p * scale + centroid; }
};

// ---- neighbor search -------------------------------------------------------

// Uniform hash grid over a fixed point set. Queries are exact: results match
// a brute-force scan including the (distance, index) tie-break.
class PointGrid {
public:
    explicit PointGrid(const PointCloud& cloud);

    // Nearest point by (squared distance, index). `exclude` skips one index;
    // `alive`, when given, restricts the search to flagged points.
    std::pair<std::int32_t, double> nearest(const Vec3& q, std::int32_t exclude = -1,
                                            const std::vector<char>* alive = nullptr) const;

    // k nearest, ascending by (squared distance, index).
    std::vector<std::int32_t> knearest(const Vec3& q, int k, std::int32_t exclude = -1) const;

    void remove(std::int32_t index);

private:
    template <typename Visit>
    void search(const Vec3& q, Visit&& visit, double& bound2) const;

    const PointCloud& cloud_;
    Vec3 origin_{};
    double cell_ = 1.0;
    std::array<int, 3> dims_{1, 1, 1};
    std::vector<std::vector<std::int32_t>> cells_;

    int cell_of(const Vec3& p, int axis) const;
    std::size_t flat(int cx, int cy, int cz) const {
        return (static_cast<std::size_t>(cz) * dims_[1] + cy) * dims_[0] + cx;
    }
};

// k nearest neighbors per point, rows sorted by ascending distance with ties
// broken by ascending index. Dispatches to brute force for small clouds and
// to the grid otherwise; both paths agree exactly.
NeighborIndex knn(const PointCloud& cloud, int k, bool include_self);
NeighborIndex knn_brute_force(const PointCloud& cloud, int k, bool include_self);
NeighborIndex knn_grid(const PointCloud& cloud, int k, bool include_self);

// Every d-th of the k*d nearest neighbors (self excluded); d=1 is knn.
NeighborIndex dilated_neighbors(const PointCloud& cloud, int k, int d);

// Indices of the `count` nearest points to a free query point, ascending.
std::vector<std::int32_t> nearest_indices(const PointCloud& cloud, const Vec3& q, int count);

// Greedy max-min subset of m indices, deterministic given the start index.
std::vector<std::int32_t> farthest_point_sample(const PointCloud& cloud, std::int64_t m,
                                                std::int32_t start);

// Index of the point farthest from the cloud centroid (lowest index on ties).
std::int32_t farthest_from_centroid(const PointCloud& cloud);

// ---- normalization ---------------------------------------------------------

std::pair<PointCloud, NormalizeTransform> normalize(const PointCloud& cloud);
PointCloud denormalize(const PointCloud& cloud, const NormalizeTransform& t);
PointCloud apply_transform(const PointCloud& cloud, const NormalizeTransform& t);

// ---- surface sampling ------------------------------------------------------

// Approximate Poisson-disk set of exactly n surface points: area-weighted
// oversampling of 10*n candidates followed by greedy sample elimination.
PointCloud poisson_sample(const Mesh& mesh, std::int64_t n, std::uint64_t seed);

// ---- point-triangle distance -----------------------------------------------

Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c);
double point_triangle_distance(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c);

// AABB tree over mesh triangles for nearest-surface queries.
class TriangleBvh {
public:
    explicit TriangleBvh(const Mesh& mesh);

    double distance(const Vec3& p) const;
    // Reference path scanning every face; the tree must match it.
    double distance_brute(const Vec3& p) const;

private:
    struct Node {
        Vec3 lo, hi;
        std::int32_t left = -1, right = -1;  // children, or -1 for leaf
        std::int32_t begin = 0, end = 0;     // face range for leaves
    };
    std::int32_t build(std::int32_t begin, std::int32_t end);

    const Mesh& mesh_;
    std::vector<std::int32_t> order_;
    std::vector<Vec3> centroids_;
    std::vector<Node> nodes_;
    std::int32_t root_ = -1;
};

// ---- augmentation ----------------------------------------------------------

struct AugmentConfig {
    bool rotate = true;
    bool scale = true;
    bool jitter = true;
    double scale_min = 0.8;
    double scale_max = 1.2;
    double jitter_sigma = 0.005;
    double jitter_clip = 0.015;
};

// One shared random rotation and shared scale for both clouds; Gaussian
// jitter (clipped) applied to the input only.
std::pair<PointCloud, PointCloud> augment(const PointCloud& input, const PointCloud& gt, Rng& rng,
                                          const AugmentConfig& cfg);

}  // namespace pugcn
