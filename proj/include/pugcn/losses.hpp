#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pugcn/geometry.hpp"
#include "pugcn/tensor.hpp"

namespace pugcn {

// Index of the nearest point in `to` for every point of `from`, ties broken
// by the lowest index. The grid-accelerated path must agree with the brute
// scan exactly, including the tie rule.
std::vector<std::int32_t> nearest_assignments_brute(const PointCloud& from, const PointCloud& to);
std::vector<std::int32_t> nearest_assignments_grid(const PointCloud& from, const PointCloud& to);
std::vector<std::int32_t> nearest_assignments(const PointCloud& from, const PointCloud& to);

// Symmetric Chamfer distance: mean squared nearest-neighbor distance in both
// directions.
double chamfer_distance(const PointCloud& p, const PointCloud& q);

// Chamfer as a loss, differentiable with respect to the predicted points.
TensorPtr chamfer(const TensorPtr& pred, const PointCloud& gt);

// Symmetric Hausdorff distance over Euclidean (non-squared) distances.
double hausdorff_distance(const PointCloud& p, const PointCloud& q);

// Mean unsigned distance from each point to the mesh surface.
double p2f_distance(const PointCloud& p, const Mesh& mesh);
double p2f_distance_brute(const PointCloud& p, const Mesh& mesh);

struct MetricsReport {
    double cd = 0.0;
    double hd = 0.0;
    std::optional<double> p2f;
    std::int64_t param_count = 0;
    double time_per_patch_ms = 0.0;

    // Human-readable block; cd/hd/p2f are shown scaled by 10^3 following the
    // usual table convention.
    std::string display() const;
    static std::string csv_header();  // cd,hd,p2f,params,time_ms (raw values)
    std::string csv_row() const;
};

MetricsReport evaluate(const PointCloud& pred, const PointCloud& gt, const Mesh* mesh,
                       std::int64_t param_count, double time_per_patch_ms);

void write_metrics_csv(const std::string& path, const std::vector<MetricsReport>& reports);

}  // namespace pugcn
