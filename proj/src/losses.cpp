#include "pugcn/losses.hpp"

#include <cmath>
#include <fstream>
#include <limits>

namespace pugcn {

namespace {

void check_nonempty(const PointCloud& cloud, const char* op) {
    if (cloud.empty()) throw ArgumentError(strformat("%s: empty point cloud", op));
}

PointCloud points_of(const TensorPtr& t) {
    PointCloud cloud;
    cloud.points.reserve(t->shape().dim(0));
    for (std::int64_t i = 0; i < t->shape().dim(0); ++i)
        cloud.points.push_back({t->at(i, 0), t->at(i, 1), t->at(i, 2)});
    return cloud;
}

}  // namespace

std::vector<std::int32_t> nearest_assignments_brute(const PointCloud& from,
                                                    const PointCloud& to) {
    check_nonempty(from, "nearest_assignments");
    check_nonempty(to, "nearest_assignments");
    std::vector<std::int32_t> out(from.size());
    for (std::int64_t i = 0; i < from.size(); ++i) {
        std::int32_t best = 0;
        double best_d = dist2(from[i], to[0]);
        for (std::int64_t j = 1; j < to.size(); ++j) {
            const double d = dist2(from[i], to[j]);
            if (d < best_d) {  // strict: ties keep the lowest index
                best_d = d;
                best = static_cast<std::int32_t>(j);
            }
        }
        out[i] = best;
    }
    return out;
}

std::vector<std::int32_t> nearest_assignments_grid(const PointCloud& from, const PointCloud& to) {
    check_nonempty(from, "nearest_assignments");
    check_nonempty(to, "nearest_assignments");
    PointGrid grid(to);
    std::vector<std::int32_t> out(from.size());
    for (std::int64_t i = 0; i < from.size(); ++i) out[i] = grid.nearest(from[i]).first;
    return out;
}

std::vector<std::int32_t> nearest_assignments(const PointCloud& from, const PointCloud& to) {
    return to.size() < 256 ? nearest_assignments_brute(from, to)
                           : nearest_assignments_grid(from, to);
}

double chamfer_distance(const PointCloud& p, const PointCloud& q) {
    const auto p_to_q = nearest_assignments(p, q);
    const auto q_to_p = nearest_assignments(q, p);
    double sum_p = 0.0;
    for (std::int64_t i = 0; i < p.size(); ++i) sum_p += dist2(p[i], q[p_to_q[i]]);
    double sum_q = 0.0;
    for (std::int64_t j = 0; j < q.size(); ++j) sum_q += dist2(q[j], p[q_to_p[j]]);
    return sum_p / static_cast<double>(p.size()) + sum_q / static_cast<double>(q.size());
}

TensorPtr chamfer(const TensorPtr& pred, const PointCloud& gt) {
    if (pred->shape().rank() != 2 || pred->shape().dim(1) != 3)
        throw DimensionError(strformat("chamfer: predicted cloud must be Nx3, got %s",
                                       pred->shape().str().c_str()));
    check_nonempty(gt, "chamfer");
    PointCloud p = points_of(pred);
    const auto p_to_q = nearest_assignments(p, gt);
    const auto q_to_p = nearest_assignments(gt, p);
    double sum_p = 0.0;
    for (std::int64_t i = 0; i < p.size(); ++i) sum_p += dist2(p[i], gt[p_to_q[i]]);
    double sum_q = 0.0;
    for (std::int64_t j = 0; j < gt.size(); ++j) sum_q += dist2(gt[j], p[q_to_p[j]]);
    const double np = static_cast<double>(p.size());
    const double nq = static_cast<double>(gt.size());
    auto loss = Tensor::scalar(sum_p / np + sum_q / nq);

    if (Tape* tape = Tape::current()) {
        tape->record({pred}, loss,
                     [pred, loss, gt, p_to_q, q_to_p, np, nq]() {
                         const double upstream = loss->grad()[0];
                         double* g = pred->accum_grad().data();
                         // d/dp of the p-side term: (2/|P|) (p - q*(p))
                         for (std::int64_t i = 0; i < pred->shape().dim(0); ++i) {
                             const Vec3 q = gt[p_to_q[i]];
                             g[i * 3 + 0] += upstream * 2.0 / np * (pred->at(i, 0) - q.x);
                             g[i * 3 + 1] += upstream * 2.0 / np * (pred->at(i, 1) - q.y);
                             g[i * 3 + 2] += upstream * 2.0 / np * (pred->at(i, 2) - q.z);
                         }
                         // q-side term: every q assigned to p pulls on p
                         for (std::int64_t j = 0; j < gt.size(); ++j) {
                             const std::int64_t i = q_to_p[j];
                             const Vec3 q = gt[j];
                             g[i * 3 + 0] += upstream * 2.0 / nq * (pred->at(i, 0) - q.x);
                             g[i * 3 + 1] += upstream * 2.0 / nq * (pred->at(i, 1) - q.y);
                             g[i * 3 + 2] += upstream * 2.0 / nq * (pred->at(i, 2) - q.z);
                         }
                     });
    }
    return loss;
}

double hausdorff_distance(const PointCloud& p, const PointCloud& q) {
    const auto p_to_q = nearest_assignments(p, q);
    const auto q_to_p = nearest_assignments(q, p);
    double worst = 0.0;
    for (std::int64_t i = 0; i < p.size(); ++i)
        worst = std::max(worst, dist2(p[i], q[p_to_q[i]]));
    for (std::int64_t j = 0; j < q.size(); ++j)
        worst = std::max(worst, dist2(q[j], p[q_to_p[j]]));
    return std::sqrt(worst);
}

double p2f_distance(const PointCloud& p, const Mesh& mesh) {
    check_nonempty(p, "p2f_distance");
    if (mesh.empty()) throw ArgumentError("p2f_distance: empty mesh");
    TriangleBvh bvh(mesh);
    double acc = 0.0;
    for (const Vec3& point : p.points) acc += bvh.distance(point);
    return acc / static_cast<double>(p.size());
}

double p2f_distance_brute(const PointCloud& p, const Mesh& mesh) {
    check_nonempty(p, "p2f_distance");
    if (mesh.empty()) throw ArgumentError("p2f_distance: empty mesh");
    TriangleBvh bvh(mesh);
    double acc = 0.0;
    for (const Vec3& point : p.points) acc += bvh.distance_brute(point);
    return acc / static_cast<double>(p.size());
}

std::string MetricsReport::display() const {
    std::string out;
    out += strformat("cd_x1e3   = %.6f\n", cd * 1e3);
    out += strformat("hd_x1e3   = %.6f\n", hd * 1e3);
    if (p2f) out += strformat("p2f_x1e3  = %.6f\n", *p2f * 1e3);
    out += strformat("params    = %lld\n", static_cast<long long>(param_count));
    out += strformat("time_ms   = %.3f\n", time_per_patch_ms);
    return out;
}

std::string MetricsReport::csv_header() { return "cd,hd,p2f,params,time_ms"; }

std::string MetricsReport::csv_row() const {
    std::string p2f_field = p2f ? strformat("%.12g", *p2f) : std::string();
    return strformat("%.12g,%.12g,%s,%lld,%.6g", cd, hd, p2f_field.c_str(),
                     static_cast<long long>(param_count), time_per_patch_ms);
}

MetricsReport evaluate(const PointCloud& pred, const PointCloud& gt, const Mesh* mesh,
                       std::int64_t param_count, double time_per_patch_ms) {
    check_nonempty(pred, "evaluate");
    check_nonempty(gt, "evaluate");
    MetricsReport report;
    report.cd = chamfer_distance(pred, gt);
    report.hd = hausdorff_distance(pred, gt);
    if (mesh) report.p2f = p2f_distance(pred, *mesh);
    report.param_count = param_count;
    report.time_per_patch_ms = time_per_patch_ms;
    return report;
}

void write_metrics_csv(const std::string& path, const std::vector<MetricsReport>& reports) {
    std::ofstream out(path);
    if (!out) throw DataError(strformat("cannot open %s for writing", path.c_str()));
    out << MetricsReport::csv_header() << "\n";
    for (const auto& r : reports) out << r.csv_row() << "\n";
    if (!out) throw DataError(strformat("write failed: %s", path.c_str()));
}

}  // namespace pugcn
