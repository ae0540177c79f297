#include "pugcn/selfcheck.hpp"

#include <cmath>
#include <functional>

#include "pugcn/losses.hpp"
#include "pugcn/pipeline.hpp"
#include "pugcn/synthetic.hpp"

namespace pugcn {

namespace {

PointCloud random_cloud(std::int64_t n, Rng& rng) {
    PointCloud cloud;
    for (std::int64_t i = 0; i < n; ++i)
        cloud.points.push_back({rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)});
    return cloud;
}

ModelConfig tiny_config() {
    ModelConfig cfg;
    cfg.k = 4;
    cfg.growth = 8;
    cfg.embed_channels = 8;
    cfg.bottleneck_channels = 8;
    cfg.compress_channels = 8;
    cfg.ratio = 2;
    return cfg;
}

}  // namespace

int run_selfcheck(std::ostream& out) {
    int failures = 0;
    auto check = [&](const char* name, const std::function<bool()>& body) {
        bool ok = false;
        std::string detail;
        try {
            ok = body();
        } catch (const std::exception& e) {
            detail = e.what();
        }
        out << (ok ? "[ok]   " : "[FAIL] ") << name;
        if (!detail.empty()) out << " (" << detail << ")";
        out << "\n";
        if (!ok) ++failures;
    };

    check("tensor ops pass gradient checks", [] {
        Rng rng(1);
        auto make = [&](Shape s) {
            std::vector<double> v(s.numel());
            for (auto& x : v) x = rng.uniform(-1, 1);
            return Tensor::create(s, std::move(v), true);
        };
        auto x = make(Shape(4, 3));
        auto W = make(Shape(3, 5));
        auto b = make(Shape(5));
        if (grad_check([&](const TensorPtr& t) { return sum(relu(linear(t, W, b))); }, x, 1e-5) >=
            1e-4)
            return false;
        auto s = make(Shape(3, 4));
        return grad_check([](const TensorPtr& t) { return sum(periodic_shuffle(t, 2)); }, s,
                          1e-5) < 1e-4;
    });

    check("periodic shuffle round-trips", [] {
        Rng rng(2);
        for (int r : {1, 2, 3, 4}) {
            std::vector<double> v(6 * 2 * r);
            for (auto& x : v) x = rng.uniform(-1, 1);
            auto t = Tensor::create(Shape(6, 2 * r), v);
            if (inverse_shuffle(periodic_shuffle(t, r), r)->values() != v) return false;
        }
        return true;
    });

    check("grid knn equals brute force", [] {
        Rng rng(3);
        auto cloud = random_cloud(1200, rng);
        return knn_grid(cloud, 12, false).indices == knn_brute_force(cloud, 12, false).indices;
    });

    check("BVH surface distance equals the all-faces scan", [] {
        auto mesh = make_torus(12, 10);
        TriangleBvh bvh(mesh);
        Rng rng(4);
        for (int i = 0; i < 50; ++i) {
            const Vec3 p{rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)};
            if (std::abs(bvh.distance(p) - bvh.distance_brute(p)) > 1e-12) return false;
        }
        return true;
    });

    check("metric laws: symmetry, scaling, rigid invariance", [] {
        Rng rng(5);
        auto p = random_cloud(40, rng);
        auto q = random_cloud(55, rng);
        if (std::abs(chamfer_distance(p, q) - chamfer_distance(q, p)) > 1e-12) return false;
        if (std::abs(hausdorff_distance(p, q) - hausdorff_distance(q, p)) > 1e-12) return false;
        const double s = 1.7;
        auto scale_cloud = [&](const PointCloud& c) {
            PointCloud out = c;
            for (auto& v : out.points) v = v * s;
            return out;
        };
        if (std::abs(chamfer_distance(scale_cloud(p), scale_cloud(q)) -
                     s * s * chamfer_distance(p, q)) > 1e-9)
            return false;
        AugmentConfig rigid{true, false, false, 0.8, 1.2, 0.005, 0.015};
        Rng rot_rng(6);
        auto [pr, qr] = augment(p, q, rot_rng, rigid);
        return std::abs(chamfer_distance(pr, qr) - chamfer_distance(p, q)) < 1e-9 &&
               std::abs(hausdorff_distance(pr, qr) - hausdorff_distance(p, q)) < 1e-9;
    });

    check("chamfer gradient matches finite differences", [] {
        Rng rng(7);
        auto gt = random_cloud(12, rng);
        auto pred = random_cloud(8, rng);
        auto pred_tensor = cloud_to_tensor(pred);
        const double err = grad_check(
            [&](const TensorPtr& t) { return chamfer(t, gt); }, pred_tensor, 1e-6);
        return err < 1e-5;
    });

    check("adam drives a quadratic to zero", [] {
        AdamConfig cfg;
        cfg.lr = 0.1;
        AdamState::Moments moments;
        moments.m.assign(1, 0.0);
        moments.v.assign(1, 0.0);
        std::vector<double> w{1.0};
        for (std::int64_t step = 1; step <= 200; ++step)
            adam_update(w, {2.0 * w[0]}, moments, step, cfg);
        return std::abs(w[0]) < 1e-2;
    });

    check("full model gradient check on a tiny cloud", [] {
        const ModelConfig cfg = tiny_config();
        auto params = init_params(cfg, 11);
        Rng rng(8);
        auto cloud = random_cloud(16, rng);
        auto gt = random_cloud(32, rng);
        double worst = 0.0;
        params.for_each([&](const std::string&, TensorPtr& t) {
            TensorPtr& slot = t;
            const TensorPtr original = t;
            const double err = grad_check(
                [&](const TensorPtr& replaced) {
                    slot = replaced;
                    auto loss = chamfer(pugcn_forward(cloud, params, cfg), gt);
                    slot = original;
                    return loss;
                },
                original, 1e-5);
            worst = std::max(worst, err);
        });
        return worst < 1e-4;
    });

    check("model forward is permutation-equivariant", [] {
        const ModelConfig cfg = tiny_config();
        auto params = init_params(cfg, 13);
        Rng rng(9);
        auto cloud = random_cloud(64, rng);
        auto base = upsample_patch(cloud, params, cfg);
        std::vector<std::int64_t> perm(cloud.size());
        for (std::int64_t i = 0; i < cloud.size(); ++i) perm[i] = i;
        for (std::int64_t i = cloud.size() - 1; i > 0; --i)
            std::swap(perm[i], perm[rng.uniform_index(i + 1)]);
        PointCloud shuffled;
        shuffled.points.resize(cloud.size());
        for (std::int64_t i = 0; i < cloud.size(); ++i) shuffled.points[i] = cloud[perm[i]];
        auto permuted = upsample_patch(shuffled, params, cfg);
        for (std::int64_t i = 0; i < cloud.size(); ++i)
            for (int child = 0; child < cfg.ratio; ++child) {
                const Vec3 a = permuted[i * cfg.ratio + child];
                const Vec3 b = base[perm[i] * cfg.ratio + child];
                if (a.x != b.x || a.y != b.y || a.z != b.z) return false;
            }
        return true;
    });

    check("checkpoints round-trip bit-exactly", [] {
        const ModelConfig cfg = tiny_config();
        auto params = init_params(cfg, 17);
        auto state = init_adam_state(params);
        const std::string path = "/tmp/pugcn_selfcheck_ckpt.bin";
        save_checkpoint(params, state, cfg, path);
        auto loaded = load_checkpoint(path);
        std::vector<double> before, after;
        params.for_each([&](const std::string&, const TensorPtr& t) {
            before.insert(before.end(), t->values().begin(), t->values().end());
        });
        loaded.params.for_each([&](const std::string&, const TensorPtr& t) {
            after.insert(after.end(), t->values().begin(), t->values().end());
        });
        std::remove(path.c_str());
        return before == after;
    });

    out << (failures == 0 ? "selfcheck passed\n"
                          : strformat("selfcheck: %d failure(s)\n", failures));
    return failures;
}

}  // namespace pugcn
