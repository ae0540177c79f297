#include "pugcn/training.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>

#include "pugcn/losses.hpp"

static_assert(std::endian::native == std::endian::little,
              "checkpoint format assumes a little-endian host");

namespace pugcn {

// ---- Adam -------------------------------------------------------------------

AdamState init_adam_state(const ModelParams& params) {
    AdamState state;
    params.for_each([&](const std::string& name, const TensorPtr& t) {
        AdamState::Moments m;
        m.m.assign(t->numel(), 0.0);
        m.v.assign(t->numel(), 0.0);
        state.slots.emplace_back(name, std::move(m));
    });
    return state;
}

void adam_update(std::vector<double>& values, const std::vector<double>& grads,
                 AdamState::Moments& moments, std::int64_t step, const AdamConfig& cfg) {
    const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(step));
    const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(step));
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double g = grads[i];
        moments.m[i] = cfg.beta1 * moments.m[i] + (1.0 - cfg.beta1) * g;
        moments.v[i] = cfg.beta2 * moments.v[i] + (1.0 - cfg.beta2) * g * g;
        const double m_hat = moments.m[i] / bc1;
        const double v_hat = moments.v[i] / bc2;
        values[i] -= cfg.lr * m_hat / (std::sqrt(v_hat) + cfg.eps);
    }
}

void adam_step(ModelParams& params, const GradMap& grads, AdamState& state,
               const AdamConfig& cfg) {
    state.step += 1;
    std::size_t slot = 0;
    params.for_each([&](const std::string& name, TensorPtr& t) {
        const auto it = grads.find(name);
        if (it == grads.end())
            throw ContractError(strformat("adam_step: missing gradient for parameter %s",
                                          name.c_str()));
        if (static_cast<std::int64_t>(it->second.size()) != t->numel())
            throw ContractError(strformat("adam_step: gradient size %zu for %s (expected %lld)",
                                          it->second.size(), name.c_str(),
                                          static_cast<long long>(t->numel())));
        auto& moments = state.slots[slot].second;
        std::vector<double> values = t->values();
        adam_update(values, it->second, moments, state.step, cfg);
        t = Tensor::create(t->shape(), std::move(values), true);
        ++slot;
    });
}

// ---- training loop -----------------------------------------------------------

void TrainConfig::validate() const {
    if (adam.lr <= 0.0) throw ConfigError("TrainConfig: lr must be positive");
    if (adam.beta1 < 0.0 || adam.beta1 >= 1.0 || adam.beta2 < 0.0 || adam.beta2 >= 1.0)
        throw ConfigError("TrainConfig: betas must lie in [0, 1)");
    if (batch_size < 1) throw ConfigError("TrainConfig: batch_size must be >= 1");
    if (epochs < 0) throw ConfigError("TrainConfig: epochs must be >= 0");
}

TrainResult train(const std::vector<PatchPair>& pairs, const ModelConfig& model_cfg,
                  const TrainConfig& train_cfg) {
    model_cfg.validate();
    train_cfg.validate();
    if (pairs.empty()) throw DataError("train: empty dataset");
    for (const auto& pair : pairs) {
        if (pair.gt.size() != pair.input.size() * model_cfg.ratio)
            throw DataError(strformat("train: pair \"%s\" has %lld input and %lld gt points, "
                                      "which does not match ratio %d",
                                      pair.source_id.c_str(),
                                      static_cast<long long>(pair.input.size()),
                                      static_cast<long long>(pair.gt.size()), model_cfg.ratio));
    }

    AugmentConfig aug_cfg;
    aug_cfg.rotate = train_cfg.aug_rotate;
    aug_cfg.scale = train_cfg.aug_scale;
    aug_cfg.jitter = train_cfg.aug_jitter;
    const bool any_aug = aug_cfg.rotate || aug_cfg.scale || aug_cfg.jitter;

    TrainResult result;
    result.params = init_params(model_cfg, train_cfg.seed);
    result.state = init_adam_state(result.params);

    const std::int64_t n = static_cast<std::int64_t>(pairs.size());
    for (int epoch = 1; epoch <= train_cfg.epochs; ++epoch) {
        Rng epoch_rng(Rng::derive_seed(train_cfg.seed, static_cast<std::uint64_t>(epoch)));
        std::vector<std::int64_t> order(n);
        std::iota(order.begin(), order.end(), 0);
        for (std::int64_t i = n - 1; i > 0; --i)
            std::swap(order[i], order[epoch_rng.uniform_index(i + 1)]);

        double epoch_loss = 0.0;
        for (std::int64_t begin = 0; begin < n; begin += train_cfg.batch_size) {
            const std::int64_t end = std::min<std::int64_t>(n, begin + train_cfg.batch_size);
            const double batch_count = static_cast<double>(end - begin);
            GradMap grad_sums;
            result.params.for_each([&](const std::string& name, TensorPtr& t) {
                grad_sums[name].assign(t->numel(), 0.0);
            });
            for (std::int64_t i = begin; i < end; ++i) {
                const PatchPair& pair = pairs[order[i]];
                PointCloud in_cloud = pair.input, gt_cloud = pair.gt;
                if (any_aug) {
                    auto [aug_in, aug_gt] = augment(pair.input, pair.gt, epoch_rng, aug_cfg);
                    in_cloud = std::move(aug_in);
                    gt_cloud = std::move(aug_gt);
                }
                Tape tape;
                {
                    Tape::Scope scope(tape);
                    auto pred = pugcn_forward(in_cloud, result.params, model_cfg);
                    auto loss = chamfer(pred, gt_cloud);
                    tape.backward(loss);
                    epoch_loss += loss->values()[0];
                }
                result.params.for_each([&](const std::string& name, TensorPtr& t) {
                    auto& sums = grad_sums[name];
                    const auto& g = t->grad();
                    for (std::size_t j = 0; j < sums.size(); ++j) sums[j] += g[j];
                });
            }
            for (auto& [name, sums] : grad_sums)
                for (double& g : sums) g /= batch_count;
            adam_step(result.params, grad_sums, result.state, train_cfg.adam);
        }
        result.epoch_loss.push_back(epoch_loss / static_cast<double>(n));

        if (!train_cfg.checkpoint_path.empty() && train_cfg.checkpoint_every > 0 &&
            epoch % train_cfg.checkpoint_every == 0)
            save_checkpoint(result.params, result.state, model_cfg, train_cfg.checkpoint_path);
    }

    if (!train_cfg.checkpoint_path.empty())
        save_checkpoint(result.params, result.state, model_cfg, train_cfg.checkpoint_path);
    if (!train_cfg.loss_log_path.empty()) write_loss_log(train_cfg.loss_log_path, result.epoch_loss);
    return result;
}

void write_loss_log(const std::string& path, const std::vector<double>& epoch_loss) {
    std::ofstream out(path);
    if (!out) throw DataError(strformat("cannot open %s for writing", path.c_str()));
    out << "epoch,mean_cd\n";
    for (std::size_t i = 0; i < epoch_loss.size(); ++i)
        out << strformat("%zu,%.12g\n", i + 1, epoch_loss[i]);
    if (!out) throw DataError(strformat("write failed: %s", path.c_str()));
}

// ---- checkpoints -------------------------------------------------------------

namespace {

constexpr char kMagic[4] = {'P', 'U', 'G', 'C'};
constexpr std::uint32_t kVersion = 1;

struct Writer {
    std::ofstream out;

    explicit Writer(const std::string& path) : out(path, std::ios::binary) {
        if (!out) throw DataError(strformat("cannot open %s for writing", path.c_str()));
    }
    void bytes(const void* p, std::size_t n) {
        out.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
    }
    void u32(std::uint32_t v) { bytes(&v, 4); }
    void i32(std::int32_t v) { bytes(&v, 4); }
    void i64(std::int64_t v) { bytes(&v, 8); }
    void str(const std::string& s) {
        u32(static_cast<std::uint32_t>(s.size()));
        bytes(s.data(), s.size());
    }
    void doubles(const std::vector<double>& v) { bytes(v.data(), v.size() * sizeof(double)); }
};

struct Reader {
    std::ifstream in;
    std::int64_t offset = 0;
    std::string path;

    explicit Reader(const std::string& p) : in(p, std::ios::binary), path(p) {
        if (!in) throw DataError(strformat("cannot open %s for reading", p.c_str()));
    }
    void bytes(void* p, std::size_t n) {
        in.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
        if (in.gcount() != static_cast<std::streamsize>(n))
            throw FormatError(strformat("%s: truncated at offset %lld", path.c_str(),
                                        static_cast<long long>(offset)));
        offset += static_cast<std::int64_t>(n);
    }
    std::uint32_t u32() {
        std::uint32_t v;
        bytes(&v, 4);
        return v;
    }
    std::int32_t i32() {
        std::int32_t v;
        bytes(&v, 4);
        return v;
    }
    std::int64_t i64() {
        std::int64_t v;
        bytes(&v, 8);
        return v;
    }
    std::string str() {
        const std::uint32_t n = u32();
        if (n > 4096)
            throw FormatError(strformat("%s: implausible name length %u at offset %lld",
                                        path.c_str(), n, static_cast<long long>(offset)));
        std::string s(n, '\0');
        bytes(s.data(), n);
        return s;
    }
};

void write_tensor_record(Writer& w, const std::string& name, const Shape& shape,
                         const std::vector<double>& values) {
    w.str(name);
    w.u32(static_cast<std::uint32_t>(shape.rank()));
    for (int i = 0; i < shape.rank(); ++i) w.i64(shape.dim(i));
    w.doubles(values);
}

std::vector<double> read_tensor_record(Reader& r, const std::string& expected_name,
                                       const Shape& expected_shape) {
    const std::string name = r.str();
    if (name != expected_name)
        throw FormatError(strformat("%s: expected record \"%s\", found \"%s\" at offset %lld",
                                    r.path.c_str(), expected_name.c_str(), name.c_str(),
                                    static_cast<long long>(r.offset)));
    const std::uint32_t rank = r.u32();
    if (rank != static_cast<std::uint32_t>(expected_shape.rank()))
        throw FormatError(strformat("%s: record \"%s\" has rank %u, expected %d", r.path.c_str(),
                                    name.c_str(), rank, expected_shape.rank()));
    for (std::uint32_t i = 0; i < rank; ++i) {
        const std::int64_t extent = r.i64();
        if (extent != expected_shape.dim(static_cast<int>(i)))
            throw FormatError(strformat("%s: record \"%s\" extent %lld does not match the "
                                        "configured shape %s",
                                        r.path.c_str(), name.c_str(),
                                        static_cast<long long>(extent),
                                        expected_shape.str().c_str()));
    }
    std::vector<double> values(expected_shape.numel());
    r.bytes(values.data(), values.size() * sizeof(double));
    return values;
}

void write_config(Writer& w, const ModelConfig& cfg) {
    w.i32(cfg.ratio);
    w.i32(cfg.num_inception);
    w.i32(static_cast<std::int32_t>(cfg.upsampler));
    w.i32(cfg.embed_channels);
    w.i32(cfg.bottleneck_channels);
    w.i32(cfg.growth);
    w.i32(cfg.k);
    w.i32(cfg.dilation1);
    w.i32(cfg.dilation2);
    w.i32(cfg.compress_channels);
}

ModelConfig read_config(Reader& r) {
    ModelConfig cfg;
    cfg.ratio = r.i32();
    cfg.num_inception = r.i32();
    const std::int32_t variant = r.i32();
    if (variant < 0 || variant > 2)
        throw FormatError(strformat("%s: bad upsampler tag %d", r.path.c_str(), variant));
    cfg.upsampler = static_cast<UpsamplerVariant>(variant);
    cfg.embed_channels = r.i32();
    cfg.bottleneck_channels = r.i32();
    cfg.growth = r.i32();
    cfg.k = r.i32();
    cfg.dilation1 = r.i32();
    cfg.dilation2 = r.i32();
    cfg.compress_channels = r.i32();
    return cfg;
}

std::string config_difference(const ModelConfig& a, const ModelConfig& b) {
    auto field = [](const char* name, long long x, long long y) {
        return x == y ? std::string() : strformat("%s %lld != %lld; ", name, x, y);
    };
    std::string diff;
    diff += field("ratio", a.ratio, b.ratio);
    diff += field("num_inception", a.num_inception, b.num_inception);
    diff += field("upsampler", static_cast<int>(a.upsampler), static_cast<int>(b.upsampler));
    diff += field("embed_channels", a.embed_channels, b.embed_channels);
    diff += field("bottleneck_channels", a.bottleneck_channels, b.bottleneck_channels);
    diff += field("growth", a.growth, b.growth);
    diff += field("k", a.k, b.k);
    diff += field("dilation1", a.dilation1, b.dilation1);
    diff += field("dilation2", a.dilation2, b.dilation2);
    diff += field("compress_channels", a.compress_channels, b.compress_channels);
    return diff;
}

}  // namespace

void save_checkpoint(const ModelParams& params, const AdamState& state, const ModelConfig& cfg,
                     const std::string& path) {
    Writer w(path);
    w.bytes(kMagic, 4);
    w.u32(kVersion);
    write_config(w, cfg);
    w.i64(state.step);

    std::uint32_t records = 0;
    params.for_each([&](const std::string&, const TensorPtr&) { ++records; });
    records += static_cast<std::uint32_t>(2 * state.slots.size());
    w.u32(records);

    params.for_each([&](const std::string& name, const TensorPtr& t) {
        write_tensor_record(w, name, t->shape(), t->values());
    });
    for (const auto& [name, moments] : state.slots) {
        write_tensor_record(w, "adam.m." + name,
                            Shape(static_cast<std::int64_t>(moments.m.size())), moments.m);
        write_tensor_record(w, "adam.v." + name,
                            Shape(static_cast<std::int64_t>(moments.v.size())), moments.v);
    }
    if (!w.out) throw DataError(strformat("write failed: %s", path.c_str()));
}

Checkpoint load_checkpoint(const std::string& path, const ModelConfig* expected) {
    Reader r(path);
    char magic[4];
    r.bytes(magic, 4);
    if (std::memcmp(magic, kMagic, 4) != 0)
        throw FormatError(strformat("%s: bad magic at offset 0", path.c_str()));
    const std::uint32_t version = r.u32();
    if (version != kVersion)
        throw FormatError(strformat("%s: unsupported format version %u", path.c_str(), version));

    Checkpoint ckpt;
    ckpt.config = read_config(r);
    if (expected) {
        const std::string diff = config_difference(ckpt.config, *expected);
        if (!diff.empty())
            throw DimensionError(strformat("%s: checkpoint config does not match the requested "
                                           "model: %s",
                                           path.c_str(), diff.c_str()));
    }
    const std::int64_t step = r.i64();
    const std::uint32_t records = r.u32();

    // structure comes from the config; records must line up exactly
    ckpt.params = init_params(ckpt.config, 0);
    ckpt.state = init_adam_state(ckpt.params);
    ckpt.state.step = step;

    std::uint32_t expected_records = 0;
    ckpt.params.for_each([&](const std::string&, const TensorPtr&) { ++expected_records; });
    expected_records += static_cast<std::uint32_t>(2 * ckpt.state.slots.size());
    if (records != expected_records)
        throw FormatError(strformat("%s: %u records, expected %u for this config", path.c_str(),
                                    records, expected_records));

    ckpt.params.for_each([&](const std::string& name, TensorPtr& t) {
        t = Tensor::create(t->shape(), read_tensor_record(r, name, t->shape()), true);
    });
    for (auto& [name, moments] : ckpt.state.slots) {
        moments.m = read_tensor_record(r, "adam.m." + name,
                                       Shape(static_cast<std::int64_t>(moments.m.size())));
        moments.v = read_tensor_record(r, "adam.v." + name,
                                       Shape(static_cast<std::int64_t>(moments.v.size())));
    }
    return ckpt;
}

}  // namespace pugcn
