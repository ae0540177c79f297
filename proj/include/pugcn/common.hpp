#pragma once

#include <cmath>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <random>
#include <stdexcept>
#include <string>

namespace pugcn {

// Error hierarchy. Each category maps to one class of contract violation so
// callers (and the CLI exit-code mapping) can tell them apart.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DimensionError : Error { using Error::Error; };   // tensor/cloud shape mismatch
struct IndexError : Error { using Error::Error; };       // out-of-range index
struct ArgumentError : Error { using Error::Error; };    // invalid argument value
struct ContractError : Error { using Error::Error; };    // API precondition violated
struct ConfigError : Error { using Error::Error; };      // bad model/train configuration
struct FormatError : Error { using Error::Error; };      // malformed or truncated file
struct DataError : Error { using Error::Error; };        // dataset-level problem
struct NumericalError : Error { using Error::Error; };   // NaN/Inf detected

// printf-style formatting into std::string.
inline std::string strformat(const char* fmt, ...) {
    va_list args;
    va_start(args, fmt);
    va_list copy;
    va_copy(copy, args);
    const int n = std::vsnprintf(nullptr, 0, fmt, copy);
    va_end(copy);
    std::string out(n > 0 ? static_cast<size_t>(n) : 0, '\0');
    if (n > 0) std::vsnprintf(out.data(), out.size() + 1, fmt, args);
    va_end(args);
    return out;
}

// Deterministic RNG. The engine (mt19937_64) is bit-exact across platforms;
// the value mappings are hand-rolled so results do not depend on the standard
// library's distribution implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    // Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer in [0, n). Rejection sampling, unbiased.
    std::uint64_t uniform_index(std::uint64_t n) {
        if (n == 0) throw ArgumentError("Rng::uniform_index: n must be positive");
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x;
        do { x = gen_(); } while (x >= limit);
        return x % n;
    }

    // Standard normal via Marsaglia polar method.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = uniform(-1.0, 1.0);
            v = uniform(-1.0, 1.0);
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double m = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * m;
        have_spare_ = true;
        return u * m;
    }

    // Derive an independent stream; used for per-mesh / per-epoch seeding.
    static std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
        // splitmix64 over the pair
        std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

private:
    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace pugcn
