#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace oncache {

// Mixes a master seed with a stream id so components that need their own
// randomness can derive independent generators deterministically.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Seedable 64-bit generator with portable sampling helpers. The raw engine is
// std::mt19937_64, whose bit stream is fixed by the standard; the helpers
// avoid std::*_distribution, which are implementation-defined.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next_u64() { return eng_(); }

    // Uniform in [0, 1) with 53-bit resolution.
    double uniform01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0, n), rejection-free modulo bias avoided by
    // rejection sampling on the top range.
    std::uint64_t uniform_below(std::uint64_t n) {
        if (n == 0) return 0;
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
        std::uint64_t v = eng_();
        while (v >= limit) v = eng_();
        return v % n;
    }

    // Standard normal via Box-Muller; draws two uniforms per call.
    double normal() {
        double u1 = uniform01();
        while (u1 <= 0.0) u1 = uniform01();
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

    double exponential(double rate) {
        double u = uniform01();
        while (u <= 0.0) u = uniform01();
        return -std::log(u) / rate;
    }

    // Pareto with given shape and scale (minimum value = scale).
    double pareto(double shape, double scale) {
        double u = uniform01();
        while (u <= 0.0) u = uniform01();
        return scale * std::pow(u, -1.0 / shape);
    }

private:
    std::mt19937_64 eng_;
};

}  // namespace oncache
