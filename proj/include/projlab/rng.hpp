#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace projlab {

/// Deterministic random stream. All randomness in the library flows through
/// named substreams of a single root seed, so re-running any computation with
/// the same seed reproduces every draw bit for bit. Distribution transforms
/// are spelled out here instead of using <random> distributions, whose output
/// is implementation-defined.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Child stream keyed by (seed, name, index). FNV-1a over the name mixed
    /// with splitmix64 keeps unrelated streams decorrelated.
    static Rng substream(std::uint64_t seed, std::string_view name, std::uint64_t index = 0) {
        std::uint64_t h = 1469598103934665603ull;
        for (char c : name) {
            h ^= static_cast<unsigned char>(c);
            h *= 1099511628211ull;
        }
        h ^= mix(seed + 0x9e3779b97f4a7c15ull);
        h ^= mix(index + 0x2545f4914f6cdd1dull);
        return Rng(mix(h));
    }

    std::uint64_t bits() { return engine_(); }

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(bits() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [lo, hi] by rejection-free modulo (bias negligible
    /// for the small ranges used here, but we reject anyway to stay exact).
    std::uint64_t integer(std::uint64_t lo, std::uint64_t hi) {
        const std::uint64_t span = hi - lo + 1;
        const std::uint64_t limit = std::uint64_t(-1) - std::uint64_t(-1) % span;
        std::uint64_t v;
        do {
            v = bits();
        } while (v >= limit);
        return lo + v % span;
    }

    /// Standard normal via Box-Muller (both uniforms always consumed).
    double gaussian() {
        const double u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log1p(-u1));
        return r * std::cos(6.283185307179586476925286766559 * u2);
    }

    std::complex<double> complex_gaussian() {
        const double u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-std::log1p(-u1));
        const double t = 6.283185307179586476925286766559 * u2;
        return {r * std::cos(t), r * std::sin(t)};
    }

    std::vector<std::complex<double>> gaussian_vector(std::size_t n) {
        std::vector<std::complex<double>> v(n);
        for (auto& z : v) z = complex_gaussian();
        return v;
    }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ull;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    std::mt19937_64 engine_;
};

} // namespace projlab
