#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

namespace casispec {

// splitmix64 finalizer, used to derive independent substream seeds from a
// (seed, tag, index) triple. Every parallel unit of work (dataset sample,
// forest tree, ...) owns such a stream, which makes results independent of
// worker count and scheduling.
inline std::uint64_t mix64(std::uint64_t x) {
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ull;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebull;
    x ^= x >> 31;
    return x;
}

inline std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t tag, std::uint64_t index = 0) {
    std::uint64_t h = mix64(seed + 0x9e3779b97f4a7c15ull);
    h = mix64(h ^ (tag * 0xff51afd7ed558ccdull));
    return mix64(h + index * 0xc4ceb9fe1a85ec53ull + 1);
}

// Substream tags. Arbitrary distinct constants.
namespace stream_tag {
inline constexpr std::uint64_t sample = 1;
inline constexpr std::uint64_t split = 2;
inline constexpr std::uint64_t ensemble = 3;
inline constexpr std::uint64_t tree = 4;
inline constexpr std::uint64_t fold = 5;
inline constexpr std::uint64_t train = 6;
inline constexpr std::uint64_t bootstrap_band = 7;
inline constexpr std::uint64_t noise = 8;
inline constexpr std::uint64_t grid_point = 9;
}  // namespace stream_tag

// mt19937_64 engine with hand-rolled transforms: the standard engine output
// is specified bit-exactly, the standard distributions are not, and outputs
// here must be reproducible byte for byte.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // [0, 1), 53-bit resolution
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double a, double b) { return a + (b - a) * uniform01(); }

    double log_uniform10(double log10_lo, double log10_hi) {
        return std::pow(10.0, uniform(log10_lo, log10_hi));
    }

    // unbiased [0, n)
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t min = (0 - n) % n;  // 2^64 mod n
        for (;;) {
            const std::uint64_t x = next_u64();
            if (x >= min) return x % n;
        }
    }

    int uniform_int(int lo, int hi) {  // inclusive
        return lo + static_cast<int>(below(static_cast<std::uint64_t>(hi - lo) + 1));
    }

    bool bernoulli(double p) { return uniform01() < p; }

    // Box-Muller, two uniforms per call
    double normal() {
        double u1;
        do {
            u1 = uniform01();
        } while (u1 <= 0.0);
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace casispec
