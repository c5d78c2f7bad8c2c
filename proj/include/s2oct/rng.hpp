#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace s2oct {

// Seedable 64-bit generator with a platform-stable sequence. The core is
// splitmix64 (Steele/Lea/Flood); bounded draws use rejection sampling so the
// same seed yields byte-identical samples on every platform and compiler.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform integer in [0, bound), unbiased. bound must be > 0.
    std::uint64_t below(std::uint64_t bound) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        std::uint64_t v;
        do {
            v = next();
        } while (v >= limit);
        return v % bound;
    }

    // Uniform double in [0, 1) with 53 bits of precision.
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform01() < p; }

    // Gaussian via Box-Muller on two independent uniforms.
    double gaussian(double mean, double stddev) {
        double u1 = 0.0;
        while (u1 <= 0.0) u1 = uniform01();
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        return mean + stddev * r * std::cos(6.28318530717958647692 * u2);
    }

private:
    std::uint64_t state_;
};

// Mixes arbitrary tags (strings, integers) into a seed; used to derive
// independent per-(instance, design, replicate) streams from one base seed.
inline std::uint64_t mix_seed(std::uint64_t seed, std::string_view tag) {
    std::uint64_t h = seed ^ 0x9e3779b97f4a7c15ULL;
    for (unsigned char c : tag) {
        h ^= c;
        h *= 0x100000001b3ULL;
        h ^= h >> 29;
    }
    return h;
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t tag) {
    Rng r(seed ^ (tag * 0xd1342543de82ef95ULL + 0x2545f4914f6cdd1dULL));
    return r.next();
}

}  // namespace s2oct
