#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>

namespace jsel {

// splitmix64 finalizer: bijective 64-bit avalanche.
constexpr std::uint64_t avalanche64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Splittable seed derivation. Every random stream in the project is keyed
// by a path of words under a base seed, e.g.
//   child_seed(base, {rep, delta_index, bag})
// so results are independent of scheduling and worker count.
constexpr std::uint64_t child_seed(std::uint64_t seed, std::uint64_t word) {
    return avalanche64(seed ^ avalanche64(word + 0x9e3779b97f4a7c15ULL));
}

inline std::uint64_t child_seed(std::uint64_t seed,
                                std::initializer_list<std::uint64_t> path) {
    std::uint64_t h = seed;
    for (auto w : path) h = child_seed(h, w);
    return h;
}

// splitmix64 stream with Marsaglia-polar Gaussians. Hand-rolled rather than
// <random> so that byte-level reproducibility does not depend on the
// standard library's unspecified normal_distribution algorithm.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        return avalanche64(state_);
    }

    // Uniform in [0, 1), 53-bit resolution.
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0, bound) via rejection, bias-free.
    std::uint64_t next_below(std::uint64_t bound) {
        const std::uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            const std::uint64_t r = next_u64();
            if (r >= threshold) return r % bound;
        }
    }

    // Standard normal via the polar method; one spare value is cached.
    double next_gaussian() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * next_unit() - 1.0;
            v = 2.0 * next_unit() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        has_spare_ = true;
        return u * f;
    }

private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace jsel
