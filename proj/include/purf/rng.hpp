#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>

namespace purf {

// SplitMix64 finalizer (Vigna). Used for key derivation and engine seeding.
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Counter-based key derivation: the result depends only on (seed, words...),
// never on how many other streams were derived before. Monte Carlo drivers
// key their substreams as (seed, domain, replicate[, tree]) so that changing
// the replicate count or the thread count does not perturb any other stream.
inline std::uint64_t derive_seed(std::uint64_t seed,
                                 std::initializer_list<std::uint64_t> words) {
    std::uint64_t h = seed;
    for (std::uint64_t w : words) {
        h = mix64(h ^ (0x9e3779b97f4a7c15ULL * (w + 1)));
    }
    return h;
}

// xoshiro256++ with SplitMix64 state expansion. Satisfies
// UniformRandomBitGenerator; all distribution helpers below are hand-rolled
// so that the produced sequences are identical across platforms.
class RngStream {
  public:
    using result_type = std::uint64_t;

    explicit RngStream(std::uint64_t seed) {
        std::uint64_t z = seed;
        for (auto& w : s_) {
            z += 0x9e3779b97f4a7c15ULL;
            w = mix64(z);
        }
    }

    RngStream(std::uint64_t seed, std::initializer_list<std::uint64_t> words)
        : RngStream(derive_seed(seed, words)) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~0ULL; }

    result_type operator()() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Strictly inside (0,1): 53-bit mantissa midpoints.
    double uniform01() {
        return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
    }

    // Standard normal via Box-Muller; one value per call, no cached spare.
    double normal();

    // Antithetic-free pair from a single Box-Muller transform; cheaper when
    // filling long noise vectors.
    void normal_pair(double& a, double& b);

    // Uniform on (-a, a).
    double uniform_sym(double a) { return a * (2.0 * uniform01() - 1.0); }

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }
    std::uint64_t s_[4];
};

inline void RngStream::normal_pair(double& a, double& b) {
    const double r = std::sqrt(-2.0 * std::log(uniform01()));
    const double theta = 6.283185307179586476925286766559 * uniform01();
    a = r * std::cos(theta);
    b = r * std::sin(theta);
}

inline double RngStream::normal() {
    double a, b;
    normal_pair(a, b);
    return a;
}

}  // namespace purf
