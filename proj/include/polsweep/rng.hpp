#pragma once

// Counter-based pseudo-random generator for Monte-Carlo disorder draws.
//
// Every output is a pure function of (seed, stream, counter) via the
// SplitMix64 finalizer, so a draw for sample k / parameter p is identical no
// matter which thread computes it or in which order — the reproducibility
// contract for ensemble runs.

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace polsweep {

namespace detail {
inline uint64_t splitmix64(uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}
}  // namespace detail

class CounterRng {
  public:
    // stream separates independent draw sequences sharing one seed, e.g.
    // stream = sample_index * n_parameters + parameter_index.
    CounterRng(uint64_t seed, uint64_t stream)
        : key_(detail::splitmix64(detail::splitmix64(seed) ^
                                  (stream * 0xda942042e4dd58b5ULL))) {}

    uint64_t next_u64() { return detail::splitmix64(key_ + (counter_++) * 0x9e3779b97f4a7c15ULL); }

    // Uniform in [0, 1), 53-bit resolution.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Standard normal via Box-Muller; consumes two uniforms per call.
    double normal() {
        const double u1 = 1.0 - uniform();  // (0, 1]: keeps log finite
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    // Zero-mean Gaussian with std sigma, rejection-sampled into [lo, hi].
    double truncated_normal(double sigma, double lo, double hi) {
        if (!(lo < hi)) throw std::invalid_argument("truncated_normal: empty interval");
        if (sigma == 0.0) {
            if (lo > 0.0 || hi < 0.0)
                throw std::invalid_argument("truncated_normal: sigma = 0 outside interval");
            return 0.0;
        }
        for (int it = 0; it < 100000; ++it) {
            const double x = sigma * normal();
            if (x >= lo && x <= hi) return x;
        }
        throw std::runtime_error("truncated_normal: rejection sampling failed to converge");
    }

  private:
    uint64_t key_;
    uint64_t counter_ = 0;
};

}  // namespace polsweep
