#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace epochdd {

// Seedable 64-bit generator (mt19937_64 core, which is fully specified by
// the standard) with hand-rolled uniform/gaussian mappings so that streams
// do not depend on the standard library's unspecified distribution
// implementations.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform in (0, 1); 53-bit mantissa, never exactly 0.
    double uniform() {
        return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    double log_uniform(double lo, double hi) {
        return std::exp(uniform(std::log(lo), std::log(hi)));
    }

    // Standard normal via Box-Muller, one spare cached.
    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double theta = 2.0 * M_PI * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

    // Derives an independent stream for a sub-task.
    Rng fork(std::uint64_t salt) {
        return Rng(next_u64() ^ (0x9e3779b97f4a7c15ULL * (salt + 1)));
    }

  private:
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace epochdd
