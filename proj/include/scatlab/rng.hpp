#pragma once

#include <cmath>
#include <cstdint>

namespace scatlab {

// Counter-based generator: every draw is a pure hash of
// (master seed, stream index, counter), so sample i of a Monte Carlo run
// produces identical bits regardless of scheduling or platform.
class CounterRng {
  public:
    CounterRng(std::uint64_t seed, std::uint64_t stream)
        : base_(mix(seed ^ mix(stream * 0x9E3779B97F4A7C15ull + 0x632BE59BD9B4E019ull))),
          ctr_(0) {}

    std::uint64_t next_u64() {
        return mix(base_ + (++ctr_) * 0x9E3779B97F4A7C15ull);
    }

    // uniform in [0, 1)
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // uniform in (0, 1]
    double uniform_pos() {
        return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

    double gaussian() {
        const double u = uniform_pos();
        const double v = uniform();
        return std::sqrt(-2.0 * std::log(u)) * std::cos(6.283185307179586476925287 * v);
    }

  private:
    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xBF58476D1CE4E5B9ull;
        z ^= z >> 27;
        z *= 0x94D049BB133111EBull;
        z ^= z >> 31;
        return z;
    }

    std::uint64_t base_;
    std::uint64_t ctr_;
};

} // namespace scatlab
