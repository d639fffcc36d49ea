// Counter-based splittable random number generation. Per-trajectory streams
// are derived from (master_seed, stream_index), so ensemble results do not
// depend on execution order or worker count.

#pragma once

#include <cstdint>

namespace nbundle {

inline std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
}

class SplitMix64 {
  public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        state_ += 0x9E3779B97F4A7C15ull;
        return mix64(state_);
    }

    // Uniform in [0, 1).
    double uniform() { return (next() >> 11) * 0x1.0p-53; }

  private:
    std::uint64_t state_;
};

inline std::uint64_t derive_stream_seed(std::uint64_t master_seed, std::uint64_t index) {
    return mix64(master_seed + 0x9E3779B97F4A7C15ull * (index + 1));
}

}  // namespace nbundle
