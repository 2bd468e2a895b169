#pragma once

// Deterministic random streams.  mt19937_64 supplies the bits (its output is
// specified by the standard, so results are reproducible across platforms);
// normals are produced by inverse-CDF through norm_ppf rather than
// std::normal_distribution, whose algorithm is implementation-defined.

#include "nes/special.hpp"

#include <cstdint>
#include <random>

namespace nes {

inline std::uint64_t splitmix64_next(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    // uniform on the open interval (0, 1)
    double uniform() {
        return (static_cast<double>(eng_() >> 11) + 0.5) * 0x1.0p-53;
    }

    double normal() { return norm_ppf(uniform()); }

    std::uint64_t bits() { return eng_(); }

  private:
    std::mt19937_64 eng_;
};

// Independent per-index substream of a base seed (path simulations,
// multi-start draws).  Two splitmix rounds decorrelate adjacent indices.
inline Rng derive_stream(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t s = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
    std::uint64_t a = splitmix64_next(s);
    std::uint64_t b = splitmix64_next(s);
    return Rng(a ^ (b << 1));
}

}  // namespace nes
