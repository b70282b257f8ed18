#pragma once

#include <cstdint>

namespace restlab {

// Counter-based SplitMix64 stream.  Draw i of stream `seed` is
//   mix64(seed + (i+1) * 0x9E3779B97F4A7C15)
// with the standard SplitMix64 finalizer, so any draw can be reproduced from
// (seed, index) alone and results never depend on call interleaving or
// thread scheduling.  Unit doubles take the top 53 bits into [0, 1).
class SplitMix64 {
  public:
    explicit SplitMix64(std::uint64_t seed) : seed_(seed) {}

    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    static std::uint64_t at(std::uint64_t seed, std::uint64_t index) {
        return mix(seed + (index + 1) * 0x9E3779B97F4A7C15ULL);
    }

    std::uint64_t next() { return at(seed_, counter_++); }

    double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // Uniform in [-1, 1).
    double next_symmetric() { return 2.0 * next_unit() - 1.0; }

    // Uniform integer in [0, n).
    std::uint64_t next_below(std::uint64_t n) { return next() % n; }

    // Independent substream labeled by `stream`; derivation never collides
    // with next() draws because it hashes through a distinct constant first.
    SplitMix64 fork(std::uint64_t stream) const {
        return SplitMix64(at(seed_ ^ 0x6A09E667F3BCC909ULL, stream));
    }

    std::uint64_t seed() const { return seed_; }

  private:
    std::uint64_t seed_;
    std::uint64_t counter_ = 0;
};

}  // namespace restlab
