#pragma once

#include <array>
#include <cstdint>

namespace spinfb::rng {

/// Philox4x32-10 counter-based generator (Salmon et al., SC 2011).
///
/// Every draw is a pure function of (key, counter), so streams can be
/// consumed in any order -- or in parallel -- and still reproduce the same
/// values bit-exactly. The 128-bit counter is addressed as a (hi, lo) pair
/// of 64-bit indices; callers assign index meaning (shot, probe, draw, ...).
class Philox {
  public:
    explicit Philox(std::uint64_t seed)
        : key_{static_cast<std::uint32_t>(seed),
               static_cast<std::uint32_t>(seed >> 32)} {}

    std::array<std::uint32_t, 4> block(std::uint64_t hi, std::uint64_t lo) const;

    /// Uniform double in [0, 1), 53 significant bits.
    double uniform(std::uint64_t hi, std::uint64_t lo) const;

    /// One standard normal (variance 1) via Box-Muller on a single block.
    double normal(std::uint64_t hi, std::uint64_t lo) const;

    /// Full 64-bit integer.
    std::uint64_t integer(std::uint64_t hi, std::uint64_t lo) const;

  private:
    std::array<std::uint32_t, 2> key_;
};

/// Decorrelated child seed for an auxiliary stream (reference runs,
/// per-gain ensembles, bootstrap). splitmix64 finalizer.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace spinfb::rng
