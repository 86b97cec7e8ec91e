#include "spinfb/rng.hpp"

#include <cmath>
#include <numbers>

namespace spinfb::rng {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline double to_unit(std::uint32_t lo, std::uint32_t hi) {
    const std::uint64_t bits =
        (static_cast<std::uint64_t>(hi) << 32) | lo;
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

}  // namespace

std::array<std::uint32_t, 4> Philox::block(std::uint64_t hi,
                                           std::uint64_t lo) const {
    std::array<std::uint32_t, 4> x{
        static_cast<std::uint32_t>(lo), static_cast<std::uint32_t>(lo >> 32),
        static_cast<std::uint32_t>(hi), static_cast<std::uint32_t>(hi >> 32)};
    std::uint32_t k0 = key_[0];
    std::uint32_t k1 = key_[1];
    for (int round = 0; round < 10; ++round) {
        if (round != 0) {
            k0 += kWeyl0;
            k1 += kWeyl1;
        }
        const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * x[0];
        const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * x[2];
        x = {static_cast<std::uint32_t>(p1 >> 32) ^ x[1] ^ k0,
             static_cast<std::uint32_t>(p1),
             static_cast<std::uint32_t>(p0 >> 32) ^ x[3] ^ k1,
             static_cast<std::uint32_t>(p0)};
    }
    return x;
}

double Philox::uniform(std::uint64_t hi, std::uint64_t lo) const {
    const auto w = block(hi, lo);
    return to_unit(w[0], w[1]);
}

double Philox::normal(std::uint64_t hi, std::uint64_t lo) const {
    const auto w = block(hi, lo);
    // u1 in (0, 1] so the log is finite; u2 in [0, 1).
    const std::uint64_t bits1 =
        ((static_cast<std::uint64_t>(w[1]) << 32) | w[0]) >> 11;
    const double u1 = static_cast<double>(bits1 + 1) * 0x1.0p-53;
    const double u2 = to_unit(w[2], w[3]);
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t Philox::integer(std::uint64_t hi, std::uint64_t lo) const {
    const auto w = block(hi, lo);
    return (static_cast<std::uint64_t>(w[1]) << 32) | w[0];
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

}  // namespace spinfb::rng
