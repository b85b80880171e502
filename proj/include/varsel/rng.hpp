#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

#include "varsel/multi_index.hpp"

namespace varsel::rng {

// Deterministic, platform-independent randomness. Normal deviates come from
// Box-Muller over splitmix64 output, so identical seeds give bit-identical
// samples on every platform; splitmix64 output quality is well documented
// and more than adequate for Monte Carlo use.

inline constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += kGamma);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

inline std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
    std::uint64_t s = a ^ (b + kGamma + (a << 6) + (a >> 2));
    return splitmix64(s);
}

// Order-independent canonical hash of a multi-index (folds dimension and
// every entry through the avalanche).
inline std::uint64_t hash_index(const MultiIndex& k) {
    std::uint64_t h = static_cast<std::uint64_t>(k.dim()) * 0x9E3779B97F4A7C15ull;
    for (auto e : k.entries) h = mix(h, static_cast<std::uint64_t>(static_cast<std::int64_t>(e)));
    return h;
}

// 53-bit uniform in (0, 1]; never zero, so log() below is safe.
inline double to_unit(std::uint64_t bits) {
    return static_cast<double>((bits >> 11) + 1) * 0x1.0p-53;
}

// One standard normal deviate fully determined by `key` (value semantics:
// the same key always yields the same deviate).
inline double gaussian_at(std::uint64_t key) {
    std::uint64_t s = key;
    double u1 = to_unit(splitmix64(s));
    double u2 = to_unit(splitmix64(s));
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

// Sequential stream for simulations that consume randomness in order.
class Stream {
  public:
    explicit Stream(std::uint64_t seed) : state_(mix(seed, 0x5851F42D4C957F2Dull)) {}

    std::uint64_t next_bits() { return splitmix64(state_); }
    double next_unit() { return to_unit(next_bits()); }

    double next_gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = next_unit();
        double u2 = next_unit();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

  private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

// Counter-based per-trial seeds: independent of scheduling order.
inline std::uint64_t trial_seed(std::uint64_t base, std::uint64_t trial) {
    return mix(base, 0xA24BAED4963EE407ull + trial);
}

}  // namespace varsel::rng
