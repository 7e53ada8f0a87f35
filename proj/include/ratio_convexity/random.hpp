#pragma once

// Counter-based seeding: every replication r derives its own generator from
// (seed, r), so results never depend on the order replications run in.

#include <cmath>
#include <cstdint>
#include <numbers>

namespace ratio_convexity {

/// SplitMix64 finalizer.
constexpr std::uint64_t splitmix64_mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

/// SplitMix64 generator (Steele, Lea, Flood). Satisfies UniformRandomBitGenerator.
class SplitMix64 {
  public:
    using result_type = std::uint64_t;

    explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return ~result_type{0}; }

    constexpr result_type operator()() noexcept { return splitmix64_mix(state_ += 0x9e3779b97f4a7c15ull); }

  private:
    std::uint64_t state_;
};

/// Seed of substream `index` under `seed`.
constexpr std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index) noexcept {
    return splitmix64_mix(splitmix64_mix(seed) ^ splitmix64_mix(index + 0x632be59bd9b4e019ull));
}

/// Uniform double in (0, 1], 53 random bits.
inline double uniform_open_closed(SplitMix64& rng) noexcept {
    return static_cast<double>((rng() >> 11) + 1) * 0x1.0p-53;
}

/// Standard normal deviates by Box-Muller, caching the second value. The
/// standard library distributions are implementation-defined, which would
/// break cross-platform fixtures.
class NormalSource {
  public:
    explicit NormalSource(std::uint64_t seed) noexcept : rng_(seed) {}

    double operator()() noexcept {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = uniform_open_closed(rng_);
        const double u2 = uniform_open_closed(rng_);
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        spare_ = radius * std::sin(angle);
        has_spare_ = true;
        return radius * std::cos(angle);
    }

    SplitMix64& engine() noexcept { return rng_; }

  private:
    SplitMix64 rng_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// Laplace(0, scale) by inverse CDF from one uniform.
inline double laplace_deviate(SplitMix64& rng, double scale = 1.0) noexcept {
    const double u = uniform_open_closed(rng) - 0.5;  // (-0.5, 0.5]
    const double a = 1.0 - 2.0 * std::abs(u);
    // a == 0 only when u == 0.5; map that measure-zero corner to the median.
    if (a <= 0.0) return 0.0;
    return -scale * std::copysign(1.0, u) * std::log(a);
}

}  // namespace ratio_convexity
