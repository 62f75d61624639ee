#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace subheat {

// Counter-based stream: output j of stream (seed, key) is a pure function of
// (seed, key, j), so per-path streams are reproducible independently of how
// work is split across threads.
struct RngStream {
    std::uint64_t base = 0;
    std::uint64_t ctr = 0;
    bool have_spare = false;
    double spare = 0.0;

    static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;

    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    RngStream() = default;
    RngStream(std::uint64_t seed, std::uint64_t key)
        : base(mix(seed + kGamma) ^ mix((key + 1) * 0xD1B54A32D192ED03ull)) {}

    std::uint64_t next_u64() { return mix(base + (++ctr) * kGamma); }

    /// uniform in (0, 1)
    double next_uniform() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// standard normal (Box-Muller, pairs cached)
    double next_normal() {
        if (have_spare) {
            have_spare = false;
            return spare;
        }
        const double u1 = next_uniform();
        const double u2 = next_uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * std::numbers::pi * u2;
        spare = r * std::sin(a);
        have_spare = true;
        return r * std::cos(a);
    }
};

} // namespace subheat
