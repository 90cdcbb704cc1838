#include "psqi/noise.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace psqi {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;
}

std::uint64_t mix64(std::uint64_t v) {
    v ^= v >> 30;
    v *= 0xBF58476D1CE4E5B9ull;
    v ^= v >> 27;
    v *= 0x94D049BB133111EBull;
    v ^= v >> 31;
    return v;
}

std::uint64_t SplitMix64::next_u64() {
    state_ += kGolden;
    return mix64(state_);
}

double SplitMix64::next_unit() {
    // 53-bit mantissa, shifted into (0, 1] so log() below stays finite.
    return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
}

double SplitMix64::next_normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    const double u1 = next_unit();
    const double u2 = next_unit();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double phi = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(phi);
    has_spare_ = true;
    return r * std::cos(phi);
}

NoiseSample sample_noise(std::uint64_t seed, std::size_t n) {
    if (n < 2) {
        throw std::invalid_argument("sample_noise: need n >= 2");
    }
    NoiseSample z;
    z.seed = seed;
    z.values.resize(n);
    SplitMix64 rng(seed);
    for (std::size_t i = 0; i < n; ++i) {
        z.values[i] = rng.next_normal();
    }
    return z;
}

std::uint64_t derive_window_seed(std::uint64_t master_seed, std::uint64_t window_index) {
    return mix64(master_seed + kGolden * (window_index + 1));
}

} // namespace psqi
