#pragma once

#include <cstdint>
#include <vector>

namespace psqi {

// Reproducibility contract for every random draw in this project:
// a splitmix64 counter generator feeding a Box-Muller transform. The
// identifier below is recorded in all output metadata; changing the
// generator means changing the identifier.
inline constexpr const char* kPrngIdentity = "splitmix64-boxmuller-v1";

// splitmix64 finalizer; also used as the seed-mixing function.
std::uint64_t mix64(std::uint64_t v);

// Counter-based uniform stream: state advances by the splitmix64 increment,
// each output is mix64 of the state.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64();
    double next_unit();   // uniform on (0, 1]
    double next_normal(); // standard normal via Box-Muller

private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

// Fixed i.i.d. standard-normal noise sample, deterministic in (seed, n).
struct NoiseSample {
    std::vector<double> values;
    std::uint64_t seed = 0;
};

// Throws std::invalid_argument for n < 2.
NoiseSample sample_noise(std::uint64_t seed, std::size_t n);

// Per-window seed derivation: mix64(master + GOLDEN * (index + 1)). Keeping
// this a single documented formula makes every window's draw re-derivable
// from the run metadata.
std::uint64_t derive_window_seed(std::uint64_t master_seed, std::uint64_t window_index);

} // namespace psqi
