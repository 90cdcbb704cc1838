#pragma once

#include "psqi/noise.hpp"
#include "psqi/signal.hpp"

namespace psqi {

// Bandpass cutoffs of the noise-shaping filter.
struct PerturbationParams {
    double f_low_hz = 0.0;
    double f_high_hz = 0.0;
};

// Admissible parameter range enforced by the search-space codec.
inline constexpr double kMinPerturbationFreqHz = 0.1;
inline constexpr double kMinPerturbationBandwidthHz = 0.5;
inline constexpr double kMaxPerturbationFreqFraction = 0.45; // of fs

// Throws std::invalid_argument unless 0 < f_low < f_high < fs/2 and the band
// is at least kMinPerturbationBandwidthHz wide.
void validate_perturbation_params(const PerturbationParams& theta, double fs_hz);

// Additive colored-Gaussian perturbation:
//   1. shape z through a zero-phase sixth-order Butterworth bandpass at theta;
//   2. scale so the pre-clip global SNR equals cfg's gamma exactly;
//   3. clip each deviation into the local SNR bound;
//   4. add to x.
// Throws DegenerateSignalError when ||x_filt|| = 0 and DegenerateNoiseError
// when the shaped noise has zero energy.
Signal apply_perturbation(const Signal& x, const Signal& x_filt, const NoiseSample& z,
                          const PerturbationParams& theta, const SnrConfig& cfg);

// The shaped-and-scaled deviation before clipping; exposed so callers can
// audit the exact-SNR property without duplicating the pipeline.
std::vector<double> unclipped_deviation(const Signal& x_filt, const NoiseSample& z,
                                        const PerturbationParams& theta, const SnrConfig& cfg,
                                        double fs_hz);

} // namespace psqi
