#include "psqi/perturbation.hpp"

#include "psqi/errors.hpp"
#include "psqi/filter.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace psqi {

void validate_perturbation_params(const PerturbationParams& theta, double fs_hz) {
    if (!(theta.f_low_hz > 0.0) || !(theta.f_low_hz < theta.f_high_hz) ||
        !(theta.f_high_hz < 0.5 * fs_hz)) {
        throw std::invalid_argument("perturbation params: need 0 < f_low < f_high < fs/2");
    }
    if (theta.f_high_hz - theta.f_low_hz < kMinPerturbationBandwidthHz - 1e-9) {
        throw std::invalid_argument("perturbation params: band too narrow");
    }
}

std::vector<double> unclipped_deviation(const Signal& x_filt, const NoiseSample& z,
                                        const PerturbationParams& theta, const SnrConfig& cfg,
                                        double fs_hz) {
    if (z.values.size() != x_filt.samples.size()) {
        throw std::invalid_argument("apply_perturbation: length mismatch");
    }
    validate_perturbation_params(theta, fs_hz);

    const double signal_energy = energy(x_filt.samples);
    if (signal_energy == 0.0) {
        throw DegenerateSignalError("apply_perturbation: filtered signal has zero energy");
    }

    const FilterCoefficients shaping =
        design_butterworth(FilterSpec::bandpass(6, theta.f_low_hz, theta.f_high_hz), fs_hz);
    std::vector<double> shaped = filtfilt(shaping, z.values);

    const double shaped_energy = energy(shaped);
    if (shaped_energy == 0.0) {
        throw DegenerateNoiseError("apply_perturbation: shaped noise has zero energy");
    }

    const double scale = std::sqrt(signal_energy) /
                         (std::sqrt(cfg.gamma_linear()) * std::sqrt(shaped_energy));
    for (double& v : shaped) v *= scale;
    return shaped;
}

Signal apply_perturbation(const Signal& x, const Signal& x_filt, const NoiseSample& z,
                          const PerturbationParams& theta, const SnrConfig& cfg) {
    if (x.samples.size() != x_filt.samples.size()) {
        throw std::invalid_argument("apply_perturbation: length mismatch");
    }
    std::vector<double> delta = unclipped_deviation(x_filt, z, theta, cfg, x.fs_hz);
    const std::vector<double> bound = local_deviation_bound(x_filt, cfg.beta_linear(), cfg.local_floor);

    Signal out;
    out.fs_hz = x.fs_hz;
    out.samples.resize(x.samples.size());
    for (std::size_t i = 0; i < out.samples.size(); ++i) {
        const double clipped = std::clamp(delta[i], -bound[i], bound[i]);
        out.samples[i] = x.samples[i] + clipped;
    }
    return out;
}

} // namespace psqi
