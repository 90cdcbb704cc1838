#pragma once

#include <cstddef>
#include <vector>

namespace psqi {

// Uniformly sampled univariate time series. Samples carry whatever unit the
// source uses (typically mV); fs_hz is the sampling rate.
struct Signal {
    std::vector<double> samples;
    double fs_hz = 0.0;

    std::size_t size() const { return samples.size(); }
    double duration_s() const { return samples.empty() ? 0.0 : static_cast<double>(samples.size()) / fs_hz; }
};

// Throws std::invalid_argument unless fs > 0, N >= 2 and all samples are finite.
void validate_signal(const Signal& x);

// Minimal-SNR configuration. Values are stored in dB and converted to linear
// ratios where the constraints are applied. local_floor is a deviation floor
// in signal units for samples where the filtered signal crosses zero.
struct SnrConfig {
    double gamma_db = 25.0; // global minimum SNR
    double beta_db = 10.0;  // local (sample-wise) minimum SNR
    double local_floor = 0.0;

    double gamma_linear() const;
    double beta_linear() const;
};

double db_to_linear(double db);
double linear_to_db(double ratio);

double energy(const std::vector<double>& v); // sum of squares

// Global SNR as a linear ratio: ||x_filt||^2 / ||delta||^2.
// Throws std::invalid_argument on length mismatch or zero-energy delta.
double global_snr(const Signal& x_filt, const Signal& delta);
double global_snr(const std::vector<double>& x_filt, const std::vector<double>& delta);

// Per-sample deviation bound implied by the local SNR constraint:
// bound_i = max(|x_filt_i| / sqrt(beta_linear), floor).
std::vector<double> local_deviation_bound(const Signal& x_filt, double beta_linear, double floor);

} // namespace psqi
