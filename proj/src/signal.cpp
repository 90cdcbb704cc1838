#include "psqi/signal.hpp"

#include <cmath>
#include <stdexcept>

namespace psqi {

void validate_signal(const Signal& x) {
    if (!(x.fs_hz > 0.0)) {
        throw std::invalid_argument("signal: sampling rate must be > 0");
    }
    if (x.samples.size() < 2) {
        throw std::invalid_argument("signal: need at least 2 samples");
    }
    for (double v : x.samples) {
        if (!std::isfinite(v)) {
            throw std::invalid_argument("signal: samples must be finite");
        }
    }
}

double db_to_linear(double db) {
    return std::pow(10.0, db / 10.0);
}

double linear_to_db(double ratio) {
    if (!(ratio > 0.0)) {
        throw std::invalid_argument("linear_to_db: ratio must be > 0");
    }
    return 10.0 * std::log10(ratio);
}

double SnrConfig::gamma_linear() const { return db_to_linear(gamma_db); }
double SnrConfig::beta_linear() const { return db_to_linear(beta_db); }

double energy(const std::vector<double>& v) {
    double acc = 0.0;
    for (double s : v) acc += s * s;
    return acc;
}

double global_snr(const std::vector<double>& x_filt, const std::vector<double>& delta) {
    if (x_filt.size() != delta.size()) {
        throw std::invalid_argument("global_snr: length mismatch");
    }
    const double noise = energy(delta);
    if (noise == 0.0) {
        throw std::invalid_argument("global_snr: zero-energy perturbation (signal is unperturbed)");
    }
    return energy(x_filt) / noise;
}

double global_snr(const Signal& x_filt, const Signal& delta) {
    return global_snr(x_filt.samples, delta.samples);
}

std::vector<double> local_deviation_bound(const Signal& x_filt, double beta_linear, double floor) {
    if (!(beta_linear > 0.0)) {
        throw std::invalid_argument("local_deviation_bound: beta must be > 0");
    }
    const double inv_sqrt_beta = 1.0 / std::sqrt(beta_linear);
    std::vector<double> bound(x_filt.samples.size());
    for (std::size_t i = 0; i < bound.size(); ++i) {
        bound[i] = std::max(std::abs(x_filt.samples[i]) * inv_sqrt_beta, floor);
    }
    return bound;
}

} // namespace psqi
