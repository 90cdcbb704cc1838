#pragma once

#include "psqi/signal.hpp"

#include <complex>
#include <cstddef>
#include <vector>

namespace psqi {

enum class FilterKind { lowpass, highpass, bandpass };

// Frequency-domain specification of a Butterworth filter. `order` is the
// analog prototype order; a bandpass realization has 2*order poles.
struct FilterSpec {
    int order = 0;
    FilterKind kind = FilterKind::lowpass;
    double cutoff_lo_hz = 0.0;
    double cutoff_hi_hz = 0.0; // bandpass only

    static FilterSpec lowpass(int order, double cutoff_hz);
    static FilterSpec highpass(int order, double cutoff_hz);
    static FilterSpec bandpass(int order, double lo_hz, double hi_hz);
};

// One biquad with a0 normalized to 1.
struct BiquadSection {
    double b0 = 0.0, b1 = 0.0, b2 = 0.0;
    double a1 = 0.0, a2 = 0.0;
};

// Cascaded second-order sections plus the design metadata filtfilt needs.
struct FilterCoefficients {
    std::vector<BiquadSection> sections;
    int design_order = 0;
    double fs_hz = 0.0;
};

// Discrete Butterworth design: analog prototype, frequency transform with
// bilinear prewarping, then pairing into second-order sections. The passband
// reference gain is normalized to exactly 1 (DC for lowpass, Nyquist for
// highpass, the warped center frequency for bandpass).
// Throws std::invalid_argument for order < 1 or cutoffs outside (0, fs/2).
FilterCoefficients design_butterworth(const FilterSpec& spec, double fs_hz);

// Complex frequency response H(e^{j 2 pi f / fs}) of the cascade.
std::complex<double> filter_response(const FilterCoefficients& coeffs, double freq_hz);
double filter_magnitude(const FilterCoefficients& coeffs, double freq_hz);

// All section poles strictly inside the unit circle.
bool filter_is_stable(const FilterCoefficients& coeffs);

// Forward-backward (zero-phase) filtering with odd-reflection padding of
// length min(3 * (2 * design_order + 1), N - 1) and steady-state initial
// conditions matched to the padded edge values. Output length equals input
// length. Throws std::invalid_argument when the signal is too short for the
// requested padding.
std::vector<double> filtfilt(const FilterCoefficients& coeffs, const std::vector<double>& x);
Signal filtfilt(const FilterCoefficients& coeffs, const Signal& x);

// Explicit pad length variant; pad_len must satisfy pad_len < N.
std::vector<double> filtfilt(const FilterCoefficients& coeffs, const std::vector<double>& x,
                             std::size_t pad_len);

// Single forward pass through the cascade (direct form II transposed),
// starting from state `zi` scaled by nothing; zi layout is 2 values per
// section. Used by filtfilt and exposed for tests.
std::vector<double> sosfilt(const FilterCoefficients& coeffs, const std::vector<double>& x,
                            const std::vector<double>* zi = nullptr);

// Steady-state step-response state of the cascade (2 values per section).
std::vector<double> sosfilt_zi(const FilterCoefficients& coeffs);

// The useful-component filter: zero-phase sixth-order 0.5 Hz Butterworth
// highpass, removing constant offsets and baseline wander. Requires fs > 1 Hz.
Signal useful_component(const Signal& x);

} // namespace psqi
