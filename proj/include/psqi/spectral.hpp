#pragma once

#include <cstddef>
#include <vector>

namespace psqi {

// One-sided power spectrum estimate on the grid f_k = k * fs / nfft.
struct PowerSpectrum {
    std::vector<double> freqs_hz;
    std::vector<double> power;
};

// Plain periodogram of the full signal (rectangular window, direct DFT).
PowerSpectrum periodogram(const std::vector<double>& x, double fs_hz);

// Welch estimate: Hann windows of `segment_s` seconds with 50% overlap,
// averaged periodograms. Falls back to a single full-length segment when the
// signal is shorter than one segment.
PowerSpectrum welch_psd(const std::vector<double>& x, double fs_hz, double segment_s = 2.0);

// Sum of spectral power over f in [lo_hz, hi_hz] (inclusive).
double band_power(const PowerSpectrum& psd, double lo_hz, double hi_hz);

} // namespace psqi
