#include "psqi/spectral.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace psqi {

namespace {

// Direct real DFT power at bins 0..nfft/2. The windows here are a few
// hundred samples, so the quadratic cost is irrelevant and we keep exact
// bin frequencies without padding.
std::vector<double> dft_power(const std::vector<double>& x) {
    const std::size_t n = x.size();
    const std::size_t n_bins = n / 2 + 1;
    std::vector<double> power(n_bins);
    const double step = 2.0 * std::numbers::pi / static_cast<double>(n);
    for (std::size_t k = 0; k < n_bins; ++k) {
        double re = 0.0, im = 0.0;
        const double wk = step * static_cast<double>(k);
        for (std::size_t t = 0; t < n; ++t) {
            const double phase = wk * static_cast<double>(t);
            re += x[t] * std::cos(phase);
            im -= x[t] * std::sin(phase);
        }
        double p = (re * re + im * im) / static_cast<double>(n);
        // One-sided spectrum: interior bins carry both halves.
        if (k != 0 && !(n % 2 == 0 && k == n_bins - 1)) p *= 2.0;
        power[k] = p;
    }
    return power;
}

} // namespace

PowerSpectrum periodogram(const std::vector<double>& x, double fs_hz) {
    if (x.size() < 2) throw std::invalid_argument("periodogram: need >= 2 samples");
    PowerSpectrum out;
    out.power = dft_power(x);
    out.freqs_hz.resize(out.power.size());
    for (std::size_t k = 0; k < out.freqs_hz.size(); ++k) {
        out.freqs_hz[k] = static_cast<double>(k) * fs_hz / static_cast<double>(x.size());
    }
    return out;
}

PowerSpectrum welch_psd(const std::vector<double>& x, double fs_hz, double segment_s) {
    if (x.size() < 2) throw std::invalid_argument("welch_psd: need >= 2 samples");
    std::size_t seg = static_cast<std::size_t>(std::llround(segment_s * fs_hz));
    seg = std::min(seg, x.size());
    if (seg < 2) seg = x.size();
    const std::size_t hop = std::max<std::size_t>(1, seg / 2);

    std::vector<double> window(seg);
    double window_power = 0.0;
    for (std::size_t i = 0; i < seg; ++i) {
        window[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                         static_cast<double>(seg - 1));
        window_power += window[i] * window[i];
    }

    std::vector<double> acc(seg / 2 + 1, 0.0);
    std::size_t n_segments = 0;
    std::vector<double> buf(seg);
    for (std::size_t start = 0; start + seg <= x.size(); start += hop) {
        for (std::size_t i = 0; i < seg; ++i) buf[i] = x[start + i] * window[i];
        const std::vector<double> p = dft_power(buf);
        for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += p[k];
        ++n_segments;
        if (start + seg == x.size()) break;
    }

    PowerSpectrum out;
    out.power.resize(acc.size());
    out.freqs_hz.resize(acc.size());
    const double norm = static_cast<double>(n_segments) * window_power / static_cast<double>(seg);
    for (std::size_t k = 0; k < acc.size(); ++k) {
        out.power[k] = acc[k] / norm;
        out.freqs_hz[k] = static_cast<double>(k) * fs_hz / static_cast<double>(seg);
    }
    return out;
}

double band_power(const PowerSpectrum& psd, double lo_hz, double hi_hz) {
    double acc = 0.0;
    for (std::size_t k = 0; k < psd.freqs_hz.size(); ++k) {
        if (psd.freqs_hz[k] >= lo_hz && psd.freqs_hz[k] <= hi_hz) acc += psd.power[k];
    }
    return acc;
}

} // namespace psqi
