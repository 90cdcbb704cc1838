#include "psqi/filter.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace psqi {

namespace {

using cplx = std::complex<double>;

struct AnalogZpk {
    std::vector<cplx> zeros;
    std::vector<cplx> poles;
};

// Analog Butterworth lowpass prototype: poles on the unit circle in the left
// half plane, no finite zeros.
std::vector<cplx> prototype_poles(int order) {
    std::vector<cplx> p(order);
    for (int k = 0; k < order; ++k) {
        const double angle = std::numbers::pi * (2.0 * k + order + 1.0) / (2.0 * order);
        p[k] = std::polar(1.0, angle);
    }
    return p;
}

double prewarp(double f_hz, double fs_hz) {
    return 2.0 * fs_hz * std::tan(std::numbers::pi * f_hz / fs_hz);
}

void check_cutoff(double f_hz, double fs_hz) {
    if (!(f_hz > 0.0) || !(f_hz < 0.5 * fs_hz)) {
        throw std::invalid_argument("design_butterworth: cutoff must lie strictly inside (0, fs/2)");
    }
}

// Group a conjugate-symmetric pole set into biquad denominators. Complex
// poles pair with their conjugates; real poles pair among themselves, a
// leftover real pole becomes a first-order section (a2 = 0).
std::vector<BiquadSection> pair_poles(const std::vector<cplx>& poles) {
    std::vector<cplx> upper;
    std::vector<double> reals;
    for (const cplx& p : poles) {
        const double tol = 1e-9 * std::max(1.0, std::abs(p));
        if (std::abs(p.imag()) <= tol) {
            reals.push_back(p.real());
        } else if (p.imag() > 0.0) {
            upper.push_back(p);
        }
    }
    // Sections closest to the unit circle first, so the least damped pair is
    // realized on its own.
    std::sort(upper.begin(), upper.end(),
              [](const cplx& a, const cplx& b) { return std::abs(a) > std::abs(b); });
    std::sort(reals.begin(), reals.end(),
              [](double a, double b) { return std::abs(a) > std::abs(b); });

    std::vector<BiquadSection> sections;
    for (const cplx& p : upper) {
        BiquadSection s;
        s.a1 = -2.0 * p.real();
        s.a2 = std::norm(p);
        sections.push_back(s);
    }
    std::size_t i = 0;
    for (; i + 1 < reals.size(); i += 2) {
        BiquadSection s;
        s.a1 = -(reals[i] + reals[i + 1]);
        s.a2 = reals[i] * reals[i + 1];
        sections.push_back(s);
    }
    if (i < reals.size()) {
        BiquadSection s;
        s.a1 = -reals[i];
        s.a2 = 0.0;
        sections.push_back(s);
    }
    return sections;
}

bool section_is_first_order(const BiquadSection& s) { return s.a2 == 0.0; }

} // namespace

FilterSpec FilterSpec::lowpass(int order, double cutoff_hz) {
    return FilterSpec{order, FilterKind::lowpass, cutoff_hz, 0.0};
}

FilterSpec FilterSpec::highpass(int order, double cutoff_hz) {
    return FilterSpec{order, FilterKind::highpass, cutoff_hz, 0.0};
}

FilterSpec FilterSpec::bandpass(int order, double lo_hz, double hi_hz) {
    return FilterSpec{order, FilterKind::bandpass, lo_hz, hi_hz};
}

FilterCoefficients design_butterworth(const FilterSpec& spec, double fs_hz) {
    if (spec.order < 1) {
        throw std::invalid_argument("design_butterworth: order must be >= 1");
    }
    if (!(fs_hz > 0.0)) {
        throw std::invalid_argument("design_butterworth: fs must be > 0");
    }
    check_cutoff(spec.cutoff_lo_hz, fs_hz);

    AnalogZpk analog;
    analog.poles = prototype_poles(spec.order);
    double ref_freq_hz = 0.0; // where the passband gain is pinned to 1
    int zeros_at_plus_one = 0;
    int zeros_at_minus_one = 0;

    switch (spec.kind) {
        case FilterKind::lowpass: {
            const double wc = prewarp(spec.cutoff_lo_hz, fs_hz);
            for (cplx& p : analog.poles) p *= wc;
            zeros_at_minus_one = spec.order;
            ref_freq_hz = 0.0;
            break;
        }
        case FilterKind::highpass: {
            const double wc = prewarp(spec.cutoff_lo_hz, fs_hz);
            for (cplx& p : analog.poles) p = wc / p;
            zeros_at_plus_one = spec.order;
            ref_freq_hz = 0.5 * fs_hz;
            break;
        }
        case FilterKind::bandpass: {
            check_cutoff(spec.cutoff_hi_hz, fs_hz);
            if (!(spec.cutoff_lo_hz < spec.cutoff_hi_hz)) {
                throw std::invalid_argument("design_butterworth: bandpass requires low < high cutoff");
            }
            const double w1 = prewarp(spec.cutoff_lo_hz, fs_hz);
            const double w2 = prewarp(spec.cutoff_hi_hz, fs_hz);
            const double w0 = std::sqrt(w1 * w2);
            const double bw = w2 - w1;
            std::vector<cplx> transformed;
            transformed.reserve(2 * analog.poles.size());
            for (const cplx& p : analog.poles) {
                const cplx t = 0.5 * bw * p;
                const cplx r = std::sqrt(t * t - w0 * w0);
                transformed.push_back(t + r);
                transformed.push_back(t - r);
            }
            analog.poles = std::move(transformed);
            zeros_at_plus_one = spec.order;
            zeros_at_minus_one = spec.order;
            // The prototype's unity-gain point (analog DC) maps to w0; back
            // through the bilinear transform that is the digital reference.
            ref_freq_hz = std::atan(w0 / (2.0 * fs_hz)) * fs_hz / std::numbers::pi;
            break;
        }
    }

    // Bilinear transform of the poles; zeros land exactly on z = +1 / z = -1.
    const double fs2 = 2.0 * fs_hz;
    std::vector<cplx> digital_poles;
    digital_poles.reserve(analog.poles.size());
    for (const cplx& p : analog.poles) {
        digital_poles.push_back((fs2 + p) / (fs2 - p));
    }

    FilterCoefficients coeffs;
    coeffs.design_order = spec.order;
    coeffs.fs_hz = fs_hz;
    coeffs.sections = pair_poles(digital_poles);

    // Distribute the zeros. Every bandpass section gets one zero at +1 and
    // one at -1 (a bandpass biquad); lowpass/highpass sections get a double
    // zero at -1 / +1, with a single zero for a first-order leftover.
    int plus_left = zeros_at_plus_one;
    int minus_left = zeros_at_minus_one;
    for (BiquadSection& s : coeffs.sections) {
        if (section_is_first_order(s)) {
            if (plus_left > 0 && minus_left == 0) {
                s.b0 = 1.0; s.b1 = -1.0; s.b2 = 0.0;
                --plus_left;
            } else {
                s.b0 = 1.0; s.b1 = 1.0; s.b2 = 0.0;
                --minus_left;
            }
        } else if (plus_left > 0 && minus_left > 0) {
            s.b0 = 1.0; s.b1 = 0.0; s.b2 = -1.0;
            --plus_left; --minus_left;
        } else if (plus_left > 0) {
            s.b0 = 1.0; s.b1 = -2.0; s.b2 = 1.0;
            plus_left -= 2;
        } else {
            s.b0 = 1.0; s.b1 = 2.0; s.b2 = 1.0;
            minus_left -= 2;
        }
    }

    // Pin the reference-frequency gain to exactly 1 by folding the overall
    // gain into the first section.
    const double g = filter_magnitude(coeffs, ref_freq_hz);
    if (!(g > 0.0) || !std::isfinite(g)) {
        throw std::runtime_error("design_butterworth: degenerate reference gain");
    }
    const double scale = 1.0 / g;
    coeffs.sections.front().b0 *= scale;
    coeffs.sections.front().b1 *= scale;
    coeffs.sections.front().b2 *= scale;

    return coeffs;
}

std::complex<double> filter_response(const FilterCoefficients& coeffs, double freq_hz) {
    const double w = 2.0 * std::numbers::pi * freq_hz / coeffs.fs_hz;
    const cplx z1 = std::polar(1.0, -w);
    const cplx z2 = z1 * z1;
    cplx h(1.0, 0.0);
    for (const BiquadSection& s : coeffs.sections) {
        h *= (s.b0 + s.b1 * z1 + s.b2 * z2) / (1.0 + s.a1 * z1 + s.a2 * z2);
    }
    return h;
}

double filter_magnitude(const FilterCoefficients& coeffs, double freq_hz) {
    return std::abs(filter_response(coeffs, freq_hz));
}

bool filter_is_stable(const FilterCoefficients& coeffs) {
    // Stability triangle for real biquads: |a2| < 1 and |a1| < 1 + a2.
    for (const BiquadSection& s : coeffs.sections) {
        if (!(std::abs(s.a2) < 1.0)) return false;
        if (!(std::abs(s.a1) < 1.0 + s.a2)) return false;
    }
    return true;
}

std::vector<double> sosfilt(const FilterCoefficients& coeffs, const std::vector<double>& x,
                            const std::vector<double>* zi) {
    const std::size_t nsec = coeffs.sections.size();
    std::vector<double> z(2 * nsec, 0.0);
    if (zi) {
        if (zi->size() != z.size()) {
            throw std::invalid_argument("sosfilt: zi size mismatch");
        }
        z = *zi;
    }
    std::vector<double> y(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) {
        double v = x[k];
        for (std::size_t si = 0; si < nsec; ++si) {
            const BiquadSection& s = coeffs.sections[si];
            double& z1 = z[2 * si];
            double& z2 = z[2 * si + 1];
            const double out = s.b0 * v + z1;
            z1 = s.b1 * v - s.a1 * out + z2;
            z2 = s.b2 * v - s.a2 * out;
            v = out;
        }
        y[k] = v;
    }
    return y;
}

std::vector<double> sosfilt_zi(const FilterCoefficients& coeffs) {
    // Per-section steady state for a unit step, scaled by the cumulative DC
    // gain of the upstream sections.
    std::vector<double> zi(2 * coeffs.sections.size(), 0.0);
    double cum_gain = 1.0;
    for (std::size_t i = 0; i < coeffs.sections.size(); ++i) {
        const BiquadSection& s = coeffs.sections[i];
        const double sum_b = s.b0 + s.b1 + s.b2;
        const double sum_a = 1.0 + s.a1 + s.a2;
        const double y_ss = (sum_a != 0.0) ? sum_b / sum_a : 0.0;
        zi[2 * i] = (y_ss - s.b0) * cum_gain;
        zi[2 * i + 1] = (s.b2 - s.a2 * y_ss) * cum_gain;
        cum_gain *= y_ss;
    }
    return zi;
}

std::vector<double> filtfilt(const FilterCoefficients& coeffs, const std::vector<double>& x,
                             std::size_t pad_len) {
    if (coeffs.sections.empty()) {
        throw std::invalid_argument("filtfilt: empty filter");
    }
    const std::size_t n = x.size();
    if (n < 2) {
        throw std::invalid_argument("filtfilt: signal too short");
    }
    if (pad_len >= n) {
        throw std::invalid_argument("filtfilt: signal shorter than pad length");
    }

    // Odd reflection about the end points.
    std::vector<double> ext;
    ext.reserve(n + 2 * pad_len);
    for (std::size_t i = pad_len; i >= 1; --i) ext.push_back(2.0 * x.front() - x[i]);
    ext.insert(ext.end(), x.begin(), x.end());
    for (std::size_t i = 1; i <= pad_len; ++i) ext.push_back(2.0 * x.back() - x[n - 1 - i]);

    const std::vector<double> zi_base = sosfilt_zi(coeffs);
    std::vector<double> zi(zi_base.size());

    for (std::size_t i = 0; i < zi.size(); ++i) zi[i] = zi_base[i] * ext.front();
    std::vector<double> fwd = sosfilt(coeffs, ext, &zi);

    std::reverse(fwd.begin(), fwd.end());
    for (std::size_t i = 0; i < zi.size(); ++i) zi[i] = zi_base[i] * fwd.front();
    std::vector<double> bwd = sosfilt(coeffs, fwd, &zi);
    std::reverse(bwd.begin(), bwd.end());

    return std::vector<double>(bwd.begin() + static_cast<std::ptrdiff_t>(pad_len),
                               bwd.begin() + static_cast<std::ptrdiff_t>(pad_len + n));
}

std::vector<double> filtfilt(const FilterCoefficients& coeffs, const std::vector<double>& x) {
    if (x.size() < 2) {
        throw std::invalid_argument("filtfilt: signal too short");
    }
    const std::size_t pad = std::min<std::size_t>(3 * (2 * static_cast<std::size_t>(coeffs.design_order) + 1),
                                                  x.size() - 1);
    return filtfilt(coeffs, x, pad);
}

Signal filtfilt(const FilterCoefficients& coeffs, const Signal& x) {
    return Signal{filtfilt(coeffs, x.samples), x.fs_hz};
}

Signal useful_component(const Signal& x) {
    if (!(x.fs_hz > 1.0)) {
        throw std::invalid_argument("useful_component: fs must exceed 1 Hz");
    }
    const FilterCoefficients hp = design_butterworth(FilterSpec::highpass(6, 0.5), x.fs_hz);
    return filtfilt(hp, x);
}

} // namespace psqi
