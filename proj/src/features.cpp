#include "psqi/features.hpp"

#include "psqi/errors.hpp"
#include "psqi/metrics.hpp"
#include "psqi/spectral.hpp"
#include "psqi/tasks.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace psqi {

namespace {

constexpr double kBeatHalfWindowS = 0.300;
constexpr double kAgreementToleranceS = 0.100;

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
    const std::size_t n = a.size();
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < n; ++i) { ma += a[i]; mb += b[i]; }
    ma /= static_cast<double>(n);
    mb /= static_cast<double>(n);
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double da = a[i] - ma;
        const double db = b[i] - mb;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    if (saa == 0.0 || sbb == 0.0) return 0.0;
    return sab / std::sqrt(saa * sbb);
}

std::string format_cell(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string format_cell(const std::optional<double>& v) {
    return v ? format_cell(*v) : std::string{};
}

std::optional<double> parse_optional(const std::string& cell) {
    if (cell.empty()) return std::nullopt;
    return std::stod(cell);
}

} // namespace

FeatureVector extract_features(const Signal& x) {
    validate_signal(x);
    if (x.duration_s() < 5.0) {
        throw std::invalid_argument("extract_features: need at least 5 s of signal");
    }

    FeatureVector f;
    const std::size_t n = x.samples.size();

    // Standardized central moments (population form).
    double mean = 0.0;
    for (double v : x.samples) mean += v;
    mean /= static_cast<double>(n);
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double v : x.samples) {
        const double d = v - mean;
        const double d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= static_cast<double>(n);
    m3 /= static_cast<double>(n);
    m4 /= static_cast<double>(n);
    f.skewness = m2 > 0.0 ? m3 / std::pow(m2, 1.5) : 0.0;
    f.kurtosis = m2 > 0.0 ? m4 / (m2 * m2) : 0.0;

    // Band power ratio and spectral purity from one Welch periodogram.
    const PowerSpectrum psd = welch_psd(x.samples, x.fs_hz);
    const double total = band_power(psd, 0.5, 0.5 * x.fs_hz);
    f.power_ratio_5_20 = total > 0.0 ? band_power(psd, 5.0, 20.0) / total : 0.0;
    double w0 = 0.0, w2 = 0.0, w4 = 0.0;
    for (std::size_t k = 0; k < psd.freqs_hz.size(); ++k) {
        const double freq = psd.freqs_hz[k];
        if (freq < 0.5 || freq > 0.5 * x.fs_hz) continue;
        const double p = psd.power[k];
        const double f2 = freq * freq;
        w0 += p;
        w2 += f2 * p;
        w4 += f2 * f2 * p;
    }
    f.spectral_purity = (w0 > 0.0 && w4 > 0.0) ? (w2 * w2) / (w0 * w4) : 0.0;

    // Beat-derived features.
    const PeakList beats = detect_rpeaks_reference(x);
    if (beats.indices.size() < 3) {
        return f; // beat-dependent fields stay missing
    }

    std::vector<double> rr_s;
    for (std::size_t i = 1; i < beats.indices.size(); ++i) {
        rr_s.push_back(static_cast<double>(beats.indices[i] - beats.indices[i - 1]) / x.fs_hz);
    }
    std::vector<double> hr(rr_s.size());
    for (std::size_t i = 0; i < rr_s.size(); ++i) hr[i] = 60.0 / rr_s[i];
    std::sort(hr.begin(), hr.end());
    const std::size_t mid = hr.size() / 2;
    f.median_hr_bpm = hr.size() % 2 == 1 ? hr[mid] : 0.5 * (hr[mid - 1] + hr[mid]);
    f.min_rr_s = *std::min_element(rr_s.begin(), rr_s.end());
    f.max_rr_s = *std::max_element(rr_s.begin(), rr_s.end());

    // Mean correlation of each full beat window with the mean template.
    const std::size_t half = static_cast<std::size_t>(std::llround(kBeatHalfWindowS * x.fs_hz));
    std::vector<std::vector<double>> windows;
    for (std::size_t b : beats.indices) {
        if (b < half || b + half >= n) continue;
        windows.emplace_back(x.samples.begin() + static_cast<long>(b - half),
                             x.samples.begin() + static_cast<long>(b + half + 1));
    }
    if (windows.size() >= 2) {
        std::vector<double> tmpl(windows.front().size(), 0.0);
        for (const auto& w : windows) {
            for (std::size_t i = 0; i < tmpl.size(); ++i) tmpl[i] += w[i];
        }
        for (double& v : tmpl) v /= static_cast<double>(windows.size());
        double corr = 0.0;
        for (const auto& w : windows) corr += pearson(w, tmpl);
        f.template_corr = corr / static_cast<double>(windows.size());
    }

    const PeakList alt = detect_rpeaks_alternate(x);
    const MatchResult agreement = match_peaks(beats, alt, kAgreementToleranceS, x.fs_hz);
    f.detector_agreement = static_cast<double>(agreement.tp) /
                           static_cast<double>(beats.indices.size());
    return f;
}

void write_feature_table(const std::string& path, const std::vector<FeatureRow>& rows) {
    std::ofstream out(path);
    if (!out) throw DataError("write_feature_table: cannot open " + path);
    out << kFeatureTableHeader << '\n';
    for (const FeatureRow& r : rows) {
        out << r.id << ','
            << format_cell(r.features.kurtosis) << ','
            << format_cell(r.features.skewness) << ','
            << format_cell(r.features.power_ratio_5_20) << ','
            << format_cell(r.features.spectral_purity) << ','
            << format_cell(r.features.median_hr_bpm) << ','
            << format_cell(r.features.min_rr_s) << ','
            << format_cell(r.features.max_rr_s) << ','
            << format_cell(r.features.template_corr) << ','
            << format_cell(r.features.detector_agreement) << ','
            << format_cell(r.metric) << '\n';
    }
    if (!out.good()) throw DataError("write_feature_table: write failed for " + path);
}

std::vector<FeatureRow> read_feature_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("read_feature_table: cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw DataError("read_feature_table: empty file " + path);
    if (line != kFeatureTableHeader) {
        throw DataError("read_feature_table: unexpected header in " + path);
    }
    std::vector<FeatureRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        cells.resize(11);
        FeatureRow r;
        r.id = cells[0];
        r.features.kurtosis = std::stod(cells[1]);
        r.features.skewness = std::stod(cells[2]);
        r.features.power_ratio_5_20 = std::stod(cells[3]);
        r.features.spectral_purity = std::stod(cells[4]);
        r.features.median_hr_bpm = parse_optional(cells[5]);
        r.features.min_rr_s = parse_optional(cells[6]);
        r.features.max_rr_s = parse_optional(cells[7]);
        r.features.template_corr = parse_optional(cells[8]);
        r.features.detector_agreement = parse_optional(cells[9]);
        r.metric = parse_optional(cells[10]);
        rows.push_back(std::move(r));
    }
    return rows;
}

} // namespace psqi
