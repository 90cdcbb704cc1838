#include "psqi/tasks.hpp"

#include "psqi/errors.hpp"
#include "psqi/filter.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <stdexcept>

namespace psqi {

namespace {

constexpr double kRefBandLowHz = 5.0;
constexpr double kRefBandHighHz = 15.0;
constexpr double kRefIntegrationS = 0.150;
constexpr double kRefRefractoryS = 0.200;
constexpr double kRefRefineS = 0.050;
// Searchback threshold as a fraction of the primary threshold. Calibrated so
// beats at roughly a quarter of the running amplitude sit on the detection
// boundary: small in-band disturbances flip them, strong beats never move.
constexpr double kSearchbackFraction = 0.40;
constexpr double kSearchbackRrFactor = 1.66;

constexpr double kAltBandLowHz = 8.0;
constexpr double kAltBandHighHz = 20.0;
constexpr double kAltWindowS = 2.0;
constexpr double kAltRefractoryS = 0.250;
constexpr double kAltPercentile = 0.90;

void require_supported(const Signal& x) {
    if (!(x.fs_hz >= 50.0) || x.duration_s() < 2.0) {
        throw std::invalid_argument("detector: unsupported signal (need fs >= 50 Hz and >= 2 s)");
    }
}

std::vector<double> central_difference(const std::vector<double>& v) {
    std::vector<double> d(v.size(), 0.0);
    for (std::size_t i = 1; i + 1 < v.size(); ++i) {
        d[i] = 0.5 * (v[i + 1] - v[i - 1]);
    }
    if (v.size() >= 2) {
        d.front() = v[1] - v[0];
        d.back() = v[v.size() - 1] - v[v.size() - 2];
    }
    return d;
}

// Centered moving average, shrinking at the edges.
std::vector<double> moving_average(const std::vector<double>& v, std::size_t half_width) {
    std::vector<double> prefix(v.size() + 1, 0.0);
    for (std::size_t i = 0; i < v.size(); ++i) prefix[i + 1] = prefix[i] + v[i];
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        const std::size_t lo = i >= half_width ? i - half_width : 0;
        const std::size_t hi = std::min(v.size() - 1, i + half_width);
        out[i] = (prefix[hi + 1] - prefix[lo]) / static_cast<double>(hi - lo + 1);
    }
    return out;
}

std::vector<std::size_t> local_maxima(const std::vector<double>& v) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 1; i + 1 < v.size(); ++i) {
        if (v[i] > v[i - 1] && v[i] >= v[i + 1]) idx.push_back(i);
    }
    return idx;
}

// Linear-interpolation percentile of an unsorted copy.
double percentile(std::vector<double> v, double q) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const double rank = q * static_cast<double>(v.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(rank);
    if (lo + 1 >= v.size()) return v.back();
    const double frac = rank - static_cast<double>(lo);
    return v[lo] + (v[lo + 1] - v[lo]) * frac;
}

std::size_t refine_to_local_max(const std::vector<double>& bp, std::size_t center,
                                std::size_t half_window) {
    const std::size_t lo = center >= half_window ? center - half_window : 0;
    const std::size_t hi = std::min(bp.size() - 1, center + half_window);
    std::size_t best = lo;
    for (std::size_t i = lo + 1; i <= hi; ++i) {
        if (bp[i] > bp[best]) best = i;
    }
    return best;
}

PeakList finalize_peaks(std::vector<std::size_t> refined, std::size_t refractory_samples) {
    std::sort(refined.begin(), refined.end());
    PeakList out;
    for (std::size_t idx : refined) {
        if (!out.indices.empty()) {
            const std::size_t prev = out.indices.back();
            if (idx == prev || idx - prev < refractory_samples) continue;
        }
        out.indices.push_back(idx);
    }
    return out;
}

} // namespace

PeakList detect_rpeaks_reference(const Signal& x) {
    require_supported(x);
    const double fs = x.fs_hz;

    const FilterCoefficients bandpass =
        design_butterworth(FilterSpec::bandpass(3, kRefBandLowHz, kRefBandHighHz), fs);
    const std::vector<double> bp = filtfilt(bandpass, x.samples);

    std::vector<double> sq = central_difference(bp);
    for (double& v : sq) v *= v;
    const std::size_t mwi_half = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(0.5 * kRefIntegrationS * fs)));
    const std::vector<double> mwi = moving_average(sq, mwi_half);

    const std::vector<std::size_t> candidates = local_maxima(mwi);
    if (candidates.empty()) return PeakList{};

    // Threshold seeds from the first 2 s; global statistics if that segment
    // carries no energy.
    const std::size_t seed_len = std::min(mwi.size(), static_cast<std::size_t>(std::llround(2.0 * fs)));
    double seed_max = 0.0, seed_mean = 0.0;
    for (std::size_t i = 0; i < seed_len; ++i) {
        seed_max = std::max(seed_max, mwi[i]);
        seed_mean += mwi[i];
    }
    seed_mean /= static_cast<double>(seed_len);
    if (seed_max <= 0.0) {
        seed_max = *std::max_element(mwi.begin(), mwi.end());
        seed_mean = std::accumulate(mwi.begin(), mwi.end(), 0.0) / static_cast<double>(mwi.size());
    }
    if (seed_max <= 0.0) return PeakList{}; // flat signal, nothing to detect

    double spk = 0.5 * seed_max;
    double npk = 0.5 * seed_mean;

    const std::size_t refractory = static_cast<std::size_t>(std::llround(kRefRefractoryS * fs));
    std::vector<std::size_t> accepted;
    std::vector<double> recent_rr;
    double spk_before_last = spk;
    bool last_pushed_rr = false;

    auto threshold1 = [&]() { return npk + 0.25 * (spk - npk); };
    auto avg_rr = [&]() {
        if (recent_rr.empty()) return 0.0;
        return std::accumulate(recent_rr.end() - static_cast<long>(std::min<std::size_t>(recent_rr.size(), 8)),
                               recent_rr.end(), 0.0) /
               static_cast<double>(std::min<std::size_t>(recent_rr.size(), 8));
    };

    std::vector<std::size_t> rejected_since_last; // candidates for searchback
    for (std::size_t c : candidates) {
        const double v = mwi[c];
        if (!accepted.empty() && c - accepted.back() < refractory) {
            // Same QRS complex: keep the larger integrator lobe.
            if (v > mwi[accepted.back()]) {
                spk = 0.125 * v + 0.875 * spk_before_last;
                if (last_pushed_rr) {
                    recent_rr.back() = static_cast<double>(c - accepted[accepted.size() - 2]);
                }
                accepted.back() = c;
            }
            continue;
        }
        if (v > threshold1()) {
            // Searchback across a long gap before committing the new beat.
            const double rr = avg_rr();
            if (!accepted.empty() && rr > 0.0 &&
                static_cast<double>(c - accepted.back()) > kSearchbackRrFactor * rr) {
                const double threshold2 = kSearchbackFraction * threshold1();
                bool found = false;
                std::size_t best = 0;
                double best_v = threshold2;
                for (std::size_t r : rejected_since_last) {
                    if (r - accepted.back() < refractory || c - r < refractory) continue;
                    if (mwi[r] > best_v) {
                        best_v = mwi[r];
                        best = r;
                        found = true;
                    }
                }
                if (found) {
                    recent_rr.push_back(static_cast<double>(best - accepted.back()));
                    accepted.push_back(best);
                    spk = 0.25 * best_v + 0.75 * spk;
                }
            }
            last_pushed_rr = !accepted.empty();
            if (last_pushed_rr) recent_rr.push_back(static_cast<double>(c - accepted.back()));
            spk_before_last = spk;
            accepted.push_back(c);
            spk = 0.125 * v + 0.875 * spk;
            rejected_since_last.clear();
        } else {
            npk = 0.125 * v + 0.875 * npk;
            rejected_since_last.push_back(c);
        }
    }

    const std::size_t refine_half = static_cast<std::size_t>(std::llround(kRefRefineS * fs));
    std::vector<std::size_t> refined;
    refined.reserve(accepted.size());
    for (std::size_t c : accepted) refined.push_back(refine_to_local_max(bp, c, refine_half));
    return finalize_peaks(std::move(refined), refractory);
}

PeakList detect_rpeaks_alternate(const Signal& x) {
    require_supported(x);
    const double fs = x.fs_hz;

    const FilterCoefficients bandpass =
        design_butterworth(FilterSpec::bandpass(3, kAltBandLowHz, kAltBandHighHz), fs);
    std::vector<double> sq = filtfilt(bandpass, x.samples);
    for (double& v : sq) v *= v;

    const std::vector<std::size_t> candidates = local_maxima(sq);
    const std::size_t win_half = static_cast<std::size_t>(std::llround(0.5 * kAltWindowS * fs));
    const std::size_t refractory = static_cast<std::size_t>(std::llround(kAltRefractoryS * fs));

    // Strongest-first with refractory suppression, so main lobes win over
    // their own side lobes.
    std::vector<std::size_t> order(candidates.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return sq[candidates[a]] > sq[candidates[b]];
    });

    std::vector<std::size_t> kept;
    for (std::size_t oi : order) {
        const std::size_t i = candidates[oi];
        const std::size_t lo = i >= win_half ? i - win_half : 0;
        const std::size_t hi = std::min(sq.size(), i + win_half + 1);
        const double thr = percentile(std::vector<double>(sq.begin() + static_cast<long>(lo),
                                                          sq.begin() + static_cast<long>(hi)),
                                      kAltPercentile);
        if (!(sq[i] > thr)) continue;
        bool clear = true;
        for (std::size_t k : kept) {
            const std::size_t dist = k > i ? k - i : i - k;
            if (dist < refractory) {
                clear = false;
                break;
            }
        }
        if (clear) kept.push_back(i);
    }
    std::sort(kept.begin(), kept.end());
    PeakList out;
    out.indices = std::move(kept);
    return out;
}

TaskBinding make_rpeak_binding(double fs_hz, double tolerance_s) {
    TaskBinding binding;
    binding.output_kind = OutputKind::peaks;
    binding.algorithm = [](const Signal& x) -> TaskOutput { return detect_rpeaks_reference(x); };
    binding.metric = [fs_hz, tolerance_s](const TaskOutput& pred, const TaskOutput& ref) {
        return f1_score(match_peaks(std::get<PeakList>(ref), std::get<PeakList>(pred),
                                    tolerance_s, fs_hz));
    };
    return binding;
}

TaskBinding make_external_binding(ExternalCommandSpec spec) {
    TaskBinding binding;
    binding.output_kind = OutputKind::binary;
    binding.algorithm = [spec](const Signal& x) -> TaskOutput {
        return external_classifier(spec, x);
    };
    binding.metric = [](const TaskOutput& pred, const TaskOutput& ref) {
        return binary_accuracy(std::get<BinaryLabel>(pred), std::get<BinaryLabel>(ref));
    };
    return binding;
}

} // namespace psqi
