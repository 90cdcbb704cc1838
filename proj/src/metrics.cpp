#include "psqi/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace psqi {

void validate_peak_list(const PeakList& peaks, std::size_t signal_length) {
    for (std::size_t i = 0; i < peaks.indices.size(); ++i) {
        if (peaks.indices[i] >= signal_length) {
            throw std::invalid_argument("peak list: index out of range");
        }
        if (i > 0 && peaks.indices[i] <= peaks.indices[i - 1]) {
            throw std::invalid_argument("peak list: indices must be strictly increasing");
        }
    }
}

MatchResult match_peaks(const PeakList& reference, const PeakList& detected,
                        double tolerance_s, double fs_hz) {
    if (tolerance_s < 0.0) {
        throw std::invalid_argument("match_peaks: tolerance must be >= 0");
    }
    const long long tol = std::llround(tolerance_s * fs_hz);

    MatchResult m;
    std::vector<bool> used(detected.indices.size(), false);
    for (std::size_t r : reference.indices) {
        long long best_dist = tol + 1;
        std::size_t best = detected.indices.size();
        for (std::size_t d = 0; d < detected.indices.size(); ++d) {
            if (used[d]) continue;
            const long long dist = std::llabs(static_cast<long long>(detected.indices[d]) -
                                              static_cast<long long>(r));
            if (dist <= tol && dist < best_dist) {
                best_dist = dist;
                best = d;
            }
        }
        if (best < detected.indices.size()) {
            used[best] = true;
            m.matched_pairs.emplace_back(r, detected.indices[best]);
        }
    }
    m.tp = m.matched_pairs.size();
    m.fn = reference.indices.size() - m.tp;
    m.fp = detected.indices.size() - m.tp;
    return m;
}

double f1_score(const MatchResult& m) {
    const std::size_t denom = 2 * m.tp + m.fp + m.fn;
    if (denom == 0) return 1.0; // no beats, none detected: perfect agreement
    return 2.0 * static_cast<double>(m.tp) / static_cast<double>(denom);
}

double binary_accuracy(const BinaryLabel& pred, const BinaryLabel& truth) {
    return pred.value == truth.value ? 1.0 : 0.0;
}

} // namespace psqi
