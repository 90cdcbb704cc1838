#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace psqi {

// Strictly increasing sample indices of detected events.
struct PeakList {
    std::vector<std::size_t> indices;
};

void validate_peak_list(const PeakList& peaks, std::size_t signal_length);

struct BinaryLabel {
    int value = 0; // 0 or 1
};

struct MatchResult {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;
    std::vector<std::pair<std::size_t, std::size_t>> matched_pairs; // (reference, detection)
};

// One-to-one greedy chronological matching: walk references in order, match
// each to the nearest still-unmatched detection within the tolerance (earlier
// detection wins an exact distance tie). Tolerance is converted to samples by
// rounding half away from zero.
MatchResult match_peaks(const PeakList& reference, const PeakList& detected,
                        double tolerance_s, double fs_hz);

// 2 tp / (2 tp + fp + fn); defined as 1.0 when all three are zero.
double f1_score(const MatchResult& m);

double binary_accuracy(const BinaryLabel& pred, const BinaryLabel& truth);

} // namespace psqi
