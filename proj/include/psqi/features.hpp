#pragma once

#include "psqi/signal.hpp"

#include <optional>
#include <string>
#include <vector>

namespace psqi {

// Statistical and morphological features feeding an externally trained
// quality model. Beat-dependent fields are missing when fewer than 3 beats
// are detected.
struct FeatureVector {
    double kurtosis = 0.0; // non-excess (Gaussian -> 3)
    double skewness = 0.0;
    double power_ratio_5_20 = 0.0;
    double spectral_purity = 0.0;
    std::optional<double> median_hr_bpm;
    std::optional<double> min_rr_s;
    std::optional<double> max_rr_s;
    std::optional<double> template_corr;
    std::optional<double> detector_agreement;
};

// Requires duration >= 5 s.
FeatureVector extract_features(const Signal& x);

struct FeatureRow {
    std::string id;
    FeatureVector features;
    std::optional<double> metric;
};

inline constexpr const char* kFeatureTableHeader =
    "id,kurtosis,skewness,power_ratio_5_20,spectral_purity,median_hr_bpm,"
    "min_rr_s,max_rr_s,template_corr,detector_agreement,metric";

// One row per window, missing values as empty cells, fixed column order as
// in kFeatureTableHeader. Throws DataError on I/O failure.
void write_feature_table(const std::string& path, const std::vector<FeatureRow>& rows);
std::vector<FeatureRow> read_feature_table(const std::string& path);

} // namespace psqi
