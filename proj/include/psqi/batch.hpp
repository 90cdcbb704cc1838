#pragma once

#include "psqi/dataset.hpp"
#include "psqi/engine.hpp"

#include <vector>

namespace psqi {

// Per-window pSQI scoring. Window index i uses the seed derived from
// (cfg.master_seed, i); results are positionally stable, so the parallel and
// serial paths produce identical output for any thread count.

// Serial reference implementation, kept as the comparison baseline.
std::vector<PsqiResult> score_windows_serial(const std::vector<AnnotatedWindow>& windows,
                                             const BindingFactory& factory, const PsqiConfig& cfg);

// OpenMP work-shared version; jobs <= 0 uses all available threads,
// jobs == 1 falls through to the serial path.
std::vector<PsqiResult> score_windows(const std::vector<AnnotatedWindow>& windows,
                                      const BindingFactory& factory, const PsqiConfig& cfg,
                                      int jobs = 0);

// Realized metric of the clean output against ground truth; the label-aware
// half of an EvalRecord. Throws DataError when the window has no annotation.
double realized_metric(const AnnotatedWindow& window, const TaskBinding& binding);

} // namespace psqi
