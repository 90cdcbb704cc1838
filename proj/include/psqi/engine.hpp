#pragma once

#include "psqi/cmaes.hpp"
#include "psqi/signal.hpp"
#include "psqi/tasks.hpp"

#include <cstdint>
#include <vector>

namespace psqi {

struct PsqiConfig {
    SnrConfig snr;     // defaults: 25 dB global, 10 dB local
    CmaConfig cma;     // defaults: population 5, 2 iterations
    std::uint64_t master_seed = 0;
};

// One evaluated perturbation candidate.
struct PsqiEvaluation {
    PerturbationParams theta;
    double value = 0.0;
    bool task_failed = false; // the task crashed on this candidate; scored 0
};

struct PsqiResult {
    double score = 1.0;                 // q(x): min metric over all candidates
    PerturbationParams worst_theta;
    TaskOutput clean_output;
    TaskOutput worst_output;
    std::vector<PsqiEvaluation> evaluations;
    bool degenerate = false;            // ||x_filt|| = 0, signal unperturbable
};

// The perturbation SQI: worst metric value of the task output under
// SNR-bounded additive colored noise, searched with CMA-ES over the
// noise-shaping band. Label-free: the reference output is f on the clean
// signal, never ground truth. The fixed noise sample is derived from
// (master_seed, window_index).
PsqiResult psqi_score(const Signal& x, const TaskBinding& binding, const PsqiConfig& cfg,
                      std::uint64_t window_index = 0);

} // namespace psqi
