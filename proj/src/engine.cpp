#include "psqi/engine.hpp"

#include "psqi/errors.hpp"
#include "psqi/filter.hpp"
#include "psqi/noise.hpp"
#include "psqi/perturbation.hpp"

#include <exception>
#include <limits>
#include <utility>

namespace psqi {

PsqiResult psqi_score(const Signal& x, const TaskBinding& binding, const PsqiConfig& cfg,
                      std::uint64_t window_index) {
    validate_signal(x);

    const Signal x_filt = useful_component(x);
    PsqiResult result;
    result.clean_output = binding.algorithm(x);

    if (energy(x_filt.samples) == 0.0) {
        // Eq. (3)'s denominator forces delta = 0: the signal cannot be
        // perturbed under any finite SNR, so the score degenerates to the
        // self-metric of the clean output.
        result.degenerate = true;
        result.worst_output = result.clean_output;
        result.score = binding.metric(result.clean_output, result.clean_output);
        return result;
    }

    const NoiseSample z = sample_noise(derive_window_seed(cfg.master_seed, window_index),
                                       x.samples.size());
    const ThetaCodec codec(x.fs_hz);

    double best_value = std::numeric_limits<double>::infinity();
    std::size_t best_index = 0;
    TaskOutput best_output = result.clean_output;

    auto objective = [&](const std::vector<double>& u) -> double {
        const PerturbationParams theta = codec.decode(u);
        PsqiEvaluation eval;
        eval.theta = theta;
        double value = 0.0;
        TaskOutput output;
        try {
            const Signal perturbed = apply_perturbation(x, x_filt, z, theta, cfg.snr);
            output = binding.algorithm(perturbed);
            value = binding.metric(output, result.clean_output);
        } catch (const std::exception&) {
            // A crash on a feasible perturbation is maximal unreliability:
            // score the candidate at the metric's lower bound.
            eval.task_failed = true;
            value = 0.0;
            output = result.clean_output;
        }
        eval.value = value;
        result.evaluations.push_back(eval);
        if (value < best_value) {
            best_value = value;
            best_index = result.evaluations.size() - 1;
            best_output = output;
        }
        return value;
    };

    cma_minimize(objective, 2, cfg.cma);

    result.score = best_value;
    result.worst_theta = result.evaluations[best_index].theta;
    result.worst_output = std::move(best_output);
    return result;
}

} // namespace psqi
