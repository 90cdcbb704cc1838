#pragma once

#include "psqi/perturbation.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace psqi {

struct CmaConfig {
    int population = 5;
    int max_iterations = 2;
    double initial_sigma = 0.3; // in the unconstrained search space
    std::uint64_t seed = 0;
    std::vector<double> initial_mean; // empty = origin
};

// One evaluated candidate, in evaluation order.
struct CmaCandidate {
    std::vector<double> u;
    double value = 0.0;  // as used for ranking (penalized if raw was non-finite)
    int generation = 0;
    bool penalized = false;
};

struct CmaResult {
    std::vector<double> best_u;
    double best_value = 0.0;
    std::vector<CmaCandidate> history; // exactly population * max_iterations entries
};

// Covariance matrix adaptation evolution strategy, canonical rank-mu update
// with cumulative step-size adaptation. Minimizes `objective` over R^dim.
// Deterministic given the config (including seed). Candidates returning a
// non-finite value are ranked at (worst finite value in generation) + 1.
// The best reported point is the minimum over all evaluated candidates,
// earliest evaluation winning ties.
CmaResult cma_minimize(const std::function<double(const std::vector<double>&)>& objective,
                       int dim, const CmaConfig& cfg);

// Maps unconstrained CMA-ES coordinates onto valid bandpass cutoffs: each
// coordinate goes through a logistic squashing onto the log-frequency range
// [f_min, 0.45 * fs], the two frequencies are sorted, and the band is widened
// symmetrically to the minimum bandwidth when needed (clamped to the range).
class ThetaCodec {
public:
    explicit ThetaCodec(double fs_hz);

    PerturbationParams decode(const std::vector<double>& u) const;
    PerturbationParams decode(double u0, double u1) const;

    double f_min_hz() const { return f_min_; }
    double f_max_hz() const { return f_max_; }

private:
    double fs_hz_;
    double f_min_;
    double f_max_;
};

} // namespace psqi
