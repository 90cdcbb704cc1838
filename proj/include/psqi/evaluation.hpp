#pragma once

#include "psqi/dataset.hpp"
#include "psqi/engine.hpp"

#include <optional>
#include <string>
#include <vector>

namespace psqi {

// One scored window: the SQI value and the realized metric against ground
// truth. Ground truth enters the harness only; the SQI itself never sees it.
struct EvalRecord {
    std::string window_id;
    double sqi = 0.0;
    double metric = 0.0;
};

struct BinStat {
    double lower = 0.0;
    double upper = 0.0;
    std::size_t count = 0;
    double mean_metric = 0.0;
};

struct MarginResult {
    double tau_star = 0.0;
    double delta_star = 0.0;
    double above_mean = 0.0;
    double below_mean = 0.0;
    std::size_t above_count = 0;
    std::size_t below_count = 0;
};

// Uniform partition of [0, 1] into n_bins intervals (last bin closed above);
// empty bins are omitted. SQI values outside [0, 1] raise std::out_of_range.
std::vector<BinStat> monotonicity_bins(const std::vector<EvalRecord>& records, int n_bins = 25);

// Bin means strictly increasing across the nonempty bins.
bool is_monotone(const std::vector<BinStat>& bins);

// Spearman rank correlation with mid-ranks for ties. Throws
// std::invalid_argument on degenerate input (length < 2 or a constant side).
double spearman(const std::vector<double>& xs, const std::vector<double>& ys);

// Delta(tau) = mean(metric | sqi >= tau) - mean(metric | sqi < tau).
// Throws std::invalid_argument when either side is empty.
double separation_margin(const std::vector<EvalRecord>& records, double tau);

// Maximizes Delta over midpoints between consecutive distinct SQI values,
// considering only thresholds that leave at least min_count records on each
// side; the smallest maximizing threshold wins ties. Throws ConfigError when
// no threshold is eligible.
MarginResult optimal_margin(const std::vector<EvalRecord>& records, std::size_t min_count = 5);

// Binary-SQI special case: mean(metric | q = 1) - mean(metric | q = 0).
double binary_margin(const std::vector<EvalRecord>& records);

// One cell of the SNR hyperparameter sweep.
struct SweepCell {
    double gamma_db = 0.0;
    double beta_db = 0.0;
    std::optional<MarginResult> margin; // empty = infeasible
    std::string error;                  // nonempty when the cell failed
};

struct SweepResult {
    std::vector<double> gamma_grid_db;
    std::vector<double> beta_grid_db;
    std::vector<SweepCell> cells;      // row-major: gamma rows, beta columns
    std::optional<SweepCell> best;     // argmax over feasible cells
};

// Re-scores every window for each (gamma, beta) cell and computes the optimal
// margin per cell. Window seeds depend only on (master_seed, window index),
// so a cell at the base configuration reproduces a direct run exactly.
SweepResult snr_sweep(const std::vector<AnnotatedWindow>& windows, const BindingFactory& factory,
                      const std::vector<double>& gamma_grid_db,
                      const std::vector<double>& beta_grid_db, const PsqiConfig& base_cfg,
                      std::size_t min_count = 5, int jobs = 0);

// CSV writers (formats documented in the README).
void write_bins_csv(const std::string& path, const std::vector<BinStat>& bins);
void write_margin_csv(const std::string& path, const MarginResult& margin);
void write_sweep_csv(const std::string& path, const SweepResult& sweep);

} // namespace psqi
