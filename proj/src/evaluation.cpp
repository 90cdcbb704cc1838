#include "psqi/evaluation.hpp"

#include "psqi/batch.hpp"
#include "psqi/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace psqi {

namespace {

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// Mid-ranks (average rank for ties), 1-based.
std::vector<double> mid_ranks(const std::vector<double>& v) {
    std::vector<std::size_t> order(v.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });

    std::vector<double> ranks(v.size());
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
        const double rank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j + 1));
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
        i = j + 1;
    }
    return ranks;
}

double mean_of(const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

} // namespace

std::vector<BinStat> monotonicity_bins(const std::vector<EvalRecord>& records, int n_bins) {
    if (n_bins < 2) throw std::invalid_argument("monotonicity_bins: need n_bins >= 2");
    for (const EvalRecord& r : records) {
        if (!(r.sqi >= 0.0 && r.sqi <= 1.0)) {
            throw std::out_of_range("monotonicity_bins: sqi outside [0, 1]; normalize first");
        }
    }
    std::vector<std::size_t> counts(n_bins, 0);
    std::vector<double> sums(n_bins, 0.0);
    for (const EvalRecord& r : records) {
        std::size_t bin = static_cast<std::size_t>(r.sqi * n_bins);
        if (bin >= static_cast<std::size_t>(n_bins)) bin = n_bins - 1; // sqi == 1.0
        counts[bin] += 1;
        sums[bin] += r.metric;
    }
    std::vector<BinStat> bins;
    for (int b = 0; b < n_bins; ++b) {
        if (counts[b] == 0) continue;
        BinStat s;
        s.lower = static_cast<double>(b) / n_bins;
        s.upper = static_cast<double>(b + 1) / n_bins;
        s.count = counts[b];
        s.mean_metric = sums[b] / static_cast<double>(counts[b]);
        bins.push_back(s);
    }
    return bins;
}

bool is_monotone(const std::vector<BinStat>& bins) {
    for (std::size_t i = 1; i < bins.size(); ++i) {
        if (!(bins[i].mean_metric > bins[i - 1].mean_metric)) return false;
    }
    return true;
}

double spearman(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size()) throw std::invalid_argument("spearman: length mismatch");
    if (xs.size() < 2) throw std::invalid_argument("spearman: need at least 2 pairs");
    const bool xs_const = std::all_of(xs.begin(), xs.end(), [&](double v) { return v == xs.front(); });
    const bool ys_const = std::all_of(ys.begin(), ys.end(), [&](double v) { return v == ys.front(); });
    if (xs_const || ys_const) {
        throw std::invalid_argument("spearman: undefined for constant input");
    }

    const std::vector<double> rx = mid_ranks(xs);
    const std::vector<double> ry = mid_ranks(ys);
    const double mx = mean_of(rx);
    const double my = mean_of(ry);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        const double dx = rx[i] - mx;
        const double dy = ry[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    return sxy / std::sqrt(sxx * syy);
}

double separation_margin(const std::vector<EvalRecord>& records, double tau) {
    double above = 0.0, below = 0.0;
    std::size_t n_above = 0, n_below = 0;
    for (const EvalRecord& r : records) {
        if (r.sqi >= tau) {
            above += r.metric;
            ++n_above;
        } else {
            below += r.metric;
            ++n_below;
        }
    }
    if (n_above == 0 || n_below == 0) {
        throw std::invalid_argument("separation_margin: threshold leaves one side empty");
    }
    return above / static_cast<double>(n_above) - below / static_cast<double>(n_below);
}

MarginResult optimal_margin(const std::vector<EvalRecord>& records, std::size_t min_count) {
    if (min_count < 1) throw std::invalid_argument("optimal_margin: min_count must be >= 1");
    if (records.size() < 2 * min_count) {
        throw ConfigError("optimal_margin: need at least " + std::to_string(2 * min_count) +
                          " records (min " + std::to_string(min_count) + " per side)");
    }

    std::vector<EvalRecord> sorted = records;
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const EvalRecord& a, const EvalRecord& b) { return a.sqi < b.sqi; });

    // Prefix sums over the sorted order make each candidate threshold O(1).
    std::vector<double> prefix(sorted.size() + 1, 0.0);
    for (std::size_t i = 0; i < sorted.size(); ++i) prefix[i + 1] = prefix[i] + sorted[i].metric;
    const double total = prefix.back();

    MarginResult best;
    bool found = false;
    for (std::size_t i = 1; i < sorted.size(); ++i) {
        if (sorted[i].sqi == sorted[i - 1].sqi) continue; // need distinct values
        const std::size_t below = i;
        const std::size_t above = sorted.size() - i;
        if (below < min_count || above < min_count) continue;
        const double tau = 0.5 * (sorted[i - 1].sqi + sorted[i].sqi);
        const double below_mean = prefix[i] / static_cast<double>(below);
        const double above_mean = (total - prefix[i]) / static_cast<double>(above);
        const double delta = above_mean - below_mean;
        if (!found || delta > best.delta_star) {
            best.tau_star = tau;
            best.delta_star = delta;
            best.above_mean = above_mean;
            best.below_mean = below_mean;
            best.above_count = above;
            best.below_count = below;
            found = true;
        }
    }
    if (!found) {
        throw ConfigError("optimal_margin: no eligible threshold (need >= " +
                          std::to_string(min_count) + " records on each side)");
    }
    return best;
}

double binary_margin(const std::vector<EvalRecord>& records) {
    double sum[2] = {0.0, 0.0};
    std::size_t count[2] = {0, 0};
    for (const EvalRecord& r : records) {
        if (r.sqi != 0.0 && r.sqi != 1.0) {
            throw std::invalid_argument("binary_margin: sqi values must be 0 or 1");
        }
        const int g = r.sqi == 1.0 ? 1 : 0;
        sum[g] += r.metric;
        count[g] += 1;
    }
    if (count[0] == 0 || count[1] == 0) {
        throw std::invalid_argument("binary_margin: both sqi groups must be nonempty");
    }
    return sum[1] / static_cast<double>(count[1]) - sum[0] / static_cast<double>(count[0]);
}

SweepResult snr_sweep(const std::vector<AnnotatedWindow>& windows, const BindingFactory& factory,
                      const std::vector<double>& gamma_grid_db,
                      const std::vector<double>& beta_grid_db, const PsqiConfig& base_cfg,
                      std::size_t min_count, int jobs) {
    if (gamma_grid_db.empty() || beta_grid_db.empty()) {
        throw std::invalid_argument("snr_sweep: grids must be nonempty");
    }

    SweepResult sweep;
    sweep.gamma_grid_db = gamma_grid_db;
    sweep.beta_grid_db = beta_grid_db;

    // The realized metric does not depend on the SNR cell.
    std::vector<double> metrics(windows.size());
    for (std::size_t i = 0; i < windows.size(); ++i) {
        metrics[i] = realized_metric(windows[i], factory(windows[i].signal.fs_hz));
    }

    for (double gamma_db : gamma_grid_db) {
        for (double beta_db : beta_grid_db) {
            SweepCell cell;
            cell.gamma_db = gamma_db;
            cell.beta_db = beta_db;
            try {
                PsqiConfig cfg = base_cfg;
                cfg.snr.gamma_db = gamma_db;
                cfg.snr.beta_db = beta_db;
                const std::vector<PsqiResult> results = score_windows(windows, factory, cfg, jobs);
                std::vector<EvalRecord> records(windows.size());
                for (std::size_t i = 0; i < windows.size(); ++i) {
                    records[i] = EvalRecord{windows[i].window_id, results[i].score, metrics[i]};
                }
                cell.margin = optimal_margin(records, min_count);
            } catch (const ConfigError&) {
                // infeasible margin: cell stays empty
            } catch (const std::exception& e) {
                cell.error = e.what();
            }
            if (cell.margin &&
                (!sweep.best || cell.margin->delta_star > sweep.best->margin->delta_star)) {
                sweep.best = cell;
            }
            sweep.cells.push_back(std::move(cell));
        }
    }
    return sweep;
}

void write_bins_csv(const std::string& path, const std::vector<BinStat>& bins) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path);
    out << "bin_lower,bin_upper,count,mean_metric\n";
    for (const BinStat& b : bins) {
        out << format_double(b.lower) << ',' << format_double(b.upper) << ',' << b.count << ','
            << format_double(b.mean_metric) << '\n';
    }
}

void write_margin_csv(const std::string& path, const MarginResult& margin) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path);
    out << "tau_star,delta_star,above_mean,below_mean,above_count,below_count\n";
    out << format_double(margin.tau_star) << ',' << format_double(margin.delta_star) << ','
        << format_double(margin.above_mean) << ',' << format_double(margin.below_mean) << ','
        << margin.above_count << ',' << margin.below_count << '\n';
}

void write_sweep_csv(const std::string& path, const SweepResult& sweep) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path);
    out << "gamma_db\\beta_db";
    for (double beta : sweep.beta_grid_db) out << ',' << format_double(beta);
    out << '\n';
    std::size_t idx = 0;
    for (double gamma : sweep.gamma_grid_db) {
        out << format_double(gamma);
        for (std::size_t b = 0; b < sweep.beta_grid_db.size(); ++b, ++idx) {
            const SweepCell& cell = sweep.cells[idx];
            out << ',';
            if (cell.margin) {
                out << format_double(cell.margin->delta_star);
            } else if (!cell.error.empty()) {
                out << "error";
            } else {
                out << "infeasible";
            }
        }
        out << '\n';
    }
}

} // namespace psqi
