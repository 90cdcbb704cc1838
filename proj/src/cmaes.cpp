#include "psqi/cmaes.hpp"

#include "psqi/noise.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace psqi {

namespace {

// Dense symmetric matrix, row-major.
using Matrix = std::vector<double>;

double& at(Matrix& m, int n, int r, int c) { return m[static_cast<std::size_t>(r) * n + c]; }

// Cyclic Jacobi eigendecomposition of a symmetric matrix. Small dimensions
// only (the search space here is 2-D); returns eigenvalues and the column
// eigenvectors in `vecs`.
void jacobi_eigen(Matrix a, int n, std::vector<double>& values, Matrix& vecs) {
    vecs.assign(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) at(vecs, n, i, i) = 1.0;

    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) off += at(a, n, p, q) * at(a, n, p, q);
        if (off < 1e-30) break;

        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = at(a, n, p, q);
                if (apq == 0.0) continue;
                const double app = at(a, n, p, p);
                const double aqq = at(a, n, q, q);
                const double tau = (aqq - app) / (2.0 * apq);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                for (int k = 0; k < n; ++k) {
                    const double akp = at(a, n, k, p);
                    const double akq = at(a, n, k, q);
                    at(a, n, k, p) = c * akp - s * akq;
                    at(a, n, k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const double apk = at(a, n, p, k);
                    const double aqk = at(a, n, q, k);
                    at(a, n, p, k) = c * apk - s * aqk;
                    at(a, n, q, k) = s * apk + c * aqk;
                }
                for (int k = 0; k < n; ++k) {
                    const double vkp = at(vecs, n, k, p);
                    const double vkq = at(vecs, n, k, q);
                    at(vecs, n, k, p) = c * vkp - s * vkq;
                    at(vecs, n, k, q) = s * vkp + c * vkq;
                }
            }
        }
    }
    values.resize(n);
    for (int i = 0; i < n; ++i) values[i] = at(a, n, i, i);
}

double logistic(double u) {
    if (u >= 0.0) {
        const double e = std::exp(-u);
        return 1.0 / (1.0 + e);
    }
    const double e = std::exp(u);
    return e / (1.0 + e);
}

} // namespace

CmaResult cma_minimize(const std::function<double(const std::vector<double>&)>& objective,
                       int dim, const CmaConfig& cfg) {
    if (dim < 1) throw std::invalid_argument("cma_minimize: dim must be >= 1");
    if (cfg.population < 2) throw std::invalid_argument("cma_minimize: population must be >= 2");
    if (cfg.max_iterations < 1) throw std::invalid_argument("cma_minimize: max_iterations must be >= 1");
    if (!(cfg.initial_sigma > 0.0)) throw std::invalid_argument("cma_minimize: initial_sigma must be > 0");
    if (!cfg.initial_mean.empty() && static_cast<int>(cfg.initial_mean.size()) != dim) {
        throw std::invalid_argument("cma_minimize: initial_mean dimension mismatch");
    }

    const int n = dim;
    const int lambda = cfg.population;
    const int mu = lambda / 2;

    // Canonical selection weights and learning rates.
    std::vector<double> weights(mu);
    for (int i = 0; i < mu; ++i) {
        weights[i] = std::log((lambda + 1.0) / 2.0) - std::log(i + 1.0);
    }
    const double wsum = std::accumulate(weights.begin(), weights.end(), 0.0);
    for (double& w : weights) w /= wsum;
    double mu_eff = 0.0;
    for (double w : weights) mu_eff += w * w;
    mu_eff = 1.0 / mu_eff;

    const double c_sigma = (mu_eff + 2.0) / (n + mu_eff + 5.0);
    const double d_sigma =
        1.0 + 2.0 * std::max(0.0, std::sqrt((mu_eff - 1.0) / (n + 1.0)) - 1.0) + c_sigma;
    const double c_c = (4.0 + mu_eff / n) / (n + 4.0 + 2.0 * mu_eff / n);
    const double c_1 = 2.0 / ((n + 1.3) * (n + 1.3) + mu_eff);
    const double c_mu = std::min(1.0 - c_1, 2.0 * (mu_eff - 2.0 + 1.0 / mu_eff) /
                                                ((n + 2.0) * (n + 2.0) + mu_eff));
    const double chi_n = std::sqrt(static_cast<double>(n)) *
                         (1.0 - 1.0 / (4.0 * n) + 1.0 / (21.0 * n * n));

    std::vector<double> mean = cfg.initial_mean.empty()
                                   ? std::vector<double>(n, 0.0)
                                   : cfg.initial_mean;
    double sigma = cfg.initial_sigma;

    Matrix C(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) at(C, n, i, i) = 1.0;
    std::vector<double> p_sigma(n, 0.0), p_c(n, 0.0);
    std::vector<double> eigvals(n, 1.0);
    Matrix B(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) at(B, n, i, i) = 1.0;

    SplitMix64 rng(cfg.seed);

    CmaResult result;
    result.best_value = std::numeric_limits<double>::infinity();
    result.history.reserve(static_cast<std::size_t>(lambda) * cfg.max_iterations);

    std::vector<std::vector<double>> ys(lambda, std::vector<double>(n));
    std::vector<double> raw_values(lambda);

    for (int gen = 0; gen < cfg.max_iterations; ++gen) {
        // Sample and evaluate the generation.
        for (int k = 0; k < lambda; ++k) {
            std::vector<double> z(n);
            for (int i = 0; i < n; ++i) z[i] = rng.next_normal();
            // y = B * diag(sqrt(eigvals)) * z
            for (int i = 0; i < n; ++i) {
                double acc = 0.0;
                for (int j = 0; j < n; ++j) {
                    acc += at(B, n, i, j) * std::sqrt(std::max(eigvals[j], 0.0)) * z[j];
                }
                ys[k][i] = acc;
            }
            std::vector<double> x(n);
            for (int i = 0; i < n; ++i) x[i] = mean[i] + sigma * ys[k][i];
            raw_values[k] = objective(x);

            CmaCandidate cand;
            cand.u = std::move(x);
            cand.value = raw_values[k];
            cand.generation = gen;
            result.history.push_back(std::move(cand));
        }

        // Replace non-finite values with a worst-in-generation penalty so
        // ranking stays well defined.
        double worst_finite = -std::numeric_limits<double>::infinity();
        for (int k = 0; k < lambda; ++k) {
            if (std::isfinite(raw_values[k])) worst_finite = std::max(worst_finite, raw_values[k]);
        }
        if (!std::isfinite(worst_finite)) worst_finite = 0.0;
        const std::size_t gen_base = result.history.size() - static_cast<std::size_t>(lambda);
        for (int k = 0; k < lambda; ++k) {
            if (!std::isfinite(raw_values[k])) {
                raw_values[k] = worst_finite + 1.0;
                result.history[gen_base + k].value = raw_values[k];
                result.history[gen_base + k].penalized = true;
            }
        }

        // Rank candidates; ties resolved by evaluation order.
        std::vector<int> order(lambda);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](int a, int b) { return raw_values[a] < raw_values[b]; });

        // Mean update from the mu best steps.
        std::vector<double> y_w(n, 0.0);
        for (int i = 0; i < mu; ++i) {
            for (int d = 0; d < n; ++d) y_w[d] += weights[i] * ys[order[i]][d];
        }
        for (int d = 0; d < n; ++d) mean[d] += sigma * y_w[d];

        // Step-size path uses C^{-1/2} y_w = B D^{-1} B^T y_w.
        std::vector<double> bty(n, 0.0);
        for (int i = 0; i < n; ++i) {
            double acc = 0.0;
            for (int j = 0; j < n; ++j) acc += at(B, n, j, i) * y_w[j];
            bty[i] = acc;
        }
        std::vector<double> c_inv_half_yw(n, 0.0);
        for (int i = 0; i < n; ++i) {
            double acc = 0.0;
            for (int j = 0; j < n; ++j) {
                const double d_j = std::sqrt(std::max(eigvals[j], 1e-300));
                acc += at(B, n, i, j) * (bty[j] / d_j);
            }
            c_inv_half_yw[i] = acc;
        }
        const double ps_decay = std::sqrt(c_sigma * (2.0 - c_sigma) * mu_eff);
        double ps_norm_sq = 0.0;
        for (int d = 0; d < n; ++d) {
            p_sigma[d] = (1.0 - c_sigma) * p_sigma[d] + ps_decay * c_inv_half_yw[d];
            ps_norm_sq += p_sigma[d] * p_sigma[d];
        }
        const double ps_norm = std::sqrt(ps_norm_sq);

        const double gen_count = gen + 1.0;
        const double expected_scale =
            std::sqrt(1.0 - std::pow(1.0 - c_sigma, 2.0 * gen_count));
        const bool h_sigma =
            ps_norm / expected_scale < (1.4 + 2.0 / (n + 1.0)) * chi_n;

        const double pc_decay = std::sqrt(c_c * (2.0 - c_c) * mu_eff);
        for (int d = 0; d < n; ++d) {
            p_c[d] = (1.0 - c_c) * p_c[d] + (h_sigma ? pc_decay * y_w[d] : 0.0);
        }

        // Covariance update: rank-one plus rank-mu.
        const double delta_h = h_sigma ? 0.0 : c_c * (2.0 - c_c);
        for (int r = 0; r < n; ++r) {
            for (int c = 0; c < n; ++c) {
                double rank_mu = 0.0;
                for (int i = 0; i < mu; ++i) {
                    rank_mu += weights[i] * ys[order[i]][r] * ys[order[i]][c];
                }
                double v = (1.0 - c_1 - c_mu) * at(C, n, r, c) +
                           c_1 * (p_c[r] * p_c[c] + delta_h * at(C, n, r, c)) +
                           c_mu * rank_mu;
                at(C, n, r, c) = v;
            }
        }
        // Enforce exact symmetry before the eigendecomposition.
        for (int r = 0; r < n; ++r) {
            for (int c = r + 1; c < n; ++c) {
                const double v = 0.5 * (at(C, n, r, c) + at(C, n, c, r));
                at(C, n, r, c) = v;
                at(C, n, c, r) = v;
            }
        }

        sigma *= std::exp((c_sigma / d_sigma) * (ps_norm / chi_n - 1.0));

        jacobi_eigen(C, n, eigvals, B);
        for (double& ev : eigvals) ev = std::max(ev, 1e-300);
    }

    // Best over the full history, earliest evaluation winning ties.
    std::size_t best_idx = 0;
    for (std::size_t i = 1; i < result.history.size(); ++i) {
        if (result.history[i].value < result.history[best_idx].value) best_idx = i;
    }
    result.best_u = result.history[best_idx].u;
    result.best_value = result.history[best_idx].value;
    return result;
}

ThetaCodec::ThetaCodec(double fs_hz)
    : fs_hz_(fs_hz),
      f_min_(kMinPerturbationFreqHz),
      f_max_(kMaxPerturbationFreqFraction * fs_hz) {
    if (!(fs_hz > 2.0 * kMinPerturbationFreqHz)) {
        throw std::invalid_argument("ThetaCodec: fs too low for the admissible frequency range");
    }
    if (f_max_ - f_min_ < kMinPerturbationBandwidthHz) {
        throw std::invalid_argument("ThetaCodec: admissible range narrower than the minimum bandwidth");
    }
}

PerturbationParams ThetaCodec::decode(double u0, double u1) const {
    const double log_min = std::log(f_min_);
    const double log_span = std::log(f_max_) - log_min;
    double f_a = std::exp(log_min + logistic(u0) * log_span);
    double f_b = std::exp(log_min + logistic(u1) * log_span);
    if (f_a > f_b) std::swap(f_a, f_b);

    const double bw = kMinPerturbationBandwidthHz;
    if (f_b - f_a < bw) {
        const double mid = 0.5 * (f_a + f_b);
        f_a = mid - 0.5 * bw;
        f_b = mid + 0.5 * bw;
        if (f_a < f_min_) {
            f_a = f_min_;
            f_b = f_min_ + bw;
        } else if (f_b > f_max_) {
            f_b = f_max_;
            f_a = f_max_ - bw;
        }
    }
    return PerturbationParams{f_a, f_b};
}

PerturbationParams ThetaCodec::decode(const std::vector<double>& u) const {
    if (u.size() != 2) throw std::invalid_argument("ThetaCodec::decode: expected 2 coordinates");
    return decode(u[0], u[1]);
}

} // namespace psqi
