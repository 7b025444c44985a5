#include "jointggl/selection.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

namespace jggl {

double EbicScore::recompute() const {
    std::int64_t total = 0;
    for (auto e : edge_counts) total += e;
    const double edges = static_cast<double>(total);
    return loglik_term + edges * std::log(static_cast<double>(n)) +
           4.0 * gamma * std::log(static_cast<double>(p)) * edges;
}

std::int64_t count_edges(const SymmetricMatrix& m, double tol) {
    std::int64_t count = 0;
    for (Eigen::Index i = 0; i < m.dim(); ++i) {
        for (Eigen::Index j = i + 1; j < m.dim(); ++j) {
            if (std::abs(m(i, j)) > tol) ++count;
        }
    }
    return count;
}

EbicScore ebic(const PrecisionSet& estimate, const CovarianceSet& covs, double gamma, double edge_tol,
               EbicLikelihood likelihood) {
    if (estimate.size() != covs.size() || estimate.dim() != covs.dim()) {
        throw DimensionError("ebic: estimate and covariances differ in population count or dimension");
    }
    if (!(gamma >= 0.0)) throw InvalidArgument("ebic: gamma must be nonnegative");
    EbicScore score;
    score.gamma = gamma;
    score.n = covs.min_sample_size();
    score.p = covs.dim();
    double fit = 0.0;
    for (std::size_t k = 0; k < estimate.size(); ++k) {
        const double trace = covs[k].dense().cwiseProduct(estimate[k].dense()).sum();
        const double w =
            likelihood == EbicLikelihood::sample_size ? 0.5 * static_cast<double>(covs.sample_sizes()[k]) : 1.0;
        fit += w * (log_det_pd(estimate[k]) - trace);
        score.edge_counts.push_back(count_edges(estimate[k], edge_tol));
    }
    score.loglik_term = -2.0 * fit;
    score.value = score.recompute();
    return score;
}

void TuningGrid::validate() const {
    auto check = [](const std::vector<double>& v, const char* name) {
        if (v.empty()) throw InvalidArgument(std::string("tuning grid ") + name + " is empty");
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (!(v[i] > 0.0) || !std::isfinite(v[i])) {
                throw InvalidArgument(std::string("tuning grid ") + name + " values must be positive");
            }
            if (i > 0 && !(v[i] > v[i - 1])) {
                throw InvalidArgument(std::string("tuning grid ") + name + " must be strictly increasing");
            }
        }
    };
    check(c1_values, "c1");
    check(c2_values, "c2");
    if (!(gamma >= 0.0)) throw InvalidArgument("tuning grid gamma must be nonnegative");
}

double penalty_scale(Eigen::Index p, std::int64_t n) {
    if (p < 1 || n < 1) throw InvalidArgument("penalty_scale: p and n must be positive");
    return std::sqrt(std::log(static_cast<double>(p)) / static_cast<double>(n));
}

PenaltyPair penalties_from_constants(double c1, double c2, Eigen::Index p, std::int64_t n) {
    const double scale = penalty_scale(p, n);
    return {c1 * scale, c2 * scale};
}

TuningResult tune_penalties(const CovarianceSet& covs, const TuningGrid& grid, const SolverOptions& opts) {
    grid.validate();
    const auto p = covs.dim();
    const auto n = covs.min_sample_size();

    TuningResult result;
    bool found = false;
    double best_value = std::numeric_limits<double>::infinity();
    for (double c1 : grid.c1_values) {
        for (double c2 : grid.c2_values) {
            TuningCell cell;
            cell.c1 = c1;
            cell.c2 = c2;
            cell.penalty = penalties_from_constants(c1, c2, p, n);
            SolveReport fit = solve_ggl(covs, cell.penalty, opts);
            cell.converged = fit.converged;
            cell.iterations = fit.iterations;
            cell.score = ebic(fit.estimate, covs, grid.gamma, grid.edge_tol, grid.likelihood);
            cell.score.c1 = c1;
            cell.score.c2 = c2;
            if (cell.converged) {
                const double v = cell.score.value;
                const double tie_band = 1e-9 * std::max(1.0, std::abs(best_value));
                // Grid values increase, so a later cell within the tie band is the larger one.
                if (!found || v < best_value - tie_band || std::abs(v - best_value) <= tie_band) {
                    found = true;
                    best_value = std::min(v, best_value);
                    result.best_index = result.table.size();
                    result.best_c1 = c1;
                    result.best_c2 = c2;
                    result.best_penalty = cell.penalty;
                    result.best_fit = std::move(fit);
                }
            }
            result.table.push_back(std::move(cell));
        }
    }
    if (!found) throw ConvergenceError("tune_penalties: no grid cell converged");
    return result;
}

void write_tuning_csv(std::ostream& os, const TuningResult& result) {
    const std::size_t K = result.table.empty() ? 0 : result.table.front().score.edge_counts.size();
    os << "c1,c2,lambda,rho,ebic";
    for (std::size_t k = 0; k < K; ++k) os << ",edges_k" << k + 1;
    os << ",converged\n";
    char buf[64];
    auto num = [&](double x) {
        std::snprintf(buf, sizeof buf, "%.17g", x);
        return std::string(buf);
    };
    for (const auto& cell : result.table) {
        os << num(cell.c1) << ',' << num(cell.c2) << ',' << num(cell.penalty.lambda) << ',' << num(cell.penalty.rho)
           << ',' << num(cell.score.value);
        for (auto e : cell.score.edge_counts) os << ',' << e;
        os << ',' << (cell.converged ? "true" : "false") << '\n';
    }
}

}  // namespace jggl
