#pragma once

#include <ostream>
#include <vector>

#include "jointggl/ggl_solver.hpp"

namespace jggl {

struct EbicScore {
    double value = 0.0;
    double loglik_term = 0.0;                // -2 sum_k [log det Omega^k - tr(S^k Omega^k)]
    std::vector<std::int64_t> edge_counts;   // |E_k|, unordered off-diagonal pairs
    double gamma = 0.5;
    double c1 = 0.0;                         // penalty constants, when known
    double c2 = 0.0;
    std::int64_t n = 0;                      // min_k n_k
    Eigen::Index p = 0;

    /// Recomputes value from the stored parts.
    [[nodiscard]] double recompute() const;
};

/// Weighting of the likelihood term in the e-BIC.
enum class EbicLikelihood {
    unscaled,      // -2 sum_k [log det - tr], as usually displayed for this estimator
    sample_size,   // -2 sum_k n_k / 2 [log det - tr], the full Gaussian log-likelihood
};

/// Extended BIC of a fitted set: loglik term + sum|E_k| log n + 4 gamma log p sum|E_k|.
EbicScore ebic(const PrecisionSet& estimate, const CovarianceSet& covs, double gamma = 0.5, double edge_tol = 1e-8,
               EbicLikelihood likelihood = EbicLikelihood::unscaled);

/// Number of unordered pairs i < j with |Omega_ij| > tol.
std::int64_t count_edges(const SymmetricMatrix& m, double tol);

struct TuningGrid {
    std::vector<double> c1_values{0.05, 0.1, 0.2, 0.4, 0.8};
    std::vector<double> c2_values{0.05, 0.1, 0.2, 0.4, 0.8};
    double gamma = 0.5;
    double edge_tol = 1e-8;
    EbicLikelihood likelihood = EbicLikelihood::unscaled;

    void validate() const;
};

/// sqrt(log p / n), the common scale of lambda and rho.
double penalty_scale(Eigen::Index p, std::int64_t n);

/// lambda = c1 * sqrt(log p / n), rho = c2 * sqrt(log p / n).
PenaltyPair penalties_from_constants(double c1, double c2, Eigen::Index p, std::int64_t n);

struct TuningCell {
    double c1 = 0.0;
    double c2 = 0.0;
    PenaltyPair penalty;
    EbicScore score;
    bool converged = false;
    int iterations = 0;
};

struct TuningResult {
    double best_c1 = 0.0;
    double best_c2 = 0.0;
    PenaltyPair best_penalty;
    std::size_t best_index = 0;
    std::vector<TuningCell> table;   // row-major over (c1, c2)
    SolveReport best_fit;
};

/// Solves at every grid cell and returns the e-BIC minimizer. Scores within a
/// relative 1e-9 of each other tie; ties go to the larger (c1, c2). Cells whose
/// solve did not converge are excluded; ConvergenceError when none converged.
TuningResult tune_penalties(const CovarianceSet& covs, const TuningGrid& grid, const SolverOptions& opts = {});

/// CSV with columns c1,c2,lambda,rho,ebic,edges_k1..edges_kK,converged.
void write_tuning_csv(std::ostream& os, const TuningResult& result);

}  // namespace jggl
