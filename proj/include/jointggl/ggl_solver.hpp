#pragma once

#include <span>

#include "jointggl/matrix_core.hpp"

namespace jggl {

/// Regularization weights of the group graphical lasso: lambda on the
/// off-diagonal l1 norm of each Omega^k, rho on the across-population l2 norm
/// of every off-diagonal entry.
struct PenaltyPair {
    double lambda = 0.0;
    double rho = 0.0;

    void validate() const;
};

struct SolverOptions {
    double admm_step = 1.0;   // augmented-Lagrangian parameter eta
    int max_iter = 10000;
    double tol_abs = 1e-6;
    double tol_rel = 1e-4;
    bool weighted_by_n = false;  // scale population k's likelihood term by n_k

    void validate() const;
};

struct SolveReport {
    PrecisionSet estimate;
    int iterations = 0;
    double primal_residual = 0.0;
    double dual_residual = 0.0;
    bool converged = false;
    double kkt_violation = 0.0;
};

/// Sum_k w_k [tr(S^k Omega^k) - log det Omega^k] + penalty, with w_k = 1 or n_k.
double ggl_objective(const PrecisionSet& omega, const CovarianceSet& covs, const PenaltyPair& penalty,
                     bool weighted_by_n = false);

/// lambda * sum_k sum_{i != j} |Omega^k_ij| + rho * sum_{i != j} ||Omega^._ij||_2.
double ggl_penalty(const PrecisionSet& omega, const PenaltyPair& penalty);

/// argmin_x 0.5 ||x - v||^2 + lambda_eff ||x||_1 + rho_eff ||x||_2, written into out.
/// out may alias values.
void prox_penalty(std::span<const double> values, double lambda_eff, double rho_eff, std::span<double> out);

/// Convenience overload returning a new vector.
Vector prox_penalty(const Vector& values, double lambda_eff, double rho_eff);

/// Largest violation of the subgradient optimality conditions at `estimate`.
/// Diagonal stationarity, nonzero-group stationarity with the zero-coordinate
/// subgradients chosen optimally, and ||soft(G_ij, lambda)||_2 <= rho for groups
/// that are entirely zero.
double kkt_residual(const PrecisionSet& estimate, const CovarianceSet& covs, const PenaltyPair& penalty,
                    bool weighted_by_n = false);

/// Group graphical lasso by consensus ADMM. Throws DataError when some sample
/// covariance has a nonpositive diagonal entry; non-convergence is reported
/// through SolveReport::converged, never thrown.
SolveReport solve_ggl(const CovarianceSet& covs, const PenaltyPair& penalty, const SolverOptions& opts = {});

}  // namespace jggl
