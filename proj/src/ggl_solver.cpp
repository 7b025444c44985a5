#include "jointggl/ggl_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

namespace jggl {

void PenaltyPair::validate() const {
    if (!(lambda >= 0.0) || !(rho >= 0.0) || !std::isfinite(lambda) || !std::isfinite(rho)) {
        std::ostringstream msg;
        msg << "penalties must be finite and nonnegative (lambda=" << lambda << ", rho=" << rho << ")";
        throw InvalidArgument(msg.str());
    }
}

void SolverOptions::validate() const {
    if (!(admm_step > 0.0)) throw InvalidArgument("admm_step must be positive");
    if (max_iter < 1) throw InvalidArgument("max_iter must be at least 1");
    if (!(tol_abs > 0.0) || !(tol_rel > 0.0)) throw InvalidArgument("solver tolerances must be positive");
}

namespace {

double likelihood_weight(const CovarianceSet& covs, std::size_t k, bool weighted_by_n) {
    return weighted_by_n ? static_cast<double>(covs.sample_sizes()[k]) : 1.0;
}

void check_compatible(const PrecisionSet& omega, const CovarianceSet& covs) {
    if (omega.size() != covs.size() || omega.dim() != covs.dim()) {
        throw DimensionError("estimate and covariances differ in population count or dimension");
    }
}

}  // namespace

double ggl_penalty(const PrecisionSet& omega, const PenaltyPair& penalty) {
    const auto p = omega.dim();
    const auto K = omega.size();
    double l1 = 0.0;
    double group = 0.0;
    for (Eigen::Index i = 0; i < p; ++i) {
        for (Eigen::Index j = i + 1; j < p; ++j) {
            double sq = 0.0;
            for (std::size_t k = 0; k < K; ++k) {
                const double w = omega[k](i, j);
                l1 += std::abs(w);
                sq += w * w;
            }
            group += std::sqrt(sq);
        }
    }
    // Both (i, j) and (j, i) appear in the sums over i != j.
    return 2.0 * (penalty.lambda * l1 + penalty.rho * group);
}

double ggl_objective(const PrecisionSet& omega, const CovarianceSet& covs, const PenaltyPair& penalty,
                     bool weighted_by_n) {
    check_compatible(omega, covs);
    double value = 0.0;
    for (std::size_t k = 0; k < omega.size(); ++k) {
        const double trace = covs[k].dense().cwiseProduct(omega[k].dense()).sum();
        value += likelihood_weight(covs, k, weighted_by_n) * (trace - log_det_pd(omega[k]));
    }
    return value + ggl_penalty(omega, penalty);
}

void prox_penalty(std::span<const double> values, double lambda_eff, double rho_eff, std::span<double> out) {
    if (out.size() != values.size()) throw DimensionError("prox_penalty: output size mismatch");
    double norm_sq = 0.0;
    for (std::size_t k = 0; k < values.size(); ++k) {
        const double v = values[k];
        const double mag = std::max(0.0, std::abs(v) - lambda_eff);
        out[k] = std::copysign(mag, v);
        norm_sq += mag * mag;
    }
    const double norm = std::sqrt(norm_sq);
    const double scale = norm > rho_eff ? 1.0 - rho_eff / norm : 0.0;
    for (auto& x : out) x = scale == 0.0 ? 0.0 : x * scale;
}

Vector prox_penalty(const Vector& values, double lambda_eff, double rho_eff) {
    Vector out(values.size());
    prox_penalty(std::span<const double>(values.data(), static_cast<std::size_t>(values.size())), lambda_eff,
                 rho_eff, std::span<double>(out.data(), static_cast<std::size_t>(out.size())));
    return out;
}

double kkt_residual(const PrecisionSet& estimate, const CovarianceSet& covs, const PenaltyPair& penalty,
                    bool weighted_by_n) {
    check_compatible(estimate, covs);
    penalty.validate();
    const auto K = estimate.size();
    const auto p = estimate.dim();
    std::vector<Matrix> grad(K);
    for (std::size_t k = 0; k < K; ++k) {
        grad[k] = likelihood_weight(covs, k, weighted_by_n) * (covs[k].dense() - invert_pd(estimate[k]).dense());
    }

    double violation = 0.0;
    std::vector<double> g(K);
    std::vector<double> w(K);
    for (Eigen::Index i = 0; i < p; ++i) {
        for (std::size_t k = 0; k < K; ++k) violation = std::max(violation, std::abs(grad[k](i, i)));
        for (Eigen::Index j = i + 1; j < p; ++j) {
            double group_sq = 0.0;
            for (std::size_t k = 0; k < K; ++k) {
                g[k] = grad[k](i, j);
                w[k] = estimate[k](i, j);
                group_sq += w[k] * w[k];
            }
            if (group_sq == 0.0) {
                // Zero group: some z in [-1,1]^K, ||m|| <= 1 must cancel g.
                double soft_sq = 0.0;
                for (std::size_t k = 0; k < K; ++k) {
                    const double s = std::max(0.0, std::abs(g[k]) - penalty.lambda);
                    soft_sq += s * s;
                }
                violation = std::max(violation, std::sqrt(soft_sq) - penalty.rho);
                continue;
            }
            const double group_norm = std::sqrt(group_sq);
            for (std::size_t k = 0; k < K; ++k) {
                double r;
                if (w[k] != 0.0) {
                    r = g[k] + penalty.lambda * std::copysign(1.0, w[k]) + penalty.rho * w[k] / group_norm;
                } else {
                    // m^k = 0 here; z^k = clamp(-g/lambda, -1, 1) leaves the soft-threshold excess.
                    r = std::max(0.0, std::abs(g[k]) - penalty.lambda);
                }
                violation = std::max(violation, std::abs(r));
            }
        }
    }
    return std::max(0.0, violation);
}

namespace {

struct AdmmState {
    std::vector<Matrix> omega;
    std::vector<Matrix> z;
    std::vector<Matrix> u;
};

PrecisionSet to_precision_set(const std::vector<Matrix>& mats) {
    std::vector<SymmetricMatrix> out;
    out.reserve(mats.size());
    for (const auto& m : mats) out.push_back(SymmetricMatrix::symmetrize(m));
    return PrecisionSet(std::move(out));
}

bool all_pd(const std::vector<Matrix>& mats) {
    return std::all_of(mats.begin(), mats.end(), [](const Matrix& m) {
        const Eigen::LLT<Matrix> llt(m);
        return llt.info() == Eigen::Success;
    });
}

double stacked_norm(const std::vector<Matrix>& mats) {
    double sq = 0.0;
    for (const auto& m : mats) sq += m.squaredNorm();
    return std::sqrt(sq);
}

}  // namespace

SolveReport solve_ggl(const CovarianceSet& covs, const PenaltyPair& penalty, const SolverOptions& opts) {
    penalty.validate();
    opts.validate();
    for (const auto& s : covs.matrices()) {
        if (!s.dense().allFinite()) throw DataError("sample covariance has non-finite entries");
    }
    if (!covs.has_positive_diagonal()) {
        throw DataError("sample covariance has a nonpositive diagonal entry; the problem has no unique solution");
    }

    const auto K = covs.size();
    const auto p = covs.dim();
    const double eta = opts.admm_step;
    const double lam = penalty.lambda / eta;
    const double rho = penalty.rho / eta;
    const double sqrt_dim = std::sqrt(static_cast<double>(K) * static_cast<double>(p * p));
    const double kkt_target = 10.0 * opts.tol_abs;

    AdmmState st;
    for (std::size_t k = 0; k < K; ++k) {
        const Vector inv_diag = covs[k].dense().diagonal().cwiseInverse();
        st.omega.emplace_back(inv_diag.asDiagonal());
        st.z.push_back(st.omega.back());
        st.u.emplace_back(Matrix::Zero(p, p));
    }
    std::vector<double> weight(K);
    for (std::size_t k = 0; k < K; ++k) weight[k] = likelihood_weight(covs, k, opts.weighted_by_n);

    Eigen::SelfAdjointEigenSolver<Matrix> eig(p);
    std::vector<Matrix> z_prev(K);
    std::vector<double> v(K), x(K);

    SolveReport report;
    std::vector<Matrix> best_z = st.z;
    std::vector<Matrix> best_omega = st.omega;
    double best_merit = std::numeric_limits<double>::infinity();
    double best_r = 0.0, best_s = 0.0;

    for (int iter = 1; iter <= opts.max_iter; ++iter) {
        // Omega-step: eta*Omega - w*Omega^{-1} = eta*(Z - U) - w*S, solved on the eigenbasis.
        for (std::size_t k = 0; k < K; ++k) {
            const Matrix a = eta * (st.z[k] - st.u[k]) - weight[k] * covs[k].dense();
            eig.compute(0.5 * (a + a.transpose()));
            const Vector& d = eig.eigenvalues();
            const Vector w =
                (d.array() + (d.array().square() + 4.0 * eta * weight[k]).sqrt()) / (2.0 * eta);
            const Matrix& q = eig.eigenvectors();
            const Matrix om = q * w.asDiagonal() * q.transpose();
            st.omega[k] = 0.5 * (om + om.transpose());
        }

        // Z-step: diagonals copied, each off-diagonal group through the composite prox.
        for (std::size_t k = 0; k < K; ++k) {
            z_prev[k] = st.z[k];
            st.z[k].diagonal() = st.omega[k].diagonal() + st.u[k].diagonal();
        }
        for (Eigen::Index j = 0; j < p; ++j) {
            for (Eigen::Index i = j + 1; i < p; ++i) {
                for (std::size_t k = 0; k < K; ++k) v[k] = st.omega[k](i, j) + st.u[k](i, j);
                prox_penalty(v, lam, rho, x);
                for (std::size_t k = 0; k < K; ++k) {
                    st.z[k](i, j) = x[k];
                    st.z[k](j, i) = x[k];
                }
            }
        }

        double r_sq = 0.0, s_sq = 0.0;
        for (std::size_t k = 0; k < K; ++k) {
            const Matrix diff = st.omega[k] - st.z[k];
            st.u[k] += diff;
            r_sq += diff.squaredNorm();
            s_sq += (st.z[k] - z_prev[k]).squaredNorm();
        }
        const double r = std::sqrt(r_sq);
        const double s = eta * std::sqrt(s_sq);
        const double eps_pri =
            sqrt_dim * opts.tol_abs + opts.tol_rel * std::max(stacked_norm(st.omega), stacked_norm(st.z));
        const double eps_dual = sqrt_dim * opts.tol_abs + opts.tol_rel * eta * stacked_norm(st.u);

        const double merit = std::max(r / eps_pri, s / eps_dual);
        if (merit < best_merit) {
            best_merit = merit;
            best_z = st.z;
            best_omega = st.omega;
            best_r = r;
            best_s = s;
        }

        if (r <= eps_pri && s <= eps_dual && all_pd(st.z)) {
            PrecisionSet candidate = to_precision_set(st.z);
            const double kkt = kkt_residual(candidate, covs, penalty, opts.weighted_by_n);
            if (kkt <= kkt_target) {
                report.estimate = std::move(candidate);
                report.iterations = iter;
                report.primal_residual = r;
                report.dual_residual = s;
                report.converged = true;
                report.kkt_violation = kkt;
                return report;
            }
        }
    }

    report.estimate = to_precision_set(all_pd(best_z) ? best_z : best_omega);
    report.iterations = opts.max_iter;
    report.primal_residual = best_r;
    report.dual_residual = best_s;
    report.converged = false;
    report.kkt_violation = kkt_residual(report.estimate, covs, penalty, opts.weighted_by_n);
    return report;
}

}  // namespace jggl
