#pragma once

#include <vector>

#include "jointggl/matrix_core.hpp"

namespace jggl {

/// Standard normal CDF.
double normal_cdf(double x);

/// Upper tail 1 - Phi(x), accurate in the far tail.
double normal_upper_tail(double x);

/// Standard normal quantile Phi^{-1}(prob) for prob in (0, 1).
///
/// Acklam's rational approximation (relative error below 1.2e-9) followed by
/// one Newton step against normal_cdf, which brings it to round-off level.
double normal_quantile(double prob);

/// Zero-based edge (i, j), i <= j after normalization.
struct Edge {
    Eigen::Index i = 0;
    Eigen::Index j = 0;

    bool operator==(const Edge&) const = default;
    auto operator<=>(const Edge&) const = default;
};

/// Orders the indices so that i <= j.
Edge make_edge(Eigen::Index a, Eigen::Index b);

/// Debiased estimates 2 Omega - Omega Sigma Omega (symmetric, not necessarily PD).
struct DebiasedSet {
    std::vector<SymmetricMatrix> matrices;

    [[nodiscard]] std::size_t size() const noexcept { return matrices.size(); }
    [[nodiscard]] const SymmetricMatrix& operator[](std::size_t k) const { return matrices.at(k); }
};

/// Coefficients a_k of the linear combination sum_k a_k Omega^k_ij.
struct LinearCombo {
    std::vector<double> coefficients;
    Edge edge;
};

struct EdgeTestResult {
    Edge edge;
    double estimate = 0.0;   // Y-hat
    double std_error = 0.0;
    double z_stat = 0.0;
    double p_value = 1.0;
    bool reject = false;
    double alpha_level = 0.05;
};

struct ConfidenceIntervalResult {
    Edge edge;
    std::size_t population = 0;
    double lower = 0.0;
    double upper = 0.0;
    double level = 0.95;

    [[nodiscard]] double width() const { return upper - lower; }
    [[nodiscard]] bool contains(double x) const { return lower <= x && x <= upper; }
};

/// 2 Omega^k - Omega^k Sigma^k Omega^k for each population.
DebiasedSet debias(const PrecisionSet& estimate, const CovarianceSet& covs);

/// Plug-in variance Omega_ii Omega_jj + Omega_ij^2 of the debiased entry (i, j).
/// Throws InvalidArgument when the result is not positive.
double variance_estimate(const SymmetricMatrix& estimate, Eigen::Index i, Eigen::Index j);

/// Studentized test of H0: sum_k a_k Omega^k_ij = hypothesized.
///
/// The variance plug-in uses the penalized estimate, not the debiased one.
/// Throws InvalidArgument on a zero standard error.
EdgeTestResult test_linear_combo(const DebiasedSet& debiased, const PrecisionSet& estimate,
                                 const CovarianceSet& covs, const LinearCombo& combo, double alpha_level = 0.05,
                                 double hypothesized = 0.0);

/// center +- z_{(1+level)/2} * sigma / sqrt(n).
std::pair<double, double> normal_interval(double center, double sigma, double n, double level);

/// Confidence interval for Omega^k_ij centred at the debiased entry with
/// half-width tau * sigma-hat / sqrt(n_k).
ConfidenceIntervalResult confidence_interval(const DebiasedSet& debiased, const PrecisionSet& estimate,
                                             const CovarianceSet& covs, std::size_t k, Eigen::Index i,
                                             Eigen::Index j, double level = 0.95);

}  // namespace jggl
