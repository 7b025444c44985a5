#include "jointggl/inference.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace jggl {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_upper_tail(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

namespace {

// Lower-half quantile, prob in (0, 0.5].
double lower_quantile(double prob) {
    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                                   1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                                   6.680131188771972e+01,  -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                                   -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                                   3.754408661907416e+00};
    constexpr double p_low = 0.02425;

    double x;
    if (prob < p_low) {
        const double q = std::sqrt(-2.0 * std::log(prob));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else {
        const double q = prob - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    }
    // Newton step on Phi(x) = prob.
    const double density = std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
    x -= (normal_cdf(x) - prob) / density;
    return x;
}

void check_index(const SymmetricMatrix& m, Eigen::Index i, Eigen::Index j) {
    if (i < 0 || j < 0 || i >= m.dim() || j >= m.dim()) {
        std::ostringstream msg;
        msg << "edge (" << i + 1 << "," << j + 1 << ") out of range for dimension " << m.dim();
        throw InvalidArgument(msg.str());
    }
}

}  // namespace

double normal_quantile(double prob) {
    if (!(prob > 0.0 && prob < 1.0)) throw InvalidArgument("normal_quantile: probability must lie in (0, 1)");
    if (prob == 0.5) return 0.0;
    if (prob < 0.5) return lower_quantile(prob);
    return -lower_quantile(1.0 - prob);
}

Edge make_edge(Eigen::Index a, Eigen::Index b) { return a <= b ? Edge{a, b} : Edge{b, a}; }

DebiasedSet debias(const PrecisionSet& estimate, const CovarianceSet& covs) {
    if (estimate.size() != covs.size() || estimate.dim() != covs.dim()) {
        throw DimensionError("debias: estimate and covariances differ in population count or dimension");
    }
    DebiasedSet out;
    out.matrices.reserve(estimate.size());
    for (std::size_t k = 0; k < estimate.size(); ++k) {
        const Matrix& omega = estimate[k].dense();
        const Matrix corrected = 2.0 * omega - omega * covs[k].dense() * omega;
        out.matrices.push_back(SymmetricMatrix::symmetrize(corrected));
    }
    return out;
}

double variance_estimate(const SymmetricMatrix& estimate, Eigen::Index i, Eigen::Index j) {
    check_index(estimate, i, j);
    const double v = estimate(i, i) * estimate(j, j) + estimate(i, j) * estimate(i, j);
    if (!(v > 0.0) || !std::isfinite(v)) {
        std::ostringstream msg;
        msg << "variance estimate for (" << i + 1 << "," << j + 1 << ") is " << v
            << "; the estimate does not look positive definite";
        throw InvalidArgument(msg.str());
    }
    return v;
}

EdgeTestResult test_linear_combo(const DebiasedSet& debiased, const PrecisionSet& estimate,
                                 const CovarianceSet& covs, const LinearCombo& combo, double alpha_level,
                                 double hypothesized) {
    const auto K = covs.size();
    if (debiased.size() != K || estimate.size() != K) throw DimensionError("test_linear_combo: population count mismatch");
    if (combo.coefficients.size() != K) throw DimensionError("test_linear_combo: one coefficient per population required");
    if (!(alpha_level > 0.0 && alpha_level < 1.0)) throw InvalidArgument("alpha level must lie in (0, 1)");
    bool any_nonzero = false;
    for (double a : combo.coefficients) any_nonzero = any_nonzero || a != 0.0;
    if (!any_nonzero) throw InvalidArgument("linear combination needs a nonzero coefficient");

    const Edge e = make_edge(combo.edge.i, combo.edge.j);
    double y = 0.0;
    double var = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
        const double a = combo.coefficients[k];
        check_index(debiased[k], e.i, e.j);
        y += a * debiased[k](e.i, e.j);
        if (a != 0.0) var += a * a * variance_estimate(estimate[k], e.i, e.j) / static_cast<double>(covs.sample_sizes()[k]);
    }
    const double se = std::sqrt(var);
    if (!(se > 0.0)) throw InvalidArgument("test_linear_combo: zero standard error");

    EdgeTestResult out;
    out.edge = e;
    out.estimate = y;
    out.std_error = se;
    out.z_stat = (y - hypothesized) / se;
    out.p_value = std::min(1.0, 2.0 * normal_upper_tail(std::abs(out.z_stat)));
    out.alpha_level = alpha_level;
    out.reject = std::abs(out.z_stat) > normal_quantile(1.0 - alpha_level / 2.0);
    return out;
}

std::pair<double, double> normal_interval(double center, double sigma, double n, double level) {
    if (!(level > 0.0 && level < 1.0)) throw InvalidArgument("confidence level must lie in (0, 1)");
    const double half = normal_quantile(0.5 + level / 2.0) * sigma / std::sqrt(n);
    return {center - half, center + half};
}

ConfidenceIntervalResult confidence_interval(const DebiasedSet& debiased, const PrecisionSet& estimate,
                                             const CovarianceSet& covs, std::size_t k, Eigen::Index i,
                                             Eigen::Index j, double level) {
    if (k >= covs.size() || k >= debiased.size() || k >= estimate.size()) {
        throw InvalidArgument("confidence_interval: population index out of range");
    }
    const Edge e = make_edge(i, j);
    check_index(debiased[k], e.i, e.j);
    const double sigma = std::sqrt(variance_estimate(estimate[k], e.i, e.j));
    const auto [lo, hi] =
        normal_interval(debiased[k](e.i, e.j), sigma, static_cast<double>(covs.sample_sizes()[k]), level);
    return {e, k, lo, hi, level};
}

}  // namespace jggl
