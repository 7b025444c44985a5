#pragma once

// Independent reference implementations used only by the tests.

#include <cmath>
#include <vector>

#include "jointggl/matrix_core.hpp"
#include "jointggl/rng.hpp"

namespace oracle {

using jggl::Matrix;
using jggl::Vector;

// Random SPD matrix with eigenvalues in roughly [lo, hi].
inline Matrix random_spd(Eigen::Index p, jggl::Rng& rng, double lo = 0.5, double hi = 2.0) {
    Matrix a(p, p);
    for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = rng.normal();
    const Eigen::HouseholderQR<Matrix> qr(a);
    const Matrix q = qr.householderQ();
    Vector d(p);
    for (Eigen::Index i = 0; i < p; ++i) d(i) = lo + (hi - lo) * rng.uniform();
    Matrix s = q * d.asDiagonal() * q.transpose();
    return 0.5 * (s + s.transpose());
}

// Sample covariance (divisor n) of n draws from N(0, sigma).
inline Matrix random_sample_cov(const Matrix& sigma, Eigen::Index n, jggl::Rng& rng) {
    const Eigen::LLT<Matrix> llt(sigma);
    const Matrix l = llt.matrixL();
    Matrix x(n, sigma.rows());
    for (Eigen::Index r = 0; r < n; ++r) {
        Vector z(sigma.rows());
        for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = rng.normal();
        x.row(r) = (l * z).transpose();
    }
    Matrix s = x.transpose() * x / static_cast<double>(n);
    return 0.5 * (s + s.transpose());
}

// Full p^2 x p^2 Kronecker product, row index a*p + b.
inline Matrix kron(const Matrix& a, const Matrix& b) {
    const auto p = a.rows(), q = b.rows();
    Matrix out(p * q, p * q);
    for (Eigen::Index i = 0; i < p; ++i)
        for (Eigen::Index j = 0; j < p; ++j) out.block(i * q, j * q, q, q) = a(i, j) * b;
    return out;
}

// alpha of the irrepresentability condition built from the dense Kronecker product.
inline double dense_alpha(const Matrix& omega, bool augment = true, double tol = 1e-12) {
    const auto p = omega.rows();
    const Matrix sigma = omega.inverse();
    const Matrix g = kron(sigma, sigma);
    std::vector<Eigen::Index> s, sc;
    for (Eigen::Index a = 0; a < p; ++a) {
        for (Eigen::Index b = 0; b < p; ++b) {
            const bool in = a == b ? augment : std::abs(omega(a, b)) > tol;
            (in ? s : sc).push_back(a * p + b);
        }
    }
    Matrix gss(s.size(), s.size()), gcs(sc.size(), s.size());
    for (std::size_t r = 0; r < s.size(); ++r)
        for (std::size_t c = 0; c < s.size(); ++c) gss(r, c) = g(s[r], s[c]);
    for (std::size_t r = 0; r < sc.size(); ++r)
        for (std::size_t c = 0; c < s.size(); ++c) gcs(r, c) = g(sc[r], s[c]);
    const Matrix x = gcs * gss.fullPivLu().inverse();
    return 1.0 - x.cwiseAbs().rowwise().sum().maxCoeff();
}

// argmin_x 0.5||x - v||^2 + lam ||x||_1 + rho ||x||_2 for K = 2 by coarse-to-fine grid search.
inline Vector prox_grid_search(const Vector& v, double lam, double rho) {
    auto f = [&](double x0, double x1) {
        const double d0 = x0 - v(0), d1 = x1 - v(1);
        return 0.5 * (d0 * d0 + d1 * d1) + lam * (std::abs(x0) + std::abs(x1)) + rho * std::hypot(x0, x1);
    };
    double c0 = 0.0, c1 = 0.0, half = std::max(std::abs(v(0)), std::abs(v(1))) + 1.0;
    for (int level = 0; level < 12; ++level) {
        double best = f(c0, c1), b0 = c0, b1 = c1;
        const int steps = 100;
        for (int i = -steps; i <= steps; ++i) {
            for (int j = -steps; j <= steps; ++j) {
                const double x0 = c0 + half * i / steps, x1 = c1 + half * j / steps;
                const double val = f(x0, x1);
                if (val < best) {
                    best = val;
                    b0 = x0;
                    b1 = x1;
                }
            }
        }
        c0 = b0;
        c1 = b1;
        half *= 0.05;
    }
    Vector out(2);
    out << c0, c1;
    return out;
}

struct PgResult {
    std::vector<Matrix> omega;
    double objective = 0.0;
    int iterations = 0;
};

inline double smooth_part(const std::vector<Matrix>& omega, const std::vector<Matrix>& s, bool& pd) {
    double v = 0.0;
    pd = true;
    for (std::size_t k = 0; k < omega.size(); ++k) {
        const Eigen::LLT<Matrix> llt(omega[k]);
        if (llt.info() != Eigen::Success) {
            pd = false;
            return INFINITY;
        }
        const Matrix l = llt.matrixL();
        v += (s[k] * omega[k]).trace() - 2.0 * l.diagonal().array().log().sum();
    }
    return v;
}

inline double penalty_part(const std::vector<Matrix>& omega, double lam, double rho) {
    const auto p = omega[0].rows();
    double v = 0.0;
    for (Eigen::Index i = 0; i < p; ++i) {
        for (Eigen::Index j = 0; j < p; ++j) {
            if (i == j) continue;
            double sq = 0.0;
            for (const auto& m : omega) {
                v += lam * std::abs(m(i, j));
                sq += m(i, j) * m(i, j);
            }
            v += rho * std::sqrt(sq);
        }
    }
    return v;
}

// Proximal gradient with backtracking and monotone restarts, run to stagnation.
inline PgResult proximal_gradient(const std::vector<Matrix>& s, double lam, double rho, int max_iter = 200000) {
    const auto K = s.size();
    const auto p = s[0].rows();
    std::vector<Matrix> x(K);
    for (std::size_t k = 0; k < K; ++k) x[k] = s[k].diagonal().cwiseInverse().asDiagonal();
    auto prox = [&](std::vector<Matrix>& y, double t) {
        for (Eigen::Index i = 0; i < p; ++i) {
            for (Eigen::Index j = 0; j < p; ++j) {
                if (i == j) continue;
                double sq = 0.0;
                for (std::size_t k = 0; k < K; ++k) {
                    const double a = std::max(0.0, std::abs(y[k](i, j)) - t * lam);
                    y[k](i, j) = std::copysign(a, y[k](i, j));
                    sq += a * a;
                }
                const double n = std::sqrt(sq);
                const double scale = n > t * rho ? 1.0 - t * rho / n : 0.0;
                for (std::size_t k = 0; k < K; ++k) y[k](i, j) *= scale;
            }
        }
    };
    bool pd = true;
    double t = 1.0;
    PgResult res;
    double f_prev = smooth_part(x, s, pd) + penalty_part(x, lam, rho);
    for (int it = 1; it <= max_iter; ++it) {
        std::vector<Matrix> grad(K);
        for (std::size_t k = 0; k < K; ++k) grad[k] = s[k] - x[k].inverse();
        const double fx = smooth_part(x, s, pd);
        std::vector<Matrix> y(K);
        t = std::min(1.0, t * 2.0);
        while (true) {
            for (std::size_t k = 0; k < K; ++k) y[k] = x[k] - t * grad[k];
            prox(y, t);
            for (auto& m : y) m = 0.5 * (m + m.transpose()).eval();
            const double fy = smooth_part(y, s, pd);
            if (pd) {
                double lin = 0.0, quad = 0.0;
                for (std::size_t k = 0; k < K; ++k) {
                    lin += (grad[k].cwiseProduct(y[k] - x[k])).sum();
                    quad += (y[k] - x[k]).squaredNorm();
                }
                if (fy <= fx + lin + quad / (2.0 * t) + 1e-15) break;
            }
            t *= 0.5;
            if (t < 1e-14) break;
        }
        double change = 0.0;
        for (std::size_t k = 0; k < K; ++k) change = std::max(change, (y[k] - x[k]).cwiseAbs().maxCoeff());
        x = y;
        res.iterations = it;
        const double f_now = smooth_part(x, s, pd) + penalty_part(x, lam, rho);
        if (change < 1e-13 || (it > 50 && std::abs(f_prev - f_now) < 1e-15 && change < 1e-10)) break;
        f_prev = f_now;
    }
    res.omega = x;
    res.objective = smooth_part(x, s, pd) + penalty_part(x, lam, rho);
    return res;
}

}  // namespace oracle
