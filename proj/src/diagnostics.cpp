#include "jointggl/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace jggl {

bool EdgeSet::contains(Edge e) const {
    const Edge key = make_edge(e.i, e.j);
    return std::binary_search(pairs.begin(), pairs.end(), key);
}

EdgeSet edge_set(const SymmetricMatrix& precision, double tol) {
    if (!(tol >= 0.0)) throw InvalidArgument("edge_set: tol must be nonnegative");
    EdgeSet out;
    out.p = precision.dim();
    for (Eigen::Index i = 0; i < out.p; ++i) {
        for (Eigen::Index j = i + 1; j < out.p; ++j) {
            if (std::abs(precision(i, j)) > tol) out.pairs.push_back({i, j});
        }
    }
    return out;
}

Matrix restricted_hessian(const SymmetricMatrix& sigma, const std::vector<IndexPair>& index_set) {
    if (index_set.size() > kMaxHessianIndex) {
        std::ostringstream msg;
        msg << "restricted_hessian: index set of size " << index_set.size() << " exceeds the dense limit "
            << kMaxHessianIndex;
        throw InvalidArgument(msg.str());
    }
    const auto p = sigma.dim();
    for (const auto& ip : index_set) {
        if (ip.a < 0 || ip.b < 0 || ip.a >= p || ip.b >= p) {
            throw InvalidArgument("restricted_hessian: index pair out of range");
        }
    }
    const auto m = static_cast<Eigen::Index>(index_set.size());
    const Matrix& s = sigma.dense();
    Matrix h(m, m);
    for (Eigen::Index c = 0; c < m; ++c) {
        const auto& col = index_set[static_cast<std::size_t>(c)];
        for (Eigen::Index r = 0; r < m; ++r) {
            const auto& row = index_set[static_cast<std::size_t>(r)];
            h(r, c) = s(row.a, col.a) * s(row.b, col.b);
        }
    }
    return h;
}

std::vector<IndexPair> support_index_set(const EdgeSet& edges, bool augment_diagonal) {
    std::vector<IndexPair> out;
    out.reserve(2 * edges.size() + (augment_diagonal ? static_cast<std::size_t>(edges.p) : 0));
    if (augment_diagonal) {
        for (Eigen::Index i = 0; i < edges.p; ++i) out.push_back({i, i});
    }
    for (const auto& e : edges.pairs) {
        out.push_back({e.i, e.j});
        out.push_back({e.j, e.i});
    }
    std::sort(out.begin(), out.end(), [](const IndexPair& x, const IndexPair& y) {
        return x.a != y.a ? x.a < y.a : x.b < y.b;
    });
    return out;
}

std::vector<IndexPair> complement_index_set(Eigen::Index p, const std::vector<IndexPair>& support) {
    std::vector<char> in_s(static_cast<std::size_t>(p * p), 0);
    for (const auto& ip : support) in_s[static_cast<std::size_t>(ip.a * p + ip.b)] = 1;
    std::vector<IndexPair> out;
    for (Eigen::Index a = 0; a < p; ++a) {
        for (Eigen::Index b = 0; b < p; ++b) {
            if (!in_s[static_cast<std::size_t>(a * p + b)]) out.push_back({a, b});
        }
    }
    return out;
}

double inf_operator_norm(const Matrix& a) {
    if (a.size() == 0) return 0.0;
    return a.cwiseAbs().rowwise().sum().maxCoeff();
}

IrrepresentabilityDetail irrepresentability_detail(const SymmetricMatrix& precision, double tol,
                                                   bool augment_diagonal) {
    if (!is_positive_definite(precision)) {
        throw NotPositiveDefinite("irrepresentability: precision matrix is not positive definite");
    }
    const auto p = precision.dim();
    const SymmetricMatrix sigma = invert_pd(precision);
    const Matrix& s = sigma.dense();

    IrrepresentabilityDetail out;
    out.support = support_index_set(edge_set(precision, tol), augment_diagonal);
    out.complement = complement_index_set(p, out.support);
    if (out.support.empty()) {
        // Gamma_eS is empty, every row norm vanishes.
        out.row_l1.assign(out.complement.size(), 0.0);
        out.row_sum.assign(out.complement.size(), 0.0);
        out.alpha = 1.0;
        return out;
    }

    const Matrix gamma_ss = restricted_hessian(sigma, out.support);
    const Eigen::LLT<Matrix> llt(gamma_ss);
    if (llt.info() != Eigen::Success) throw InvalidArgument("irrepresentability: Gamma_SS is singular");
    const auto m = static_cast<Eigen::Index>(out.support.size());
    out.kappa_gamma = inf_operator_norm(llt.solve(Matrix::Identity(m, m)));

    const auto nc = static_cast<Eigen::Index>(out.complement.size());
    out.row_l1.resize(out.complement.size());
    out.row_sum.resize(out.complement.size());
    double worst = 0.0;
    constexpr Eigen::Index chunk = 512;
    Matrix block;
    for (Eigen::Index start = 0; start < nc; start += chunk) {
        const Eigen::Index w = std::min(chunk, nc - start);
        block.resize(m, w);
        for (Eigen::Index c = 0; c < w; ++c) {
            const auto& e = out.complement[static_cast<std::size_t>(start + c)];
            for (Eigen::Index r = 0; r < m; ++r) {
                const auto& f = out.support[static_cast<std::size_t>(r)];
                block(r, c) = s(f.a, e.a) * s(f.b, e.b);
            }
        }
        // Column c of Gamma_SS^{-1} Gamma_{S,e} is the transpose of row e of Gamma_eS Gamma_SS^{-1}.
        const Matrix x = llt.solve(block);
        for (Eigen::Index c = 0; c < w; ++c) {
            const auto idx = static_cast<std::size_t>(start + c);
            out.row_l1[idx] = x.col(c).cwiseAbs().sum();
            out.row_sum[idx] = x.col(c).sum();
            worst = std::max(worst, out.row_l1[idx]);
        }
    }
    out.alpha = 1.0 - worst;
    return out;
}

double check_irrepresentability(const SymmetricMatrix& precision, double tol, bool augment_diagonal) {
    return irrepresentability_detail(precision, tol, augment_diagonal).alpha;
}

BetweenGroupResult check_between_group(const PrecisionSet& precisions, const PenaltyPair& penalty, double psi,
                                       double alpha, double tol, bool augment_diagonal) {
    if (precisions.size() == 0) throw InvalidArgument("between-group check needs at least one population");
    if (!(psi > 0.0 && psi < 1.0)) throw InvalidArgument("between-group check: psi must lie in (0, 1)");
    if (!(alpha > 0.0 && alpha <= 1.0)) throw InvalidArgument("between-group check: alpha must lie in (0, 1]");
    penalty.validate();
    if (!(penalty.lambda + penalty.rho > 0.0)) {
        throw InvalidArgument("between-group check: lambda + rho must be positive");
    }
    const EdgeSet base = edge_set(precisions[0], tol);
    for (std::size_t k = 1; k < precisions.size(); ++k) {
        if (!(edge_set(precisions[k], tol) == base)) {
            throw InvalidArgument("between-group check: populations have differing sparsity patterns");
        }
    }

    std::vector<double> acc;
    for (std::size_t k = 0; k < precisions.size(); ++k) {
        const auto detail = irrepresentability_detail(precisions[k], tol, augment_diagonal);
        if (acc.empty()) acc.assign(detail.row_sum.size(), 0.0);
        for (std::size_t e = 0; e < acc.size(); ++e) acc[e] += detail.row_sum[e] * detail.row_sum[e];
    }
    BetweenGroupResult out;
    for (double v : acc) out.lhs = std::max(out.lhs, std::sqrt(v));
    const double K = static_cast<double>(precisions.size());
    const double lr = penalty.lambda + penalty.rho;
    out.rhs = (penalty.rho / (lr * (1.0 - psi)) - alpha * std::sqrt(K) / 4.0) / (1.0 + alpha / 4.0);
    out.holds = out.lhs < out.rhs;
    return out;
}

bool irrepresentability_implies_between_group(double alpha, const PenaltyPair& penalty, double psi, std::size_t K) {
    if (!(alpha > 0.0) || K == 0) return false;
    const double lr = penalty.lambda + penalty.rho;
    if (!(lr > 0.0)) return false;
    const double bound = penalty.rho / (std::sqrt(static_cast<double>(K)) * lr * (1.0 - psi));
    return 1.0 - alpha / 2.0 - alpha * alpha / 4.0 <= bound;
}

double rate_delta(std::int64_t n, Eigen::Index p, double gamma, double k1, double max_diag) {
    if (!(gamma > 2.0)) throw InvalidArgument("rate_delta: gamma must exceed 2");
    if (n < 1 || p < 1) throw InvalidArgument("rate_delta: n and p must be positive");
    const double log_term = std::log(4.0) + gamma * std::log(static_cast<double>(p));
    return 8.0 * (1.0 + 12.0 * k1 * k1) * max_diag * std::sqrt(2.0 * log_term / static_cast<double>(n));
}

GraphStats graph_stats(const SymmetricMatrix& precision, double tol) {
    GraphStats out;
    const auto p = precision.dim();
    out.degrees.assign(static_cast<std::size_t>(p), 0);
    for (Eigen::Index i = 0; i < p; ++i) {
        for (Eigen::Index j = i + 1; j < p; ++j) {
            const double v = std::abs(precision(i, j));
            if (v > tol) {
                ++out.edge_count;
                ++out.degrees[static_cast<std::size_t>(i)];
                ++out.degrees[static_cast<std::size_t>(j)];
                out.omega_min = out.omega_min ? std::min(*out.omega_min, v) : v;
            }
        }
    }
    for (auto d : out.degrees) out.max_degree = std::max(out.max_degree, d);
    std::tie(out.eigen_min, out.eigen_max) = eigen_bounds(precision);
    return out;
}

DiagnosticsReport diagnose(const PrecisionSet& truth, const DiagnosticsOptions& opts) {
    const auto K = truth.size();
    if (K == 0) throw InvalidArgument("diagnose: empty precision set");
    if (!opts.sample_sizes.empty() && opts.sample_sizes.size() != K) {
        throw DimensionError("diagnose: one sample size per population required");
    }
    for (auto n : opts.sample_sizes) {
        if (n < 1) throw InvalidArgument("diagnose: sample sizes must be positive");
    }
    const auto p = truth.dim();

    DiagnosticsReport rep;
    const EdgeSet base = edge_set(truth[0], opts.tol);
    std::vector<double> max_diag(K);
    for (std::size_t k = 0; k < K; ++k) {
        const auto detail = irrepresentability_detail(truth[k], opts.tol, opts.augment_diagonal);
        const SymmetricMatrix sigma = invert_pd(truth[k]);
        PopulationDiagnostics pd;
        pd.kappa_sigma = inf_operator_norm(sigma.dense());
        pd.kappa_gamma = detail.kappa_gamma;
        pd.alpha_irr = detail.alpha;
        pd.stats = graph_stats(truth[k], opts.tol);
        max_diag[k] = sigma.dense().diagonal().maxCoeff();
        if (!opts.sample_sizes.empty()) pd.delta = rate_delta(opts.sample_sizes[k], p, opts.gamma, opts.k1, max_diag[k]);
        rep.alpha_irr = k == 0 ? pd.alpha_irr : std::min(rep.alpha_irr, pd.alpha_irr);
        if (k > 0 && !(edge_set(truth[k], opts.tol) == base)) rep.shared_support = false;
        rep.populations.push_back(std::move(pd));
    }
    rep.irrepresentable = rep.alpha_irr > 0.0;
    const double alpha = rep.alpha_irr;

    if (opts.penalty) {
        if (rep.shared_support && alpha > 0.0) {
            rep.between_group =
                check_between_group(truth, *opts.penalty, opts.psi, alpha, opts.tol, opts.augment_diagonal);
            rep.between_group_holds = rep.between_group->holds;
        } else {
            rep.between_group_holds = false;
        }
    }

    if (opts.eigen_floor) {
        const double L = *opts.eigen_floor;
        if (!(L > 0.0 && L <= 1.0)) throw InvalidArgument("diagnose: eigenvalue floor L must lie in (0, 1]");
        bool ok = true;
        for (const auto& pd : rep.populations) {
            ok = ok && pd.stats.eigen_min >= L && pd.stats.eigen_max <= 1.0 / L;
        }
        rep.eigenvalues_bounded = ok;
    }

    if (!opts.sample_sizes.empty()) {
        const auto n_min = *std::min_element(opts.sample_sizes.begin(), opts.sample_sizes.end());
        for (auto nk : opts.sample_sizes) {
            rep.sample_size_ratios.push_back(static_cast<double>(n_min) / static_cast<double>(nk));
        }
        rep.sample_sizes_comparable = true;

        if (alpha > 0.0) {
            double worst_delta = 0.0;
            for (const auto& pd : rep.populations) worst_delta = std::max(worst_delta, *pd.delta);
            rep.theoretical_penalty_sum = 8.0 / alpha * worst_delta;

            // Advisory sample-size bound; nothing is enforced.
            const double c = 1.0 + 12.0 * opts.k1 * opts.k1;
            double inner = std::numeric_limits<double>::infinity();
            for (const auto& pd : rep.populations) {
                const double ks = pd.kappa_sigma;
                inner = std::min(inner, 1.0 / std::max(ks, ks * ks * ks * pd.kappa_gamma));
            }
            double tail_cap = std::numeric_limits<double>::infinity();
            for (std::size_t k = 0; k < K; ++k) tail_cap = std::min(tail_cap, 8.0 * c * max_diag[k]);
            const double log_term = std::log(4.0) + opts.gamma * std::log(static_cast<double>(p));
            for (std::size_t k = 0; k < K; ++k) {
                auto& pd = rep.populations[k];
                const auto d = static_cast<double>(pd.stats.max_degree);
                double delta_star = tail_cap;
                if (d > 0.0 && pd.kappa_gamma > 0.0) {
                    delta_star = std::min(delta_star, inner / (pd.kappa_gamma * 6.0 * (1.0 + 8.0 / alpha) * d));
                }
                pd.sample_size_advisory =
                    128.0 * c * c * max_diag[k] * max_diag[k] * log_term / (delta_star * delta_star);
            }
        }
    }
    return rep;
}

}  // namespace jggl
