#include "jointggl/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <numbers>
#include <ostream>
#include <sstream>
#include <thread>

#include "jointggl/diagnostics.hpp"
#include "jointggl/rng.hpp"

namespace jggl {

SymmetricMatrix chain_precision(Eigen::Index p, double rho) {
    if (p < 1) throw InvalidArgument("chain_precision: p must be positive");
    if (!std::isfinite(rho)) throw InvalidArgument("chain_precision: rho must be finite");
    Matrix m = Matrix::Identity(p, p);
    for (Eigen::Index i = 0; i + 1 < p; ++i) {
        m(i, i + 1) = rho;
        m(i + 1, i) = rho;
    }
    SymmetricMatrix out(std::move(m));
    if (!is_positive_definite(out)) {
        std::ostringstream msg;
        msg << "chain_precision: tridiag(" << rho << ", 1, " << rho << ") with p=" << p
            << " is not positive definite (|2 rho cos(pi/(p+1))| = "
            << std::abs(2.0 * rho * std::cos(std::numbers::pi / static_cast<double>(p + 1))) << ")";
        throw NotPositiveDefinite(msg.str());
    }
    return out;
}

StarGraph star_precision(Eigen::Index p, Eigen::Index d, double diag, double offdiag, std::uint64_t hub_seed) {
    if (p < 1) throw InvalidArgument("star_precision: p must be positive");
    if (d < 0 || d >= p) throw InvalidArgument("star_precision: degree must satisfy 0 <= d < p");
    if (!std::isfinite(diag) || !std::isfinite(offdiag)) throw InvalidArgument("star_precision: entries must be finite");

    Rng rng(hub_seed);
    StarGraph g;
    g.hub = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(p)));
    std::vector<Eigen::Index> pool;
    pool.reserve(static_cast<std::size_t>(p - 1));
    for (Eigen::Index i = 0; i < p; ++i) {
        if (i != g.hub) pool.push_back(i);
    }
    // Partial Fisher-Yates: the first d slots become the spokes.
    for (Eigen::Index t = 0; t < d; ++t) {
        const auto remaining = static_cast<std::uint64_t>(pool.size()) - static_cast<std::uint64_t>(t);
        const auto pick = static_cast<std::size_t>(t) + static_cast<std::size_t>(rng.below(remaining));
        std::swap(pool[static_cast<std::size_t>(t)], pool[pick]);
    }
    g.spokes.assign(pool.begin(), pool.begin() + d);
    std::sort(g.spokes.begin(), g.spokes.end());

    Matrix m = diag * Matrix::Identity(p, p);
    for (auto b : g.spokes) {
        m(g.hub, b) = offdiag;
        m(b, g.hub) = offdiag;
    }
    g.precision = SymmetricMatrix(std::move(m));
    if (!is_positive_definite(g.precision)) {
        std::ostringstream msg;
        msg << "star_precision: not positive definite; sqrt(d)*|offdiag|/diag = "
            << std::sqrt(static_cast<double>(d)) * std::abs(offdiag) / diag << " (must stay below 1)";
        throw NotPositiveDefinite(msg.str());
    }
    return g;
}

std::size_t GraphSpec::populations() const {
    return kind == GraphKind::chain ? chain_rho.size() : star_diag.size();
}

void GraphSpec::validate() const {
    if (kind == GraphKind::chain) {
        if (chain_rho.empty()) throw ConfigError("chain graph needs at least one rho");
    } else {
        if (star_diag.empty()) throw ConfigError("star graph needs at least one diagonal value");
        if (star_diag.size() != star_offdiag.size()) {
            throw ConfigError("star graph: diag and offdiag need one value per population");
        }
        if (star_degree < 0) throw ConfigError("star graph: degree must be nonnegative");
    }
}

PrecisionSet make_truth(const GraphSpec& spec, Eigen::Index p) {
    spec.validate();
    std::vector<SymmetricMatrix> mats;
    if (spec.kind == GraphKind::chain) {
        for (double rho : spec.chain_rho) mats.push_back(chain_precision(p, rho));
    } else {
        for (std::size_t k = 0; k < spec.star_diag.size(); ++k) {
            mats.push_back(
                star_precision(p, spec.star_degree, spec.star_diag[k], spec.star_offdiag[k], spec.hub_seed).precision);
        }
    }
    return PrecisionSet(std::move(mats));
}

std::vector<Edge> default_normality_edges(GraphKind kind, Eigen::Index p) {
    auto one_based = [](std::initializer_list<std::pair<int, int>> list) {
        std::vector<Edge> out;
        for (auto [a, b] : list) out.push_back(make_edge(a - 1, b - 1));
        return out;
    };
    std::vector<Edge> out;
    if (kind == GraphKind::chain) {
        out = one_based({{1, 1}, {1, 2}, {2, 3}, {3, 4}});
    } else if (p == 50) {
        out = one_based({{1, 1}, {1, 2}, {31, 15}, {8, 31}});
    } else if (p == 75) {
        out = one_based({{1, 1}, {1, 2}, {31, 52}, {72, 31}});
    } else if (p == 100) {
        out = one_based({{1, 1}, {1, 2}, {7, 31}, {31, 80}});
    } else if (p == 150) {
        out = one_based({{1, 1}, {1, 2}, {14, 51}, {82, 14}});
    } else {
        out = one_based({{1, 1}, {1, 2}});
    }
    out.erase(std::remove_if(out.begin(), out.end(), [p](const Edge& e) { return e.j >= p; }), out.end());
    return out;
}

void ExperimentConfig::validate() const {
    graph.validate();
    if (replications < 1) throw ConfigError("replications must be at least 1");
    if (sample_sizes.empty()) throw ConfigError("at least one sample size is required");
    if (dims.empty()) throw ConfigError("at least one dimension is required");
    for (auto n : sample_sizes) {
        if (n < 2) throw ConfigError("sample sizes must be at least 2");
    }
    for (auto p : dims) {
        if (p < 2) throw ConfigError("dimensions must be at least 2");
    }
    if (!(alpha_level > 0.0 && alpha_level < 1.0)) throw ConfigError("alpha level must lie in (0, 1)");
    if (threads < 1) throw ConfigError("threads must be at least 1");
    if (penalty_rule == PenaltyRule::fixed) {
        if (!(fixed_c1 >= 0.0) || !(fixed_c2 >= 0.0)) throw ConfigError("fixed penalty constants must be nonnegative");
    } else {
        try {
            grid.validate();
        } catch (const InvalidArgument& e) {
            throw ConfigError(e.what());
        }
    }
    try {
        solver.validate();
    } catch (const InvalidArgument& e) {
        throw ConfigError(e.what());
    }
}

const char* to_string(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::consistency: return "consistency";
        case ExperimentKind::tpfp: return "tpfp";
        case ExperimentKind::supnorm: return "supnorm";
        case ExperimentKind::normality: return "normality";
        case ExperimentKind::coverage: return "coverage";
    }
    return "unknown";
}

std::string NormalitySeries::label() const {
    std::ostringstream os;
    os << "p" << p << "/n" << n << '/';
    if (population) {
        os << 'k' << *population + 1;
    } else {
        os << "pooled";
    }
    os << '/' << edge.i + 1 << '-' << edge.j + 1;
    return os.str();
}

bool signs_match(const SymmetricMatrix& estimate, const SymmetricMatrix& truth, double edge_tol) {
    if (estimate.dim() != truth.dim()) throw DimensionError("signs_match: dimension mismatch");
    auto sgn = [edge_tol](double x) { return std::abs(x) <= edge_tol ? 0 : (x > 0.0 ? 1 : -1); };
    for (Eigen::Index i = 0; i < truth.dim(); ++i) {
        for (Eigen::Index j = i + 1; j < truth.dim(); ++j) {
            if (sgn(estimate(i, j)) != sgn(truth(i, j))) return false;
        }
    }
    return true;
}

std::pair<double, double> ks_test_normal(std::vector<double> values) {
    if (values.empty()) throw InvalidArgument("ks_test_normal: no samples");
    std::sort(values.begin(), values.end());
    const double n = static_cast<double>(values.size());
    double d = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double f = normal_cdf(values[i]);
        d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
    }
    // Kolmogorov limit law with the usual small-sample adjustment.
    const double sn = std::sqrt(n);
    const double lam = (sn + 0.12 + 0.11 / sn) * d;
    double q = 0.0;
    if (lam < 1e-3) {
        q = 1.0;
    } else {
        double sign = 1.0;
        for (int j = 1; j <= 200; ++j) {
            const double term = sign * std::exp(-2.0 * j * j * lam * lam);
            q += term;
            if (std::abs(term) < 1e-16) break;
            sign = -sign;
        }
        q = std::clamp(2.0 * q, 0.0, 1.0);
    }
    return {d, q};
}

SampleSummary summarize(const std::vector<double>& values, double alpha_level) {
    SampleSummary s;
    s.count = values.size();
    if (values.empty()) return s;
    double sum = 0.0;
    for (double v : values) sum += v;
    s.mean = sum / static_cast<double>(s.count);
    if (s.count > 1) {
        double sq = 0.0;
        for (double v : values) sq += (v - s.mean) * (v - s.mean);
        s.variance = sq / static_cast<double>(s.count - 1);
    }
    std::tie(s.ks_statistic, s.ks_pvalue) = ks_test_normal(values);
    const double crit = normal_quantile(1.0 - alpha_level / 2.0);
    std::size_t rejects = 0;
    for (double v : values) rejects += std::abs(v) > crit ? 1 : 0;
    s.reject_rate = static_cast<double>(rejects) / static_cast<double>(s.count);
    return s;
}

namespace {

struct CellContext {
    const ExperimentConfig* config = nullptr;
    PrecisionSet truth;
    EdgeSet support;   // unordered off-diagonal support shared by the populations
    Eigen::Index p = 0;
    std::int64_t n = 0;
    std::vector<Edge> edges;   // normality edges
};

// Per-replication outcome; only the fields needed by the experiment kind are filled.
struct Outcome {
    bool converged = false;
    bool sign_ok = false;
    double tp = 0.0;   // summed over populations
    double fp = 0.0;
    std::vector<double> supnorm;
    std::vector<double> stats;   // edge-major: K standardized values, then the pooled T
    std::vector<double> hits;    // per (set, k): covered count
    std::vector<double> lengths; // per (set, k): summed CI length
};

CovarianceSet draw_covariances(const CellContext& ctx, std::uint64_t seed) {
    const std::vector<std::int64_t> sizes(ctx.truth.size(), ctx.n);
    return sample_covariance(draw_populations(ctx.truth, sizes, seed), false);
}

CellPenalty select_penalty(const CellContext& ctx, const CovarianceSet& covs) {
    const auto& cfg = *ctx.config;
    if (cfg.penalty_rule == PenaltyRule::fixed) return {cfg.fixed_c1, cfg.fixed_c2, false};
    const TuningResult tuned = tune_penalties(covs, cfg.grid, cfg.solver);
    return {tuned.best_c1, tuned.best_c2, true};
}

Outcome run_replication(const CellContext& ctx, ExperimentKind kind, std::uint64_t seed,
                        const std::optional<CellPenalty>& cell_penalty) {
    const auto& cfg = *ctx.config;
    const CovarianceSet covs = draw_covariances(ctx, seed);
    const CellPenalty pen = cell_penalty ? *cell_penalty : select_penalty(ctx, covs);
    const SolveReport fit = solve_ggl(covs, penalties_from_constants(pen.c1, pen.c2, ctx.p, ctx.n), cfg.solver);

    Outcome out;
    out.converged = fit.converged;
    if (!fit.converged) return out;
    const auto K = ctx.truth.size();
    const double tol = cfg.grid.edge_tol;

    switch (kind) {
        case ExperimentKind::consistency: {
            out.sign_ok = true;
            for (std::size_t k = 0; k < K && out.sign_ok; ++k) {
                out.sign_ok = signs_match(fit.estimate[k], ctx.truth[k], tol);
            }
            break;
        }
        case ExperimentKind::tpfp: {
            for (std::size_t k = 0; k < K; ++k) {
                for (Eigen::Index i = 0; i < ctx.p; ++i) {
                    for (Eigen::Index j = i + 1; j < ctx.p; ++j) {
                        if (std::abs(fit.estimate[k](i, j)) <= tol) continue;
                        if (std::abs(ctx.truth[k](i, j)) > kTruthTolerance) {
                            out.tp += 1.0;
                        } else {
                            out.fp += 1.0;
                        }
                    }
                }
            }
            break;
        }
        case ExperimentKind::supnorm: {
            for (std::size_t k = 0; k < K; ++k) {
                out.supnorm.push_back((fit.estimate[k].dense() - ctx.truth[k].dense()).cwiseAbs().maxCoeff());
            }
            break;
        }
        case ExperimentKind::normality: {
            const DebiasedSet deb = debias(fit.estimate, covs);
            const double sn = std::sqrt(static_cast<double>(ctx.n));
            for (const auto& e : ctx.edges) {
                for (std::size_t k = 0; k < K; ++k) {
                    const double sigma = std::sqrt(variance_estimate(fit.estimate[k], e.i, e.j));
                    out.stats.push_back(sn * (deb[k](e.i, e.j) - ctx.truth[k](e.i, e.j)) / sigma);
                }
                if (K >= 2) {
                    LinearCombo combo;
                    combo.coefficients.assign(K, 0.0);
                    combo.coefficients[0] = 1.0;
                    combo.coefficients[1] = -1.0;
                    combo.edge = e;
                    const double truth_diff = ctx.truth[0](e.i, e.j) - ctx.truth[1](e.i, e.j);
                    out.stats.push_back(
                        test_linear_combo(deb, fit.estimate, covs, combo, cfg.alpha_level, truth_diff).z_stat);
                }
            }
            break;
        }
        case ExperimentKind::coverage: {
            const DebiasedSet deb = debias(fit.estimate, covs);
            const double level = 1.0 - cfg.alpha_level;
            out.hits.assign(2 * K, 0.0);
            out.lengths.assign(2 * K, 0.0);
            for (std::size_t k = 0; k < K; ++k) {
                for (Eigen::Index i = 0; i < ctx.p; ++i) {
                    for (Eigen::Index j = i; j < ctx.p; ++j) {
                        const bool in_s = i != j && ctx.support.contains({i, j});
                        const std::size_t slot = (in_s ? 0 : K) + k;
                        const auto ci = confidence_interval(deb, fit.estimate, covs, k, i, j, level);
                        out.hits[slot] += ci.contains(ctx.truth[k](i, j)) ? 1.0 : 0.0;
                        out.lengths[slot] += ci.width();
                    }
                }
            }
            break;
        }
    }
    return out;
}

std::vector<Outcome> run_replications(const CellContext& ctx, ExperimentKind kind,
                                      const std::vector<std::uint64_t>& seeds,
                                      const std::optional<CellPenalty>& cell_penalty) {
    const auto B = seeds.size();
    std::vector<Outcome> outcomes(B);
    const auto workers = std::min<std::size_t>(static_cast<std::size_t>(ctx.config->threads), B);
    if (workers <= 1) {
        for (std::size_t b = 0; b < B; ++b) outcomes[b] = run_replication(ctx, kind, seeds[b], cell_penalty);
        return outcomes;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t b = next++; b < B; b = next++) {
                try {
                    outcomes[b] = run_replication(ctx, kind, seeds[b], cell_penalty);
                } catch (...) {
                    const std::lock_guard<std::mutex> lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
    return outcomes;
}

ExperimentResult run_kind(ExperimentKind kind, const ExperimentConfig& config) {
    config.validate();
    ExperimentResult result;
    result.kind = kind;
    result.config = config;
    const auto B = static_cast<std::size_t>(config.replications);
    for (std::size_t b = 0; b < B; ++b) result.replication_seeds.push_back(replication_seed(config.base_seed, b));

    for (const auto p : config.dims) {
        CellContext ctx;
        ctx.config = &config;
        ctx.truth = make_truth(config.graph, p);
        ctx.support = edge_set(ctx.truth[0], kTruthTolerance);
        ctx.p = p;
        ctx.edges = config.edges_of_interest.empty() ? default_normality_edges(config.graph.kind, p)
                                                     : config.edges_of_interest;
        for (const auto& e : ctx.edges) {
            if (e.i < 0 || e.j >= p || e.i > e.j) throw ConfigError("edge of interest out of range");
        }
        const auto K = ctx.truth.size();

        for (const auto n : config.sample_sizes) {
            ctx.n = n;
            std::optional<CellPenalty> cell_penalty;
            if (config.penalty_rule == PenaltyRule::fixed || !config.retune_each_replication) {
                cell_penalty = select_penalty(ctx, draw_covariances(ctx, result.replication_seeds.front()));
            }
            const CellPenalty reported = cell_penalty ? *cell_penalty : CellPenalty{0.0, 0.0, true};
            const auto outcomes = run_replications(ctx, kind, result.replication_seeds, cell_penalty);
            int converged = 0;
            for (const auto& o : outcomes) converged += o.converged ? 1 : 0;
            const int nonconverged = static_cast<int>(B) - converged;

            switch (kind) {
                case ExperimentKind::consistency: {
                    ConsistencyCell c{p, n, static_cast<int>(B), 0, nonconverged, 0.0, reported};
                    for (const auto& o : outcomes) c.successes += o.sign_ok ? 1 : 0;
                    c.fraction = static_cast<double>(c.successes) / static_cast<double>(B);
                    result.consistency.push_back(c);
                    break;
                }
                case ExperimentKind::tpfp: {
                    TpFpCell c;
                    c.p = p;
                    c.n = n;
                    c.replications = static_cast<int>(B);
                    c.nonconverged = nonconverged;
                    c.true_edges = static_cast<std::int64_t>(ctx.support.size());
                    c.penalty = reported;
                    double tp = 0.0, fp = 0.0;
                    for (const auto& o : outcomes) {
                        tp += o.tp;
                        fp += o.fp;
                    }
                    if (converged > 0) {
                        const double denom = static_cast<double>(converged) * static_cast<double>(K);
                        c.mean_tp = tp / denom;
                        c.mean_fp = fp / denom;
                    }
                    result.tpfp.push_back(c);
                    break;
                }
                case ExperimentKind::supnorm: {
                    for (std::size_t k = 0; k < K; ++k) {
                        SupNormCell c;
                        c.p = p;
                        c.n = n;
                        c.k = k;
                        c.used = converged;
                        c.excluded = nonconverged;
                        c.penalty = reported;
                        double sum = 0.0;
                        for (const auto& o : outcomes) {
                            if (o.converged) sum += o.supnorm[k];
                        }
                        if (converged > 0) c.mean_supnorm = sum / converged;
                        result.supnorm.push_back(c);
                    }
                    break;
                }
                case ExperimentKind::normality: {
                    const std::size_t per_edge = K + (K >= 2 ? 1 : 0);
                    for (std::size_t e = 0; e < ctx.edges.size(); ++e) {
                        for (std::size_t slot = 0; slot < per_edge; ++slot) {
                            NormalitySeries s;
                            s.p = p;
                            s.n = n;
                            s.edge = ctx.edges[e];
                            if (slot < K) s.population = slot;
                            for (const auto& o : outcomes) {
                                if (o.converged) s.values.push_back(o.stats[e * per_edge + slot]);
                            }
                            if (s.values.size() >= 2) s.summary = summarize(s.values, config.alpha_level);
                            result.normality.push_back(std::move(s));
                        }
                    }
                    break;
                }
                case ExperimentKind::coverage: {
                    const std::size_t s_entries = ctx.support.size();
                    const std::size_t all_entries = static_cast<std::size_t>(p * (p + 1) / 2);
                    for (int set = 0; set < 2; ++set) {
                        for (std::size_t k = 0; k < K; ++k) {
                            CoverageCell c;
                            c.p = p;
                            c.n = n;
                            c.on_support = set == 0;
                            c.k = k;
                            c.entries = set == 0 ? s_entries : all_entries - s_entries;
                            c.used = converged;
                            c.excluded = nonconverged;
                            c.penalty = reported;
                            const std::size_t slot = static_cast<std::size_t>(set) * K + k;
                            double hits = 0.0, len = 0.0;
                            for (const auto& o : outcomes) {
                                if (!o.converged) continue;
                                hits += o.hits[slot];
                                len += o.lengths[slot];
                            }
                            if (converged > 0 && c.entries > 0) {
                                const double denom = static_cast<double>(converged) * static_cast<double>(c.entries);
                                c.coverage = hits / denom;
                                c.length = len / denom;
                            }
                            result.coverage.push_back(c);
                        }
                    }
                    break;
                }
            }
        }
    }
    return result;
}

}  // namespace

ExperimentResult run_sign_consistency(const ExperimentConfig& config) {
    return run_kind(ExperimentKind::consistency, config);
}
ExperimentResult run_tpfp(const ExperimentConfig& config) { return run_kind(ExperimentKind::tpfp, config); }
ExperimentResult run_supnorm(const ExperimentConfig& config) { return run_kind(ExperimentKind::supnorm, config); }
ExperimentResult run_normality(const ExperimentConfig& config) { return run_kind(ExperimentKind::normality, config); }
ExperimentResult run_coverage(const ExperimentConfig& config) { return run_kind(ExperimentKind::coverage, config); }

ExperimentResult run_experiment(ExperimentKind kind, const ExperimentConfig& config) { return run_kind(kind, config); }

std::string format_number(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void write_result_csv(std::ostream& os, const ExperimentResult& r) {
    const auto num = format_number;
    switch (r.kind) {
        case ExperimentKind::consistency:
            os << "p,n,replications,successes,nonconverged,fraction,c1,c2\n";
            for (const auto& c : r.consistency) {
                os << c.p << ',' << c.n << ',' << c.replications << ',' << c.successes << ',' << c.nonconverged << ','
                   << num(c.fraction) << ',' << num(c.penalty.c1) << ',' << num(c.penalty.c2) << '\n';
            }
            break;
        case ExperimentKind::tpfp:
            os << "p,n,replications,nonconverged,true_edges,mean_tp,mean_fp,c1,c2\n";
            for (const auto& c : r.tpfp) {
                os << c.p << ',' << c.n << ',' << c.replications << ',' << c.nonconverged << ',' << c.true_edges << ','
                   << num(c.mean_tp) << ',' << num(c.mean_fp) << ',' << num(c.penalty.c1) << ','
                   << num(c.penalty.c2) << '\n';
            }
            break;
        case ExperimentKind::supnorm:
            os << "p,n,k,used,excluded,mean_supnorm,c1,c2\n";
            for (const auto& c : r.supnorm) {
                os << c.p << ',' << c.n << ',' << c.k + 1 << ',' << c.used << ',' << c.excluded << ','
                   << num(c.mean_supnorm) << ',' << num(c.penalty.c1) << ',' << num(c.penalty.c2) << '\n';
            }
            break;
        case ExperimentKind::normality:
            os << "label,value\n";
            for (const auto& s : r.normality) {
                const std::string label = s.label();
                for (double v : s.values) os << label << ',' << num(v) << '\n';
            }
            break;
        case ExperimentKind::coverage:
            os << "p,n,set,k,entries,used,excluded,coverage,length,c1,c2\n";
            for (const auto& c : r.coverage) {
                os << c.p << ',' << c.n << ',' << (c.on_support ? "S" : "Sc") << ',' << c.k + 1 << ',' << c.entries
                   << ',' << c.used << ',' << c.excluded << ',' << num(c.coverage) << ',' << num(c.length) << ','
                   << num(c.penalty.c1) << ',' << num(c.penalty.c2) << '\n';
            }
            break;
    }
}

void write_normality_summary_csv(std::ostream& os, const ExperimentResult& r) {
    os << "label,count,mean,variance,ks_statistic,ks_pvalue,reject_rate\n";
    for (const auto& s : r.normality) {
        os << s.label() << ',' << s.values.size();
        if (s.summary) {
            const auto& m = *s.summary;
            os << ',' << format_number(m.mean) << ',' << format_number(m.variance) << ','
               << format_number(m.ks_statistic) << ',' << format_number(m.ks_pvalue) << ','
               << format_number(m.reject_rate);
        } else {
            os << ",,,,,";
        }
        os << '\n';
    }
}

}  // namespace jggl
