// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the number of failures.

#include <chrono>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>

#include "jointggl/diagnostics.hpp"
#include "jointggl/experiments.hpp"
#include "jointggl/ggl_solver.hpp"
#include "jointggl/inference.hpp"
#include "oracles.hpp"

using namespace jggl;

namespace {

// Seed of every Monte Carlo criterion. The fixed penalty constants used for
// criteria 6 and 7 were chosen on other seeds (12345, 54321).
constexpr std::uint64_t kSeed = 20240101;

struct Outcome {
    bool pass = false;
    std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

CovarianceSet random_covs(Eigen::Index p, std::size_t K, Rng& r) {
    std::vector<SymmetricMatrix> s;
    std::vector<std::int64_t> sizes;
    for (std::size_t k = 0; k < K; ++k) {
        const Eigen::Index n = p + 5 + static_cast<Eigen::Index>(r.below(3 * static_cast<std::uint64_t>(p) + 20));
        s.push_back(SymmetricMatrix::symmetrize(oracle::random_sample_cov(oracle::random_spd(p, r), n, r)));
        sizes.push_back(n);
    }
    return CovarianceSet(std::move(s), std::move(sizes));
}

Outcome solver_oracle() {
    const auto t0 = std::chrono::steady_clock::now();
    Rng r(101);
    const double grid[] = {0.0, 0.05, 0.2};
    // Elementwise agreement needs the iterates well past the default stopping point.
    SolverOptions tight;
    tight.tol_abs = 1e-9;
    tight.tol_rel = 1e-8;
    tight.max_iter = 100000;
    double worst_entry = 0.0, worst_obj = 0.0, worst_default = 0.0;
    int nonconverged = 0;
    for (int t = 0; t < 50; ++t) {
        const Eigen::Index p = 2 + static_cast<Eigen::Index>(r.below(3));
        const std::size_t K = 1 + static_cast<std::size_t>(r.below(2));
        const PenaltyPair pen{grid[r.below(3)], grid[r.below(3)]};
        const auto covs = random_covs(p, K, r);
        const auto rep = solve_ggl(covs, pen, tight);
        const auto loose = solve_ggl(covs, pen);
        nonconverged += rep.converged && loose.converged ? 0 : 1;
        std::vector<Matrix> s;
        for (const auto& m : covs.matrices()) s.push_back(m.dense());
        const auto ref = oracle::proximal_gradient(s, pen.lambda, pen.rho);
        for (std::size_t k = 0; k < K; ++k) {
            worst_entry = std::max(worst_entry, (rep.estimate[k].dense() - ref.omega[k]).cwiseAbs().maxCoeff());
            worst_default = std::max(worst_default, (loose.estimate[k].dense() - ref.omega[k]).cwiseAbs().maxCoeff());
        }
        worst_obj = std::max(worst_obj, std::abs(ggl_objective(rep.estimate, covs, pen) - ref.objective));
        worst_obj = std::max(worst_obj, std::abs(ggl_objective(loose.estimate, covs, pen) - ref.objective));
    }
    const double secs = seconds_since(t0);
    return {worst_entry <= 1e-4 && worst_obj <= 1e-8 && nonconverged == 0 && secs < 60.0,
            fmt("tol_abs=1e-9: max entry gap %.3g (<=1e-4); default tolerances: max entry gap %.3g; "
                "max objective gap %.3g (<=1e-8), nonconverged %d, %.1fs (<60s)",
                worst_entry, worst_default, worst_obj, nonconverged, secs)};
}

Outcome kkt_certificate() {
    const auto t0 = std::chrono::steady_clock::now();
    Rng r(202);
    const SolverOptions opts;
    double worst = 0.0;
    int nonconverged = 0;
    for (int t = 0; t < 100; ++t) {
        const Eigen::Index p = 2 + static_cast<Eigen::Index>(r.below(49));
        const std::size_t K = 1 + static_cast<std::size_t>(r.below(3));
        const auto covs = random_covs(p, K, r);
        const PenaltyPair pen{0.3 * r.uniform(), 0.3 * r.uniform()};
        const auto rep = solve_ggl(covs, pen, opts);
        nonconverged += rep.converged ? 0 : 1;
        worst = std::max(worst, kkt_residual(rep.estimate, covs, pen));
    }
    const double secs = seconds_since(t0);
    return {worst <= 10 * opts.tol_abs && nonconverged == 0 && secs < 120.0,
            fmt("max kkt residual %.3g (<=%.0e), nonconverged %d, %.1fs (<120s)", worst, 10 * opts.tol_abs,
                nonconverged, secs)};
}

Outcome prox_correctness() {
    Rng r(303);
    double worst = 0.0;
    for (int t = 0; t < 1000; ++t) {
        const Eigen::Index K = 1 + static_cast<Eigen::Index>(r.below(3));
        Vector v(K);
        for (Eigen::Index k = 0; k < K; ++k) v(k) = 2.0 * r.normal();
        const double lam = r.uniform(), rho = r.uniform();
        const Vector x = prox_penalty(v, lam, rho);
        const Vector g = v - x;
        const double nx = x.norm();
        double gap = 0.0;
        if (nx == 0.0) {
            gap = std::max(0.0, (g.array().abs() - lam).max(0.0).matrix().norm() - rho);
        } else {
            for (Eigen::Index k = 0; k < K; ++k) {
                const double m = rho * x(k) / nx;
                gap = std::max(gap, x(k) != 0.0 ? std::abs(g(k) - lam * std::copysign(1.0, x(k)) - m)
                                                : std::max(0.0, std::abs(g(k) - m) - lam));
            }
        }
        worst = std::max(worst, gap);
    }
    Vector v(2);
    v << 1.0, -0.5;
    const Vector x = prox_penalty(v, 0.2, 0.3);
    const Vector ref = oracle::prox_grid_search(v, 0.2, 0.3);
    const double d_target = std::max(std::abs(x(0) - 0.51911), std::abs(x(1) + 0.19466));
    const double d_grid = (x - ref).cwiseAbs().maxCoeff();
    return {worst <= 1e-8 && d_target <= 1e-4 && d_grid <= 1e-4,
            fmt("max inclusion gap %.3g (<=1e-8), prox(1,-0.5) = (%.6f, %.6f), |vs target| %.2g, |vs grid| %.2g "
                "(<=1e-4)",
                worst, x(0), x(1), d_target, d_grid)};
}

Outcome debias_fixed_point() {
    Rng r(404);
    double worst = 0.0;
    for (int t = 0; t < 20; ++t) {
        const Eigen::Index p = 2 + static_cast<Eigen::Index>(r.below(49));
        const SymmetricMatrix omega(oracle::random_spd(p, r));
        const CovarianceSet covs({invert_pd(omega)}, {100});
        worst = std::max(worst, (debias(PrecisionSet({omega}), covs)[0].dense() - omega.dense()).cwiseAbs().maxCoeff());
    }
    return {worst <= 1e-10, fmt("max |debias(W, W^-1) - W| %.3g (<=1e-10)", worst)};
}

ExperimentConfig chain_config(Eigen::Index p, std::vector<std::int64_t> n, int B) {
    ExperimentConfig c;
    c.dims = {p};
    c.sample_sizes = std::move(n);
    c.replications = B;
    c.base_seed = kSeed;
    return c;
}

Outcome coverage_reproduction() {
    auto run = [](Eigen::Index p, int B, double tol) {
        const auto t0 = std::chrono::steady_clock::now();
        const auto res = run_coverage(chain_config(p, {600}, B));
        const double secs = seconds_since(t0);
        const auto& cell = res.coverage.front();   // S, k = 1
        const bool ok = std::abs(cell.coverage - 0.9539) <= tol && std::abs(cell.length / 0.1423 - 1.0) <= 0.2;
        return std::make_tuple(ok, cell, secs);
    };
    const auto [full_ok, full, full_s] = run(50, 100, 0.04);
    const auto [red_ok, red, red_s] = run(25, 50, 0.06);
    return {full_ok && full_s < 1200 && red_ok && red_s < 240,
            fmt("p=50 B=100: coverage %.4f (0.9539+-0.04), length %.4f (0.1423+-20%%), c=(%.2g,%.2g), %.1fs (<1200s); "
                "p=25 B=50: coverage %.4f (+-0.06), length %.4f, %.1fs (<240s)",
                full.coverage, full.length, full.penalty.c1, full.penalty.c2, full_s, red.coverage, red.length,
                red_s)};
}

Outcome sign_consistency() {
    auto cfg = chain_config(50, {200, 600, 700}, 50);
    cfg.penalty_rule = PenaltyRule::fixed;
    cfg.fixed_c1 = 1.0;
    cfg.fixed_c2 = 3.6;
    const auto res = run_sign_consistency(cfg);
    const double f200 = res.consistency[0].fraction, f600 = res.consistency[1].fraction,
                 f700 = res.consistency[2].fraction;
    return {f600 - f200 >= 0.5 && f700 >= 0.9,
            fmt("fixed c=(1,3.6): success n=200 %.2f, n=600 %.2f, n=700 %.2f; gain %.2f (>=0.5), n=700 (>=0.9)", f200,
                f600, f700, f600 - f200)};
}

Outcome normality_calibration() {
    auto cfg = chain_config(50, {600}, 200);
    cfg.penalty_rule = PenaltyRule::fixed;
    cfg.fixed_c1 = 0.3;
    cfg.fixed_c2 = 0.3;
    cfg.edges_of_interest = {make_edge(1, 2)};
    const auto res = run_normality(cfg);
    bool ok = res.normality.size() == 3;
    std::ostringstream os;
    os << "fixed c=(0.3,0.3)";
    for (const auto& s : res.normality) {
        const auto& m = *s.summary;
        if (s.population) {
            ok = ok && std::abs(m.mean) <= 0.15 && m.variance >= 0.7 && m.variance <= 1.3;
            os << fmt("; k%zu mean %.3f var %.3f", *s.population + 1, m.mean, m.variance);
        } else {
            ok = ok && m.ks_pvalue >= 0.01;
            os << fmt("; pooled KS p %.3g (>=0.01)", m.ks_pvalue);
        }
        ok = ok && s.values.size() == 200;
    }
    os << " (|mean|<=0.15, var in [0.7,1.3])";
    return {ok, os.str()};
}

Outcome null_uniformity() {
    auto cfg = chain_config(50, {600}, 500);
    cfg.graph.chain_rho = {0.2, 0.2};
    cfg.edges_of_interest = {make_edge(1, 2)};
    const auto res = run_normality(cfg);
    const auto& pooled = res.normality.back();
    const double rate = pooled.summary->reject_rate;
    return {!pooled.population && rate >= 0.02 && rate <= 0.09 && pooled.values.size() == 500,
            fmt("rejection rate at 0.05: %.3f over %zu replications (in [0.02,0.09]), KS p %.3g", rate,
                pooled.values.size(), pooled.summary->ks_pvalue)};
}

Outcome diagnostics_oracle() {
    Rng r(909);
    bool exact = true;
    for (int t = 0; t < 20; ++t) {
        const Eigen::Index p = 1 + static_cast<Eigen::Index>(t % 6);
        const auto sigma = SymmetricMatrix::symmetrize(oracle::random_spd(p, r));
        const Matrix full = oracle::kron(sigma.dense(), sigma.dense());
        std::vector<IndexPair> all;
        for (Eigen::Index a = 0; a < p; ++a)
            for (Eigen::Index b = 0; b < p; ++b) all.push_back({a, b});
        const Matrix h = restricted_hessian(sigma, all);
        exact = exact && h == full;
    }
    const auto omega = chain_precision(5, 0.2);
    const double alpha = check_irrepresentability(omega);
    const double dense = oracle::dense_alpha(omega.dense());
    return {exact && std::abs(alpha - dense) <= 1e-10 && alpha > 0.0,
            fmt("hessian exact on 20 matrices: %s; alpha %.16g vs dense %.16g (|diff| %.2g)", exact ? "yes" : "no",
                alpha, dense, std::abs(alpha - dense))};
}

Outcome supnorm_rate() {
    const auto res = run_supnorm(chain_config(50, {200, 400, 600}, 50));
    bool ok = true;
    std::ostringstream os;
    for (std::size_t k = 0; k < 2; ++k) {
        double lo = INFINITY, hi = 0.0;
        os << (k ? "; " : "") << "k" << k + 1 << " scaled";
        for (const auto& c : res.supnorm) {
            if (c.k != k) continue;
            const double scaled = c.mean_supnorm * std::sqrt(static_cast<double>(c.n) / std::log(50.0));
            lo = std::min(lo, scaled);
            hi = std::max(hi, scaled);
            os << fmt(" %.3f", scaled);
        }
        ok = ok && hi / lo <= 3.0;
        os << fmt(" (ratio %.2f <= 3)", hi / lo);
    }
    return {ok, os.str()};
}

Outcome determinism() {
    bool same = true;
    std::size_t bytes = 0;
    for (auto kind : {ExperimentKind::consistency, ExperimentKind::tpfp, ExperimentKind::supnorm,
                      ExperimentKind::normality, ExperimentKind::coverage}) {
        auto cfg = chain_config(20, {200, 400}, 8);
        auto csv = [&] {
            std::ostringstream os;
            const auto r = run_experiment(kind, cfg);
            write_result_csv(os, r);
            if (kind == ExperimentKind::normality) write_normality_summary_csv(os, r);
            return os.str();
        };
        const std::string a = csv(), b = csv();
        cfg.threads = 2;
        const std::string c = csv();
        same = same && a == b && a == c;
        bytes += a.size();
    }
    return {same, fmt("five experiment kinds rerun (1 and 2 threads): %s, %zu bytes compared",
                      same ? "byte-identical" : "DIFFERENT", bytes)};
}

}  // namespace

int main() {
    const std::pair<const char*, std::function<Outcome()>> criteria[] = {
        {"solver matches proximal-gradient oracle", solver_oracle},
        {"KKT certificate", kkt_certificate},
        {"prox correctness", prox_correctness},
        {"debias fixed point", debias_fixed_point},
        {"coverage reproduction", coverage_reproduction},
        {"sign-consistency trend", sign_consistency},
        {"normality calibration", normality_calibration},
        {"null rejection rate", null_uniformity},
        {"diagnostics oracle", diagnostics_oracle},
        {"sup-norm rate", supnorm_rate},
        {"determinism", determinism},
    };
    int failures = 0, id = 0;
    for (const auto& [name, fn] : criteria) {
        ++id;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failures += o.pass ? 0 : 1;
        std::printf("%s criterion %2d  %s: %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str(),
                    seconds_since(t0));
        std::fflush(stdout);
    }
    return failures;
}
