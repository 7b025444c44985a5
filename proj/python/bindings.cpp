#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "jointggl/cli_io.hpp"
#include "jointggl/diagnostics.hpp"
#include "jointggl/experiments.hpp"
#include "jointggl/ggl_solver.hpp"
#include "jointggl/inference.hpp"
#include "jointggl/selection.hpp"

namespace py = pybind11;
using namespace jggl;

namespace {

std::vector<SymmetricMatrix> to_symmetric(const std::vector<Matrix>& mats) {
    std::vector<SymmetricMatrix> out;
    out.reserve(mats.size());
    for (const auto& m : mats) out.emplace_back(m);
    return out;
}

std::vector<Matrix> to_dense(const std::vector<SymmetricMatrix>& mats) {
    std::vector<Matrix> out;
    out.reserve(mats.size());
    for (const auto& m : mats) out.push_back(m.dense());
    return out;
}

CovarianceSet make_covs(const std::vector<Matrix>& covs, const std::vector<std::int64_t>& sizes) {
    return CovarianceSet(to_symmetric(covs), sizes);
}

Edge zero_based(std::pair<Eigen::Index, Eigen::Index> e) { return make_edge(e.first - 1, e.second - 1); }

py::object json_to_py(const nlohmann::json& j) {
    return py::module_::import("json").attr("loads")(j.dump());
}

ExperimentKind kind_from(const std::string& s) {
    for (auto k : {ExperimentKind::consistency, ExperimentKind::tpfp, ExperimentKind::supnorm,
                   ExperimentKind::normality, ExperimentKind::coverage}) {
        if (s == to_string(k)) return k;
    }
    throw ConfigError("unknown experiment '" + s + "'");
}

}  // namespace

PYBIND11_MODULE(_jointggl, m) {
    m.doc() = "Group graphical lasso estimation, debiasing and inference for several populations.";
    m.attr("__version__") = kToolVersion;

    py::register_exception<Error>(m, "JointGGLError", PyExc_RuntimeError);

    py::class_<PenaltyPair>(m, "PenaltyPair")
        .def(py::init([](double lambda, double rho) { return PenaltyPair{lambda, rho}; }), py::arg("lam"),
             py::arg("rho"))
        .def_readwrite("lam", &PenaltyPair::lambda)
        .def_readwrite("rho", &PenaltyPair::rho)
        .def("__repr__", [](const PenaltyPair& p) {
            return "PenaltyPair(lam=" + std::to_string(p.lambda) + ", rho=" + std::to_string(p.rho) + ")";
        });

    py::class_<SolverOptions>(m, "SolverOptions")
        .def(py::init([](double admm_step, int max_iter, double tol_abs, double tol_rel, bool weighted_by_n) {
                 return SolverOptions{admm_step, max_iter, tol_abs, tol_rel, weighted_by_n};
             }),
             py::arg("admm_step") = 1.0, py::arg("max_iter") = 10000, py::arg("tol_abs") = 1e-6,
             py::arg("tol_rel") = 1e-4, py::arg("weighted_by_n") = false)
        .def_readwrite("admm_step", &SolverOptions::admm_step)
        .def_readwrite("max_iter", &SolverOptions::max_iter)
        .def_readwrite("tol_abs", &SolverOptions::tol_abs)
        .def_readwrite("tol_rel", &SolverOptions::tol_rel)
        .def_readwrite("weighted_by_n", &SolverOptions::weighted_by_n);

    py::class_<SolveReport>(m, "SolveReport")
        .def_property_readonly("estimate", [](const SolveReport& r) { return to_dense(r.estimate.matrices()); })
        .def_readonly("iterations", &SolveReport::iterations)
        .def_readonly("primal_residual", &SolveReport::primal_residual)
        .def_readonly("dual_residual", &SolveReport::dual_residual)
        .def_readonly("converged", &SolveReport::converged)
        .def_readonly("kkt_violation", &SolveReport::kkt_violation);

    m.def(
        "sample_covariance",
        [](const std::vector<Matrix>& data, bool center) {
            MultiPopDataset ds;
            ds.data = data;
            const auto covs = sample_covariance(ds, center);
            return py::make_tuple(to_dense(covs.matrices()), covs.sample_sizes());
        },
        py::arg("data"), py::arg("center") = false,
        "Per-population covariance X^T X / n; returns (covariances, sample sizes).");

    m.def(
        "solve",
        [](const std::vector<Matrix>& covs, const std::vector<std::int64_t>& sizes, double lam, double rho,
           const SolverOptions& opts) {
            const auto cs = make_covs(covs, sizes);
            py::gil_scoped_release release;
            return solve_ggl(cs, PenaltyPair{lam, rho}, opts);
        },
        py::arg("covs"), py::arg("sample_sizes"), py::arg("lam"), py::arg("rho"), py::arg("options") = SolverOptions{});

    m.def(
        "objective",
        [](const std::vector<Matrix>& omega, const std::vector<Matrix>& covs, const std::vector<std::int64_t>& sizes,
           double lam, double rho, bool weighted) {
            return ggl_objective(PrecisionSet(to_symmetric(omega)), make_covs(covs, sizes), PenaltyPair{lam, rho},
                                 weighted);
        },
        py::arg("omega"), py::arg("covs"), py::arg("sample_sizes"), py::arg("lam"), py::arg("rho"),
        py::arg("weighted_by_n") = false);

    m.def(
        "kkt_residual",
        [](const std::vector<Matrix>& omega, const std::vector<Matrix>& covs, const std::vector<std::int64_t>& sizes,
           double lam, double rho, bool weighted) {
            return kkt_residual(PrecisionSet(to_symmetric(omega)), make_covs(covs, sizes), PenaltyPair{lam, rho},
                                weighted);
        },
        py::arg("omega"), py::arg("covs"), py::arg("sample_sizes"), py::arg("lam"), py::arg("rho"),
        py::arg("weighted_by_n") = false);

    m.def("prox_penalty", py::overload_cast<const Vector&, double, double>(&prox_penalty), py::arg("values"),
          py::arg("lam"), py::arg("rho"));

    m.def(
        "debias",
        [](const std::vector<Matrix>& omega, const std::vector<Matrix>& covs, const std::vector<std::int64_t>& sizes) {
            return to_dense(debias(PrecisionSet(to_symmetric(omega)), make_covs(covs, sizes)).matrices);
        },
        py::arg("omega"), py::arg("covs"), py::arg("sample_sizes"));

    m.def(
        "test_edge",
        [](const std::vector<Matrix>& omega, const std::vector<Matrix>& covs, const std::vector<std::int64_t>& sizes,
           std::pair<Eigen::Index, Eigen::Index> edge, const std::vector<double>& coefficients, double alpha,
           double hypothesized) {
            const PrecisionSet est(to_symmetric(omega));
            const auto cs = make_covs(covs, sizes);
            const auto r =
                test_linear_combo(debias(est, cs), est, cs, LinearCombo{coefficients, zero_based(edge)}, alpha,
                                  hypothesized);
            py::dict d;
            d["estimate"] = r.estimate;
            d["std_error"] = r.std_error;
            d["z_stat"] = r.z_stat;
            d["p_value"] = r.p_value;
            d["reject"] = r.reject;
            return d;
        },
        py::arg("omega"), py::arg("covs"), py::arg("sample_sizes"), py::arg("edge"), py::arg("coefficients"),
        py::arg("alpha") = 0.05, py::arg("hypothesized") = 0.0,
        "Test sum_k a_k Omega^k_ij = hypothesized for a one-based edge (i, j).");

    m.def(
        "confidence_interval",
        [](const std::vector<Matrix>& omega, const std::vector<Matrix>& covs, const std::vector<std::int64_t>& sizes,
           std::size_t population, std::pair<Eigen::Index, Eigen::Index> edge, double level) {
            const PrecisionSet est(to_symmetric(omega));
            const auto cs = make_covs(covs, sizes);
            const Edge e = zero_based(edge);
            const auto ci = confidence_interval(debias(est, cs), est, cs, population - 1, e.i, e.j, level);
            return py::make_tuple(ci.lower, ci.upper);
        },
        py::arg("omega"), py::arg("covs"), py::arg("sample_sizes"), py::arg("population"), py::arg("edge"),
        py::arg("level") = 0.95, "Interval for one-based population and edge.");

    m.def(
        "tune",
        [](const std::vector<Matrix>& covs, const std::vector<std::int64_t>& sizes, std::vector<double> c1_values,
           std::vector<double> c2_values, double gamma, const SolverOptions& opts) {
            TuningGrid grid;
            if (!c1_values.empty()) grid.c1_values = std::move(c1_values);
            if (!c2_values.empty()) grid.c2_values = std::move(c2_values);
            grid.gamma = gamma;
            const auto cs = make_covs(covs, sizes);
            nlohmann::json j;
            {
                py::gil_scoped_release release;
                j = to_json(tune_penalties(cs, grid, opts));
            }
            return json_to_py(j);
        },
        py::arg("covs"), py::arg("sample_sizes"), py::arg("c1_values") = std::vector<double>{},
        py::arg("c2_values") = std::vector<double>{}, py::arg("gamma") = 0.5, py::arg("options") = SolverOptions{});

    m.def("normal_cdf", &normal_cdf, py::arg("x"));
    m.def("normal_quantile", &normal_quantile, py::arg("prob"));

    m.def(
        "chain_precision", [](Eigen::Index p, double rho) { return chain_precision(p, rho).dense(); }, py::arg("p"),
        py::arg("rho"));
    m.def(
        "star_precision",
        [](Eigen::Index p, Eigen::Index d, double diag, double offdiag, std::uint64_t hub_seed) {
            const auto g = star_precision(p, d, diag, offdiag, hub_seed);
            return py::make_tuple(g.precision.dense(), g.hub, g.spokes);
        },
        py::arg("p"), py::arg("d"), py::arg("diag"), py::arg("offdiag"), py::arg("hub_seed"),
        "Returns (precision, hub, spokes) with zero-based indices.");

    m.def(
        "draw_mvn",
        [](const Matrix& precision, Eigen::Index n, std::uint64_t seed) {
            return draw_mvn(SymmetricMatrix(precision), n, seed);
        },
        py::arg("precision"), py::arg("n"), py::arg("seed"));

    m.def(
        "check_irrepresentability",
        [](const Matrix& precision, double tol, bool augment) {
            return check_irrepresentability(SymmetricMatrix(precision), tol, augment);
        },
        py::arg("precision"), py::arg("tol") = kTruthTolerance, py::arg("augment_diagonal") = true);

    m.def(
        "diagnose",
        [](const std::vector<Matrix>& precisions, std::optional<std::pair<double, double>> penalty, double psi,
           std::vector<std::int64_t> sample_sizes, bool augment) {
            DiagnosticsOptions opts;
            if (penalty) opts.penalty = PenaltyPair{penalty->first, penalty->second};
            opts.psi = psi;
            opts.sample_sizes = std::move(sample_sizes);
            opts.augment_diagonal = augment;
            return json_to_py(to_json(diagnose(PrecisionSet(to_symmetric(precisions)), opts)));
        },
        py::arg("precisions"), py::arg("penalty") = py::none(), py::arg("psi") = 0.5,
        py::arg("sample_sizes") = std::vector<std::int64_t>{}, py::arg("augment_diagonal") = true);

    m.def("rate_delta", &rate_delta, py::arg("n"), py::arg("p"), py::arg("gamma"), py::arg("k1"),
          py::arg("max_diag"));

    m.def(
        "run_experiment",
        [](const std::string& kind, const std::string& graph, std::vector<Eigen::Index> dims,
           std::vector<std::int64_t> sample_sizes, int replications, std::uint64_t seed,
           std::optional<std::pair<double, double>> fixed, int threads) {
            ExperimentConfig cfg;
            cfg.graph.kind = graph == "star" ? GraphKind::star : GraphKind::chain;
            cfg.dims = std::move(dims);
            cfg.sample_sizes = std::move(sample_sizes);
            cfg.replications = replications;
            cfg.base_seed = seed;
            cfg.threads = threads;
            if (fixed) {
                cfg.penalty_rule = PenaltyRule::fixed;
                cfg.fixed_c1 = fixed->first;
                cfg.fixed_c2 = fixed->second;
            }
            const auto k = kind_from(kind);
            nlohmann::json j;
            {
                py::gil_scoped_release release;
                j = to_json(run_experiment(k, cfg));
            }
            return json_to_py(j);
        },
        py::arg("kind"), py::arg("graph") = "chain", py::arg("dims") = std::vector<Eigen::Index>{50},
        py::arg("sample_sizes") = std::vector<std::int64_t>{600}, py::arg("replications") = 10,
        py::arg("seed") = 20240101, py::arg("fixed_constants") = py::none(), py::arg("threads") = 1,
        "Runs a Monte Carlo experiment and returns the JSON payload as a dict.");
}
