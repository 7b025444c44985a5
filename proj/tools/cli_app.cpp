#include "cli_app.hpp"

#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "jointggl/cli_io.hpp"

namespace jggl {

namespace {

struct Flags {
    RunConfig run;

    // Strings and lists that need converting after parsing.
    std::string header = "auto";
    std::string edges;
    std::string graph = "chain";
    std::string rule = "ebic";
    std::string likelihood = "unscaled";
    std::vector<double> chain_rho{0.2, 0.35};
    std::vector<std::int64_t> sample_sizes;
    std::vector<Eigen::Index> dims;
    std::optional<int> replications;
    std::optional<double> diag_lambda;
    std::optional<double> diag_rho;
    bool literal_support = false;
    bool no_debias = false;
    std::vector<std::string> data;
    std::vector<std::string> precision;
};

void add_solver(CLI::App* cmd, Flags& f) {
    cmd->add_option("--admm-step", f.run.solver.admm_step, "ADMM step size eta")->capture_default_str();
    cmd->add_option("--max-iter", f.run.solver.max_iter, "ADMM iteration cap")->capture_default_str();
    cmd->add_option("--tol-abs", f.run.solver.tol_abs, "absolute residual tolerance")->capture_default_str();
    cmd->add_option("--tol-rel", f.run.solver.tol_rel, "relative residual tolerance")->capture_default_str();
    cmd->add_flag("--weighted", f.run.solver.weighted_by_n, "weight each likelihood term by n_k");
}

void add_grid(CLI::App* cmd, Flags& f) {
    cmd->add_option("--grid-c1", f.run.grid.c1_values, "e-BIC grid for C1")->delimiter(',')->capture_default_str();
    cmd->add_option("--grid-c2", f.run.grid.c2_values, "e-BIC grid for C2")->delimiter(',')->capture_default_str();
    cmd->add_option("--gamma", f.run.grid.gamma, "e-BIC gamma")->capture_default_str();
    cmd->add_option("--edge-tol", f.run.grid.edge_tol, "edge threshold for counting")->capture_default_str();
    cmd->add_option("--ebic-likelihood", f.likelihood, "unscaled or sample_size")
        ->check(CLI::IsMember({"unscaled", "sample_size"}))
        ->capture_default_str();
}

void add_data(CLI::App* cmd, Flags& f) {
    cmd->add_option("data", f.data, "one CSV file per population")->required();
    cmd->add_option("--header", f.header, "auto, yes or no")->check(CLI::IsMember({"auto", "yes", "no"}));
    cmd->add_flag("--center", f.run.ingest.center, "subtract column means");
    cmd->add_flag("--standardize", f.run.ingest.standardize, "center and scale columns to unit variance");
    cmd->add_flag("--diff", f.run.ingest.first_difference, "take first differences of consecutive rows");
    cmd->add_option("--lambda", f.run.lambda, "l1 penalty");
    cmd->add_option("--rho", f.run.rho, "group penalty");
    cmd->add_option("--c1", f.run.c1, "lambda = c1 sqrt(log p / n)");
    cmd->add_option("--c2", f.run.c2, "rho = c2 sqrt(log p / n)");
    add_grid(cmd, f);
    add_solver(cmd, f);
}

void add_graph(CLI::App* cmd, Flags& f) {
    auto& g = f.run.simulation.graph;
    cmd->add_option("--graph", f.graph, "chain or star")->check(CLI::IsMember({"chain", "star"}));
    cmd->add_option("--chain-rho", f.chain_rho, "chain off-diagonal per population")->delimiter(',')->capture_default_str();
    cmd->add_option("--degree", g.star_degree, "star hub degree")->capture_default_str();
    cmd->add_option("--diag", g.star_diag, "star diagonal per population")->delimiter(',')->capture_default_str();
    cmd->add_option("--offdiag", g.star_offdiag, "star hub-spoke value per population")->delimiter(',')->capture_default_str();
    cmd->add_option("--hub-seed", g.hub_seed, "seed for the hub and spokes")->capture_default_str();
    cmd->add_option("--p", f.dims, "dimensions")->delimiter(',');
}

}  // namespace

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
    Flags f;
    CLI::App app{"Joint estimation and inference for several Gaussian graphical models", "jggl"};
    app.fallthrough();
    app.require_subcommand(1);
    app.set_config("--config", "", "TOML/INI configuration file; command-line flags take precedence");
    std::ostringstream version;
    version << "jggl " << kToolVersion << " (interface version " << kReportFormat << ")";
    app.set_version_flag("--version", version.str());
    app.add_option("--seed", f.run.seed, "random seed")->capture_default_str();
    app.add_option("--threads", f.run.threads, "worker threads for Monte Carlo replications")->capture_default_str();
    app.add_option("--out-dir", f.run.out_dir, "directory for report.json and CSV tables")->capture_default_str();
    app.add_flag("-v,--verbose", f.run.verbosity, "print the report to stdout");

    auto* estimate = app.add_subcommand("estimate", "fit the group graphical lasso and debias");
    estimate->configurable();
    add_data(estimate, f);
    estimate->add_flag("--no-debias", f.no_debias, "skip the debiased matrices");

    auto* test = app.add_subcommand("test", "z-tests and confidence intervals on listed edges");
    test->configurable();
    add_data(test, f);
    test->add_option("--edges", f.edges, "edges as i-j, separated by ';' (one-based)")->required();
    test->add_option("--coef", f.run.coefficients, "coefficients a_k of the linear combination")->delimiter(',');
    test->add_option("--alpha", f.run.alpha, "test level")->capture_default_str();
    test->add_option("--null", f.run.hypothesized, "hypothesized value of the combination")->capture_default_str();
    test->add_option("--level", f.run.ci_level, "confidence level")->capture_default_str();

    auto* tune = app.add_subcommand("tune", "e-BIC grid search over penalty constants");
    tune->configurable();
    add_data(tune, f);

    auto* simulate = app.add_subcommand("simulate", "Monte Carlo experiments on chain and star graphs");
    simulate->configurable();
    auto& sim = f.run.simulation;
    simulate->add_option("experiment", f.run.experiment, "consistency, tpfp, supnorm, normality, coverage or dataset")
        ->required()
        ->check(CLI::IsMember({"consistency", "tpfp", "supnorm", "normality", "coverage", "dataset"}));
    add_graph(simulate, f);
    simulate->add_option("--n", f.sample_sizes, "sample sizes to sweep")->delimiter(',');
    simulate->add_option("--B", f.replications, "replications");
    simulate->add_option("--rule", f.rule, "ebic or fixed")->check(CLI::IsMember({"ebic", "fixed"}));
    simulate->add_option("--c1", sim.fixed_c1, "fixed C1")->capture_default_str();
    simulate->add_option("--c2", sim.fixed_c2, "fixed C2")->capture_default_str();
    simulate->add_flag("--retune", sim.retune_each_replication, "tune on every replication");
    simulate->add_option("--edges", f.edges, "edges for normality, i-j separated by ';'");
    simulate->add_option("--alpha", sim.alpha_level, "nominal level")->capture_default_str();
    add_grid(simulate, f);
    add_solver(simulate, f);

    auto* diag = app.add_subcommand("diagnose", "theoretical conditions on known precision matrices");
    diag->configurable();
    auto& d = f.run.diagnostics;
    diag->add_option("--precision", f.precision, "one CSV precision matrix per population");
    add_graph(diag, f);
    diag->add_option("--lambda", f.diag_lambda, "lambda for the between-group check");
    diag->add_option("--rho", f.diag_rho, "rho for the between-group check");
    diag->add_option("--psi", d.psi, "psi in (0, 1)")->capture_default_str();
    diag->add_option("--eigen-floor", d.eigen_floor, "L of the bounded-eigenvalue condition");
    diag->add_option("--n", d.sample_sizes, "sample sizes for the rate and advisory values")->delimiter(',');
    diag->add_option("--tail-gamma", d.gamma, "tail exponent, above 2")->capture_default_str();
    diag->add_option("--k1", d.k1, "sub-Gaussian constant")->capture_default_str();
    diag->add_option("--tol", d.tol, "support tolerance")->capture_default_str();
    diag->add_flag("--literal-support", f.literal_support, "leave the diagonal out of the Hessian index set");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitConfig;
    }

    RunConfig& rc = f.run;
    try {
        if (*estimate) rc.command = Command::estimate;
        if (*test) rc.command = Command::test;
        if (*tune) rc.command = Command::tune;
        if (*simulate) rc.command = Command::simulate;
        if (*diag) rc.command = Command::diagnose;

        for (const auto& p : f.data) rc.data_paths.emplace_back(p);
        for (const auto& p : f.precision) rc.precision_paths.emplace_back(p);
        if (f.header != "auto") rc.ingest.header = f.header == "yes";
        rc.debias = !f.no_debias;
        rc.grid.likelihood = f.likelihood == "sample_size" ? EbicLikelihood::sample_size : EbicLikelihood::unscaled;
        if (!f.edges.empty()) rc.edges = parse_edge_list(f.edges);

        sim.graph.kind = f.graph == "star" ? GraphKind::star : GraphKind::chain;
        sim.graph.chain_rho = f.chain_rho;
        if (!f.sample_sizes.empty()) sim.sample_sizes = f.sample_sizes;
        if (!f.dims.empty()) sim.dims = f.dims;
        if (f.replications) sim.replications = *f.replications;
        sim.penalty_rule = f.rule == "fixed" ? PenaltyRule::fixed : PenaltyRule::ebic_grid;
        sim.grid = rc.grid;
        sim.solver = rc.solver;
        sim.edges_of_interest = rc.edges;

        if (f.diag_lambda.has_value() != f.diag_rho.has_value()) {
            throw ConfigError("--lambda and --rho must be given together");
        }
        if (f.diag_lambda) d.penalty = PenaltyPair{*f.diag_lambda, *f.diag_rho};
        d.augment_diagonal = !f.literal_support;
    } catch (const Error& e) {
        err << "jggl: " << e.what() << '\n';
        return kExitConfig;
    }

    const AnalysisReport rep = run_command(rc);
    if (rep.exit_code == kExitOk) {
        try {
            write_file_atomic(rc.out_dir / "config.ini", app.config_to_str(false, false));
        } catch (const std::exception& e) {
            err << "jggl: cannot write config echo: " << e.what() << '\n';
            return kExitConfig;
        }
    }
    if (rc.verbosity > 0) out << rep.json.dump(2) << '\n';
    if (!rep.message.empty()) err << "jggl: " << rep.message << '\n';
    out << (rc.out_dir / "report.json").string() << '\n';
    return rep.exit_code;
}

}  // namespace jggl
