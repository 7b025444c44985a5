#include "jointggl/cli_io.hpp"

#include <charconv>
#include <chrono>
#include <fstream>
#include <sstream>
#include <system_error>

namespace jggl {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
    while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
    std::string out(s.substr(b, e - b));
    if (out.size() >= 2 && out.front() == '"' && out.back() == '"') out = out.substr(1, out.size() - 2);
    return out;
}

std::vector<std::string> split_row(const std::string& line) {
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(',', start);
        cells.push_back(trim(std::string_view(line).substr(start, pos == std::string::npos ? std::string::npos : pos - start)));
        if (pos == std::string::npos) break;
        start = pos + 1;
    }
    return cells;
}

std::optional<double> parse_number(const std::string& cell) {
    if (cell.empty()) return std::nullopt;
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    if (*first == '+') ++first;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) return std::nullopt;
    return v;
}

bool blank(const std::string& line) { return trim(line).empty(); }

}  // namespace

CsvTable read_csv(std::istream& in, const std::string& source, std::optional<bool> header) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::size_t> line_numbers;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (blank(line)) continue;
        rows.push_back(split_row(line));
        line_numbers.push_back(line_no);
    }
    if (rows.empty()) throw DataError(source + ": no rows");

    bool has_header = false;
    if (header) {
        has_header = *header;
    } else {
        for (const auto& cell : rows.front()) has_header = has_header || !parse_number(cell);
    }

    CsvTable table;
    const std::size_t cols = rows.front().size();
    if (has_header) table.names = rows.front();
    const std::size_t first = has_header ? 1 : 0;
    if (rows.size() <= first) throw DataError(source + ": header present but no data rows");

    table.values.resize(static_cast<Eigen::Index>(rows.size() - first), static_cast<Eigen::Index>(cols));
    for (std::size_t r = first; r < rows.size(); ++r) {
        if (rows[r].size() != cols) {
            std::ostringstream msg;
            msg << source << ": line " << line_numbers[r] << " has " << rows[r].size() << " columns, expected "
                << cols;
            throw DataError(msg.str());
        }
        for (std::size_t c = 0; c < cols; ++c) {
            const auto v = parse_number(rows[r][c]);
            if (!v || !std::isfinite(*v)) {
                std::ostringstream msg;
                msg << source << ": line " << line_numbers[r] << ", column " << c + 1 << ": '" << rows[r][c]
                    << "' is not a finite number";
                throw DataError(msg.str());
            }
            table.values(static_cast<Eigen::Index>(r - first), static_cast<Eigen::Index>(c)) = *v;
        }
    }
    return table;
}

CsvTable read_csv_file(const fs::path& path, std::optional<bool> header) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());
    return read_csv(in, path.string(), header);
}

Matrix preprocess(Matrix x, const IngestOptions& opts, const std::string& source) {
    if (opts.first_difference) {
        if (x.rows() < 2) throw DataError(source + ": first differencing needs at least two rows");
        x = (x.bottomRows(x.rows() - 1) - x.topRows(x.rows() - 1)).eval();
    }
    if (opts.center || opts.standardize) {
        const Eigen::RowVectorXd mean = x.colwise().mean();
        x.rowwise() -= mean;
    }
    if (opts.standardize) {
        if (x.rows() < 2) throw DataError(source + ": standardizing needs at least two rows");
        for (Eigen::Index c = 0; c < x.cols(); ++c) {
            const double sd = std::sqrt(x.col(c).squaredNorm() / static_cast<double>(x.rows() - 1));
            if (!(sd > 0.0)) {
                std::ostringstream msg;
                msg << source << ": column " << c + 1 << " is constant and cannot be standardized";
                throw DataError(msg.str());
            }
            x.col(c) /= sd;
        }
    }
    return x;
}

MultiPopDataset ingest_csv(const std::vector<fs::path>& paths, const IngestOptions& opts) {
    if (paths.empty()) throw ConfigError("no data files given");
    MultiPopDataset ds;
    for (std::size_t k = 0; k < paths.size(); ++k) {
        CsvTable t = read_csv_file(paths[k], opts.header);
        if (k > 0 && t.values.cols() != ds.dim()) {
            std::ostringstream msg;
            msg << paths[k].string() << " has " << t.values.cols() << " columns, " << paths[0].string() << " has "
                << ds.dim();
            throw DataError(msg.str());
        }
        if (k == 0) ds.variable_names = t.names;
        ds.data.push_back(preprocess(std::move(t.values), opts, paths[k].string()));
    }
    ds.validate();
    return ds;
}

void write_matrix_csv(std::ostream& os, const Matrix& m, const std::vector<std::string>& names) {
    if (!names.empty()) {
        for (std::size_t c = 0; c < names.size(); ++c) os << (c ? "," : "") << names[c];
        os << '\n';
    }
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) os << (c ? "," : "") << format_number(m(r, c));
        os << '\n';
    }
}

void write_file_atomic(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ConfigError("cannot write " + tmp.string());
        out << content;
        out.flush();
        if (!out) throw ConfigError("write failed for " + tmp.string());
    }
    fs::rename(tmp, path);
}

std::vector<Edge> parse_edge_list(const std::string& text) {
    std::vector<Edge> edges;
    std::string token;
    auto flush = [&](std::string tok) {
        tok = trim(tok);
        if (tok.empty()) return;
        if (tok.front() == '(' && tok.back() == ')') tok = tok.substr(1, tok.size() - 2);
        const auto sep = tok.find_first_of("-,:");
        if (sep == std::string::npos) throw ConfigError("edge '" + tok + "' must look like i-j");
        const auto a = parse_number(trim(tok.substr(0, sep)));
        const auto b = parse_number(trim(tok.substr(sep + 1)));
        if (!a || !b || *a < 1 || *b < 1 || *a != std::floor(*a) || *b != std::floor(*b)) {
            throw ConfigError("edge '" + tok + "' needs two positive one-based indices");
        }
        edges.push_back(make_edge(static_cast<Eigen::Index>(*a) - 1, static_cast<Eigen::Index>(*b) - 1));
    };
    for (char ch : text) {
        if (ch == ';' || ch == ' ' || ch == '\t' || ch == '\n') {
            flush(token);
            token.clear();
        } else {
            token.push_back(ch);
        }
    }
    flush(token);
    return edges;
}

json matrix_json(const Matrix& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

namespace {

json edge_json(const Edge& e) { return json::array({e.i + 1, e.j + 1}); }

json penalty_json(const PenaltyPair& p) { return {{"lambda", p.lambda}, {"rho", p.rho}}; }

json solver_json(const SolverOptions& o) {
    return {{"admm_step", o.admm_step},
            {"max_iter", o.max_iter},
            {"tol_abs", o.tol_abs},
            {"tol_rel", o.tol_rel},
            {"weighted_by_n", o.weighted_by_n}};
}

json grid_json(const TuningGrid& g) {
    return {{"c1_values", g.c1_values},
            {"c2_values", g.c2_values},
            {"gamma", g.gamma},
            {"edge_tol", g.edge_tol},
            {"likelihood", g.likelihood == EbicLikelihood::unscaled ? "unscaled" : "sample_size"}};
}

json cell_penalty_json(const CellPenalty& p) { return {{"c1", p.c1}, {"c2", p.c2}, {"tuned", p.tuned}}; }

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

json to_json(const SolveReport& r) {
    json mats = json::array();
    for (const auto& m : r.estimate.matrices()) mats.push_back(matrix_json(m.dense()));
    return {{"iterations", r.iterations},
            {"converged", r.converged},
            {"primal_residual", r.primal_residual},
            {"dual_residual", r.dual_residual},
            {"kkt_violation", r.kkt_violation},
            {"estimate", std::move(mats)}};
}

json to_json(const EdgeTestResult& r) {
    return {{"edge", edge_json(r.edge)},   {"estimate", r.estimate}, {"std_error", r.std_error},
            {"z_stat", r.z_stat},          {"p_value", r.p_value},   {"reject", r.reject},
            {"alpha_level", r.alpha_level}};
}

json to_json(const ConfidenceIntervalResult& r) {
    return {{"edge", edge_json(r.edge)}, {"population", r.population + 1}, {"lower", r.lower},
            {"upper", r.upper},          {"level", r.level}};
}

json to_json(const TuningResult& r) {
    json table = json::array();
    for (const auto& c : r.table) {
        table.push_back({{"c1", c.c1},
                         {"c2", c.c2},
                         {"penalty", penalty_json(c.penalty)},
                         {"ebic", c.score.value},
                         {"loglik_term", c.score.loglik_term},
                         {"edges", c.score.edge_counts},
                         {"converged", c.converged},
                         {"iterations", c.iterations}});
    }
    return {{"best_c1", r.best_c1},
            {"best_c2", r.best_c2},
            {"best_penalty", penalty_json(r.best_penalty)},
            {"best_index", r.best_index},
            {"table", std::move(table)}};
}

json to_json(const DiagnosticsReport& r) {
    json pops = json::array();
    for (const auto& p : r.populations) {
        pops.push_back({{"kappa_sigma", p.kappa_sigma},
                        {"kappa_gamma", p.kappa_gamma},
                        {"alpha_irr", p.alpha_irr},
                        {"max_degree", p.stats.max_degree},
                        {"edge_count", p.stats.edge_count},
                        {"omega_min", optional_json(p.stats.omega_min)},
                        {"eigen_bounds", {p.stats.eigen_min, p.stats.eigen_max}},
                        {"delta", optional_json(p.delta)},
                        {"sample_size_advisory", optional_json(p.sample_size_advisory)}});
    }
    auto flag = [](const std::optional<bool>& b) { return b ? json(*b) : json(nullptr); };
    json out = {{"populations", std::move(pops)},
                {"alpha_irr", r.alpha_irr},
                {"shared_support", r.shared_support},
                {"theoretical_penalty_sum", optional_json(r.theoretical_penalty_sum)},
                {"sample_size_ratios", r.sample_size_ratios},
                {"assumptions", {{"irrepresentability", r.irrepresentable},
                                 {"between_group", flag(r.between_group_holds)},
                                 {"bounded_eigenvalues", flag(r.eigenvalues_bounded)},
                                 {"sample_sizes", flag(r.sample_sizes_comparable)}}}};
    if (r.between_group) {
        out["between_group"] = {{"lhs", r.between_group->lhs},
                                {"rhs", r.between_group->rhs},
                                {"holds", r.between_group->holds}};
    } else {
        out["between_group"] = nullptr;
    }
    return out;
}

json to_json(const ExperimentConfig& c) {
    json graph;
    if (c.graph.kind == GraphKind::chain) {
        graph = {{"kind", "chain"}, {"chain_rho", c.graph.chain_rho}};
    } else {
        graph = {{"kind", "star"},
                 {"degree", c.graph.star_degree},
                 {"diag", c.graph.star_diag},
                 {"offdiag", c.graph.star_offdiag},
                 {"hub_seed", c.graph.hub_seed}};
    }
    json edges = json::array();
    for (const auto& e : c.edges_of_interest) edges.push_back(edge_json(e));
    return {{"graph", std::move(graph)},
            {"sample_sizes", c.sample_sizes},
            {"dims", c.dims},
            {"replications", c.replications},
            {"base_seed", c.base_seed},
            {"penalty_rule", c.penalty_rule == PenaltyRule::fixed ? "fixed" : "ebic_grid"},
            {"grid", grid_json(c.grid)},
            {"fixed_c1", c.fixed_c1},
            {"fixed_c2", c.fixed_c2},
            {"retune_each_replication", c.retune_each_replication},
            {"alpha_level", c.alpha_level},
            {"edges_of_interest", std::move(edges)},
            {"solver", solver_json(c.solver)},
            {"threads", c.threads}};
}

json to_json(const ExperimentResult& r) {
    json out = {{"kind", to_string(r.kind)}, {"config", to_json(r.config)}};
    out["seeds"] = {{"base_seed", r.config.base_seed},
                    {"rule", "replication b uses splitmix64(splitmix64(base) + 0xD1B54A32D192ED03*(b+1)); "
                             "population k draws from that seed xor k"},
                    {"replication_seeds", r.replication_seeds}};
    json cells = json::array();
    switch (r.kind) {
        case ExperimentKind::consistency:
            for (const auto& c : r.consistency) {
                cells.push_back({{"p", c.p}, {"n", c.n}, {"replications", c.replications}, {"successes", c.successes},
                                 {"nonconverged", c.nonconverged}, {"fraction", c.fraction},
                                 {"penalty", cell_penalty_json(c.penalty)}});
            }
            break;
        case ExperimentKind::tpfp:
            for (const auto& c : r.tpfp) {
                cells.push_back({{"p", c.p}, {"n", c.n}, {"replications", c.replications},
                                 {"nonconverged", c.nonconverged}, {"true_edges", c.true_edges},
                                 {"mean_tp", c.mean_tp}, {"mean_fp", c.mean_fp},
                                 {"penalty", cell_penalty_json(c.penalty)}});
            }
            break;
        case ExperimentKind::supnorm:
            for (const auto& c : r.supnorm) {
                cells.push_back({{"p", c.p}, {"n", c.n}, {"k", c.k + 1}, {"used", c.used}, {"excluded", c.excluded},
                                 {"mean_supnorm", c.mean_supnorm}, {"penalty", cell_penalty_json(c.penalty)}});
            }
            break;
        case ExperimentKind::normality:
            for (const auto& s : r.normality) {
                json entry = {{"label", s.label()}, {"p", s.p}, {"n", s.n}, {"edge", edge_json(s.edge)},
                              {"population", s.population ? json(*s.population + 1) : json("pooled")},
                              {"values", s.values}};
                if (s.summary) {
                    entry["summary"] = {{"count", s.summary->count}, {"mean", s.summary->mean},
                                        {"variance", s.summary->variance},
                                        {"ks_statistic", s.summary->ks_statistic},
                                        {"ks_pvalue", s.summary->ks_pvalue},
                                        {"reject_rate", s.summary->reject_rate}};
                }
                cells.push_back(std::move(entry));
            }
            break;
        case ExperimentKind::coverage:
            for (const auto& c : r.coverage) {
                cells.push_back({{"p", c.p}, {"n", c.n}, {"set", c.on_support ? "S" : "Sc"}, {"k", c.k + 1},
                                 {"entries", c.entries}, {"used", c.used}, {"excluded", c.excluded},
                                 {"coverage", c.coverage}, {"length", c.length},
                                 {"penalty", cell_penalty_json(c.penalty)}});
            }
            break;
    }
    out["cells"] = std::move(cells);
    return out;
}

const char* to_string(Command c) {
    switch (c) {
        case Command::estimate: return "estimate";
        case Command::test: return "test";
        case Command::tune: return "tune";
        case Command::simulate: return "simulate";
        case Command::diagnose: return "diagnose";
    }
    return "unknown";
}

void RunConfig::validate() const {
    if (threads < 1) throw ConfigError("--threads must be at least 1");
    const bool needs_data = command == Command::estimate || command == Command::test || command == Command::tune;
    if (needs_data && data_paths.empty()) throw ConfigError(std::string(to_string(command)) + " needs data files");
    for (const auto& p : data_paths) {
        if (!fs::exists(p)) throw ConfigError("data file not found: " + p.string());
    }
    for (const auto& p : precision_paths) {
        if (!fs::exists(p)) throw ConfigError("precision file not found: " + p.string());
    }
    if (lambda.has_value() != rho.has_value()) throw ConfigError("--lambda and --rho must be given together");
    if (c1.has_value() != c2.has_value()) throw ConfigError("--c1 and --c2 must be given together");
    if (lambda) PenaltyPair{*lambda, *rho}.validate();
    if (c1 && (!(*c1 >= 0.0) || !(*c2 >= 0.0))) throw ConfigError("penalty constants must be nonnegative");
    solver.validate();
    if (command == Command::tune || (needs_data && !lambda && !c1)) grid.validate();
    if (command == Command::test) {
        if (edges.empty()) throw ConfigError("test needs at least one edge (--edges)");
        if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("--alpha must lie in (0, 1)");
        if (!(ci_level > 0.0 && ci_level < 1.0)) throw ConfigError("--level must lie in (0, 1)");
    }
    if (command == Command::simulate) {
        static const char* kinds[] = {"consistency", "tpfp", "supnorm", "normality", "coverage", "dataset"};
        bool known = false;
        for (const char* k : kinds) known = known || experiment == k;
        if (!known) throw ConfigError("unknown experiment '" + experiment + "'");
        simulation.validate();
    }
}

json to_json(const RunConfig& c) {
    auto paths = [](const std::vector<fs::path>& v) {
        json a = json::array();
        for (const auto& p : v) a.push_back(p.string());
        return a;
    };
    json edges = json::array();
    for (const auto& e : c.edges) edges.push_back(edge_json(e));
    json out = {{"command", to_string(c.command)},
                {"out_dir", c.out_dir.string()},
                {"seed", c.seed},
                {"threads", c.threads},
                {"data", paths(c.data_paths)},
                {"ingest", {{"header", c.ingest.header ? json(*c.ingest.header) : json("auto")},
                            {"center", c.ingest.center},
                            {"standardize", c.ingest.standardize},
                            {"first_difference", c.ingest.first_difference}}},
                {"lambda", optional_json(c.lambda)},
                {"rho", optional_json(c.rho)},
                {"c1", optional_json(c.c1)},
                {"c2", optional_json(c.c2)},
                {"grid", grid_json(c.grid)},
                {"solver", solver_json(c.solver)},
                {"debias", c.debias},
                {"edges", std::move(edges)},
                {"coefficients", c.coefficients},
                {"alpha", c.alpha},
                {"hypothesized", c.hypothesized},
                {"ci_level", c.ci_level}};
    if (c.command == Command::simulate || c.command == Command::diagnose) {
        out["experiment"] = c.experiment;
        out["simulation"] = to_json(c.simulation);
    }
    if (c.command == Command::diagnose) {
        out["precision"] = paths(c.precision_paths);
        const auto& d = c.diagnostics;
        out["diagnostics"] = {{"tol", d.tol},
                              {"augment_diagonal", d.augment_diagonal},
                              {"penalty", d.penalty ? penalty_json(*d.penalty) : json(nullptr)},
                              {"psi", d.psi},
                              {"eigen_floor", optional_json(d.eigen_floor)},
                              {"sample_sizes", d.sample_sizes},
                              {"gamma", d.gamma},
                              {"k1", d.k1}};
    }
    return out;
}

namespace {

std::string matrix_csv(const Matrix& m, const std::vector<std::string>& names = {}) {
    std::ostringstream os;
    write_matrix_csv(os, m, names);
    return os.str();
}

std::string pop_file(const std::string& stem, std::size_t k) { return stem + "_k" + std::to_string(k + 1) + ".csv"; }

struct Fitted {
    CovarianceSet covs;
    PrecisionSet estimate;
    SolveReport solve;
    PenaltyPair penalty;
    std::optional<TuningResult> tuning;
};

// Shared front half of estimate, test and tune.
Fitted fit_from_config(const RunConfig& c, AnalysisReport& rep, bool force_tune) {
    const MultiPopDataset data = ingest_csv(c.data_paths, c.ingest);
    Fitted f;
    f.covs = sample_covariance(data, false);
    rep.json["data"] = {{"populations", data.populations()},
                        {"p", data.dim()},
                        {"sample_sizes", f.covs.sample_sizes()},
                        {"variable_names", data.variable_names}};
    if (!force_tune && c.lambda) {
        f.penalty = {*c.lambda, *c.rho};
    } else if (!force_tune && c.c1) {
        f.penalty = penalties_from_constants(*c.c1, *c.c2, f.covs.dim(), f.covs.min_sample_size());
    } else {
        f.tuning = tune_penalties(f.covs, c.grid, c.solver);
        f.penalty = f.tuning->best_penalty;
        rep.json["tuning"] = to_json(*f.tuning);
        std::ostringstream os;
        write_tuning_csv(os, *f.tuning);
        rep.files["tuning.csv"] = os.str();
    }
    rep.json["penalty"] = penalty_json(f.penalty);
    f.solve = f.tuning ? f.tuning->best_fit : solve_ggl(f.covs, f.penalty, c.solver);
    f.estimate = f.solve.estimate;
    rep.json["solve"] = to_json(f.solve);
    for (std::size_t k = 0; k < f.estimate.size(); ++k) {
        rep.files[pop_file("estimate", k)] = matrix_csv(f.estimate[k].dense(), data.variable_names);
    }
    if (!f.solve.converged) {
        rep.exit_code = kExitNonConvergence;
        rep.message = "solver did not converge within max_iter; best iterate reported";
    }
    return f;
}

void write_debiased(const Fitted& f, AnalysisReport& rep, DebiasedSet& deb) {
    deb = debias(f.estimate, f.covs);
    json mats = json::array();
    for (std::size_t k = 0; k < deb.size(); ++k) {
        mats.push_back(matrix_json(deb[k].dense()));
        rep.files[pop_file("debiased", k)] = matrix_csv(deb[k].dense());
    }
    rep.json["debiased"] = std::move(mats);
}

void cmd_estimate(const RunConfig& c, AnalysisReport& rep) {
    const Fitted f = fit_from_config(c, rep, false);
    if (c.debias) {
        DebiasedSet deb;
        write_debiased(f, rep, deb);
    }
}

void cmd_test(const RunConfig& c, AnalysisReport& rep) {
    const Fitted f = fit_from_config(c, rep, false);
    DebiasedSet deb;
    write_debiased(f, rep, deb);
    const auto K = f.covs.size();
    std::vector<double> coef = c.coefficients;
    if (coef.empty()) {
        coef.assign(K, 0.0);
        coef[0] = 1.0;
        if (K >= 2) coef[1] = -1.0;
    }
    if (coef.size() != K) {
        throw ConfigError("--coef needs one value per population (" + std::to_string(K) + ")");
    }
    std::ostringstream tests, intervals;
    tests << "i,j,estimate,std_error,z_stat,p_value,reject\n";
    intervals << "k,i,j,lower,upper,level\n";
    json tj = json::array(), cj = json::array();
    for (const auto& e : c.edges) {
        if (e.j >= f.covs.dim()) throw ConfigError("edge index exceeds the data dimension");
        const auto t = test_linear_combo(deb, f.estimate, f.covs, LinearCombo{coef, e}, c.alpha, c.hypothesized);
        tj.push_back(to_json(t));
        tests << e.i + 1 << ',' << e.j + 1 << ',' << format_number(t.estimate) << ','
              << format_number(t.std_error) << ',' << format_number(t.z_stat) << ',' << format_number(t.p_value)
              << ',' << (t.reject ? "true" : "false") << '\n';
        for (std::size_t k = 0; k < K; ++k) {
            const auto ci = confidence_interval(deb, f.estimate, f.covs, k, e.i, e.j, c.ci_level);
            cj.push_back(to_json(ci));
            intervals << k + 1 << ',' << e.i + 1 << ',' << e.j + 1 << ',' << format_number(ci.lower) << ','
                      << format_number(ci.upper) << ',' << format_number(ci.level) << '\n';
        }
    }
    rep.json["coefficients"] = coef;
    rep.json["tests"] = std::move(tj);
    rep.json["intervals"] = std::move(cj);
    rep.files["tests.csv"] = tests.str();
    rep.files["intervals.csv"] = intervals.str();
}

void cmd_tune(const RunConfig& c, AnalysisReport& rep) { fit_from_config(c, rep, true); }

ExperimentKind parse_kind(const std::string& s) {
    if (s == "consistency") return ExperimentKind::consistency;
    if (s == "tpfp") return ExperimentKind::tpfp;
    if (s == "supnorm") return ExperimentKind::supnorm;
    if (s == "normality") return ExperimentKind::normality;
    if (s == "coverage") return ExperimentKind::coverage;
    throw ConfigError("unknown experiment '" + s + "'");
}

void cmd_simulate(const RunConfig& c, AnalysisReport& rep) {
    ExperimentConfig cfg = c.simulation;
    cfg.base_seed = c.seed;
    cfg.threads = c.threads;
    if (c.experiment == "dataset") {
        const auto p = cfg.dims.front();
        const PrecisionSet truth = make_truth(cfg.graph, p);
        std::vector<std::int64_t> sizes(truth.size(), cfg.sample_sizes.front());
        const MultiPopDataset ds = draw_populations(truth, sizes, c.seed);
        std::vector<std::string> names;
        for (Eigen::Index j = 0; j < p; ++j) names.push_back("x" + std::to_string(j + 1));
        json files = json::array();
        for (std::size_t k = 0; k < ds.populations(); ++k) {
            rep.files[pop_file("population", k)] = matrix_csv(ds.data[k], names);
            rep.files[pop_file("truth", k)] = matrix_csv(truth[k].dense());
            files.push_back(pop_file("population", k));
        }
        rep.json["dataset"] = {{"p", p}, {"sample_sizes", sizes}, {"seed", c.seed}, {"files", files},
                               {"graph", to_json(cfg)["graph"]}};
        return;
    }
    const ExperimentKind kind = parse_kind(c.experiment);
    const ExperimentResult res = run_experiment(kind, cfg);
    rep.json["experiment"] = to_json(res);
    std::ostringstream os;
    write_result_csv(os, res);
    rep.files[std::string(to_string(kind)) + ".csv"] = os.str();
    if (kind == ExperimentKind::normality) {
        std::ostringstream summary;
        write_normality_summary_csv(summary, res);
        rep.files["normality_summary.csv"] = summary.str();
    }
}

void cmd_diagnose(const RunConfig& c, AnalysisReport& rep) {
    PrecisionSet truth;
    if (c.precision_paths.empty()) {
        truth = make_truth(c.simulation.graph, c.simulation.dims.front());
    } else {
        std::vector<SymmetricMatrix> mats;
        for (const auto& path : c.precision_paths) {
            CsvTable t = read_csv_file(path, std::nullopt);
            if (t.values.rows() != t.values.cols()) throw DataError(path.string() + " is not a square matrix");
            try {
                mats.emplace_back(std::move(t.values));
            } catch (const InvalidArgument& e) {
                throw DataError(path.string() + ": " + e.what());
            }
        }
        truth = PrecisionSet(std::move(mats));
    }
    if (!truth.positive_definite()) throw DataError("supplied precision matrices are not all positive definite");
    rep.json["diagnostics"] = to_json(diagnose(truth, c.diagnostics));
}

}  // namespace

AnalysisReport run_command(const RunConfig& config) {
    const auto start = std::chrono::steady_clock::now();
    AnalysisReport rep;
    rep.json = {{"tool", "jggl"}, {"version", kToolVersion}, {"report_format", kReportFormat}};
    rep.json["command"] = to_string(config.command);
    rep.json["config"] = to_json(config);

    auto fail = [&rep](int code, const std::string& what) {
        rep.exit_code = code;
        rep.message = what;
    };
    try {
        config.validate();
        switch (config.command) {
            case Command::estimate: cmd_estimate(config, rep); break;
            case Command::test: cmd_test(config, rep); break;
            case Command::tune: cmd_tune(config, rep); break;
            case Command::simulate: cmd_simulate(config, rep); break;
            case Command::diagnose: cmd_diagnose(config, rep); break;
        }
    } catch (const ConfigError& e) {
        fail(kExitConfig, e.what());
    } catch (const InvalidArgument& e) {
        fail(kExitConfig, e.what());
    } catch (const ConvergenceError& e) {
        fail(kExitNonConvergence, e.what());
    } catch (const Error& e) {
        fail(kExitData, e.what());
    } catch (const fs::filesystem_error& e) {
        fail(kExitConfig, e.what());
    } catch (const std::exception& e) {
        fail(kExitData, e.what());
    }

    rep.json["exit_code"] = rep.exit_code;
    rep.json["message"] = rep.message;
    rep.json["timings"] = {
        {"total_seconds", std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()}};
    json outputs = json::array();
    for (const auto& [name, _] : rep.files) outputs.push_back(name);
    rep.json["outputs"] = std::move(outputs);

    try {
        for (const auto& [name, content] : rep.files) write_file_atomic(config.out_dir / name, content);
        write_file_atomic(config.out_dir / "report.json", rep.json.dump(2) + "\n");
    } catch (const std::exception& e) {
        if (rep.exit_code == kExitOk) fail(kExitConfig, std::string("cannot write outputs: ") + e.what());
    }
    return rep;
}

}  // namespace jggl
