#include <doctest.h>

#include <fstream>
#include <sstream>

#include "jointggl/cli_io.hpp"

#ifdef JGGL_HAVE_CLI
#include "../tools/cli_app.hpp"
#endif

using namespace jggl;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
    const fs::path d = fs::temp_directory_path() / ("jggl_unit_" + name);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

void write_text(const fs::path& p, const std::string& text) {
    std::ofstream(p) << text;
}

std::string read_text(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

#ifdef JGGL_HAVE_CLI
int cli(std::vector<std::string> args) {
    args.insert(args.begin(), "jggl");
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    std::ostringstream out, err;
    return run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
}
#endif

}  // namespace

TEST_CASE("csv parsing with and without headers") {
    std::istringstream with("a,b,c\n1,2,3\n4,5,6\n");
    const auto t = read_csv(with, "with");
    CHECK(t.names == std::vector<std::string>{"a", "b", "c"});
    CHECK(t.values.rows() == 2);
    CHECK(t.values(1, 2) == 6.0);

    std::istringstream without("1,2\n3.5,-4e-3\n");
    const auto u = read_csv(without, "without");
    CHECK(u.names.empty());
    CHECK(u.values(1, 1) == -4e-3);

    std::istringstream ragged("1,2\n3\n");
    CHECK_THROWS_AS(read_csv(ragged, "ragged"), DataError);
    std::istringstream text("1,2\n3,abc\n");
    try {
        read_csv(text, "text.csv");
        FAIL("expected a DataError");
    } catch (const DataError& e) {
        const std::string what = e.what();
        CHECK(what.find("text.csv") != std::string::npos);
        CHECK(what.find('2') != std::string::npos);
    }
    std::istringstream empty("");
    CHECK_THROWS_AS(read_csv(empty, "empty"), DataError);
}

TEST_CASE("preprocessing") {
    Matrix x(5, 2);
    x << 1, 10, 2, 12, 4, 11, 8, 15, 16, 13;
    IngestOptions o;
    o.standardize = true;
    const Matrix s = preprocess(x, o);
    for (Eigen::Index c = 0; c < 2; ++c) {
        CHECK(std::abs(s.col(c).mean()) < 1e-12);
        CHECK(std::abs(s.col(c).squaredNorm() / 4.0 - 1.0) < 1e-10);
    }
    IngestOptions d;
    d.first_difference = true;
    const Matrix diff = preprocess(x, d);
    CHECK(diff.rows() == 4);
    CHECK(diff(3, 0) == 8.0);

    Matrix constant = Matrix::Ones(4, 2);
    CHECK_THROWS_AS(preprocess(constant, o), DataError);
}

TEST_CASE("ingest checks column agreement") {
    const auto dir = scratch_dir("ingest");
    write_text(dir / "a.csv", "x,y,z\n1,2,3\n2,3,5\n0,1,1\n");
    write_text(dir / "b.csv", "x,y,z\n4,2,1\n1,1,1\n2,0,3\n");
    write_text(dir / "c.csv", "x,y\n1,2\n");
    const auto ds = ingest_csv({dir / "a.csv", dir / "b.csv"});
    CHECK(ds.dim() == 3);
    CHECK(ds.variable_names == std::vector<std::string>{"x", "y", "z"});
    CHECK_THROWS_AS(ingest_csv({dir / "a.csv", dir / "c.csv"}), DataError);
}

TEST_CASE("edge list parsing") {
    const auto e = parse_edge_list("1-2; 3,2 ;4-4");
    REQUIRE(e.size() == 3);
    CHECK(e[0] == Edge{0, 1});
    CHECK(e[1] == Edge{1, 2});
    CHECK(e[2] == Edge{3, 3});
    CHECK_THROWS(parse_edge_list("0-1"));
    CHECK_THROWS(parse_edge_list("1-x"));
}

TEST_CASE("matrix csv round-trips exactly") {
    Matrix m(2, 2);
    m << 0.1, 1.0 / 3.0, -2e-300, 12345.678901234567;
    std::ostringstream os;
    write_matrix_csv(os, m, {"a", "b"});
    std::istringstream in(os.str());
    const auto t = read_csv(in, "rt");
    CHECK(t.values == m);
}

TEST_CASE("estimate without penalty on a diagonal covariance reports its inverse") {
    const auto dir = scratch_dir("mle");
    // Rows (+-a, 0), (0, +-b) give the diagonal covariance diag(a^2/2, b^2/2).
    write_text(dir / "d.csv", "u,v\n2,0\n-2,0\n0,1\n0,-1\n");
    RunConfig c;
    c.command = Command::estimate;
    c.data_paths = {dir / "d.csv"};
    c.lambda = 0.0;
    c.rho = 0.0;
    c.out_dir = dir / "out";
    const auto rep = run_command(c);
    REQUIRE(rep.exit_code == kExitOk);
    const auto est = rep.json["solve"]["estimate"][0];
    CHECK(est[0][0].get<double>() == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(est[1][1].get<double>() == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(std::abs(est[0][1].get<double>()) < 1e-8);
    CHECK(fs::exists(dir / "out" / "report.json"));
    CHECK(fs::exists(dir / "out" / "estimate_k1.csv"));
}

TEST_CASE("run_command maps failures onto exit codes") {
    const auto dir = scratch_dir("codes");
    RunConfig c;
    c.command = Command::estimate;
    c.out_dir = dir;
    CHECK(run_command(c).exit_code == kExitConfig);
    c.data_paths = {dir / "missing.csv"};
    CHECK(run_command(c).exit_code == kExitConfig);
    write_text(dir / "bad.csv", "1,2\n3\n");
    c.data_paths = {dir / "bad.csv"};
    CHECK(run_command(c).exit_code == kExitData);

    write_text(dir / "ok.csv", "1,2\n3,1\n0,2\n5,5\n");
    c.data_paths = {dir / "ok.csv"};
    c.lambda = 0.01;
    c.rho = 0.01;
    c.solver.max_iter = 1;
    CHECK(run_command(c).exit_code == kExitNonConvergence);
}

TEST_CASE("identical population files give unit p-values") {
    const auto dir = scratch_dir("ident");
    RunConfig gen;
    gen.command = Command::simulate;
    gen.experiment = "dataset";
    gen.simulation.dims = {8};
    gen.simulation.sample_sizes = {150};
    gen.seed = 17;
    gen.out_dir = dir / "ds";
    REQUIRE(run_command(gen).exit_code == kExitOk);

    RunConfig t;
    t.command = Command::test;
    t.data_paths = {dir / "ds" / "population_k1.csv", dir / "ds" / "population_k1.csv"};
    t.edges = parse_edge_list("1-2;2-3;1-5");
    t.out_dir = dir / "t";
    const auto rep = run_command(t);
    REQUIRE(rep.exit_code == kExitOk);
    for (const auto& row : rep.json["tests"]) CHECK(row["p_value"].get<double>() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("dataset round trip reproduces the library estimate") {
    const auto dir = scratch_dir("roundtrip");
    RunConfig gen;
    gen.command = Command::simulate;
    gen.experiment = "dataset";
    gen.simulation.dims = {10};
    gen.simulation.sample_sizes = {200};
    gen.seed = 23;
    gen.out_dir = dir / "ds";
    REQUIRE(run_command(gen).exit_code == kExitOk);

    const auto truth = make_truth(gen.simulation.graph, 10);
    const auto direct = draw_populations(truth, {200, 200}, 23);
    const auto ingested = ingest_csv({dir / "ds" / "population_k1.csv", dir / "ds" / "population_k2.csv"});
    CHECK(ingested.data[0] == direct.data[0]);
    CHECK(ingested.data[1] == direct.data[1]);

    RunConfig est;
    est.command = Command::estimate;
    est.data_paths = {dir / "ds" / "population_k1.csv", dir / "ds" / "population_k2.csv"};
    est.c1 = 0.4;
    est.c2 = 0.4;
    est.out_dir = dir / "est";
    REQUIRE(run_command(est).exit_code == kExitOk);
    const auto covs = sample_covariance(direct);
    const auto fit = solve_ggl(covs, penalties_from_constants(0.4, 0.4, 10, 200));
    std::ostringstream os;
    write_matrix_csv(os, fit.estimate[0].dense(), ingested.variable_names);
    CHECK(read_text(dir / "est" / "estimate_k1.csv") == os.str());
}

#ifdef JGGL_HAVE_CLI
TEST_CASE("cli simulate output equals the library call") {
    const auto dir = scratch_dir("cli_sim");
    REQUIRE(cli({"--seed", "7", "--out-dir", (dir / "a").string(), "simulate", "consistency", "--graph", "chain",
                 "--p", "12", "--n", "200,400", "--B", "4"}) == kExitOk);
    ExperimentConfig c;
    c.dims = {12};
    c.sample_sizes = {200, 400};
    c.replications = 4;
    c.base_seed = 7;
    std::ostringstream os;
    write_result_csv(os, run_sign_consistency(c));
    CHECK(read_text(dir / "a" / "consistency.csv") == os.str());
    CHECK(fs::exists(dir / "a" / "config.ini"));

    // The echoed config reruns the command identically.
    REQUIRE(cli({"--config", (dir / "a" / "config.ini").string(), "--out-dir", (dir / "b").string()}) == kExitOk);
    CHECK(read_text(dir / "b" / "consistency.csv") == os.str());
}

TEST_CASE("cli parse errors") {
    CHECK(cli({"simulate", "nonsense"}) == kExitConfig);
    CHECK(cli({"estimate"}) == kExitConfig);
    CHECK(cli({"--version"}) == kExitOk);
}
#endif
