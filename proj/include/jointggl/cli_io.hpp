#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "jointggl/diagnostics.hpp"
#include "jointggl/experiments.hpp"
#include "jointggl/ggl_solver.hpp"
#include "jointggl/inference.hpp"
#include "jointggl/selection.hpp"

namespace jggl {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kReportFormat = 1;

enum ExitCode : int { kExitOk = 0, kExitConfig = 1, kExitData = 2, kExitNonConvergence = 3 };

struct IngestOptions {
    std::optional<bool> header;   // nullopt: detect from the first row
    bool center = false;
    bool standardize = false;     // divide each column by its sample sd (n - 1)
    bool first_difference = false;
};

/// Numeric table with optional column names. `source` labels error messages.
struct CsvTable {
    Matrix values;
    std::vector<std::string> names;
};

CsvTable read_csv(std::istream& in, const std::string& source, std::optional<bool> header = std::nullopt);
CsvTable read_csv_file(const std::filesystem::path& path, std::optional<bool> header = std::nullopt);

/// Applies first-difference, centering and standardization in that order.
Matrix preprocess(Matrix x, const IngestOptions& opts, const std::string& source = "data");

/// One file per population; column counts must agree.
MultiPopDataset ingest_csv(const std::vector<std::filesystem::path>& paths, const IngestOptions& opts = {});

void write_matrix_csv(std::ostream& os, const Matrix& m, const std::vector<std::string>& names = {});

/// Writes through a temporary sibling file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

/// Parses "i-j" or "i,j" pairs joined by ';' or whitespace, one-based.
std::vector<Edge> parse_edge_list(const std::string& text);

// JSON conversions for report payloads.
nlohmann::json matrix_json(const Matrix& m);
nlohmann::json to_json(const SolveReport& r);
nlohmann::json to_json(const EdgeTestResult& r);
nlohmann::json to_json(const ConfidenceIntervalResult& r);
nlohmann::json to_json(const TuningResult& r);
nlohmann::json to_json(const DiagnosticsReport& r);
nlohmann::json to_json(const ExperimentConfig& c);
nlohmann::json to_json(const ExperimentResult& r);

enum class Command { estimate, test, tune, simulate, diagnose };

const char* to_string(Command c);

struct RunConfig {
    Command command = Command::estimate;
    std::filesystem::path out_dir = ".";
    std::uint64_t seed = 20240101;
    int threads = 1;
    int verbosity = 0;

    // estimate / test / tune
    std::vector<std::filesystem::path> data_paths;
    IngestOptions ingest;
    std::optional<double> lambda;     // explicit penalties win over constants
    std::optional<double> rho;
    std::optional<double> c1;
    std::optional<double> c2;
    TuningGrid grid;
    SolverOptions solver;
    bool debias = true;

    // test
    std::vector<Edge> edges;          // zero-based
    std::vector<double> coefficients; // one per population
    double alpha = 0.05;
    double hypothesized = 0.0;
    double ci_level = 0.95;

    // simulate
    std::string experiment = "consistency";   // or tpfp, supnorm, normality, coverage, dataset
    ExperimentConfig simulation;

    // diagnose
    std::vector<std::filesystem::path> precision_paths;   // empty: build from simulation.graph
    DiagnosticsOptions diagnostics;

    void validate() const;
};

struct AnalysisReport {
    nlohmann::json json;
    int exit_code = kExitOk;
    std::string message;
    std::map<std::string, std::string> files;   // output name -> content, also written to out_dir
};

nlohmann::json to_json(const RunConfig& c);

/// Runs one command, writes report.json plus the CSV tables into out_dir and
/// returns the report. Library errors map onto exit codes; nothing escapes.
AnalysisReport run_command(const RunConfig& config);

}  // namespace jggl
