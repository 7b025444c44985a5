#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "jointggl/ggl_solver.hpp"
#include "jointggl/inference.hpp"
#include "jointggl/selection.hpp"

namespace jggl {

/// tridiag(rho, 1, rho). Throws NotPositiveDefinite when the result is not PD.
SymmetricMatrix chain_precision(Eigen::Index p, double rho);

struct StarGraph {
    SymmetricMatrix precision;
    Eigen::Index hub = 0;
    std::vector<Eigen::Index> spokes;   // sorted
};

/// One hub joined to d spokes, both drawn from `hub_seed`. The same seed and p
/// give the same support whatever diag/offdiag are.
StarGraph star_precision(Eigen::Index p, Eigen::Index d, double diag, double offdiag, std::uint64_t hub_seed);

enum class GraphKind { chain, star };

struct GraphSpec {
    GraphKind kind = GraphKind::chain;
    std::vector<double> chain_rho{0.2, 0.35};
    Eigen::Index star_degree = 25;
    std::vector<double> star_diag{2.0, 2.5};
    std::vector<double> star_offdiag{0.3, 0.45};
    std::uint64_t hub_seed = 1;

    [[nodiscard]] std::size_t populations() const;
    void validate() const;
};

/// True precision set of `spec` at dimension p.
PrecisionSet make_truth(const GraphSpec& spec, Eigen::Index p);

/// Edges used for the normality illustration, zero-based.
std::vector<Edge> default_normality_edges(GraphKind kind, Eigen::Index p);

enum class PenaltyRule { ebic_grid, fixed };

struct ExperimentConfig {
    GraphSpec graph;
    std::vector<std::int64_t> sample_sizes{200, 300, 400, 500, 600, 700};
    std::vector<Eigen::Index> dims{50};
    int replications = 100;
    std::uint64_t base_seed = 20240101;
    PenaltyRule penalty_rule = PenaltyRule::ebic_grid;
    TuningGrid grid;
    double fixed_c1 = 0.4;
    double fixed_c2 = 0.4;
    bool retune_each_replication = false;
    double alpha_level = 0.05;
    std::vector<Edge> edges_of_interest;   // zero-based; empty means the graph's defaults
    SolverOptions solver;
    int threads = 1;

    void validate() const;
};

/// Penalty constants used in one (p, n) cell.
struct CellPenalty {
    double c1 = 0.0;
    double c2 = 0.0;
    bool tuned = false;
};

struct ConsistencyCell {
    Eigen::Index p = 0;
    std::int64_t n = 0;
    int replications = 0;
    int successes = 0;
    int nonconverged = 0;
    double fraction = 0.0;
    CellPenalty penalty;
};

struct TpFpCell {
    Eigen::Index p = 0;
    std::int64_t n = 0;
    int replications = 0;
    int nonconverged = 0;
    double mean_tp = 0.0;
    double mean_fp = 0.0;
    std::int64_t true_edges = 0;
    CellPenalty penalty;
};

struct SupNormCell {
    Eigen::Index p = 0;
    std::int64_t n = 0;
    std::size_t k = 0;
    int used = 0;
    int excluded = 0;
    double mean_supnorm = 0.0;
    CellPenalty penalty;
};

struct SampleSummary {
    std::size_t count = 0;
    double mean = 0.0;
    double variance = 0.0;   // unbiased; 0 for a single sample
    double ks_statistic = 0.0;
    double ks_pvalue = 1.0;
    double reject_rate = 0.0;   // fraction with |value| > z_{alpha/2}
};

/// Standardized statistics for one edge; population == nullopt marks the pooled T.
struct NormalitySeries {
    Eigen::Index p = 0;
    std::int64_t n = 0;
    Edge edge;
    std::optional<std::size_t> population;
    std::vector<double> values;
    std::optional<SampleSummary> summary;   // absent when fewer than 2 samples

    [[nodiscard]] std::string label() const;
};

struct CoverageCell {
    Eigen::Index p = 0;
    std::int64_t n = 0;
    bool on_support = true;   // S when true, S^c otherwise
    std::size_t k = 0;
    std::size_t entries = 0;  // |A|
    int used = 0;
    int excluded = 0;
    double coverage = 0.0;
    double length = 0.0;
    CellPenalty penalty;
};

enum class ExperimentKind { consistency, tpfp, supnorm, normality, coverage };

const char* to_string(ExperimentKind kind);

struct ExperimentResult {
    ExperimentKind kind = ExperimentKind::consistency;
    ExperimentConfig config;
    std::vector<ConsistencyCell> consistency;
    std::vector<TpFpCell> tpfp;
    std::vector<SupNormCell> supnorm;
    std::vector<NormalitySeries> normality;
    std::vector<CoverageCell> coverage;
    std::vector<std::uint64_t> replication_seeds;
};

ExperimentResult run_sign_consistency(const ExperimentConfig& config);
ExperimentResult run_tpfp(const ExperimentConfig& config);
ExperimentResult run_supnorm(const ExperimentConfig& config);
ExperimentResult run_normality(const ExperimentConfig& config);
ExperimentResult run_coverage(const ExperimentConfig& config);
ExperimentResult run_experiment(ExperimentKind kind, const ExperimentConfig& config);

/// Signed support agreement between an estimate and the truth, entries with
/// |x| <= edge_tol counted as zero.
bool signs_match(const SymmetricMatrix& estimate, const SymmetricMatrix& truth, double edge_tol);

/// Kolmogorov-Smirnov distance to N(0, 1) and its asymptotic p-value.
std::pair<double, double> ks_test_normal(std::vector<double> values);

SampleSummary summarize(const std::vector<double>& values, double alpha_level);

/// One CSV row per aggregate cell; normality results give (label, value) rows.
void write_result_csv(std::ostream& os, const ExperimentResult& result);

/// Per-series summary for normality results.
void write_normality_summary_csv(std::ostream& os, const ExperimentResult& result);

std::string format_number(double x);

}  // namespace jggl
