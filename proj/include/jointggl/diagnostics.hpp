#pragma once

#include <optional>
#include <vector>

#include "jointggl/ggl_solver.hpp"
#include "jointggl/inference.hpp"

namespace jggl {

/// Unordered off-diagonal support {(i, j) : i < j, |Omega_ij| > tol}.
struct EdgeSet {
    std::vector<Edge> pairs;   // sorted, i < j
    Eigen::Index p = 0;

    [[nodiscard]] std::size_t size() const noexcept { return pairs.size(); }
    [[nodiscard]] bool contains(Edge e) const;
    bool operator==(const EdgeSet&) const = default;
};

/// Exact-construction tolerance for recovering S from a true precision matrix.
inline constexpr double kTruthTolerance = 1e-12;

EdgeSet edge_set(const SymmetricMatrix& precision, double tol = kTruthTolerance);

/// Ordered vertex pair indexing one coordinate of vec(Omega).
struct IndexPair {
    Eigen::Index a = 0;
    Eigen::Index b = 0;
    bool operator==(const IndexPair&) const = default;
};

inline constexpr std::size_t kMaxHessianIndex = 20000;

/// [Sigma (x) Sigma] restricted to `index_set` on rows and columns:
/// entry ((a,b),(c,d)) = Sigma_ac * Sigma_bd. Never forms the p^2 x p^2 matrix.
Matrix restricted_hessian(const SymmetricMatrix& sigma, const std::vector<IndexPair>& index_set);

/// Ordered index set S of the Hessian restriction: both orientations of every
/// edge, plus the diagonal pairs (i, i) when `augment_diagonal` is set.
std::vector<IndexPair> support_index_set(const EdgeSet& edges, bool augment_diagonal = true);

/// All ordered pairs of V x V not in `support`.
std::vector<IndexPair> complement_index_set(Eigen::Index p, const std::vector<IndexPair>& support);

struct IrrepresentabilityDetail {
    double alpha = 1.0;                 // 1 - max_{e in S^c} ||Gamma_eS Gamma_SS^{-1}||_1
    double kappa_gamma = 0.0;           // |||Gamma_SS^{-1}|||_inf
    std::vector<double> row_l1;         // per e in S^c
    std::vector<double> row_sum;        // Gamma_eS Gamma_SS^{-1} 1, per e in S^c
    std::vector<IndexPair> support;
    std::vector<IndexPair> complement;
};

/// Full irrepresentability computation for one population.
IrrepresentabilityDetail irrepresentability_detail(const SymmetricMatrix& precision, double tol = kTruthTolerance,
                                                   bool augment_diagonal = true);

/// alpha of the irrepresentability condition; positive means it holds.
double check_irrepresentability(const SymmetricMatrix& precision, double tol = kTruthTolerance,
                                bool augment_diagonal = true);

struct BetweenGroupResult {
    double lhs = 0.0;
    double rhs = 0.0;
    bool holds = false;
};

/// Between-group irrepresentability. All populations must share one support.
BetweenGroupResult check_between_group(const PrecisionSet& precisions, const PenaltyPair& penalty, double psi,
                                       double alpha, double tol = kTruthTolerance, bool augment_diagonal = true);

/// Sufficient condition under which irrepresentability implies the between-group condition.
bool irrepresentability_implies_between_group(double alpha, const PenaltyPair& penalty, double psi, std::size_t K);

/// delta_f(n, p^gamma) = 8 (1 + 12 K1^2) max_diag sqrt(2 log(4 p^gamma) / n).
double rate_delta(std::int64_t n, Eigen::Index p, double gamma, double k1, double max_diag);

struct GraphStats {
    Eigen::Index max_degree = 0;
    std::int64_t edge_count = 0;
    std::optional<double> omega_min;    // absent without off-diagonal nonzeros
    double eigen_min = 0.0;
    double eigen_max = 0.0;
    std::vector<Eigen::Index> degrees;
};

GraphStats graph_stats(const SymmetricMatrix& precision, double tol = kTruthTolerance);

/// Max absolute row sum |||A|||_inf.
double inf_operator_norm(const Matrix& a);

struct DiagnosticsOptions {
    double tol = kTruthTolerance;
    bool augment_diagonal = true;
    std::optional<PenaltyPair> penalty;     // required for the between-group check
    double psi = 0.5;
    std::optional<double> eigen_floor;      // L of the bounded-eigenvalue assumption
    std::vector<std::int64_t> sample_sizes; // optional, enables the sample-size checks
    double gamma = 2.5;                     // tail exponent, must exceed 2
    double k1 = 1.0;                        // sub-Gaussian constant
};

struct PopulationDiagnostics {
    double kappa_sigma = 0.0;
    double kappa_gamma = 0.0;
    double alpha_irr = 1.0;
    GraphStats stats;
    std::optional<double> delta;            // rate_delta at n_k, when n_k known
    std::optional<double> sample_size_advisory;
};

struct DiagnosticsReport {
    std::vector<PopulationDiagnostics> populations;
    double alpha_irr = 1.0;                 // min over populations
    bool shared_support = true;
    std::optional<BetweenGroupResult> between_group;
    std::optional<double> theoretical_penalty_sum;   // (8 / alpha) max_k delta_k
    std::vector<double> sample_size_ratios;          // n / n_k, n = min n_k
    bool irrepresentable = false;
    std::optional<bool> between_group_holds;
    std::optional<bool> eigenvalues_bounded;
    std::optional<bool> sample_sizes_comparable;
};

DiagnosticsReport diagnose(const PrecisionSet& truth, const DiagnosticsOptions& opts = {});

}  // namespace jggl
