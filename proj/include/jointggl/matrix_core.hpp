#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "jointggl/errors.hpp"

namespace jggl {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Dense p x p matrix that is exactly symmetric.
///
/// Construction from a dense matrix accepts asymmetry up to a small relative
/// tolerance (round-off from products) and then averages with the transpose,
/// so entries(i, j) == entries(j, i) holds bit-for-bit afterwards.
class SymmetricMatrix {
public:
    SymmetricMatrix() = default;
    explicit SymmetricMatrix(Matrix m, double tolerance = 1e-9);

    static SymmetricMatrix identity(Eigen::Index p);
    static SymmetricMatrix zero(Eigen::Index p);
    static SymmetricMatrix diagonal(const Vector& d);
    /// Averages m with its transpose, no tolerance check.
    static SymmetricMatrix symmetrize(const Matrix& m);

    [[nodiscard]] Eigen::Index dim() const noexcept { return m_.rows(); }
    [[nodiscard]] double operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }
    [[nodiscard]] const Matrix& dense() const noexcept { return m_; }

    /// Maximum absolute entry (the elementwise sup-norm).
    [[nodiscard]] double max_abs() const { return m_.cwiseAbs().maxCoeff(); }

    bool operator==(const SymmetricMatrix& other) const { return m_ == other.m_; }

private:
    Matrix m_;
};

/// Matrices of common dimension, one per population.
class PrecisionSet {
public:
    PrecisionSet() = default;
    explicit PrecisionSet(std::vector<SymmetricMatrix> matrices);

    [[nodiscard]] std::size_t size() const noexcept { return matrices_.size(); }
    [[nodiscard]] Eigen::Index dim() const noexcept { return matrices_.empty() ? 0 : matrices_.front().dim(); }
    [[nodiscard]] const SymmetricMatrix& operator[](std::size_t k) const { return matrices_.at(k); }
    [[nodiscard]] const std::vector<SymmetricMatrix>& matrices() const noexcept { return matrices_; }

    /// True when every matrix admits a Cholesky factorization.
    [[nodiscard]] bool positive_definite() const;

private:
    std::vector<SymmetricMatrix> matrices_;
};

/// Sample covariances with their sample sizes n_k.
class CovarianceSet {
public:
    CovarianceSet() = default;
    CovarianceSet(std::vector<SymmetricMatrix> matrices, std::vector<std::int64_t> sample_sizes);

    [[nodiscard]] std::size_t size() const noexcept { return matrices_.size(); }
    [[nodiscard]] Eigen::Index dim() const noexcept { return matrices_.empty() ? 0 : matrices_.front().dim(); }
    [[nodiscard]] const SymmetricMatrix& operator[](std::size_t k) const { return matrices_.at(k); }
    [[nodiscard]] const std::vector<SymmetricMatrix>& matrices() const noexcept { return matrices_; }
    [[nodiscard]] const std::vector<std::int64_t>& sample_sizes() const noexcept { return sample_sizes_; }
    /// min_k n_k.
    [[nodiscard]] std::int64_t min_sample_size() const;

    /// True when every diagonal entry of every matrix is strictly positive.
    [[nodiscard]] bool has_positive_diagonal() const;

private:
    std::vector<SymmetricMatrix> matrices_;
    std::vector<std::int64_t> sample_sizes_;
};

/// Observations (rows) for each population; common column count p.
struct MultiPopDataset {
    std::vector<Matrix> data;
    std::vector<std::string> variable_names;  // empty or exactly p labels

    [[nodiscard]] std::size_t populations() const noexcept { return data.size(); }
    [[nodiscard]] Eigen::Index dim() const noexcept { return data.empty() ? 0 : data.front().cols(); }
    /// Throws DimensionError / DataError when the invariants do not hold.
    void validate() const;
};

/// Sigma_k = X_k^T X_k / n_k, optionally after mean-centering the columns.
CovarianceSet sample_covariance(const MultiPopDataset& data, bool center = false);

/// n i.i.d. rows from N(0, precision^{-1}). Bit-identical for equal inputs.
Matrix draw_mvn(const SymmetricMatrix& precision, Eigen::Index n, std::uint64_t seed);

/// Draws one dataset with population k from stream population_seed(seed, k).
MultiPopDataset draw_populations(const PrecisionSet& precisions, const std::vector<std::int64_t>& sample_sizes,
                                 std::uint64_t seed);

/// Inverse of a positive-definite matrix through its Cholesky factor.
SymmetricMatrix invert_pd(const SymmetricMatrix& m);

/// log det of a positive-definite matrix; throws NotPositiveDefinite otherwise.
double log_det_pd(const SymmetricMatrix& m);

/// Cholesky success test.
bool is_positive_definite(const SymmetricMatrix& m);

/// Extreme eigenvalues (min, max).
std::pair<double, double> eigen_bounds(const SymmetricMatrix& m);

}  // namespace jggl
