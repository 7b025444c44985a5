#include "jointggl/matrix_core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "jointggl/rng.hpp"

namespace jggl {

SymmetricMatrix::SymmetricMatrix(Matrix m, double tolerance) : m_(std::move(m)) {
    if (m_.rows() != m_.cols()) {
        std::ostringstream msg;
        msg << "symmetric matrix must be square, got " << m_.rows() << "x" << m_.cols();
        throw DimensionError(msg.str());
    }
    if (m_.rows() < 1) throw DimensionError("symmetric matrix must have dimension >= 1");
    if (!m_.allFinite()) throw DataError("symmetric matrix has non-finite entries");
    const double scale = std::max(1.0, m_.cwiseAbs().maxCoeff());
    const double asym = (m_ - m_.transpose()).cwiseAbs().maxCoeff();
    if (asym > tolerance * scale) {
        std::ostringstream msg;
        msg << "matrix is not symmetric (max |A - A^T| = " << asym << ")";
        throw InvalidArgument(msg.str());
    }
    m_ = 0.5 * (m_ + m_.transpose()).eval();
}

SymmetricMatrix SymmetricMatrix::identity(Eigen::Index p) { return SymmetricMatrix(Matrix::Identity(p, p)); }

SymmetricMatrix SymmetricMatrix::zero(Eigen::Index p) { return SymmetricMatrix(Matrix::Zero(p, p)); }

SymmetricMatrix SymmetricMatrix::diagonal(const Vector& d) { return SymmetricMatrix(Matrix(d.asDiagonal())); }

SymmetricMatrix SymmetricMatrix::symmetrize(const Matrix& m) {
    if (m.rows() != m.cols()) throw DimensionError("symmetrize: matrix must be square");
    return SymmetricMatrix(Matrix(0.5 * (m + m.transpose())), 0.0);
}

PrecisionSet::PrecisionSet(std::vector<SymmetricMatrix> matrices) : matrices_(std::move(matrices)) {
    if (matrices_.empty()) throw DimensionError("precision set needs at least one population");
    for (const auto& m : matrices_) {
        if (m.dim() != matrices_.front().dim()) throw DimensionError("precision matrices differ in dimension");
    }
}

bool PrecisionSet::positive_definite() const {
    return std::all_of(matrices_.begin(), matrices_.end(), [](const auto& m) { return is_positive_definite(m); });
}

CovarianceSet::CovarianceSet(std::vector<SymmetricMatrix> matrices, std::vector<std::int64_t> sample_sizes)
    : matrices_(std::move(matrices)), sample_sizes_(std::move(sample_sizes)) {
    if (matrices_.empty()) throw DimensionError("covariance set needs at least one population");
    if (matrices_.size() != sample_sizes_.size()) {
        throw DimensionError("covariance set: one sample size per population required");
    }
    for (const auto& m : matrices_) {
        if (m.dim() != matrices_.front().dim()) throw DimensionError("covariance matrices differ in dimension");
    }
    for (auto n : sample_sizes_) {
        if (n < 1) throw InvalidArgument("sample sizes must be positive");
    }
}

std::int64_t CovarianceSet::min_sample_size() const {
    return *std::min_element(sample_sizes_.begin(), sample_sizes_.end());
}

bool CovarianceSet::has_positive_diagonal() const {
    return std::all_of(matrices_.begin(), matrices_.end(),
                       [](const auto& m) { return (m.dense().diagonal().array() > 0.0).all(); });
}

void MultiPopDataset::validate() const {
    if (data.empty()) throw DimensionError("dataset has no populations");
    const auto p = data.front().cols();
    if (p < 1) throw DimensionError("dataset has no variables");
    for (std::size_t k = 0; k < data.size(); ++k) {
        if (data[k].cols() != p) {
            std::ostringstream msg;
            msg << "population " << k + 1 << " has " << data[k].cols() << " columns, expected " << p;
            throw DimensionError(msg.str());
        }
        if (data[k].rows() < 2) {
            std::ostringstream msg;
            msg << "population " << k + 1 << " has " << data[k].rows() << " observations; at least 2 required";
            throw DataError(msg.str());
        }
    }
    if (!variable_names.empty() && static_cast<Eigen::Index>(variable_names.size()) != p) {
        throw DimensionError("variable_names must have one label per column");
    }
}

CovarianceSet sample_covariance(const MultiPopDataset& data, bool center) {
    data.validate();
    std::vector<SymmetricMatrix> covs;
    std::vector<std::int64_t> sizes;
    covs.reserve(data.populations());
    for (const auto& x : data.data) {
        const auto n = x.rows();
        Matrix s;
        if (center) {
            const Matrix xc = x.rowwise() - x.colwise().mean();
            s = xc.transpose() * xc / static_cast<double>(n);
        } else {
            s = x.transpose() * x / static_cast<double>(n);
        }
        covs.push_back(SymmetricMatrix::symmetrize(s));
        sizes.push_back(static_cast<std::int64_t>(n));
    }
    return {std::move(covs), std::move(sizes)};
}

Matrix draw_mvn(const SymmetricMatrix& precision, Eigen::Index n, std::uint64_t seed) {
    if (n < 0) throw InvalidArgument("draw_mvn: negative sample count");
    const Eigen::LLT<Matrix> llt(precision.dense());
    if (llt.info() != Eigen::Success) throw NotPositiveDefinite("draw_mvn: precision matrix is not positive definite");
    const auto p = precision.dim();
    Rng rng(seed);
    // Column r of z is observation r; fill observation by observation.
    Matrix z(p, n);
    for (Eigen::Index r = 0; r < n; ++r) {
        for (Eigen::Index j = 0; j < p; ++j) z(j, r) = rng.normal();
    }
    // Omega = L L^T, so x = L^{-T} z has covariance Omega^{-1}.
    const Matrix x = llt.matrixU().solve(z);
    return x.transpose();
}

MultiPopDataset draw_populations(const PrecisionSet& precisions, const std::vector<std::int64_t>& sample_sizes,
                                 std::uint64_t seed) {
    if (precisions.size() != sample_sizes.size()) throw DimensionError("one sample size per population required");
    MultiPopDataset out;
    for (std::size_t k = 0; k < precisions.size(); ++k) {
        out.data.push_back(draw_mvn(precisions[k], sample_sizes[k], population_seed(seed, k)));
    }
    return out;
}

SymmetricMatrix invert_pd(const SymmetricMatrix& m) {
    const Eigen::LLT<Matrix> llt(m.dense());
    if (llt.info() != Eigen::Success) throw NotPositiveDefinite("invert_pd: matrix is not positive definite");
    const Matrix inv = llt.solve(Matrix::Identity(m.dim(), m.dim()));
    return SymmetricMatrix::symmetrize(inv);
}

double log_det_pd(const SymmetricMatrix& m) {
    const Eigen::LLT<Matrix> llt(m.dense());
    if (llt.info() != Eigen::Success) throw NotPositiveDefinite("log_det: matrix is not positive definite");
    return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

bool is_positive_definite(const SymmetricMatrix& m) {
    const Eigen::LLT<Matrix> llt(m.dense());
    return llt.info() == Eigen::Success && (llt.matrixLLT().diagonal().array() > 0.0).all();
}

std::pair<double, double> eigen_bounds(const SymmetricMatrix& m) {
    const Eigen::SelfAdjointEigenSolver<Matrix> es(m.dense(), Eigen::EigenvaluesOnly);
    return {es.eigenvalues().minCoeff(), es.eigenvalues().maxCoeff()};
}

}  // namespace jggl
