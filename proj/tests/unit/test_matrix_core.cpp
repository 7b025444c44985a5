#include <doctest.h>

#include "jointggl/matrix_core.hpp"
#include "jointggl/rng.hpp"
#include "oracles.hpp"

using namespace jggl;

namespace {

SymmetricMatrix tridiag(Eigen::Index p, double rho) {
    Matrix m = Matrix::Identity(p, p);
    for (Eigen::Index i = 0; i + 1 < p; ++i) m(i, i + 1) = m(i + 1, i) = rho;
    return SymmetricMatrix(m);
}

}  // namespace

TEST_CASE("rng streams are reproducible and distinct") {
    Rng a(42), b(42), c(43);
    for (int i = 0; i < 100; ++i) {
        const auto x = a.next_u64();
        CHECK(x == b.next_u64());
        (void)c.next_u64();
    }
    Rng d(42), e(43);
    int same = 0;
    for (int i = 0; i < 100; ++i) same += d.next_u64() == e.next_u64();
    CHECK(same == 0);
    CHECK(population_seed(10, 3) == (10u ^ 3u));
    CHECK(replication_seed(1, 0) != replication_seed(1, 1));
}

TEST_CASE("rng uniform and normal moments") {
    Rng r(5);
    double su = 0, sz = 0, sz2 = 0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double u = r.uniform();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        su += u;
        const double z = r.normal();
        sz += z;
        sz2 += z * z;
    }
    CHECK(su / n == doctest::Approx(0.5).epsilon(0.01));
    CHECK(std::abs(sz / n) < 0.01);
    CHECK(sz2 / n == doctest::Approx(1.0).epsilon(0.01));
    for (int i = 0; i < 1000; ++i) CHECK(r.below(7) < 7u);
}

TEST_CASE("symmetric matrix construction") {
    Matrix m(2, 2);
    m << 1.0, 0.5, 0.5 + 1e-13, 2.0;
    const SymmetricMatrix s(m);
    CHECK(s(0, 1) == s(1, 0));
    Matrix bad(2, 2);
    bad << 1.0, 0.5, 0.0, 1.0;
    CHECK_THROWS_AS(SymmetricMatrix{bad}, InvalidArgument);
    CHECK_THROWS_AS(SymmetricMatrix{Matrix(2, 3)}, DimensionError);
}

TEST_CASE("sample covariance small cases") {
    MultiPopDataset d;
    Matrix x(2, 2);
    x << 1, 0, -1, 0;
    d.data = {x};
    const auto s = sample_covariance(d);
    Matrix expect(2, 2);
    expect << 1, 0, 0, 0;
    CHECK(s[0].dense() == expect);
    CHECK(s.sample_sizes()[0] == 2);

    d.data = {Matrix::Zero(5, 3)};
    CHECK(sample_covariance(d)[0].dense() == Matrix::Zero(3, 3));

    d.data = {Matrix::Zero(5, 3), Matrix::Zero(5, 4)};
    CHECK_THROWS_AS(d.validate(), DimensionError);
}

TEST_CASE("sample covariance of chain draws") {
    const auto omega = tridiag(5, 0.2);
    MultiPopDataset d;
    d.data = {draw_mvn(omega, 100000, 11)};
    const auto s = sample_covariance(d);
    const Matrix sigma = omega.dense().inverse();
    CHECK((s[0].dense() - sigma).cwiseAbs().maxCoeff() < 0.02);
}

TEST_CASE("sample covariance is symmetric PSD on random inputs") {
    Rng r(3);
    for (int t = 0; t < 20; ++t) {
        const Eigen::Index p = 2 + static_cast<Eigen::Index>(r.below(8));
        const Eigen::Index n = 1 + static_cast<Eigen::Index>(r.below(12));
        Matrix x(n, p);
        for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = r.normal();
        MultiPopDataset d;
        d.data = {x};
        const auto s = sample_covariance(d, t % 2 == 0);
        CHECK(s[0].dense() == s[0].dense().transpose());
        const Eigen::SelfAdjointEigenSolver<Matrix> es(s[0].dense());
        CHECK(es.eigenvalues().minCoeff() >= -1e-10);
    }
}

TEST_CASE("draw_mvn determinism and variances") {
    const auto id = SymmetricMatrix::identity(3);
    CHECK(draw_mvn(id, 50, 9) == draw_mvn(id, 50, 9));
    CHECK(draw_mvn(id, 50, 9) != draw_mvn(id, 50, 10));

    const Matrix x = draw_mvn(SymmetricMatrix::identity(4), 100000, 1);
    for (Eigen::Index c = 0; c < 4; ++c) {
        const double m = x.col(c).mean();
        const double v = (x.col(c).array() - m).square().sum() / (x.rows() - 1);
        CHECK(std::abs(v - 1.0) < 0.05);
    }
    Vector four(2);
    four << 4.0, 4.0;
    const Matrix y = draw_mvn(SymmetricMatrix::diagonal(four), 100000, 2);
    for (Eigen::Index c = 0; c < 2; ++c) {
        const double m = y.col(c).mean();
        const double v = (y.col(c).array() - m).square().sum() / (y.rows() - 1);
        CHECK(std::abs(v - 0.25) < 0.02);
    }
    Matrix nonpd(2, 2);
    nonpd << 1, 2, 2, 1;
    CHECK_THROWS_AS(draw_mvn(SymmetricMatrix(nonpd), 10, 1), NotPositiveDefinite);
}

TEST_CASE("draw_populations uses seed xor k streams") {
    const PrecisionSet ps({SymmetricMatrix::identity(3), SymmetricMatrix::identity(3)});
    const auto d = draw_populations(ps, {20, 30}, 77);
    CHECK(d.data[0] == draw_mvn(ps[0], 20, population_seed(77, 0)));
    CHECK(d.data[1] == draw_mvn(ps[1], 30, population_seed(77, 1)));
}

TEST_CASE("invert_pd") {
    CHECK(invert_pd(SymmetricMatrix::identity(3)).dense().isApprox(Matrix::Identity(3, 3)));
    Vector d(2);
    d << 2, 4;
    const auto inv = invert_pd(SymmetricMatrix::diagonal(d)).dense();
    CHECK(inv(0, 0) == doctest::Approx(0.5));
    CHECK(inv(1, 1) == doctest::Approx(0.25));
    CHECK(inv(0, 1) == 0.0);
    const auto t = tridiag(4, 0.2);
    CHECK((t.dense() * invert_pd(t).dense() - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-10);

    Rng r(8);
    for (int i = 0; i < 20; ++i) {
        const SymmetricMatrix m(oracle::random_spd(6, r));
        CHECK((invert_pd(invert_pd(m)).dense() - m.dense()).cwiseAbs().maxCoeff() < 1e-8);
    }
    Matrix nonpd(2, 2);
    nonpd << 1, 2, 2, 1;
    CHECK_THROWS_AS(invert_pd(SymmetricMatrix(nonpd)), NotPositiveDefinite);
    CHECK_THROWS_AS(log_det_pd(SymmetricMatrix(nonpd)), NotPositiveDefinite);
    CHECK(log_det_pd(SymmetricMatrix::diagonal(d)) == doctest::Approx(std::log(8.0)));
}

TEST_CASE("covariance set invariants") {
    CHECK_THROWS_AS(CovarianceSet({SymmetricMatrix::identity(2)}, {0}), InvalidArgument);
    CHECK_THROWS(CovarianceSet({SymmetricMatrix::identity(2), SymmetricMatrix::identity(3)}, {5, 5}));
    const CovarianceSet c({SymmetricMatrix::identity(2), SymmetricMatrix::identity(2)}, {40, 30});
    CHECK(c.min_sample_size() == 30);
    CHECK(c.has_positive_diagonal());
}
