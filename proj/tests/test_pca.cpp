#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>

#include "lcrec/error.hpp"
#include "lcrec/pca.hpp"
#include "lcrec/rng.hpp"

using namespace lcrec;

namespace {

EmbeddingTable table_from(const Eigen::MatrixXd& x) {
    EmbeddingTable t(static_cast<int>(x.cols()), EntityKind::Item);
    std::vector<float> v(x.cols());
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
        for (Eigen::Index j = 0; j < x.cols(); ++j) v[j] = static_cast<float>(x(r, j));
        t.add("p" + std::to_string(r), v);
    }
    return t;
}

}  // namespace

TEST_CASE("planar data embedded in high dimension projects with exact pairwise distances") {
    // points on a 2-D plane rotated into 32 dims; PCA must recover the plane
    const int n = 40, d = 32;
    Rng rng(3);
    Eigen::MatrixXd basis = Eigen::MatrixXd::Zero(2, d);
    for (int j = 0; j < d; ++j) {
        basis(0, j) = rng.normal();
        basis(1, j) = rng.normal();
    }
    // orthonormalize the two directions
    basis.row(0).normalize();
    basis.row(1) -= basis.row(1).dot(basis.row(0)) * basis.row(0);
    basis.row(1).normalize();

    Eigen::MatrixXd coords(n, 2);
    for (int r = 0; r < n; ++r) {
        coords(r, 0) = rng.uniform(-2.0, 2.0);
        coords(r, 1) = rng.uniform(-2.0, 2.0);
    }
    Eigen::MatrixXd x = coords * basis;

    // embeddings are binary32, so compare against the table's own values
    const auto table = table_from(x);
    const auto proj = pca_project(table, 2);

    Eigen::MatrixXd stored(n, d);
    for (int r = 0; r < n; ++r)
        for (int j = 0; j < d; ++j) stored(r, j) = static_cast<double>(table.row(r)[j]);

    for (int a = 0; a < n; ++a) {
        for (int b = a + 1; b < n; ++b) {
            const double orig = (stored.row(a) - stored.row(b)).norm();
            const double low = (proj.coords.row(a) - proj.coords.row(b)).norm();
            CHECK(std::abs(orig - low) < 1e-6);
        }
    }
}

TEST_CASE("isotropic cloud: top-2 eigenvalue share matches the direct computation") {
    const int n = 4000, d = 16;
    Rng rng(11);
    Eigen::MatrixXd x(n, d);
    for (int r = 0; r < n; ++r)
        for (int j = 0; j < d; ++j) x(r, j) = rng.normal();
    const auto table = table_from(x);
    const auto proj = pca_project(table, 2);

    // direct covariance eigenvalues over the same binary32 data
    Eigen::MatrixXd stored(n, d);
    for (int r = 0; r < n; ++r)
        for (int j = 0; j < d; ++j) stored(r, j) = static_cast<double>(table.row(r)[j]);
    stored.rowwise() -= stored.colwise().mean();
    Eigen::MatrixXd cov = stored.transpose() * stored / double(n - 1);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> direct(cov);

    const double total = direct.eigenvalues().sum();
    const double top2_direct =
        direct.eigenvalues()[d - 1] + direct.eigenvalues()[d - 2];
    const double top2_pca = proj.explained_variance.sum();
    CHECK(top2_pca == doctest::Approx(top2_direct).epsilon(1e-9));
    // ~ 2/d within sampling noise
    CHECK(top2_pca / total == doctest::Approx(2.0 / d).epsilon(0.25));
}

TEST_CASE("projected variance is non-increasing by coordinate") {
    const int n = 300, d = 10;
    Rng rng(13);
    Eigen::MatrixXd x(n, d);
    for (int r = 0; r < n; ++r)
        for (int j = 0; j < d; ++j) x(r, j) = rng.normal(0.0, 1.0 + j);
    const auto proj = pca_project(table_from(x), 4);
    Eigen::VectorXd var(4);
    for (int k = 0; k < 4; ++k) {
        const auto col = proj.coords.col(k);
        const double mean = col.mean();
        var[k] = (col.array() - mean).square().sum();
    }
    for (int k = 1; k < 4; ++k) CHECK(var[k] <= var[k - 1] + 1e-9);
}

TEST_CASE("duplicated single point projects to the origin") {
    Eigen::MatrixXd x(5, 6);
    for (int r = 0; r < 5; ++r)
        for (int j = 0; j < 6; ++j) x(r, j) = 3.25;
    const auto proj = pca_project(table_from(x), 2);
    for (Eigen::Index r = 0; r < proj.coords.rows(); ++r) {
        CHECK(proj.coords(r, 0) == doctest::Approx(0.0));
        CHECK(proj.coords(r, 1) == doctest::Approx(0.0));
    }
}

TEST_CASE("fewer than 2 vectors or out_dims > dim is an error") {
    Eigen::MatrixXd one(1, 4);
    one.setZero();
    CHECK_THROWS_AS(pca_project(table_from(one), 2), ValidationError);
    Eigen::MatrixXd ok(3, 4);
    ok.setZero();
    CHECK_THROWS_AS(pca_project(table_from(ok), 5), ValidationError);
}
