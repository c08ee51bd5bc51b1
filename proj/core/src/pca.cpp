#include "lcrec/pca.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "lcrec/error.hpp"

namespace lcrec {

Projection pca_project(const EmbeddingTable& table, int out_dims) {
    const int n = table.size();
    const int d = table.dim();
    if (n < 2) throw ValidationError("PCA needs at least 2 vectors, got " + std::to_string(n));
    if (out_dims < 1 || out_dims > d)
        throw ValidationError("PCA out_dims must lie in [1, dim]");

    Eigen::MatrixXd x(n, d);
    for (int r = 0; r < n; ++r)
        for (int j = 0; j < d; ++j) x(r, j) = static_cast<double>(table.row(r)[j]);
    x.rowwise() -= x.colwise().mean();

    Eigen::MatrixXd cov = (x.transpose() * x) / static_cast<double>(n - 1);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
    if (solver.info() != Eigen::Success) throw Error("PCA eigendecomposition failed");

    // eigenvalues come out ascending; take the top out_dims in descending order
    Projection p;
    p.ids = table.ids();
    p.coords.resize(n, out_dims);
    p.explained_variance.resize(out_dims);
    for (int k = 0; k < out_dims; ++k) {
        const int src = d - 1 - k;
        Eigen::VectorXd v = solver.eigenvectors().col(src);
        // fix the sign so results do not depend on solver internals
        int pivot = 0;
        for (int j = 1; j < d; ++j)
            if (std::abs(v[j]) > std::abs(v[pivot])) pivot = j;
        if (v[pivot] < 0.0) v = -v;
        p.coords.col(k) = x * v;
        p.explained_variance[k] = std::max(0.0, solver.eigenvalues()[src]);
    }
    return p;
}

void save_projection_csv(const Projection& p, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write projection file: " + path);
    out << "id";
    for (int k = 0; k < p.coords.cols(); ++k) out << ",c" << k;
    out << '\n';
    char buf[40];
    for (Eigen::Index r = 0; r < p.coords.rows(); ++r) {
        out << p.ids[static_cast<std::size_t>(r)];
        for (Eigen::Index k = 0; k < p.coords.cols(); ++k) {
            std::snprintf(buf, sizeof(buf), ",%.12g", p.coords(r, k));
            out << buf;
        }
        out << '\n';
    }
}

}  // namespace lcrec
