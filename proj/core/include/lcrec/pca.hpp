#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "lcrec/embedding.hpp"

namespace lcrec {

struct Projection {
    std::vector<std::string> ids;
    Eigen::MatrixXd coords;           // size() x out_dims, variance non-increasing by column
    Eigen::VectorXd explained_variance;  // eigenvalues of the kept components
};

// Mean-centered projection onto the top principal directions. Requires at
// least 2 vectors and out_dims <= table dim.
Projection pca_project(const EmbeddingTable& table, int out_dims);

void save_projection_csv(const Projection& p, const std::string& path);

}  // namespace lcrec
