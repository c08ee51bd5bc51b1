#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "lcrec/dataset.hpp"
#include "lcrec/embedding.hpp"

namespace lcrec {

struct SyntheticSpec {
    int users = 100;
    int items = 50;
    int rank = 3;
    double noise = 0.05;

    // clusters >= 2 switches to the clustered world: items and users are
    // assigned round-robin to clusters, users rate mostly inside their home
    // cluster, home items carry a planted rating edge, and item embeddings
    // form separated clouds.
    int clusters = 1;
    double separation = 10.0;
    double cluster_sigma = 0.5;
    int embed_dim = 16;

    RatingScale scale{1.0, 5.0};
    int ratings_per_user = 20;
    double out_cluster_fraction = 0.25;  // clustered mode: share of far-cluster ratings
    double factor_scale = 0.5;           // plain mode: stddev of planted factors
    std::uint64_t seed = 42;
};

struct SyntheticWorld {
    InteractionLog log;
    EmbeddingTable item_embeddings;  // ground-truth latent positions (kind=item)
    Eigen::MatrixXd user_factors;    // planted factors behind the ratings
    Eigen::MatrixXd item_factors;
    std::vector<int> user_cluster;
    std::vector<int> item_cluster;
};

SyntheticWorld generate_synthetic(const SyntheticSpec& spec);

// Ground-truth side files: factors and cluster assignments as CSV.
void save_ground_truth(const SyntheticWorld& world, const std::string& dir);

}  // namespace lcrec
