#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "lcrec/dataset.hpp"
#include "lcrec/embedding.hpp"

namespace lcrec {

struct AutoencoderConfig {
    int dim = 128;
    double learning_rate = 0.01;
    int epochs = 50;
    int batch_size = 32;
    std::uint64_t seed = 1;
};

// One-hidden-layer autoencoder: y = tanh(W_enc x + b_enc), xhat = W_dec y + b_dec,
// trained on mean squared reconstruction error.
struct AutoencoderModel {
    Eigen::MatrixXd enc_weight;  // dim x input_dim
    Eigen::VectorXd enc_bias;    // dim
    Eigen::MatrixXd dec_weight;  // input_dim x dim
    Eigen::VectorXd dec_bias;    // input_dim
    std::vector<double> loss_history;  // one entry per epoch

    Eigen::VectorXd encode(const Eigen::VectorXd& x) const {
        return ((enc_weight * x + enc_bias).array().tanh()).matrix();
    }
    Eigen::VectorXd reconstruct(const Eigen::VectorXd& x) const {
        return dec_weight * encode(x) + dec_bias;
    }
};

// Trains on the rows of `features` (entity per row) by mini-batch gradient
// descent; returns the model plus the encoded embeddings keyed by `ids`.
std::pair<AutoencoderModel, EmbeddingTable> train_autoencoder(
    const std::vector<std::string>& ids, const Eigen::MatrixXd& features,
    const AutoencoderConfig& cfg);

// id -> vector form; validates that all rows share one input dimension.
std::pair<AutoencoderModel, EmbeddingTable> train_autoencoder(
    const std::vector<std::pair<std::string, std::vector<double>>>& features,
    const AutoencoderConfig& cfg);

// Joint user+item feature matrix for the global autoencoder. Rows are users
// then items (node-name keyed). With feature tables present the input space
// is the multi-hot vocabulary of namespaced feature values; without any
// features it falls back to the joint interaction space (user rows carry the
// user's item ratings, item rows the item's user ratings).
struct FeatureMatrix {
    std::vector<std::string> ids;
    std::vector<std::string> vocabulary;
    Eigen::MatrixXd rows;  // ids.size() x vocabulary.size()
};

FeatureMatrix multi_hot_features(const InteractionLog& log, const FeatureTable* user_features,
                                 const FeatureTable* item_features);

}  // namespace lcrec
