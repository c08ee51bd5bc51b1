#include "lcrec/autoencoder.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include "lcrec/error.hpp"
#include "lcrec/hin.hpp"
#include "lcrec/rng.hpp"

namespace lcrec {

std::pair<AutoencoderModel, EmbeddingTable> train_autoencoder(
    const std::vector<std::string>& ids, const Eigen::MatrixXd& features,
    const AutoencoderConfig& cfg) {
    const int n = static_cast<int>(features.rows());
    const int input_dim = static_cast<int>(features.cols());
    if (n == 0 || static_cast<int>(ids.size()) != n)
        throw ValidationError("autoencoder needs one id per feature row");
    if (input_dim < 1) throw ValidationError("autoencoder input dimension must be >= 1");
    if (cfg.dim < 1 || cfg.epochs < 1 || cfg.batch_size < 1)
        throw ValidationError("autoencoder config out of range");
    if (!features.allFinite()) throw ValidationError("autoencoder features contain non-finite values");

    AutoencoderModel model;
    {
        Rng rng(stage_seed(cfg.seed, "ae-init"));
        auto init = [&rng](Eigen::MatrixXd& w, int fan_in, int fan_out) {
            const double bound = std::sqrt(6.0 / (fan_in + fan_out));
            for (Eigen::Index i = 0; i < w.rows(); ++i)
                for (Eigen::Index j = 0; j < w.cols(); ++j) w(i, j) = rng.uniform(-bound, bound);
        };
        model.enc_weight.resize(cfg.dim, input_dim);
        model.dec_weight.resize(input_dim, cfg.dim);
        init(model.enc_weight, input_dim, cfg.dim);
        init(model.dec_weight, cfg.dim, input_dim);
        model.enc_bias = Eigen::VectorXd::Zero(cfg.dim);
        model.dec_bias = Eigen::VectorXd::Zero(input_dim);
    }

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    Rng shuffle_rng(stage_seed(cfg.seed, "ae-shuffle"));

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        shuffle_rng.shuffle(order);
        double sq_err_sum = 0.0;

        for (int begin = 0; begin < n; begin += cfg.batch_size) {
            const int b = std::min(cfg.batch_size, n - begin);
            Eigen::MatrixXd x(input_dim, b);
            for (int col = 0; col < b; ++col) x.col(col) = features.row(order[begin + col]).transpose();

            Eigen::MatrixXd y =
                ((model.enc_weight * x).colwise() + model.enc_bias).array().tanh().matrix();
            Eigen::MatrixXd xhat = (model.dec_weight * y).colwise() + model.dec_bias;
            Eigen::MatrixXd resid = xhat - x;
            sq_err_sum += resid.squaredNorm();

            // d loss / d xhat for batch-mean MSE over components
            Eigen::MatrixXd d_xhat = (2.0 / (static_cast<double>(b) * input_dim)) * resid;
            Eigen::MatrixXd d_y = model.dec_weight.transpose() * d_xhat;
            Eigen::MatrixXd d_z = d_y.array() * (1.0 - y.array().square());

            model.dec_weight -= cfg.learning_rate * (d_xhat * y.transpose());
            model.dec_bias -= cfg.learning_rate * d_xhat.rowwise().sum();
            model.enc_weight -= cfg.learning_rate * (d_z.matrix() * x.transpose());
            model.enc_bias -= cfg.learning_rate * d_z.matrix().rowwise().sum();
        }

        const double epoch_loss = sq_err_sum / (static_cast<double>(n) * input_dim);
        if (!std::isfinite(epoch_loss))
            throw DivergenceError("autoencoder loss diverged at epoch " + std::to_string(epoch) +
                                  " (learning_rate=" + std::to_string(cfg.learning_rate) + ")");
        model.loss_history.push_back(epoch_loss);
    }

    EmbeddingTable table(cfg.dim, EntityKind::Node);
    std::vector<float> vec(cfg.dim);
    for (int r = 0; r < n; ++r) {
        Eigen::VectorXd y = model.encode(features.row(r).transpose());
        for (int j = 0; j < cfg.dim; ++j) vec[j] = static_cast<float>(y[j]);
        table.add(ids[r], vec);
    }
    return {std::move(model), std::move(table)};
}

std::pair<AutoencoderModel, EmbeddingTable> train_autoencoder(
    const std::vector<std::pair<std::string, std::vector<double>>>& features,
    const AutoencoderConfig& cfg) {
    if (features.empty()) throw ValidationError("autoencoder needs at least one feature vector");
    const std::size_t input_dim = features.front().second.size();
    std::vector<std::string> ids;
    ids.reserve(features.size());
    Eigen::MatrixXd rows(features.size(), input_dim);
    for (std::size_t r = 0; r < features.size(); ++r) {
        const auto& [id, vec] = features[r];
        if (vec.size() != input_dim)
            throw ValidationError("feature vector for '" + id + "' has dimension " +
                                  std::to_string(vec.size()) + ", expected " +
                                  std::to_string(input_dim));
        ids.push_back(id);
        for (std::size_t j = 0; j < input_dim; ++j) rows(r, j) = vec[j];
    }
    return train_autoencoder(ids, rows, cfg);
}

FeatureMatrix multi_hot_features(const InteractionLog& log, const FeatureTable* user_features,
                                 const FeatureTable* item_features) {
    FeatureMatrix out;
    const int users = log.user_count(), items = log.item_count();
    out.ids.reserve(users + items);
    for (int u = 0; u < users; ++u) out.ids.push_back(user_node_name(log.users.name(u)));
    for (int i = 0; i < items; ++i) out.ids.push_back(item_node_name(log.items.name(i)));

    const bool has_features = (user_features && !user_features->features.empty()) ||
                              (item_features && !item_features->features.empty());
    if (has_features) {
        std::unordered_map<std::string, int> vocab_index;
        auto intern = [&](const std::string& v) {
            auto it = vocab_index.find(v);
            if (it != vocab_index.end()) return it->second;
            int idx = static_cast<int>(out.vocabulary.size());
            out.vocabulary.push_back(v);
            vocab_index.emplace(v, idx);
            return idx;
        };
        // first pass fixes the vocabulary order deterministically
        if (user_features)
            for (const auto& fs : user_features->features)
                for (const auto& f : fs) intern(f);
        if (item_features)
            for (const auto& fs : item_features->features)
                for (const auto& f : fs) intern(f);

        out.rows = Eigen::MatrixXd::Zero(users + items, out.vocabulary.size());
        if (user_features)
            for (int u = 0; u < users; ++u)
                for (const auto& f : user_features->features[u]) out.rows(u, vocab_index[f]) = 1.0;
        if (item_features)
            for (int i = 0; i < items; ++i)
                for (const auto& f : item_features->features[i])
                    out.rows(users + i, vocab_index[f]) = 1.0;
        return out;
    }

    // Fallback: joint interaction space so users and items still share one
    // global input layer. Ratings are scaled to [0,1].
    out.vocabulary.reserve(users + items);
    for (int u = 0; u < users; ++u) out.vocabulary.push_back("rated-by:" + log.users.name(u));
    for (int i = 0; i < items; ++i) out.vocabulary.push_back("rated:" + log.items.name(i));
    out.rows = Eigen::MatrixXd::Zero(users + items, users + items);
    const double range = std::max(1e-12, log.scale.max - log.scale.min);
    for (const auto& r : log.interactions) {
        const double v = (r.rating - log.scale.min) / range;
        out.rows(r.user, users + r.item) = v;
        out.rows(users + r.item, r.user) = v;
    }
    return out;
}

}  // namespace lcrec
