#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "lcrec/dataset.hpp"

namespace lcrec {

// Pluggable rating estimator. Predictions are always finite and clipped to
// the training scale; unseen users/items fall back to the bias terms that
// remain defined.
class RatingModel {
public:
    virtual ~RatingModel() = default;
    virtual double predict(int user, int item) const = 0;
    virtual const char* kind() const = 0;
    virtual void save(std::ostream& out) const = 0;

    RatingScale scale;
    int user_count = 0;
    int item_count = 0;
    std::vector<std::uint8_t> user_seen, item_seen;

    bool seen_user(int u) const {
        return u >= 0 && u < user_count && user_seen[static_cast<std::size_t>(u)];
    }
    bool seen_item(int i) const {
        return i >= 0 && i < item_count && item_seen[static_cast<std::size_t>(i)];
    }
};

struct MfConfig {
    int factors = 32;
    double learning_rate = 0.005;
    double reg = 0.02;
    int epochs = 30;
    std::uint64_t seed = 1;
};

// Biased matrix factorization (mu + b_u + b_i + p_u . q_i) trained by SGD.
class MfModel : public RatingModel {
public:
    double predict(int user, int item) const override;
    const char* kind() const override { return "mf"; }
    void save(std::ostream& out) const override;

    float global_mean = 0.0f;
    std::vector<float> user_bias, item_bias;
    std::vector<float> user_factors, item_factors;  // row-major entity x k
    int factors = 0;
    std::vector<double> loss_history;  // training RMSE per epoch
};

MfModel train_mf(const InteractionLog& train, const MfConfig& cfg);

// Non-negative factorization (p_u . q_i, factors clamped at zero) trained by
// projected SGD.
class NmfModel : public RatingModel {
public:
    double predict(int user, int item) const override;
    const char* kind() const override { return "nmf"; }
    void save(std::ostream& out) const override;

    std::vector<float> user_factors, item_factors;
    int factors = 0;
    float fallback_mean = 0.0f;  // used for unseen entities
    std::vector<double> loss_history;
};

NmfModel train_nmf(const InteractionLog& train, const MfConfig& cfg);

struct KnnConfig {
    int k_neighbors = 40;
};

// Item-based neighborhood model: cosine over mean-centered item rating
// columns, top-k neighbor lists, user-mean-centered weighted prediction.
class KnnModel : public RatingModel {
public:
    double predict(int user, int item) const override;
    const char* kind() const override { return "knn"; }
    void save(std::ostream& out) const override;

    struct Neighbor {
        int item;
        float sim;
    };
    int k_neighbors = 0;
    float global_mean = 0.0f;
    std::vector<float> user_mean;
    std::vector<std::vector<Neighbor>> neighbors;           // per item, sim descending
    std::vector<std::vector<std::pair<int, float>>> user_ratings;  // per user (item, rating)

    double similarity(int a, int b) const;  // 0 when not within top-k of either
};

KnnModel train_knn(const InteractionLog& train, const KnnConfig& cfg);

// Non-personalized baseline: mu + b_u + b_i with biases fit by regularized
// residual means. Serves as the primitive model behind the serendipity metric.
class BiasModel : public RatingModel {
public:
    double predict(int user, int item) const override;
    const char* kind() const override { return "bias"; }
    void save(std::ostream& out) const override;

    float global_mean = 0.0f;
    std::vector<float> user_bias, item_bias;
};

BiasModel train_bias(const InteractionLog& train, double reg);

// Checkpoint round-trip; format: "LUMD" magic, version, kind tag, config
// echo, then the parameter blocks.
void save_model(const RatingModel& model, const std::string& path);
std::unique_ptr<RatingModel> load_model(const std::string& path);
std::unique_ptr<RatingModel> load_model(std::istream& in, const std::string& what);

}  // namespace lcrec
