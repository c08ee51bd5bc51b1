#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lcrec/closure.hpp"
#include "lcrec/dataset.hpp"
#include "lcrec/embedding.hpp"
#include "lcrec/estimator.hpp"

namespace lcrec {

struct RecommenderConfig {
    double alpha = 0.03;
    int top_n = 5;
    int cold_start_threshold = 5;
    ClosureKind closure_kind = ClosureKind::Hull;
    SphereMode sphere_mode = SphereMode::Enclosing;
    // expected set from all train interactions by default; positive-only mode
    // keeps only ratings >= relevance_threshold
    bool positive_only = false;
    double relevance_threshold = 4.0;
    double hull_tol = kDefaultHullTol;
    int hull_max_iter = 0;  // 0 = max(1000, 10n)
};

// Per-user expected set: the closure generators (train items that have
// embeddings, optionally positive-only) plus the full train item set used to
// keep consumed items out of the recommendations.
struct UserProfile {
    int user = -1;
    std::vector<int> consumed;       // closure generators, sorted
    std::vector<int> train_items;    // everything the user touched in train, sorted
    std::optional<LatentClosure> closure;
    bool cold = false;  // |consumed| under the cold-start threshold: alpha forced to 0
};

struct ScoredItem {
    int item;
    double est_rating;
    double unexpectedness;
    double utility;
};
// Sorted by utility descending, ties by item index ascending; never contains
// a consumed item; length <= top_n.
using RecommendationList = std::vector<ScoredItem>;

// Maps item index -> embedding row (or -1); shared by profiles, candidates
// and the metrics.
std::vector<int> item_embedding_rows(const InteractionLog& log, const EmbeddingTable& items);

// One profile per train user; the closure is built over exactly the
// embeddings of `consumed`. Users with no embeddable items get no closure and
// are flagged cold.
std::vector<UserProfile> build_profiles(const InteractionLog& train, const EmbeddingTable& items,
                                        const RecommenderConfig& cfg);

// Distance from the candidate embedding to the profile closure (0 inside,
// 0 for closure-less cold profiles).
double unexpectedness(const UserProfile& profile, const Eigen::VectorXd& item_embedding,
                      const RecommenderConfig& cfg);

inline double utility(double est_rating, double unexp, double alpha) {
    return est_rating + alpha * unexp;
}

// Candidate universe shared by every estimator: all items with embeddings.
std::vector<int> candidate_universe(const InteractionLog& log, const EmbeddingTable& items);

// Scores every candidate not consumed by the user with
// utility(predict(u,i), unexpectedness, alpha_eff) and returns the top_n.
// alpha_eff is 0 for cold-start profiles.
RecommendationList recommend_top_n(int user, const RatingModel& model, const UserProfile& profile,
                                   const EmbeddingTable& items,
                                   const std::vector<int>& item_rows,
                                   const RecommenderConfig& cfg,
                                   const std::vector<int>& candidates);

// All users at once; entry u holds user u's list.
std::vector<RecommendationList> recommend_all(const RatingModel& model,
                                              const std::vector<UserProfile>& profiles,
                                              const InteractionLog& log,
                                              const EmbeddingTable& items,
                                              const RecommenderConfig& cfg,
                                              const std::vector<int>& candidates);

// Output CSV: user_id,rank,item_id,est_rating,unexpectedness,utility.
void save_recommendations_csv(const std::vector<RecommendationList>& recs,
                              const InteractionLog& log, const std::string& path);

}  // namespace lcrec
