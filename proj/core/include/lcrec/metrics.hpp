#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "lcrec/dataset.hpp"
#include "lcrec/embedding.hpp"
#include "lcrec/estimator.hpp"
#include "lcrec/recommender.hpp"
#include "lcrec/stats.hpp"

namespace lcrec {

// One row in the style of the result tables: four accuracy columns, three
// beyond-accuracy columns, plus the run metadata.
struct EvalReport {
    double rmse = 0.0;
    double mae = 0.0;
    double precision_at_n = 0.0;
    double recall_at_n = 0.0;
    double unexpectedness = 0.0;
    double serendipity = 0.0;
    double diversity = 0.0;
    int n = 5;
    double alpha = 0.0;
    std::string estimator;
    std::string closure;
    std::uint64_t seed = 0;
};

struct SweepTable {
    std::vector<std::pair<double, EvalReport>> rows;  // alpha strictly increasing
};

std::pair<double, double> rmse_mae(const RatingModel& model, const InteractionLog& test);

// Per-user precision/recall at n against test items rated >= threshold;
// users with no relevant test items are skipped. Returns user means.
std::pair<double, double> precision_recall_at_n(const std::vector<RecommendationList>& recs,
                                                const InteractionLog& test, double threshold,
                                                int n);

// Mean distance-to-closure over every recommended (user, item) pair,
// recomputed from the profiles and embeddings.
double mean_unexpectedness(const std::vector<RecommendationList>& recs,
                           const std::vector<UserProfile>& profiles, const InteractionLog& log,
                           const EmbeddingTable& items, const RecommenderConfig& cfg);

// Fraction of recommendations that are useful and absent from the primitive
// model's lists; user mean.
double serendipity(const std::vector<RecommendationList>& recs,
                   const std::vector<RecommendationList>& pm_recs,
                   const std::function<bool(int user, int item)>& useful);

struct DiversityResult {
    double value = 0.0;
    std::int64_t zero_norm_pairs = 0;  // pairs where a zero-norm embedding forced distance 1
};

// Mean pairwise cosine distance (1 - cos) inside each list; lists shorter
// than 2 are skipped; user mean.
DiversityResult diversity(const std::vector<RecommendationList>& recs, const InteractionLog& log,
                          const EmbeddingTable& items);

struct EvalInputs {
    const RatingModel* model = nullptr;
    const std::vector<RecommendationList>* recs = nullptr;
    const std::vector<RecommendationList>* pm_recs = nullptr;
    const std::vector<UserProfile>* profiles = nullptr;
    const InteractionLog* train = nullptr;
    const InteractionLog* test = nullptr;
    const EmbeddingTable* items = nullptr;
    RecommenderConfig rec_cfg;
    std::string estimator_tag;
    std::uint64_t seed = 0;
};

EvalReport evaluate(const EvalInputs& in);

void save_report_csv(const std::vector<EvalReport>& rows, const std::string& path);
void save_sweep_csv(const SweepTable& table, const std::string& path);

}  // namespace lcrec
