#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "lcrec/config.hpp"
#include "lcrec/dataset.hpp"
#include "lcrec/embedding.hpp"
#include "lcrec/estimator.hpp"
#include "lcrec/metrics.hpp"
#include "lcrec/recommender.hpp"
#include "lcrec/synthetic.hpp"

namespace lcrec {

// Exclusive-writer guard on an output directory (lock file, O_EXCL).
class OutputLock {
public:
    explicit OutputLock(const std::string& out_dir);
    ~OutputLock();
    OutputLock(const OutputLock&) = delete;
    OutputLock& operator=(const OutputLock&) = delete;

private:
    std::string path_;
};

// Staged orchestrator: ingest/synth -> split -> embed -> closures ->
// estimator -> recommend -> evaluate, persisting artifacts into cfg.out as it
// goes. Any stage error aborts with the stage name attached.
class Pipeline {
public:
    explicit Pipeline(RunConfig cfg);

    void prepare_data();
    void compute_embeddings();
    void build_user_closures();
    void train_estimator();
    void make_recommendations();
    EvalReport evaluate_run();  // runs everything still missing, writes report + manifest
    SweepTable sweep();         // re-ranks over cfg.sweep.grid, writes sweep.csv + manifest

    const RunConfig& config() const { return cfg_; }
    const InteractionLog& full_log() const { return *log_; }
    const SplitPair& split_pair() const { return *split_; }
    const EmbeddingTable& items() const { return *items_; }
    const std::vector<UserProfile>& profiles() const { return profiles_; }
    const RatingModel& model() const { return *model_; }
    const std::vector<RecommendationList>& recommendations() const { return recs_; }
    const SyntheticWorld* world() const { return world_ ? &*world_ : nullptr; }
    RecommenderConfig recommender_config() const;
    int items_without_embedding() const { return items_without_embedding_; }

    std::string artifact(const std::string& name) const;  // path under cfg.out

private:
    void write_manifest() const;

    RunConfig cfg_;
    std::optional<SyntheticWorld> world_;
    std::optional<InteractionLog> log_;
    std::optional<SplitPair> split_;
    std::optional<EmbeddingTable> items_;
    std::vector<UserProfile> profiles_;
    std::unique_ptr<RatingModel> model_;
    std::unique_ptr<RatingModel> pm_model_;
    std::vector<RecommendationList> recs_, pm_recs_;
    std::vector<int> candidates_;
    int items_without_embedding_ = 0;
};

// Convenience wrapper: full run, returns the report.
EvalReport run_pipeline(const RunConfig& cfg);

}  // namespace lcrec
