#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "lcrec/embedding.hpp"
#include "lcrec/walks.hpp"

namespace lcrec {

struct SkipGramConfig {
    int dim = 128;
    int window = 2;
    int min_count = 1;
    int iterations = 100;  // epochs over the corpus
    int negatives_k = 5;
    double learning_rate = 0.025;
    std::uint64_t seed = 1;
};

// Center and context parameter tables, rows indexed by vocabulary id.
struct SkipGramParams {
    Eigen::MatrixXd center;
    Eigen::MatrixXd context;
};

struct SkipGramLossGrad {
    double loss = 0.0;
    SkipGramParams grad;
};

// Negative-sampling loss for one (center, context, negatives) instance:
//   loss = -log s(x_ctx . x_c) - sum_k log s(-x_nk . x_c)
// with the gradient over the full parameter tables (only the touched rows
// are nonzero). Exposed so the analytic gradient can be checked against
// finite differences independently of the training loop.
SkipGramLossGrad skipgram_loss_grad(const SkipGramParams& params, int center, int context,
                                    const std::vector<int>& negatives);

// Trains node embeddings on a walk corpus by SGD on the negative-sampling
// objective. Returns the center vectors of every node surviving the
// min_count filter, keyed by node_names. Single-threaded and deterministic
// for a fixed config.
EmbeddingTable train_skipgram(const WalkCorpus& corpus, const std::vector<std::string>& node_names,
                              const SkipGramConfig& cfg);

}  // namespace lcrec
