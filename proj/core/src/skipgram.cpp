#include "lcrec/skipgram.hpp"

#include <algorithm>
#include <cmath>

#include "lcrec/error.hpp"
#include "lcrec/rng.hpp"

namespace lcrec {

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

SkipGramLossGrad skipgram_loss_grad(const SkipGramParams& params, int center, int context,
                                    const std::vector<int>& negatives) {
    SkipGramLossGrad out;
    out.grad.center = Eigen::MatrixXd::Zero(params.center.rows(), params.center.cols());
    out.grad.context = Eigen::MatrixXd::Zero(params.context.rows(), params.context.cols());

    const auto v = params.center.row(center);

    const double s_pos = sigmoid(v.dot(params.context.row(context)));
    out.loss -= std::log(s_pos);
    // d/ds of -log s(s) is s(s) - 1
    out.grad.center.row(center) += (s_pos - 1.0) * params.context.row(context);
    out.grad.context.row(context) += (s_pos - 1.0) * v;

    for (int n : negatives) {
        const double s_neg = sigmoid(v.dot(params.context.row(n)));
        out.loss -= std::log(1.0 - s_neg);  // log s(-x) = log(1 - s(x))
        out.grad.center.row(center) += s_neg * params.context.row(n);
        out.grad.context.row(n) += s_neg * v;
    }
    return out;
}

EmbeddingTable train_skipgram(const WalkCorpus& corpus, const std::vector<std::string>& node_names,
                              const SkipGramConfig& cfg) {
    if (corpus.sequences.empty()) throw ConfigError("skip-gram corpus is empty");
    if (cfg.dim < 1 || cfg.window < 1 || cfg.negatives_k < 1)
        throw ValidationError("skip-gram config out of range");

    // Vocabulary: nodes with corpus frequency >= min_count, dense rows in
    // node-index order.
    const int node_count = static_cast<int>(corpus.node_frequency.size());
    std::vector<int> vocab_row(node_count, -1);
    std::vector<int> vocab_nodes;
    for (int n = 0; n < node_count; ++n) {
        if (corpus.node_frequency[n] >= cfg.min_count && corpus.node_frequency[n] > 0) {
            vocab_row[n] = static_cast<int>(vocab_nodes.size());
            vocab_nodes.push_back(n);
        }
    }
    const int vocab = static_cast<int>(vocab_nodes.size());
    if (vocab == 0) throw ConfigError("skip-gram vocabulary empty after min_count filter");

    // Unigram^0.75 cumulative table for negative sampling.
    std::vector<double> cdf(vocab);
    double acc = 0.0;
    for (int r = 0; r < vocab; ++r) {
        acc += std::pow(static_cast<double>(corpus.node_frequency[vocab_nodes[r]]), 0.75);
        cdf[r] = acc;
    }

    Eigen::MatrixXd center(vocab, cfg.dim);
    Eigen::MatrixXd context = Eigen::MatrixXd::Zero(vocab, cfg.dim);
    {
        Rng init_rng(stage_seed(cfg.seed, "skipgram-init"));
        const double half = 0.5 / cfg.dim;
        for (int r = 0; r < vocab; ++r)
            for (int j = 0; j < cfg.dim; ++j) center(r, j) = init_rng.uniform(-half, half);
    }

    // Sequences filtered to vocabulary rows once up front.
    std::vector<std::vector<int>> seqs;
    seqs.reserve(corpus.sequences.size());
    for (const auto& s : corpus.sequences) {
        std::vector<int> t;
        t.reserve(s.size());
        for (int n : s)
            if (vocab_row[n] >= 0) t.push_back(vocab_row[n]);
        if (!t.empty()) seqs.push_back(std::move(t));
    }

    Rng rng(stage_seed(cfg.seed, "skipgram-train"));
    Eigen::VectorXd center_grad(cfg.dim);
    const double lr_floor_ratio = 1e-4;

    auto sample_negative = [&]() {
        const double draw = rng.uniform() * acc;
        return static_cast<int>(std::lower_bound(cdf.begin(), cdf.end(), draw) - cdf.begin());
    };

    for (int epoch = 0; epoch < cfg.iterations; ++epoch) {
        const double progress =
            cfg.iterations > 1 ? static_cast<double>(epoch) / (cfg.iterations - 1) : 0.0;
        const double lr = cfg.learning_rate * (1.0 + (lr_floor_ratio - 1.0) * progress);

        for (const auto& seq : seqs) {
            const int len = static_cast<int>(seq.size());
            for (int pos = 0; pos < len; ++pos) {
                const int v = seq[pos];
                const int lo = std::max(0, pos - cfg.window);
                const int hi = std::min(len - 1, pos + cfg.window);
                for (int cpos = lo; cpos <= hi; ++cpos) {
                    if (cpos == pos) continue;
                    const int c = seq[cpos];

                    center_grad.setZero();
                    const auto vrow = center.row(v);

                    const double s_pos = sigmoid(vrow.dot(context.row(c)));
                    center_grad += (s_pos - 1.0) * context.row(c).transpose();
                    context.row(c) -= lr * (s_pos - 1.0) * vrow;

                    if (vocab > 1) {
                        for (int k = 0; k < cfg.negatives_k; ++k) {
                            const int n = sample_negative();
                            if (n == c) continue;  // skip the positive target
                            const double s_neg = sigmoid(vrow.dot(context.row(n)));
                            center_grad += s_neg * context.row(n).transpose();
                            context.row(n) -= lr * s_neg * vrow;
                        }
                    }
                    center.row(v) -= lr * center_grad.transpose();
                }
            }
        }
    }

    EmbeddingTable table(cfg.dim, EntityKind::Node);
    std::vector<float> vec(cfg.dim);
    for (int r = 0; r < vocab; ++r) {
        for (int j = 0; j < cfg.dim; ++j) vec[j] = static_cast<float>(center(r, j));
        table.add(node_names[vocab_nodes[r]], vec);
    }
    return table;
}

}  // namespace lcrec
