#include "lcrec/walks.hpp"

#include "lcrec/error.hpp"

namespace lcrec {

double TransitionCoefficients::get(NodeType a, NodeType b) const {
    const int x = static_cast<int>(a), y = static_cast<int>(b);
    const int lo = x < y ? x : y, hi = x < y ? y : x;
    // (U,U)=uu (U,I)=ui (U,E)=ue (I,I)=ii (I,E)=ei (E,E)=ee
    if (lo == 0 && hi == 0) return uu;
    if (lo == 0 && hi == 1) return ui;
    if (lo == 0 && hi == 2) return ue;
    if (lo == 1 && hi == 1) return ii;
    if (lo == 1 && hi == 2) return ei;
    return ee;
}

std::optional<int> sample_step(const HinGraph& graph, const TransitionCoefficients& coeffs,
                               int node, Rng& rng, std::optional<NodeType> forced_type) {
    const NodeType cur = graph.type(node);
    double weights[kNodeTypeCount];
    double total = 0.0;
    for (int t = 0; t < kNodeTypeCount; ++t) {
        const NodeType nt = static_cast<NodeType>(t);
        if (forced_type && nt != *forced_type) {
            weights[t] = 0.0;
            continue;
        }
        const auto& nbrs = graph.neighbors(node, nt);
        weights[t] = nbrs.empty() ? 0.0 : coeffs.get(cur, nt);
        total += weights[t];
    }
    if (total <= 0.0) return std::nullopt;

    double draw = rng.uniform() * total;
    int chosen = -1;
    for (int t = 0; t < kNodeTypeCount; ++t) {
        if (weights[t] <= 0.0) continue;
        if (draw < weights[t]) {
            chosen = t;
            break;
        }
        draw -= weights[t];
    }
    if (chosen < 0) {  // fp edge: fall back to the last positive-weight type
        for (int t = kNodeTypeCount - 1; t >= 0; --t)
            if (weights[t] > 0.0) {
                chosen = t;
                break;
            }
    }
    const auto& nbrs = graph.neighbors(node, static_cast<NodeType>(chosen));
    return nbrs[rng.uniform_index(nbrs.size())];
}

WalkCorpus hetero_walks(const HinGraph& graph, const WalkConfig& cfg, std::uint64_t seed) {
    if (graph.node_count() == 0) throw ValidationError("cannot walk an empty graph");
    if (cfg.walk_length < 1 || cfg.walks_per_node < 1)
        throw ValidationError("walk_length and walks_per_node must be >= 1");
    if (cfg.coefficients.all_zero())
        throw ConfigError("all transition coefficients are zero");

    WalkCorpus corpus;
    corpus.node_frequency.assign(graph.node_count(), 0);

    for (int start = 0; start < graph.node_count(); ++start) {
        if (!cfg.metapath.empty() && graph.type(start) != cfg.metapath.front()) continue;
        for (int rep = 0; rep < cfg.walks_per_node; ++rep) {
            Rng rng(derive_seed(seed, static_cast<std::uint64_t>(start),
                                static_cast<std::uint64_t>(rep)));
            std::vector<int> seq;
            seq.reserve(cfg.walk_length);
            seq.push_back(start);
            int cur = start;
            for (int step = 1; step < cfg.walk_length; ++step) {
                std::optional<NodeType> forced;
                if (!cfg.metapath.empty())
                    forced = cfg.metapath[step % cfg.metapath.size()];
                auto next = sample_step(graph, cfg.coefficients, cur, rng, forced);
                if (!next) break;  // dead end: keep the partial sequence
                cur = *next;
                seq.push_back(cur);
            }
            for (int node : seq) ++corpus.node_frequency[node];
            corpus.sequences.push_back(std::move(seq));
        }
    }
    return corpus;
}

}  // namespace lcrec
