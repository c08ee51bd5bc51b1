#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "lcrec/hin.hpp"
#include "lcrec/rng.hpp"

namespace lcrec {

// Type-to-type transition coefficients. Symmetric: C(U,I) == C(I,U).
struct TransitionCoefficients {
    double uu = 1.0, ue = 1.0, ui = 1.0, ei = 1.0, ee = 1.0, ii = 1.0;

    double get(NodeType a, NodeType b) const;
    bool all_zero() const { return uu == 0 && ue == 0 && ui == 0 && ei == 0 && ee == 0 && ii == 0; }
};

struct WalkConfig {
    int walk_length = 100;    // nodes per sequence
    int walks_per_node = 10;
    TransitionCoefficients coefficients;
    std::vector<NodeType> metapath;  // empty = unconstrained
};

struct WalkCorpus {
    std::vector<std::vector<int>> sequences;   // node indices into the graph
    std::vector<std::int64_t> node_frequency;  // per node, occurrences in sequences
};

// One transition from `node`: a neighbor type t is chosen with probability
// proportional to C(T_node, t) over the types present, then a neighbor of
// that type uniformly (the per-step renormalization of the per-neighbor
// weight C/|N_t|). Returns nullopt at a dead end. If `forced_type` is set
// only that type is considered.
std::optional<int> sample_step(const HinGraph& graph, const TransitionCoefficients& coeffs,
                               int node, Rng& rng,
                               std::optional<NodeType> forced_type = std::nullopt);

// Generates walks_per_node sequences of up to walk_length nodes from every
// start node (metapath mode: from nodes matching the first pattern type).
// Each walk draws from a stream derived from (seed, start node, repeat), so
// the corpus is deterministic and independent of iteration order.
WalkCorpus hetero_walks(const HinGraph& graph, const WalkConfig& cfg, std::uint64_t seed);

}  // namespace lcrec
