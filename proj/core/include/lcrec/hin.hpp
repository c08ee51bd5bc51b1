#pragma once

#include <array>
#include <string>
#include <vector>

#include "lcrec/dataset.hpp"

namespace lcrec {

enum class NodeType : int { User = 0, Item = 1, Entity = 2 };
constexpr int kNodeTypeCount = 3;

const char* node_type_name(NodeType t);

// Edge type between two node types; order-insensitive (UI == IU).
struct EdgeTypeTag {
    NodeType a, b;
};

struct ExtraEdge {
    std::string src;
    std::string dst;
    std::string edge_type;  // one of UU, UE, UI, EI, EE, II
};

// Heterogeneous information network over users (U), items (I) and feature
// entities (E). Undirected; adjacency is partitioned by neighbor type and
// kept sorted for deterministic traversal.
class HinGraph {
public:
    int node_count() const { return static_cast<int>(types_.size()); }
    NodeType type(int node) const { return types_[node]; }
    const std::vector<int>& neighbors(int node, NodeType t) const {
        return adj_[node][static_cast<int>(t)];
    }
    int degree(int node) const;
    const std::string& name(int node) const { return names_[node]; }
    int lookup(const std::string& name) const;

    // Construction API (used by build_hin and fixtures).
    int add_node(const std::string& name, NodeType t);
    void add_edge(int a, int b);
    void finalize();  // sort + dedup adjacency

    int count(NodeType t) const;

private:
    std::vector<NodeType> types_;
    std::vector<std::string> names_;
    std::unordered_map<std::string, int> index_;
    std::vector<std::array<std::vector<int>, kNodeTypeCount>> adj_;
};

// Node naming scheme: users "u:<id>", items "i:<id>", entities "e:<column=value>".
std::string user_node_name(const std::string& user_id);
std::string item_node_name(const std::string& item_id);
std::string entity_node_name(const std::string& namespaced_value);

// Builds the HIN from a train log plus optional feature tables and extra
// typed edges. One U node per user, one I node per item, one E node per
// distinct namespaced feature value; UI edge per interaction, UE/EI edges per
// feature assignment.
HinGraph build_hin(const InteractionLog& log,
                   const FeatureTable* user_features,
                   const FeatureTable* item_features,
                   const std::vector<ExtraEdge>& extra_edges);

// Reads the extra-edges TSV (src_id, dst_id, edge_type).
std::vector<ExtraEdge> load_extra_edges(const std::string& path);

}  // namespace lcrec
