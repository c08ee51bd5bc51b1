#include "lcrec/hin.hpp"

#include <algorithm>
#include <fstream>

#include "lcrec/error.hpp"

namespace lcrec {

const char* node_type_name(NodeType t) {
    switch (t) {
        case NodeType::User: return "U";
        case NodeType::Item: return "I";
        case NodeType::Entity: return "E";
    }
    return "?";
}

int HinGraph::degree(int node) const {
    int d = 0;
    for (const auto& v : adj_[node]) d += static_cast<int>(v.size());
    return d;
}

int HinGraph::lookup(const std::string& name) const {
    auto it = index_.find(name);
    return it == index_.end() ? -1 : it->second;
}

int HinGraph::add_node(const std::string& name, NodeType t) {
    auto it = index_.find(name);
    if (it != index_.end()) return it->second;
    int idx = node_count();
    types_.push_back(t);
    names_.push_back(name);
    index_.emplace(name, idx);
    adj_.emplace_back();
    return idx;
}

void HinGraph::add_edge(int a, int b) {
    if (a == b) return;  // self-loops carry no walk information
    adj_[a][static_cast<int>(types_[b])].push_back(b);
    adj_[b][static_cast<int>(types_[a])].push_back(a);
}

void HinGraph::finalize() {
    for (auto& lists : adj_) {
        for (auto& v : lists) {
            std::sort(v.begin(), v.end());
            v.erase(std::unique(v.begin(), v.end()), v.end());
        }
    }
}

int HinGraph::count(NodeType t) const {
    return static_cast<int>(std::count(types_.begin(), types_.end(), t));
}

std::string user_node_name(const std::string& user_id) { return "u:" + user_id; }
std::string item_node_name(const std::string& item_id) { return "i:" + item_id; }
std::string entity_node_name(const std::string& v) { return "e:" + v; }

namespace {

NodeType char_type(char c, const std::string& where) {
    switch (c) {
        case 'U': return NodeType::User;
        case 'I': return NodeType::Item;
        case 'E': return NodeType::Entity;
    }
    throw ValidationError("invalid node type '" + std::string(1, c) + "' in " + where);
}

}  // namespace

HinGraph build_hin(const InteractionLog& log,
                   const FeatureTable* user_features,
                   const FeatureTable* item_features,
                   const std::vector<ExtraEdge>& extra_edges) {
    HinGraph g;
    std::vector<int> user_nodes(log.user_count()), item_nodes(log.item_count());
    for (int u = 0; u < log.user_count(); ++u)
        user_nodes[u] = g.add_node(user_node_name(log.users.name(u)), NodeType::User);
    for (int i = 0; i < log.item_count(); ++i)
        item_nodes[i] = g.add_node(item_node_name(log.items.name(i)), NodeType::Item);

    for (const auto& r : log.interactions) g.add_edge(user_nodes[r.user], item_nodes[r.item]);

    auto attach = [&g](const FeatureTable& table, const std::vector<int>& owner_nodes) {
        for (std::size_t idx = 0; idx < table.features.size(); ++idx) {
            for (const auto& value : table.features[idx]) {
                int e = g.add_node(entity_node_name(value), NodeType::Entity);
                g.add_edge(owner_nodes[idx], e);
            }
        }
    };
    if (user_features) {
        if (user_features->features.size() != static_cast<std::size_t>(log.user_count()))
            throw ValidationError("user feature table does not match user count");
        attach(*user_features, user_nodes);
    }
    if (item_features) {
        if (item_features->features.size() != static_cast<std::size_t>(log.item_count()))
            throw ValidationError("item feature table does not match item count");
        attach(*item_features, item_nodes);
    }

    for (const auto& e : extra_edges) {
        if (e.edge_type.size() != 2)
            throw ValidationError("invalid edge type '" + e.edge_type + "'");
        NodeType ta = char_type(e.edge_type[0], "extra edges");
        NodeType tb = char_type(e.edge_type[1], "extra edges");
        auto resolve = [&](const std::string& id, NodeType t) -> int {
            // Entities may be introduced by the edge file itself; users and
            // items must already exist in the log.
            if (t == NodeType::Entity) return g.add_node(entity_node_name(id), NodeType::Entity);
            std::string name = (t == NodeType::User) ? user_node_name(id) : item_node_name(id);
            int node = g.lookup(name);
            if (node < 0)
                throw ValidationError("extra edge references unknown " +
                                      std::string(node_type_name(t)) + " id '" + id + "'");
            return node;
        };
        g.add_edge(resolve(e.src, ta), resolve(e.dst, tb));
    }

    g.finalize();
    return g;
}

std::vector<ExtraEdge> load_extra_edges(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open extra edges file: " + path);
    std::vector<ExtraEdge> edges;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::size_t start = 0;
        while (true) {
            std::size_t pos = line.find('\t', start);
            if (pos == std::string::npos) {
                fields.push_back(line.substr(start));
                break;
            }
            fields.push_back(line.substr(start, pos - start));
            start = pos + 1;
        }
        if (fields.size() != 3)
            throw ParseError(path, lineno, "expected 3 tab-separated fields src,dst,edge_type");
        static const char* kValid[] = {"UU", "UE", "UI", "EI", "EE", "II"};
        bool ok = false;
        for (const char* v : kValid) ok = ok || fields[2] == v;
        if (!ok)
            throw ParseError(path, lineno,
                             "edge_type must be one of UU,UE,UI,EI,EE,II, got '" + fields[2] + "'");
        edges.push_back({fields[0], fields[1], fields[2]});
    }
    return edges;
}

}  // namespace lcrec
