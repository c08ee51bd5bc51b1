#include <doctest.h>

#include "lcrec/dataset.hpp"
#include "lcrec/error.hpp"
#include "lcrec/hin.hpp"

using namespace lcrec;

namespace {

InteractionLog two_by_two() {
    std::vector<RawRating> rows{
        {"u1", "i1", 4.0}, {"u1", "i2", 3.0}, {"u2", "i1", 5.0}};
    return build_log(rows, {1, 5}, 1);
}

}  // namespace

TEST_CASE("interactions plus one shared feature tag give 5 nodes and typed edges") {
    const auto log = two_by_two();
    FeatureTable item_f;
    item_f.features = {{"tag=cozy"}, {"tag=cozy"}};  // i1 and i2 share one tag

    const auto g = build_hin(log, nullptr, &item_f, {});
    CHECK(g.node_count() == 5);  // 2 U + 2 I + 1 E
    CHECK(g.count(NodeType::User) == 2);
    CHECK(g.count(NodeType::Item) == 2);
    CHECK(g.count(NodeType::Entity) == 1);

    // UI edges, one per interaction
    const int u1 = g.lookup(user_node_name("u1"));
    const int i1 = g.lookup(item_node_name("i1"));
    const int e = g.lookup(entity_node_name("tag=cozy"));
    REQUIRE(u1 >= 0);
    REQUIRE(i1 >= 0);
    REQUIRE(e >= 0);
    CHECK(g.neighbors(u1, NodeType::Item).size() == 2);
    CHECK(g.neighbors(i1, NodeType::User).size() == 2);
    CHECK(g.neighbors(e, NodeType::Item).size() == 2);
    CHECK(g.neighbors(i1, NodeType::Entity).size() == 1);
}

TEST_CASE("no feature tables gives a bipartite U-I graph") {
    const auto log = two_by_two();
    const auto g = build_hin(log, nullptr, nullptr, {});
    CHECK(g.node_count() == 4);
    CHECK(g.count(NodeType::Entity) == 0);
    for (int n = 0; n < g.node_count(); ++n) {
        CHECK(g.neighbors(n, NodeType::Entity).empty());
        if (g.type(n) == NodeType::User) CHECK(g.neighbors(n, NodeType::User).empty());
        if (g.type(n) == NodeType::Item) CHECK(g.neighbors(n, NodeType::Item).empty());
    }
}

TEST_CASE("duplicated feature assignments collapse to one entity and one edge") {
    const auto log = two_by_two();
    FeatureTable item_f;
    item_f.features = {{"tag=cozy", "tag=cozy", "tag=cozy"}, {}};

    const auto g = build_hin(log, nullptr, &item_f, {});
    CHECK(g.count(NodeType::Entity) == 1);
    const int i1 = g.lookup(item_node_name("i1"));
    CHECK(g.neighbors(i1, NodeType::Entity).size() == 1);
    const int e = g.lookup(entity_node_name("tag=cozy"));
    CHECK(g.neighbors(e, NodeType::Item).size() == 1);
}

TEST_CASE("adjacency is symmetric for every edge type") {
    const auto log = two_by_two();
    FeatureTable user_f, item_f;
    user_f.features = {{"city=north"}, {"city=south"}};
    item_f.features = {{"genre=a"}, {"genre=a"}};
    std::vector<ExtraEdge> extra{{"u1", "u2", "UU"}, {"genre=a", "city=north", "EE"}};

    const auto g = build_hin(log, &user_f, &item_f, extra);
    for (int v = 0; v < g.node_count(); ++v) {
        for (int t = 0; t < kNodeTypeCount; ++t) {
            for (int w : g.neighbors(v, static_cast<NodeType>(t))) {
                const auto& back = g.neighbors(w, g.type(v));
                CHECK(std::find(back.begin(), back.end(), v) != back.end());
            }
        }
    }
}

TEST_CASE("extra edges validate endpoint ids and types") {
    const auto log = two_by_two();
    CHECK_THROWS_AS(build_hin(log, nullptr, nullptr, {{"u1", "ghost", "UI"}}), ValidationError);
    CHECK_THROWS_AS(build_hin(log, nullptr, nullptr, {{"u1", "u2", "XY"}}), ValidationError);
    // UU friendship works
    const auto g = build_hin(log, nullptr, nullptr, {{"u1", "u2", "UU"}});
    const int u1 = g.lookup(user_node_name("u1"));
    CHECK(g.neighbors(u1, NodeType::User).size() == 1);
}

TEST_CASE("feature table sized for a different log is rejected") {
    const auto log = two_by_two();
    FeatureTable wrong;
    wrong.features = {{"a=b"}};  // one entry, two users
    CHECK_THROWS_AS(build_hin(log, &wrong, nullptr, {}), ValidationError);
}
