#include <doctest.h>

#include <cmath>

#include "lcrec/error.hpp"
#include "lcrec/stats.hpp"
#include "lcrec/walks.hpp"

using namespace lcrec;

namespace {

// Star fixture: one user node in the middle, items and entities as leaves.
HinGraph star(int items, int entities) {
    HinGraph g;
    const int center = g.add_node("u:center", NodeType::User);
    for (int i = 0; i < items; ++i)
        g.add_edge(center, g.add_node("i:" + std::to_string(i), NodeType::Item));
    for (int e = 0; e < entities; ++e)
        g.add_edge(center, g.add_node("e:" + std::to_string(e), NodeType::Entity));
    g.finalize();
    return g;
}

}  // namespace

TEST_CASE("corpus has walks_per_node sequences per node, each at most walk_length") {
    const auto g = star(3, 2);
    WalkConfig cfg;
    cfg.walk_length = 100;
    cfg.walks_per_node = 10;
    const auto corpus = hetero_walks(g, cfg, 1);
    CHECK(corpus.sequences.size() == static_cast<std::size_t>(10 * g.node_count()));
    for (const auto& s : corpus.sequences) {
        CHECK(!s.empty());
        CHECK(s.size() <= 100);
        for (int n : s) CHECK(n < g.node_count());
    }
}

TEST_CASE("single-edge path forces alternation") {
    HinGraph g;
    const int a = g.add_node("u:a", NodeType::User);
    const int b = g.add_node("i:b", NodeType::Item);
    g.add_edge(a, b);
    g.finalize();

    WalkConfig cfg;
    cfg.walk_length = 20;
    cfg.walks_per_node = 2;
    const auto corpus = hetero_walks(g, cfg, 5);
    for (const auto& s : corpus.sequences) {
        CHECK(s.size() == 20);
        for (std::size_t k = 1; k < s.size(); ++k) CHECK(s[k] != s[k - 1]);
    }
}

TEST_CASE("isolated node yields length-1 walks") {
    HinGraph g;
    g.add_node("u:alone", NodeType::User);
    g.finalize();
    WalkConfig cfg;
    cfg.walk_length = 50;
    cfg.walks_per_node = 3;
    const auto corpus = hetero_walks(g, cfg, 2);
    CHECK(corpus.sequences.size() == 3);
    for (const auto& s : corpus.sequences) CHECK(s.size() == 1);
}

TEST_CASE("all-zero coefficients are a configuration error") {
    const auto g = star(2, 2);
    WalkConfig cfg;
    cfg.coefficients = {0, 0, 0, 0, 0, 0};
    CHECK_THROWS_AS(hetero_walks(g, cfg, 1), ConfigError);
}

TEST_CASE("walks are deterministic per (seed, node, repeat) and differ across seeds") {
    const auto g = star(4, 3);
    WalkConfig cfg;
    cfg.walk_length = 30;
    cfg.walks_per_node = 4;
    const auto c1 = hetero_walks(g, cfg, 77);
    const auto c2 = hetero_walks(g, cfg, 77);
    CHECK(c1.sequences == c2.sequences);
    const auto c3 = hetero_walks(g, cfg, 78);
    CHECK(c1.sequences != c3.sequences);
}

TEST_CASE("next-type frequencies follow the renormalized transition weights") {
    // C_UI=2, C_UE=1 from a user with 3 item and 2 entity neighbors:
    // type probabilities 2/3 and 1/3, uniform within the type.
    const auto g = star(3, 2);
    const int center = g.lookup("u:center");
    REQUIRE(center >= 0);

    TransitionCoefficients coeffs;
    coeffs.ui = 2.0;
    coeffs.ue = 1.0;

    const int steps = 100000;
    Rng rng(stage_seed(99, "walk-dist-test"));
    int item_steps = 0;
    std::vector<int> per_node(g.node_count(), 0);
    for (int s = 0; s < steps; ++s) {
        const auto next = sample_step(g, coeffs, center, rng);
        REQUIRE(next.has_value());
        if (g.type(*next) == NodeType::Item) ++item_steps;
        ++per_node[*next];
    }
    const double item_freq = static_cast<double>(item_steps) / steps;
    CHECK(std::abs(item_freq - 2.0 / 3.0) < 0.01);
    CHECK(std::abs((1.0 - item_freq) - 1.0 / 3.0) < 0.01);

    // chi-square over the five leaves against the exact per-node weights
    double chi2 = 0.0;
    for (int n = 0; n < g.node_count(); ++n) {
        if (n == center) continue;
        const double p = g.type(n) == NodeType::Item ? (2.0 / 3.0) / 3.0 : (1.0 / 3.0) / 2.0;
        const double expect = p * steps;
        chi2 += (per_node[n] - expect) * (per_node[n] - expect) / expect;
    }
    CHECK(chi_square_sf(chi2, 4) > 0.01);
}

TEST_CASE("metapath constrains step types and start nodes") {
    // users connect to items and entities; pattern U->I->U... must never
    // visit an entity
    HinGraph g;
    const int u1 = g.add_node("u:1", NodeType::User);
    const int u2 = g.add_node("u:2", NodeType::User);
    const int i1 = g.add_node("i:1", NodeType::Item);
    const int e1 = g.add_node("e:1", NodeType::Entity);
    g.add_edge(u1, i1);
    g.add_edge(u2, i1);
    g.add_edge(u1, e1);
    g.finalize();

    WalkConfig cfg;
    cfg.walk_length = 40;
    cfg.walks_per_node = 5;
    cfg.metapath = {NodeType::User, NodeType::Item};
    const auto corpus = hetero_walks(g, cfg, 123);
    CHECK(corpus.sequences.size() == 2 * 5);  // only the two user start nodes
    for (const auto& s : corpus.sequences) {
        CHECK(g.type(s.front()) == NodeType::User);
        for (std::size_t k = 0; k < s.size(); ++k)
            CHECK(g.type(s[k]) == (k % 2 == 0 ? NodeType::User : NodeType::Item));
    }
}
