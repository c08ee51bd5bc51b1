#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "lcrec/error.hpp"
#include "lcrec/estimator.hpp"
#include "lcrec/recommender.hpp"
#include "lcrec/rng.hpp"
#include "lcrec/synthetic.hpp"

using namespace lcrec;

namespace {

// Fixed-score stub so ranking behavior can be tested in isolation.
class FixedModel : public RatingModel {
public:
    FixedModel(int users, int items, std::vector<double> score_by_item, RatingScale s) {
        scale = s;
        user_count = users;
        item_count = items;
        user_seen.assign(users, 1);
        item_seen.assign(items, 1);
        scores_ = std::move(score_by_item);
    }
    double predict(int, int item) const override { return scale.clip(scores_[item]); }
    const char* kind() const override { return "fixed"; }
    void save(std::ostream&) const override {}

private:
    std::vector<double> scores_;
};

}  // namespace

TEST_CASE("utility is the documented linear combination") {
    CHECK(utility(4.0, 2.0, 0.03) == doctest::Approx(4.06));
    CHECK(utility(3.3, 7.0, 0.0) == doctest::Approx(3.3));
    CHECK(utility(0.0, 5.5, 1.0) == doctest::Approx(5.5));
}

TEST_CASE("profiles: consumed sets, closures and cold flags") {
    std::vector<RawRating> rows{
        {"a", "x", 5.0}, {"a", "y", 4.0}, {"a", "z", 2.0},
        {"b", "x", 3.0},
        {"c", "ghost", 4.0},  // item without an embedding
    };
    const auto log = build_log(rows, {1, 5}, 1);
    EmbeddingTable items(2, EntityKind::Item);
    items.add("x", {0.0f, 0.0f});
    items.add("y", {1.0f, 0.0f});
    items.add("z", {0.0f, 1.0f});

    RecommenderConfig cfg;
    cfg.closure_kind = ClosureKind::Hull;
    cfg.cold_start_threshold = 2;
    const auto profiles = build_profiles(log, items, cfg);
    REQUIRE(profiles.size() == 3);

    const int a = log.users.lookup("a");
    CHECK(profiles[a].consumed.size() == 3);
    CHECK(!profiles[a].cold);
    REQUIRE(profiles[a].closure.has_value());
    CHECK(profiles[a].closure->point_count() == 3);

    const int b = log.users.lookup("b");
    CHECK(profiles[b].consumed.size() == 1);
    CHECK(profiles[b].cold);  // below threshold 2
    CHECK(profiles[b].closure.has_value());

    const int c = log.users.lookup("c");
    CHECK(profiles[c].consumed.empty());  // ghost has no embedding
    CHECK(profiles[c].cold);
    CHECK(!profiles[c].closure.has_value());
}

TEST_CASE("positive-only profiles keep only ratings above the threshold") {
    std::vector<RawRating> rows{{"a", "x", 5.0}, {"a", "y", 2.0}};
    const auto log = build_log(rows, {1, 5}, 1);
    EmbeddingTable items(1, EntityKind::Item);
    items.add("x", {0.0f});
    items.add("y", {1.0f});

    RecommenderConfig cfg;
    cfg.positive_only = true;
    cfg.relevance_threshold = 4.0;
    const auto profiles = build_profiles(log, items, cfg);
    CHECK(profiles[0].consumed.size() == 1);
    CHECK(profiles[0].train_items.size() == 2);  // filtering still excludes both
}

TEST_CASE("unexpectedness: consumed candidates score zero, singles measure distance") {
    std::vector<RawRating> rows{{"a", "p", 4.0}};
    const auto log = build_log(rows, {1, 5}, 1);
    EmbeddingTable items(2, EntityKind::Item);
    items.add("p", {1.0f, 1.0f});
    RecommenderConfig cfg;
    cfg.closure_kind = ClosureKind::Sphere;
    const auto profiles = build_profiles(log, items, cfg);

    CHECK(unexpectedness(profiles[0], Eigen::Vector2d(1.0, 1.0), cfg) == doctest::Approx(0.0));
    CHECK(unexpectedness(profiles[0], Eigen::Vector2d(4.0, 5.0), cfg) ==
          doctest::Approx(5.0));  // ||(3,4)||
}

TEST_CASE("triangle profile, hull closure, x=(1,1) gives the analytic distance") {
    std::vector<RawRating> rows{{"u", "t0", 4.0}, {"u", "t1", 4.0}, {"u", "t2", 4.0}};
    const auto log = build_log(rows, {1, 5}, 1);
    EmbeddingTable items(2, EntityKind::Item);
    items.add("t0", {0.0f, 0.0f});
    items.add("t1", {1.0f, 0.0f});
    items.add("t2", {0.0f, 1.0f});
    RecommenderConfig cfg;
    cfg.closure_kind = ClosureKind::Hull;
    cfg.hull_tol = 1e-12;
    const auto profiles = build_profiles(log, items, cfg);
    CHECK(unexpectedness(profiles[0], Eigen::Vector2d(1.0, 1.0), cfg) ==
          doctest::Approx(std::sqrt(2.0) / 2.0).epsilon(1e-6));
}

TEST_CASE("recommend_top_n: alpha=0 reduces to rating ranking; consumed items never appear") {
    // two users so all four items are interned; u0 consumed x and y
    std::vector<RawRating> rows{{"u0", "x", 5.0}, {"u0", "y", 4.0},
                                {"u1", "c1", 3.0}, {"u1", "c2", 3.0}};
    const auto log = build_log(rows, {1, 5}, 1);
    EmbeddingTable items(2, EntityKind::Item);
    items.add("x", {0.0f, 0.0f});
    items.add("y", {0.1f, 0.0f});
    items.add("c1", {0.2f, 0.0f});
    items.add("c2", {5.0f, 0.0f});

    const int x = log.items.lookup("x"), y = log.items.lookup("y");
    const int c1 = log.items.lookup("c1"), c2 = log.items.lookup("c2");
    std::vector<double> scores(4);
    scores[x] = 5.0;
    scores[y] = 5.0;
    scores[c1] = 4.0;  // higher rating than c2
    scores[c2] = 3.5;
    const FixedModel model(log.user_count(), log.item_count(), scores, {1, 5});

    RecommenderConfig cfg;
    cfg.alpha = 0.0;
    cfg.top_n = 5;
    cfg.cold_start_threshold = 0;
    const auto profiles = build_profiles(log, items, cfg);
    const auto candidates = candidate_universe(log, items);
    const auto rows_of = item_embedding_rows(log, items);

    const auto rec = recommend_top_n(0, model, profiles[0], items, rows_of, cfg, candidates);
    REQUIRE(rec.size() == 2);  // 4 items minus 2 consumed
    CHECK(rec[0].item == c1);
    CHECK(rec[1].item == c2);
    for (const auto& s : rec) {
        CHECK(s.item != x);
        CHECK(s.item != y);
    }

    // alpha > 0 with a far c2 flips the order: 4.0 vs 3.5 + 0.1*~4.8
    RecommenderConfig cfg2 = cfg;
    cfg2.alpha = 0.2;
    const auto rec2 = recommend_top_n(0, model, profiles[0], items, rows_of, cfg2, candidates);
    CHECK(rec2[0].item == c2);
    // and the list is sorted by utility with score fields filled in
    CHECK(rec2[0].utility >= rec2[1].utility);
    CHECK(rec2[0].utility ==
          doctest::Approx(rec2[0].est_rating + 0.2 * rec2[0].unexpectedness));
}

TEST_CASE("equal ratings: the more unexpected candidate ranks first for any alpha > 0") {
    std::vector<RawRating> rows{{"u0", "x", 5.0}, {"u1", "near", 3.0}, {"u1", "far", 3.0}};
    const auto log = build_log(rows, {1, 5}, 1);
    EmbeddingTable items(1, EntityKind::Item);
    items.add("x", {0.0f});
    items.add("near", {0.5f});
    items.add("far", {2.0f});

    std::vector<double> scores(3, 4.0);  // equal estimated ratings
    const FixedModel model(log.user_count(), log.item_count(), scores, {1, 5});
    RecommenderConfig cfg;
    cfg.alpha = 0.03;
    cfg.cold_start_threshold = 0;
    cfg.closure_kind = ClosureKind::Sphere;
    const auto profiles = build_profiles(log, items, cfg);
    const auto candidates = candidate_universe(log, items);
    const auto rows_of = item_embedding_rows(log, items);
    const auto rec = recommend_top_n(0, model, profiles[0], items, rows_of, cfg, candidates);
    REQUIRE(rec.size() == 2);
    CHECK(log.items.name(rec[0].item) == "far");
}

TEST_CASE("cold users get their alpha forced to zero") {
    std::vector<RawRating> rows{{"u0", "x", 5.0}, {"u1", "a", 3.0}, {"u1", "b", 3.0}};
    const auto log = build_log(rows, {1, 5}, 1);
    EmbeddingTable items(1, EntityKind::Item);
    items.add("x", {0.0f});
    items.add("a", {1.0f});
    items.add("b", {9.0f});

    const int a = log.items.lookup("a"), b = log.items.lookup("b");
    std::vector<double> scores(3);
    scores[a] = 4.0;
    scores[b] = 3.9;  // slightly worse rating but far away
    const FixedModel model(log.user_count(), log.item_count(), scores, {1, 5});

    RecommenderConfig cfg;
    cfg.alpha = 1.0;
    cfg.cold_start_threshold = 5;  // u0 has 1 consumed item -> cold
    const auto profiles = build_profiles(log, items, cfg);
    CHECK(profiles[0].cold);
    const auto candidates = candidate_universe(log, items);
    const auto rows_of = item_embedding_rows(log, items);
    const auto rec = recommend_top_n(0, model, profiles[0], items, rows_of, cfg, candidates);
    // with alpha forced to 0 the better-rated item wins despite alpha=1
    CHECK(rec[0].item == a);

    RecommenderConfig warm = cfg;
    warm.cold_start_threshold = 0;
    const auto profiles2 = build_profiles(log, items, warm);
    const auto rec2 = recommend_top_n(0, model, profiles2[0], items, rows_of, warm, candidates);
    CHECK(rec2[0].item == b);
}

TEST_CASE("clustered world: higher alpha raises top-5 unexpectedness for >= 90% of users") {
    SyntheticSpec spec;
    spec.users = 50;
    spec.items = 60;
    spec.clusters = 2;
    spec.separation = 10.0;
    spec.cluster_sigma = 0.5;
    spec.embed_dim = 8;
    spec.ratings_per_user = 16;
    spec.seed = 99;
    const auto world = generate_synthetic(spec);

    MfConfig mcfg;
    mcfg.factors = 8;
    mcfg.epochs = 40;
    mcfg.learning_rate = 0.02;
    mcfg.reg = 0.01;
    mcfg.seed = 1;
    const auto model = train_mf(world.log, mcfg);

    RecommenderConfig cfg;
    cfg.top_n = 5;
    cfg.cold_start_threshold = 5;
    cfg.closure_kind = ClosureKind::Hull;
    const auto profiles = build_profiles(world.log, world.item_embeddings, cfg);
    const auto candidates = candidate_universe(world.log, world.item_embeddings);
    const auto rows_of = item_embedding_rows(world.log, world.item_embeddings);

    int improved = 0, total = 0;
    for (int u = 0; u < world.log.user_count(); ++u) {
        RecommenderConfig a0 = cfg, a1 = cfg;
        a0.alpha = 0.0;
        a1.alpha = 0.1;
        const auto r0 =
            recommend_top_n(u, model, profiles[u], world.item_embeddings, rows_of, a0, candidates);
        const auto r1 =
            recommend_top_n(u, model, profiles[u], world.item_embeddings, rows_of, a1, candidates);
        if (r0.empty()) continue;
        double m0 = 0, m1 = 0;
        for (const auto& s : r0) m0 += s.unexpectedness;
        for (const auto& s : r1) m1 += s.unexpectedness;
        ++total;
        if (m1 / r1.size() > m0 / r0.size()) ++improved;
    }
    REQUIRE(total == 50);
    CHECK(improved >= 45);
}

TEST_CASE("recommendation csv is written in the documented column order") {
    std::vector<RawRating> rows{{"u0", "x", 5.0}, {"u1", "a", 3.0}};
    const auto log = build_log(rows, {1, 5}, 1);
    std::vector<RecommendationList> recs(2);
    recs[0] = {{log.items.lookup("a"), 4.0, 1.5, 4.045}};
    const auto path = (std::filesystem::temp_directory_path() / "lcrec_recs.csv").string();
    save_recommendations_csv(recs, log, path);
    std::ifstream in(path);
    std::string line;
    std::getline(in, line);
    CHECK(line == "user_id,rank,item_id,est_rating,unexpectedness,utility");
    std::getline(in, line);
    CHECK(line.substr(0, 7) == "u0,1,a,");
}
