#include "lcrec/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <unordered_set>

#include "lcrec/error.hpp"
#include "lcrec/rng.hpp"

namespace lcrec {

namespace {

std::string user_id(int u) { return "u" + std::to_string(u); }
std::string item_id(int i) { return "i" + std::to_string(i); }

}  // namespace

SyntheticWorld generate_synthetic(const SyntheticSpec& spec) {
    if (spec.users < 1 || spec.items < 1) throw ValidationError("synthetic counts must be >= 1");
    if (spec.rank < 1) throw ValidationError("synthetic rank must be >= 1");
    if (spec.clusters < 1) throw ValidationError("synthetic clusters must be >= 1");
    if (spec.embed_dim < spec.clusters)
        throw ValidationError("synthetic embed_dim must be >= clusters");

    SyntheticWorld w;
    w.log.scale = spec.scale;
    for (int u = 0; u < spec.users; ++u) w.log.users.intern(user_id(u));
    for (int i = 0; i < spec.items; ++i) w.log.items.intern(item_id(i));

    const bool clustered = spec.clusters >= 2;
    const double range = spec.scale.max - spec.scale.min;

    w.user_cluster.resize(spec.users);
    w.item_cluster.resize(spec.items);
    for (int u = 0; u < spec.users; ++u) w.user_cluster[u] = clustered ? u % spec.clusters : 0;
    for (int i = 0; i < spec.items; ++i) w.item_cluster[i] = clustered ? i % spec.clusters : 0;

    // Planted factor model. Clustered mode plants a rank-(clusters) affinity
    // structure: users are cluster indicators, items carry a per-item gain on
    // their home axis, so same-cluster ratings sit a planted edge above the
    // base level.
    Rng factor_rng(stage_seed(spec.seed, "synth-factors"));
    double base;
    if (clustered) {
        const int k = spec.clusters;
        base = spec.scale.min + 0.7 * range;
        w.user_factors = Eigen::MatrixXd::Zero(spec.users, k);
        w.item_factors = Eigen::MatrixXd::Zero(spec.items, k);
        for (int u = 0; u < spec.users; ++u) w.user_factors(u, w.user_cluster[u]) = 1.0;
        for (int i = 0; i < spec.items; ++i)
            w.item_factors(i, w.item_cluster[i]) =
                factor_rng.uniform(0.05 * range, 0.075 * range);
    } else {
        base = 0.5 * (spec.scale.min + spec.scale.max);
        w.user_factors = Eigen::MatrixXd(spec.users, spec.rank);
        w.item_factors = Eigen::MatrixXd(spec.items, spec.rank);
        for (int u = 0; u < spec.users; ++u)
            for (int r = 0; r < spec.rank; ++r)
                w.user_factors(u, r) = factor_rng.normal(0.0, spec.factor_scale);
        for (int i = 0; i < spec.items; ++i)
            for (int r = 0; r < spec.rank; ++r)
                w.item_factors(i, r) = factor_rng.normal(0.0, spec.factor_scale);
    }

    // Who rates what. A deterministic coverage pass hands every item to one
    // same-cluster user so indices stay dense, then seeded sampling fills the
    // remaining slots.
    std::vector<std::unordered_set<int>> rated(spec.users);
    std::vector<std::vector<int>> cluster_items(spec.clusters);
    std::vector<std::vector<int>> cluster_users(spec.clusters);
    for (int i = 0; i < spec.items; ++i) cluster_items[w.item_cluster[i]].push_back(i);
    for (int u = 0; u < spec.users; ++u) cluster_users[w.user_cluster[u]].push_back(u);
    for (int i = 0; i < spec.items; ++i) {
        const auto& users_here = cluster_users[w.item_cluster[i]];
        if (users_here.empty())
            throw ValidationError("synthetic world has an item cluster with no users");
        const int u = users_here[(i / std::max(1, spec.clusters)) % users_here.size()];
        rated[u].insert(i);
    }

    Rng pick_rng(stage_seed(spec.seed, "synth-pick"));
    for (int u = 0; u < spec.users; ++u) {
        const int home = w.user_cluster[u];
        const auto& home_items = cluster_items[home];
        int want_far = clustered ? static_cast<int>(
                                       std::llround(spec.out_cluster_fraction * spec.ratings_per_user))
                                 : 0;
        int want_home = spec.ratings_per_user - want_far;
        want_home = std::min<int>(want_home, static_cast<int>(home_items.size()));

        int guard = 0;
        while (static_cast<int>(rated[u].size()) < want_home && guard++ < 100000) {
            rated[u].insert(home_items[pick_rng.uniform_index(home_items.size())]);
        }
        if (clustered && spec.clusters > 1) {
            std::vector<int> far_items;
            for (int c = 0; c < spec.clusters; ++c)
                if (c != home)
                    far_items.insert(far_items.end(), cluster_items[c].begin(),
                                     cluster_items[c].end());
            const int cap = std::min<int>(want_far, static_cast<int>(far_items.size()));
            int added = 0;
            guard = 0;
            while (added < cap && guard++ < 100000) {
                const int i = far_items[pick_rng.uniform_index(far_items.size())];
                if (rated[u].insert(i).second) ++added;
            }
        }
    }

    Rng noise_rng(stage_seed(spec.seed, "synth-noise"));
    for (int u = 0; u < spec.users; ++u) {
        std::vector<int> items(rated[u].begin(), rated[u].end());
        std::sort(items.begin(), items.end());
        for (int i : items) {
            const double planted = base + w.user_factors.row(u).dot(w.item_factors.row(i));
            const double r = spec.scale.clip(planted + noise_rng.normal(0.0, spec.noise));
            w.log.interactions.push_back({u, i, r, kNoTimestamp});
        }
    }

    // Ground-truth item embeddings: cluster centers on orthogonal axes at
    // pairwise distance `separation`, Gaussian clouds around them.
    Rng emb_rng(stage_seed(spec.seed, "synth-embed"));
    const double axis = clustered ? spec.separation / std::sqrt(2.0) : 0.0;
    w.item_embeddings = EmbeddingTable(spec.embed_dim, EntityKind::Item);
    std::vector<float> vec(spec.embed_dim);
    for (int i = 0; i < spec.items; ++i) {
        for (int j = 0; j < spec.embed_dim; ++j) {
            double v = emb_rng.normal(0.0, spec.cluster_sigma);
            if (clustered && j == w.item_cluster[i]) v += axis;
            vec[j] = static_cast<float>(v);
        }
        w.item_embeddings.add(item_id(i), vec);
    }
    return w;
}

void save_ground_truth(const SyntheticWorld& world, const std::string& dir) {
    {
        std::ofstream out(dir + "/gt_user_factors.csv");
        if (!out) throw ValidationError("cannot write ground truth to " + dir);
        char buf[40];
        for (Eigen::Index u = 0; u < world.user_factors.rows(); ++u) {
            out << world.log.users.name(static_cast<int>(u));
            for (Eigen::Index r = 0; r < world.user_factors.cols(); ++r) {
                std::snprintf(buf, sizeof(buf), ",%.12g", world.user_factors(u, r));
                out << buf;
            }
            out << ",cluster=" << world.user_cluster[static_cast<std::size_t>(u)] << '\n';
        }
    }
    {
        std::ofstream out(dir + "/gt_item_factors.csv");
        char buf[40];
        for (Eigen::Index i = 0; i < world.item_factors.rows(); ++i) {
            out << world.log.items.name(static_cast<int>(i));
            for (Eigen::Index r = 0; r < world.item_factors.cols(); ++r) {
                std::snprintf(buf, sizeof(buf), ",%.12g", world.item_factors(i, r));
                out << buf;
            }
            out << ",cluster=" << world.item_cluster[static_cast<std::size_t>(i)] << '\n';
        }
    }
}

}  // namespace lcrec
