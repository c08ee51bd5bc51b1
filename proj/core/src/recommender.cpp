#include "lcrec/recommender.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

#include "lcrec/error.hpp"

namespace lcrec {

std::vector<int> item_embedding_rows(const InteractionLog& log, const EmbeddingTable& items) {
    std::vector<int> rows(log.item_count());
    for (int i = 0; i < log.item_count(); ++i) rows[i] = items.row_of(log.items.name(i));
    return rows;
}

std::vector<UserProfile> build_profiles(const InteractionLog& train, const EmbeddingTable& items,
                                        const RecommenderConfig& cfg) {
    const auto rows = item_embedding_rows(train, items);
    std::vector<UserProfile> profiles(train.user_count());
    for (int u = 0; u < train.user_count(); ++u) profiles[u].user = u;

    std::vector<std::vector<int>> consumed(train.user_count());
    for (const auto& r : train.interactions) {
        profiles[r.user].train_items.push_back(r.item);
        if (rows[r.item] < 0) continue;  // not embeddable, cannot generate the closure
        if (cfg.positive_only && r.rating < cfg.relevance_threshold) continue;
        consumed[r.user].push_back(r.item);
    }

    const int d = items.dim();
    for (int u = 0; u < train.user_count(); ++u) {
        auto& p = profiles[u];
        std::sort(p.train_items.begin(), p.train_items.end());
        p.train_items.erase(std::unique(p.train_items.begin(), p.train_items.end()),
                            p.train_items.end());
        std::sort(consumed[u].begin(), consumed[u].end());
        consumed[u].erase(std::unique(consumed[u].begin(), consumed[u].end()), consumed[u].end());
        p.consumed = consumed[u];

        p.cold = static_cast<int>(p.consumed.size()) < cfg.cold_start_threshold;
        if (p.consumed.empty()) continue;  // cold, no closure

        Eigen::MatrixXf pts(p.consumed.size(), d);
        for (std::size_t k = 0; k < p.consumed.size(); ++k) {
            const float* row = items.row(rows[p.consumed[k]]);
            for (int j = 0; j < d; ++j) pts(static_cast<Eigen::Index>(k), j) = row[j];
        }
        p.closure = build_closure(cfg.closure_kind, pts, cfg.sphere_mode);
    }
    return profiles;
}

double unexpectedness(const UserProfile& profile, const Eigen::VectorXd& item_embedding,
                      const RecommenderConfig& cfg) {
    if (!profile.closure) return 0.0;
    return profile.closure->distance(item_embedding, cfg.hull_tol, cfg.hull_max_iter);
}

std::vector<int> candidate_universe(const InteractionLog& log, const EmbeddingTable& items) {
    std::vector<int> out;
    for (int i = 0; i < log.item_count(); ++i)
        if (items.contains(log.items.name(i))) out.push_back(i);
    return out;
}

RecommendationList recommend_top_n(int user, const RatingModel& model, const UserProfile& profile,
                                   const EmbeddingTable& items,
                                   const std::vector<int>& item_rows,
                                   const RecommenderConfig& cfg,
                                   const std::vector<int>& candidates) {
    const double alpha_eff = profile.cold ? 0.0 : cfg.alpha;
    const int d = items.dim();
    Eigen::VectorXd e(d);

    RecommendationList scored;
    scored.reserve(candidates.size());
    for (int item : candidates) {
        if (std::binary_search(profile.train_items.begin(), profile.train_items.end(), item))
            continue;
        const int row = item_rows[item];
        if (row < 0)
            throw ValidationError("candidate item index " + std::to_string(item) +
                                  " lacks an embedding");
        const float* src = items.row(row);
        for (int j = 0; j < d; ++j) e[j] = static_cast<double>(src[j]);
        const double est = model.predict(user, item);
        const double unexp = unexpectedness(profile, e, cfg);
        scored.push_back({item, est, unexp, utility(est, unexp, alpha_eff)});
    }

    const std::size_t n = std::min<std::size_t>(cfg.top_n, scored.size());
    std::partial_sort(scored.begin(), scored.begin() + n, scored.end(),
                      [](const ScoredItem& a, const ScoredItem& b) {
                          if (a.utility != b.utility) return a.utility > b.utility;
                          return a.item < b.item;
                      });
    scored.resize(n);
    return scored;
}

std::vector<RecommendationList> recommend_all(const RatingModel& model,
                                              const std::vector<UserProfile>& profiles,
                                              const InteractionLog& log,
                                              const EmbeddingTable& items,
                                              const RecommenderConfig& cfg,
                                              const std::vector<int>& candidates) {
    const auto item_rows = item_embedding_rows(log, items);
    std::vector<RecommendationList> recs(profiles.size());
    for (std::size_t u = 0; u < profiles.size(); ++u)
        recs[u] = recommend_top_n(static_cast<int>(u), model, profiles[u], items, item_rows, cfg,
                                  candidates);
    return recs;
}

void save_recommendations_csv(const std::vector<RecommendationList>& recs,
                              const InteractionLog& log, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write recommendations file: " + path);
    out << "user_id,rank,item_id,est_rating,unexpectedness,utility\n";
    char buf[128];
    for (std::size_t u = 0; u < recs.size(); ++u) {
        for (std::size_t rank = 0; rank < recs[u].size(); ++rank) {
            const auto& s = recs[u][rank];
            std::snprintf(buf, sizeof(buf), ",%zu,", rank + 1);
            out << log.users.name(static_cast<int>(u)) << buf << log.items.name(s.item);
            std::snprintf(buf, sizeof(buf), ",%.12g,%.12g,%.12g\n", s.est_rating, s.unexpectedness,
                          s.utility);
            out << buf;
        }
    }
}

}  // namespace lcrec
