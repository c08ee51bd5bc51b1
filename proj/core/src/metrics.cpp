#include "lcrec/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "lcrec/error.hpp"

namespace lcrec {

std::pair<double, double> rmse_mae(const RatingModel& model, const InteractionLog& test) {
    if (test.interactions.empty()) throw ValidationError("rmse_mae needs a non-empty test set");
    double se = 0.0, ae = 0.0;
    for (const auto& r : test.interactions) {
        const double err = model.predict(r.user, r.item) - r.rating;
        se += err * err;
        ae += std::fabs(err);
    }
    const double n = static_cast<double>(test.size());
    return {std::sqrt(se / n), ae / n};
}

std::pair<double, double> precision_recall_at_n(const std::vector<RecommendationList>& recs,
                                                const InteractionLog& test, double threshold,
                                                int n) {
    if (n < 1) throw ValidationError("precision_recall_at_n needs n >= 1");

    std::unordered_map<int, std::unordered_set<int>> relevant;
    for (const auto& r : test.interactions)
        if (r.rating >= threshold) relevant[r.user].insert(r.item);

    double prec_sum = 0.0, rec_sum = 0.0;
    int counted = 0;
    for (std::size_t u = 0; u < recs.size(); ++u) {
        auto it = relevant.find(static_cast<int>(u));
        if (it == relevant.end() || it->second.empty()) continue;
        int hits = 0;
        for (const auto& s : recs[u])
            if (it->second.count(s.item)) ++hits;
        prec_sum += static_cast<double>(hits) / n;
        rec_sum += static_cast<double>(hits) / static_cast<double>(it->second.size());
        ++counted;
    }
    if (counted == 0) return {0.0, 0.0};
    return {prec_sum / counted, rec_sum / counted};
}

double mean_unexpectedness(const std::vector<RecommendationList>& recs,
                           const std::vector<UserProfile>& profiles, const InteractionLog& log,
                           const EmbeddingTable& items, const RecommenderConfig& cfg) {
    const auto rows = item_embedding_rows(log, items);
    const int d = items.dim();
    Eigen::VectorXd e(d);
    double sum = 0.0;
    std::int64_t count = 0;
    for (std::size_t u = 0; u < recs.size(); ++u) {
        for (const auto& s : recs[u]) {
            const int row = rows[s.item];
            if (row < 0)
                throw ValidationError("recommended item '" + log.items.name(s.item) +
                                      "' lacks an embedding");
            const float* src = items.row(row);
            for (int j = 0; j < d; ++j) e[j] = static_cast<double>(src[j]);
            sum += unexpectedness(profiles[u], e, cfg);
            ++count;
        }
    }
    return count ? sum / static_cast<double>(count) : 0.0;
}

double serendipity(const std::vector<RecommendationList>& recs,
                   const std::vector<RecommendationList>& pm_recs,
                   const std::function<bool(int user, int item)>& useful) {
    double sum = 0.0;
    int counted = 0;
    for (std::size_t u = 0; u < recs.size(); ++u) {
        if (recs[u].empty()) continue;
        std::unordered_set<int> pm;
        if (u < pm_recs.size())
            for (const auto& s : pm_recs[u]) pm.insert(s.item);
        int hits = 0;
        for (const auto& s : recs[u])
            if (!pm.count(s.item) && useful(static_cast<int>(u), s.item)) ++hits;
        sum += static_cast<double>(hits) / static_cast<double>(recs[u].size());
        ++counted;
    }
    return counted ? sum / counted : 0.0;
}

DiversityResult diversity(const std::vector<RecommendationList>& recs, const InteractionLog& log,
                          const EmbeddingTable& items) {
    const auto rows = item_embedding_rows(log, items);
    const int d = items.dim();

    DiversityResult out;
    double sum = 0.0;
    int counted = 0;
    for (const auto& list : recs) {
        if (list.size() < 2) continue;
        double pair_sum = 0.0;
        int pairs = 0;
        for (std::size_t i = 0; i < list.size(); ++i) {
            for (std::size_t j = i + 1; j < list.size(); ++j) {
                const int ra = rows[list[i].item], rb = rows[list[j].item];
                if (ra < 0 || rb < 0)
                    throw ValidationError("recommended item lacks an embedding");
                const float* a = items.row(ra);
                const float* b = items.row(rb);
                double dot = 0.0, na = 0.0, nb = 0.0;
                for (int k = 0; k < d; ++k) {
                    dot += static_cast<double>(a[k]) * static_cast<double>(b[k]);
                    na += static_cast<double>(a[k]) * static_cast<double>(a[k]);
                    nb += static_cast<double>(b[k]) * static_cast<double>(b[k]);
                }
                double cos = 0.0;
                if (na > 0.0 && nb > 0.0)
                    cos = dot / (std::sqrt(na) * std::sqrt(nb));
                else
                    ++out.zero_norm_pairs;
                pair_sum += 1.0 - cos;
                ++pairs;
            }
        }
        sum += pair_sum / pairs;
        ++counted;
    }
    out.value = counted ? sum / counted : 0.0;
    return out;
}

EvalReport evaluate(const EvalInputs& in) {
    EvalReport rep;
    rep.n = in.rec_cfg.top_n;
    rep.alpha = in.rec_cfg.alpha;
    rep.estimator = in.estimator_tag;
    rep.closure = closure_kind_name(in.rec_cfg.closure_kind);
    rep.seed = in.seed;

    auto [rmse, mae] = rmse_mae(*in.model, *in.test);
    rep.rmse = rmse;
    rep.mae = mae;

    auto [prec, rec] =
        precision_recall_at_n(*in.recs, *in.test, in.rec_cfg.relevance_threshold, in.rec_cfg.top_n);
    rep.precision_at_n = prec;
    rep.recall_at_n = rec;

    rep.unexpectedness =
        mean_unexpectedness(*in.recs, *in.profiles, *in.train, *in.items, in.rec_cfg);

    std::unordered_map<int, std::unordered_map<int, double>> test_ratings;
    for (const auto& r : in.test->interactions) test_ratings[r.user][r.item] = r.rating;
    const double threshold = in.rec_cfg.relevance_threshold;
    auto useful = [&test_ratings, threshold](int user, int item) {
        auto it = test_ratings.find(user);
        if (it == test_ratings.end()) return false;
        auto jt = it->second.find(item);
        return jt != it->second.end() && jt->second >= threshold;
    };
    rep.serendipity = serendipity(*in.recs, *in.pm_recs, useful);

    rep.diversity = diversity(*in.recs, *in.train, *in.items).value;
    return rep;
}

namespace {

void write_report_row(std::ofstream& out, const EvalReport& r) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), "%s,%s,%.12g,%d,%llu,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g\n",
                  r.estimator.c_str(), r.closure.c_str(), r.alpha, r.n,
                  static_cast<unsigned long long>(r.seed), r.rmse, r.mae, r.precision_at_n,
                  r.recall_at_n, r.unexpectedness, r.serendipity, r.diversity);
    out << buf;
}

constexpr const char* kReportHeader =
    "estimator,closure,alpha,n,seed,rmse,mae,precision_at_n,recall_at_n,unexpectedness,"
    "serendipity,diversity\n";

}  // namespace

void save_report_csv(const std::vector<EvalReport>& rows, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write report file: " + path);
    out << kReportHeader;
    for (const auto& r : rows) write_report_row(out, r);
}

void save_sweep_csv(const SweepTable& table, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write sweep file: " + path);
    out << kReportHeader;
    for (const auto& [alpha, rep] : table.rows) write_report_row(out, rep);
}

}  // namespace lcrec
