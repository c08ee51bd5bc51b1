#include "lcrec/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <sstream>

#include "lcrec/error.hpp"
#include "lcrec/rng.hpp"

namespace lcrec {

namespace {

double dot_f(const std::vector<float>& a, std::size_t ao, const std::vector<float>& b,
             std::size_t bo, int k) {
    double s = 0.0;
    for (int j = 0; j < k; ++j)
        s += static_cast<double>(a[ao + j]) * static_cast<double>(b[bo + j]);
    return s;
}

double mean_rating(const InteractionLog& log) {
    double s = 0.0;
    for (const auto& r : log.interactions) s += r.rating;
    return s / static_cast<double>(log.size());
}

void mark_seen(const InteractionLog& log, std::vector<std::uint8_t>& users,
               std::vector<std::uint8_t>& items) {
    users.assign(log.user_count(), 0);
    items.assign(log.item_count(), 0);
    for (const auto& r : log.interactions) {
        users[r.user] = 1;
        items[r.item] = 1;
    }
}

}  // namespace

// ---------------------------------------------------------------- MfModel

double MfModel::predict(int user, int item) const {
    double raw = static_cast<double>(global_mean);
    const bool su = seen_user(user), si = seen_item(item);
    if (su) raw += static_cast<double>(user_bias[user]);
    if (si) raw += static_cast<double>(item_bias[item]);
    if (su && si)
        raw += dot_f(user_factors, static_cast<std::size_t>(user) * factors, item_factors,
                     static_cast<std::size_t>(item) * factors, factors);
    return scale.clip(raw);
}

MfModel train_mf(const InteractionLog& train, const MfConfig& cfg) {
    if (train.interactions.empty()) throw ValidationError("cannot train on an empty log");
    if (cfg.factors < 1 || cfg.epochs < 1) throw ValidationError("mf config out of range");

    const int users = train.user_count(), items = train.item_count(), k = cfg.factors;
    const double mu = mean_rating(train);

    std::vector<double> bu(users, 0.0), bi(items, 0.0);
    std::vector<double> p(static_cast<std::size_t>(users) * k), q(static_cast<std::size_t>(items) * k);
    {
        Rng rng(stage_seed(cfg.seed, "mf-init"));
        for (auto& v : p) v = rng.normal(0.0, 0.1);
        for (auto& v : q) v = rng.normal(0.0, 0.1);
    }

    std::vector<std::size_t> order(train.size());
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> loss_history;

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        Rng rng(derive_seed(stage_seed(cfg.seed, "mf-epoch"), static_cast<std::uint64_t>(epoch)));
        rng.shuffle(order);
        double sse = 0.0;
        for (std::size_t idx : order) {
            const auto& r = train.interactions[idx];
            const std::size_t po = static_cast<std::size_t>(r.user) * k;
            const std::size_t qo = static_cast<std::size_t>(r.item) * k;
            double pred = mu + bu[r.user] + bi[r.item];
            for (int j = 0; j < k; ++j) pred += p[po + j] * q[qo + j];
            const double err = r.rating - pred;
            sse += err * err;

            bu[r.user] += cfg.learning_rate * (err - cfg.reg * bu[r.user]);
            bi[r.item] += cfg.learning_rate * (err - cfg.reg * bi[r.item]);
            for (int j = 0; j < k; ++j) {
                const double pj = p[po + j];
                p[po + j] += cfg.learning_rate * (err * q[qo + j] - cfg.reg * pj);
                q[qo + j] += cfg.learning_rate * (err * pj - cfg.reg * q[qo + j]);
            }
        }
        const double rmse = std::sqrt(sse / static_cast<double>(train.size()));
        if (!std::isfinite(rmse))
            throw DivergenceError("mf training diverged at epoch " + std::to_string(epoch) +
                                  " (learning_rate=" + std::to_string(cfg.learning_rate) + ")");
        loss_history.push_back(rmse);
    }

    MfModel m;
    m.scale = train.scale;
    m.user_count = users;
    m.item_count = items;
    mark_seen(train, m.user_seen, m.item_seen);
    m.factors = k;
    m.global_mean = static_cast<float>(mu);
    m.user_bias.assign(bu.begin(), bu.end());
    m.item_bias.assign(bi.begin(), bi.end());
    m.user_factors.assign(p.begin(), p.end());
    m.item_factors.assign(q.begin(), q.end());
    m.loss_history = std::move(loss_history);
    return m;
}

// --------------------------------------------------------------- NmfModel

double NmfModel::predict(int user, int item) const {
    const bool su = seen_user(user), si = seen_item(item);
    if (!su || !si) return scale.clip(static_cast<double>(fallback_mean));
    const double raw = dot_f(user_factors, static_cast<std::size_t>(user) * factors, item_factors,
                             static_cast<std::size_t>(item) * factors, factors);
    return scale.clip(raw);
}

NmfModel train_nmf(const InteractionLog& train, const MfConfig& cfg) {
    if (train.interactions.empty()) throw ValidationError("cannot train on an empty log");
    if (train.scale.min < 0.0)
        throw ValidationError("nmf requires a non-negative rating scale");
    if (cfg.factors < 1 || cfg.epochs < 1) throw ValidationError("nmf config out of range");

    const int users = train.user_count(), items = train.item_count(), k = cfg.factors;
    const double mu = mean_rating(train);

    // start factors around sqrt(mu/k) so initial predictions sit near the mean
    std::vector<double> p(static_cast<std::size_t>(users) * k), q(static_cast<std::size_t>(items) * k);
    {
        Rng rng(stage_seed(cfg.seed, "nmf-init"));
        const double base = std::sqrt(std::max(mu, 1e-6) / k);
        for (auto& v : p) v = base * rng.uniform(0.5, 1.5);
        for (auto& v : q) v = base * rng.uniform(0.5, 1.5);
    }

    std::vector<std::size_t> order(train.size());
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> loss_history;

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        Rng rng(derive_seed(stage_seed(cfg.seed, "nmf-epoch"), static_cast<std::uint64_t>(epoch)));
        rng.shuffle(order);
        double sse = 0.0;
        for (std::size_t idx : order) {
            const auto& r = train.interactions[idx];
            const std::size_t po = static_cast<std::size_t>(r.user) * k;
            const std::size_t qo = static_cast<std::size_t>(r.item) * k;
            double pred = 0.0;
            for (int j = 0; j < k; ++j) pred += p[po + j] * q[qo + j];
            const double err = r.rating - pred;
            sse += err * err;
            for (int j = 0; j < k; ++j) {
                const double pj = p[po + j];
                p[po + j] = std::max(0.0, pj + cfg.learning_rate * (err * q[qo + j] - cfg.reg * pj));
                q[qo + j] =
                    std::max(0.0, q[qo + j] + cfg.learning_rate * (err * pj - cfg.reg * q[qo + j]));
            }
        }
        const double rmse = std::sqrt(sse / static_cast<double>(train.size()));
        if (!std::isfinite(rmse))
            throw DivergenceError("nmf training diverged at epoch " + std::to_string(epoch) +
                                  " (learning_rate=" + std::to_string(cfg.learning_rate) + ")");
        loss_history.push_back(rmse);
    }

    NmfModel m;
    m.scale = train.scale;
    m.user_count = users;
    m.item_count = items;
    mark_seen(train, m.user_seen, m.item_seen);
    m.factors = k;
    m.fallback_mean = static_cast<float>(mu);
    m.user_factors.assign(p.begin(), p.end());
    m.item_factors.assign(q.begin(), q.end());
    m.loss_history = std::move(loss_history);
    return m;
}

// --------------------------------------------------------------- KnnModel

double KnnModel::similarity(int a, int b) const {
    for (const auto& nb : neighbors[a])
        if (nb.item == b) return static_cast<double>(nb.sim);
    for (const auto& nb : neighbors[b])
        if (nb.item == a) return static_cast<double>(nb.sim);
    return 0.0;
}

double KnnModel::predict(int user, int item) const {
    const double base = seen_user(user) ? static_cast<double>(user_mean[user])
                                        : static_cast<double>(global_mean);
    if (!seen_item(item)) return scale.clip(base);
    if (!seen_user(user)) return scale.clip(base);

    double num = 0.0, den = 0.0;
    for (const auto& nb : neighbors[item]) {
        for (const auto& [j, r] : user_ratings[user]) {
            if (j == nb.item) {
                num += static_cast<double>(nb.sim) * (static_cast<double>(r) - base);
                den += std::abs(static_cast<double>(nb.sim));
                break;
            }
        }
    }
    const double raw = den > 0.0 ? base + num / den : base;
    return scale.clip(raw);
}

KnnModel train_knn(const InteractionLog& train, const KnnConfig& cfg) {
    if (train.interactions.empty()) throw ValidationError("cannot train on an empty log");
    if (cfg.k_neighbors < 1) throw ValidationError("knn needs k_neighbors >= 1");

    const int users = train.user_count(), items = train.item_count();

    // item columns: (user, rating) sorted by user for linear-time dot products
    std::vector<std::vector<std::pair<int, double>>> columns(items);
    std::vector<double> user_sum(users, 0.0);
    std::vector<int> user_cnt(users, 0);
    for (const auto& r : train.interactions) {
        columns[r.item].emplace_back(r.user, r.rating);
        user_sum[r.user] += r.rating;
        ++user_cnt[r.user];
    }
    for (auto& col : columns) std::sort(col.begin(), col.end());

    std::vector<double> item_mean(items, 0.0), item_norm(items, 0.0);
    for (int i = 0; i < items; ++i) {
        if (columns[i].empty()) continue;
        double s = 0.0;
        for (const auto& [u, r] : columns[i]) s += r;
        item_mean[i] = s / static_cast<double>(columns[i].size());
        double n2 = 0.0;
        for (const auto& [u, r] : columns[i]) {
            const double c = r - item_mean[i];
            n2 += c * c;
        }
        item_norm[i] = std::sqrt(n2);
    }

    KnnModel m;
    m.scale = train.scale;
    m.user_count = users;
    m.item_count = items;
    mark_seen(train, m.user_seen, m.item_seen);
    m.k_neighbors = cfg.k_neighbors;
    m.global_mean = static_cast<float>(mean_rating(train));
    m.user_mean.resize(users, 0.0f);
    for (int u = 0; u < users; ++u)
        if (user_cnt[u] > 0) m.user_mean[u] = static_cast<float>(user_sum[u] / user_cnt[u]);

    m.user_ratings.resize(users);
    for (const auto& r : train.interactions)
        m.user_ratings[r.user].emplace_back(r.item, static_cast<float>(r.rating));
    for (auto& v : m.user_ratings) std::sort(v.begin(), v.end());

    // full pairwise similarities, then keep top-k per item
    m.neighbors.resize(items);
    std::vector<std::pair<float, int>> scored;
    for (int a = 0; a < items; ++a) {
        scored.clear();
        if (item_norm[a] > 0.0) {
            for (int b = 0; b < items; ++b) {
                if (b == a || item_norm[b] <= 0.0) continue;
                // merge-join on sorted user lists
                double dot = 0.0;
                std::size_t x = 0, y = 0;
                const auto& ca = columns[a];
                const auto& cb = columns[b];
                while (x < ca.size() && y < cb.size()) {
                    if (ca[x].first < cb[y].first)
                        ++x;
                    else if (ca[x].first > cb[y].first)
                        ++y;
                    else {
                        dot += (ca[x].second - item_mean[a]) * (cb[y].second - item_mean[b]);
                        ++x;
                        ++y;
                    }
                }
                if (dot != 0.0) {
                    const double sim = dot / (item_norm[a] * item_norm[b]);
                    scored.emplace_back(static_cast<float>(sim), b);
                }
            }
        }
        // sim descending, index ascending on ties
        std::sort(scored.begin(), scored.end(), [](const auto& l, const auto& r) {
            return l.first > r.first || (l.first == r.first && l.second < r.second);
        });
        const std::size_t keep = std::min<std::size_t>(scored.size(), cfg.k_neighbors);
        m.neighbors[a].reserve(keep);
        for (std::size_t t = 0; t < keep; ++t)
            m.neighbors[a].push_back({scored[t].second, scored[t].first});
    }
    return m;
}

// -------------------------------------------------------------- BiasModel

double BiasModel::predict(int user, int item) const {
    double raw = static_cast<double>(global_mean);
    if (seen_user(user)) raw += static_cast<double>(user_bias[user]);
    if (seen_item(item)) raw += static_cast<double>(item_bias[item]);
    return scale.clip(raw);
}

BiasModel train_bias(const InteractionLog& train, double reg) {
    if (train.interactions.empty()) throw ValidationError("cannot train on an empty log");
    if (reg < 0.0) throw ValidationError("bias regularization must be >= 0");

    const int users = train.user_count(), items = train.item_count();
    const double mu = mean_rating(train);
    std::vector<double> bu(users, 0.0), bi(items, 0.0);

    for (int round = 0; round < 2; ++round) {
        std::vector<double> sum(items, 0.0);
        std::vector<int> cnt(items, 0);
        for (const auto& r : train.interactions) {
            sum[r.item] += r.rating - mu - bu[r.user];
            ++cnt[r.item];
        }
        for (int i = 0; i < items; ++i) bi[i] = cnt[i] ? sum[i] / (reg + cnt[i]) : 0.0;

        std::vector<double> usum(users, 0.0);
        std::vector<int> ucnt(users, 0);
        for (const auto& r : train.interactions) {
            usum[r.user] += r.rating - mu - bi[r.item];
            ++ucnt[r.user];
        }
        for (int u = 0; u < users; ++u) bu[u] = ucnt[u] ? usum[u] / (reg + ucnt[u]) : 0.0;
    }

    BiasModel m;
    m.scale = train.scale;
    m.user_count = users;
    m.item_count = items;
    mark_seen(train, m.user_seen, m.item_seen);
    m.global_mean = static_cast<float>(mu);
    m.user_bias.assign(bu.begin(), bu.end());
    m.item_bias.assign(bi.begin(), bi.end());
    return m;
}

// ----------------------------------------------------------- persistence

namespace {

constexpr char kModelMagic[4] = {'L', 'U', 'M', 'D'};
constexpr std::uint32_t kModelVersion = 1;

void put_u32(std::ostream& o, std::uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
    o.write(reinterpret_cast<const char*>(b), 4);
}
void put_u64(std::ostream& o, std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
    o.write(reinterpret_cast<const char*>(b), 8);
}
void put_f32(std::ostream& o, float f) {
    std::uint32_t v;
    std::memcpy(&v, &f, 4);
    put_u32(o, v);
}
void put_str(std::ostream& o, const std::string& s) {
    put_u32(o, static_cast<std::uint32_t>(s.size()));
    o.write(s.data(), static_cast<std::streamsize>(s.size()));
}
void put_f32s(std::ostream& o, const std::vector<float>& v) {
    put_u64(o, v.size());
    for (float f : v) put_f32(o, f);
}
void put_bytes(std::ostream& o, const std::vector<std::uint8_t>& v) {
    put_u64(o, v.size());
    o.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size()));
}

std::uint32_t get_u32(std::istream& in, const std::string& w) {
    unsigned char b[4];
    if (!in.read(reinterpret_cast<char*>(b), 4)) throw FormatError(w + ": truncated checkpoint");
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return v;
}
std::uint64_t get_u64(std::istream& in, const std::string& w) {
    unsigned char b[8];
    if (!in.read(reinterpret_cast<char*>(b), 8)) throw FormatError(w + ": truncated checkpoint");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
}
float get_f32(std::istream& in, const std::string& w) {
    std::uint32_t v = get_u32(in, w);
    float f;
    std::memcpy(&f, &v, 4);
    return f;
}
std::string get_str(std::istream& in, const std::string& w) {
    std::uint32_t len = get_u32(in, w);
    std::string s(len, '\0');
    if (len && !in.read(s.data(), len)) throw FormatError(w + ": truncated checkpoint");
    return s;
}
std::vector<float> get_f32s(std::istream& in, const std::string& w) {
    std::uint64_t n = get_u64(in, w);
    std::vector<float> v(n);
    for (auto& f : v) f = get_f32(in, w);
    return v;
}
std::vector<std::uint8_t> get_bytes(std::istream& in, const std::string& w) {
    std::uint64_t n = get_u64(in, w);
    std::vector<std::uint8_t> v(n);
    if (n && !in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(n)))
        throw FormatError(w + ": truncated checkpoint");
    return v;
}

void put_header(std::ostream& o, const RatingModel& m, const std::string& config_echo) {
    o.write(kModelMagic, 4);
    put_u32(o, kModelVersion);
    put_str(o, m.kind());
    put_str(o, config_echo);
    put_f32(o, static_cast<float>(m.scale.min));
    put_f32(o, static_cast<float>(m.scale.max));
}

}  // namespace

void MfModel::save(std::ostream& out) const {
    std::ostringstream echo;
    echo << "factors=" << factors;
    put_header(out, *this, echo.str());
    put_u64(out, static_cast<std::uint64_t>(user_count));
    put_u64(out, static_cast<std::uint64_t>(item_count));
    put_u32(out, static_cast<std::uint32_t>(factors));
    put_f32(out, global_mean);
    put_f32s(out, user_bias);
    put_f32s(out, item_bias);
    put_f32s(out, user_factors);
    put_f32s(out, item_factors);
    put_bytes(out, user_seen);
    put_bytes(out, item_seen);
}

void NmfModel::save(std::ostream& out) const {
    std::ostringstream echo;
    echo << "factors=" << factors;
    put_header(out, *this, echo.str());
    put_u64(out, static_cast<std::uint64_t>(user_count));
    put_u64(out, static_cast<std::uint64_t>(item_count));
    put_u32(out, static_cast<std::uint32_t>(factors));
    put_f32(out, fallback_mean);
    put_f32s(out, user_factors);
    put_f32s(out, item_factors);
    put_bytes(out, user_seen);
    put_bytes(out, item_seen);
}

void KnnModel::save(std::ostream& out) const {
    std::ostringstream echo;
    echo << "k_neighbors=" << k_neighbors;
    put_header(out, *this, echo.str());
    put_u64(out, static_cast<std::uint64_t>(user_count));
    put_u64(out, static_cast<std::uint64_t>(item_count));
    put_u32(out, static_cast<std::uint32_t>(k_neighbors));
    put_f32(out, global_mean);
    put_f32s(out, user_mean);
    for (const auto& lst : neighbors) {
        put_u64(out, lst.size());
        for (const auto& nb : lst) {
            put_u64(out, static_cast<std::uint64_t>(nb.item));
            put_f32(out, nb.sim);
        }
    }
    for (const auto& lst : user_ratings) {
        put_u64(out, lst.size());
        for (const auto& [item, rating] : lst) {
            put_u64(out, static_cast<std::uint64_t>(item));
            put_f32(out, rating);
        }
    }
    put_bytes(out, user_seen);
    put_bytes(out, item_seen);
}

void BiasModel::save(std::ostream& out) const {
    put_header(out, *this, "");
    put_u64(out, static_cast<std::uint64_t>(user_count));
    put_u64(out, static_cast<std::uint64_t>(item_count));
    put_f32(out, global_mean);
    put_f32s(out, user_bias);
    put_f32s(out, item_bias);
    put_bytes(out, user_seen);
    put_bytes(out, item_seen);
}

void save_model(const RatingModel& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write model checkpoint: " + path);
    model.save(out);
}

std::unique_ptr<RatingModel> load_model(std::istream& in, const std::string& what) {
    char magic[4];
    if (!in.read(magic, 4) || std::memcmp(magic, kModelMagic, 4) != 0)
        throw FormatError(what + ": missing LUMD magic");
    if (get_u32(in, what) != kModelVersion) throw FormatError(what + ": unsupported version");
    const std::string kind = get_str(in, what);
    get_str(in, what);  // config echo, informational
    RatingScale scale;
    scale.min = static_cast<double>(get_f32(in, what));
    scale.max = static_cast<double>(get_f32(in, what));

    auto fill_base = [&](RatingModel& m) {
        m.scale = scale;
    };

    if (kind == "mf") {
        auto m = std::make_unique<MfModel>();
        fill_base(*m);
        m->user_count = static_cast<int>(get_u64(in, what));
        m->item_count = static_cast<int>(get_u64(in, what));
        m->factors = static_cast<int>(get_u32(in, what));
        m->global_mean = get_f32(in, what);
        m->user_bias = get_f32s(in, what);
        m->item_bias = get_f32s(in, what);
        m->user_factors = get_f32s(in, what);
        m->item_factors = get_f32s(in, what);
        m->user_seen = get_bytes(in, what);
        m->item_seen = get_bytes(in, what);
        return m;
    }
    if (kind == "nmf") {
        auto m = std::make_unique<NmfModel>();
        fill_base(*m);
        m->user_count = static_cast<int>(get_u64(in, what));
        m->item_count = static_cast<int>(get_u64(in, what));
        m->factors = static_cast<int>(get_u32(in, what));
        m->fallback_mean = get_f32(in, what);
        m->user_factors = get_f32s(in, what);
        m->item_factors = get_f32s(in, what);
        m->user_seen = get_bytes(in, what);
        m->item_seen = get_bytes(in, what);
        return m;
    }
    if (kind == "knn") {
        auto m = std::make_unique<KnnModel>();
        fill_base(*m);
        m->user_count = static_cast<int>(get_u64(in, what));
        m->item_count = static_cast<int>(get_u64(in, what));
        m->k_neighbors = static_cast<int>(get_u32(in, what));
        m->global_mean = get_f32(in, what);
        m->user_mean = get_f32s(in, what);
        m->neighbors.resize(m->item_count);
        for (auto& lst : m->neighbors) {
            const std::uint64_t n = get_u64(in, what);
            lst.resize(n);
            for (auto& nb : lst) {
                nb.item = static_cast<int>(get_u64(in, what));
                nb.sim = get_f32(in, what);
            }
        }
        m->user_ratings.resize(m->user_count);
        for (auto& lst : m->user_ratings) {
            const std::uint64_t n = get_u64(in, what);
            lst.resize(n);
            for (auto& pr : lst) {
                pr.first = static_cast<int>(get_u64(in, what));
                pr.second = get_f32(in, what);
            }
        }
        m->user_seen = get_bytes(in, what);
        m->item_seen = get_bytes(in, what);
        return m;
    }
    if (kind == "bias") {
        auto m = std::make_unique<BiasModel>();
        fill_base(*m);
        m->user_count = static_cast<int>(get_u64(in, what));
        m->item_count = static_cast<int>(get_u64(in, what));
        m->global_mean = get_f32(in, what);
        m->user_bias = get_f32s(in, what);
        m->item_bias = get_f32s(in, what);
        m->user_seen = get_bytes(in, what);
        m->item_seen = get_bytes(in, what);
        return m;
    }
    throw FormatError(what + ": unknown model kind '" + kind + "'");
}

std::unique_ptr<RatingModel> load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open model checkpoint: " + path);
    return load_model(in, path);
}

}  // namespace lcrec
