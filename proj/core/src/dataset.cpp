#include "lcrec/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>

#include "lcrec/error.hpp"
#include "lcrec/rng.hpp"

namespace lcrec {

namespace {

std::vector<std::string> split_fields(const std::string& line, char delim) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = line.find(delim, start);
        if (pos == std::string::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    // trim trailing \r from CRLF files
    if (!out.empty() && !out.back().empty() && out.back().back() == '\r')
        out.back().pop_back();
    return out;
}

bool parse_double(const std::string& s, double& out) {
    const char* begin = s.data();
    const char* end = begin + s.size();
    auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc() && ptr == end && !s.empty();
}

bool parse_int64(const std::string& s, std::int64_t& out) {
    const char* begin = s.data();
    const char* end = begin + s.size();
    auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc() && ptr == end && !s.empty();
}

}  // namespace

int IdMap::intern(const std::string& id) {
    auto it = index_.find(id);
    if (it != index_.end()) return it->second;
    int idx = static_cast<int>(names_.size());
    names_.push_back(id);
    index_.emplace(id, idx);
    return idx;
}

int IdMap::lookup(const std::string& id) const {
    auto it = index_.find(id);
    return it == index_.end() ? -1 : it->second;
}

InteractionLog ingest_ratings(const std::string& path, RatingScale scale, int min_count) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open ratings file: " + path);

    std::vector<RawRating> rows;
    std::string line;
    std::size_t lineno = 0;
    bool first_data_line = true;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || (line.size() == 1 && line[0] == '\r')) continue;
        auto fields = split_fields(line, ',');
        if (fields.size() != 3 && fields.size() != 4)
            throw ParseError(path, lineno, "expected 3 or 4 comma-separated fields, got " +
                                               std::to_string(fields.size()));
        double rating;
        if (!parse_double(fields[2], rating)) {
            // a non-numeric rating on the first line is a header
            if (first_data_line) {
                first_data_line = false;
                continue;
            }
            throw ParseError(path, lineno, "rating field does not parse: '" + fields[2] + "'");
        }
        first_data_line = false;
        if (!scale.contains(rating))
            throw ParseError(path, lineno,
                             "rating " + fields[2] + " outside declared scale [" +
                                 std::to_string(scale.min) + ", " + std::to_string(scale.max) + "]");
        RawRating row{fields[0], fields[1], rating, kNoTimestamp};
        if (fields.size() == 4 && !fields[3].empty()) {
            if (!parse_int64(fields[3], row.timestamp))
                throw ParseError(path, lineno, "timestamp does not parse: '" + fields[3] + "'");
        }
        rows.push_back(std::move(row));
    }
    return build_log(std::move(rows), scale, min_count);
}

InteractionLog build_log(std::vector<RawRating> rows, RatingScale scale, int min_count) {
    // Deduplicate (user,item): keep latest by timestamp, else last occurrence.
    std::unordered_map<std::string, std::size_t> seen;
    std::vector<bool> keep(rows.size(), false);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        std::string key = rows[i].user + '\x1f' + rows[i].item;
        auto it = seen.find(key);
        if (it == seen.end()) {
            seen.emplace(std::move(key), i);
            keep[i] = true;
        } else {
            std::size_t prev = it->second;
            bool replace;
            if (rows[i].timestamp != kNoTimestamp && rows[prev].timestamp != kNoTimestamp)
                replace = rows[i].timestamp >= rows[prev].timestamp;
            else
                replace = true;  // later occurrence wins
            if (replace) {
                keep[prev] = false;
                keep[i] = true;
                it->second = i;
            }
        }
    }
    std::vector<RawRating> dedup;
    dedup.reserve(seen.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        if (keep[i]) dedup.push_back(std::move(rows[i]));

    // Frequency filter iterated to a fixpoint: removing an entity can push
    // another one below min_count, so repeat until nothing changes.
    std::vector<bool> alive(dedup.size(), true);
    bool changed = true;
    while (changed) {
        changed = false;
        std::unordered_map<std::string, int> ucount, icount;
        for (std::size_t i = 0; i < dedup.size(); ++i) {
            if (!alive[i]) continue;
            ++ucount[dedup[i].user];
            ++icount[dedup[i].item];
        }
        for (std::size_t i = 0; i < dedup.size(); ++i) {
            if (!alive[i]) continue;
            if (ucount[dedup[i].user] < min_count || icount[dedup[i].item] < min_count) {
                alive[i] = false;
                changed = true;
            }
        }
    }

    InteractionLog log;
    log.scale = scale;
    for (std::size_t i = 0; i < dedup.size(); ++i) {
        if (!alive[i]) continue;
        Interaction r;
        r.user = log.users.intern(dedup[i].user);
        r.item = log.items.intern(dedup[i].item);
        r.rating = dedup[i].rating;
        r.timestamp = dedup[i].timestamp;
        log.interactions.push_back(r);
    }
    if (log.interactions.empty())
        throw ValidationError("dataset empty after min_count=" + std::to_string(min_count) +
                              " filtering");
    return log;
}

InteractionLog filter_min_count(const InteractionLog& log, int min_count) {
    std::vector<RawRating> rows;
    rows.reserve(log.size());
    for (const auto& r : log.interactions)
        rows.push_back({log.users.name(r.user), log.items.name(r.item), r.rating, r.timestamp});
    return build_log(std::move(rows), log.scale, min_count);
}

namespace {

// Rebuilds a log view from a subset of interactions, sharing the parent's
// id maps so train/test indices stay comparable.
InteractionLog make_view(const InteractionLog& parent, const std::vector<Interaction>& subset) {
    InteractionLog view;
    view.users = parent.users;
    view.items = parent.items;
    view.scale = parent.scale;
    view.interactions = subset;
    return view;
}

}  // namespace

SplitPair split(const InteractionLog& log, double ratio, std::uint64_t seed) {
    if (!(ratio > 0.0 && ratio < 1.0))
        throw ValidationError("split ratio must lie in (0,1), got " + std::to_string(ratio));

    const std::size_t n = log.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    Rng rng(stage_seed(seed, "split"));
    rng.shuffle(order);

    const std::size_t train_n = static_cast<std::size_t>(std::llround(ratio * static_cast<double>(n)));
    std::vector<bool> in_train(n, false);
    for (std::size_t i = 0; i < std::min(train_n, n); ++i) in_train[order[i]] = true;

    // Every test user must be present in train; move orphaned test
    // interactions into train.
    std::vector<bool> user_in_train(log.user_count(), false);
    for (std::size_t i = 0; i < n; ++i)
        if (in_train[i]) user_in_train[log.interactions[i].user] = true;
    for (std::size_t i = 0; i < n; ++i)
        if (!in_train[i] && !user_in_train[log.interactions[i].user]) in_train[i] = true;

    std::vector<Interaction> train_rows, test_rows;
    for (std::size_t i = 0; i < n; ++i)
        (in_train[i] ? train_rows : test_rows).push_back(log.interactions[i]);

    SplitPair pair;
    pair.train = make_view(log, train_rows);
    pair.test = make_view(log, test_rows);
    pair.seed = seed;
    pair.ratio = ratio;
    return pair;
}

SplitPair split_temporal(const InteractionLog& log, int days) {
    if (days <= 0) throw ValidationError("temporal split needs days >= 1");
    std::int64_t max_ts = kNoTimestamp;
    for (const auto& r : log.interactions) {
        if (!r.has_timestamp())
            throw ValidationError("temporal split requires a timestamp on every interaction");
        max_ts = std::max(max_ts, r.timestamp);
    }
    const std::int64_t cutoff = max_ts - static_cast<std::int64_t>(days) * 86400;

    std::vector<bool> in_train(log.size());
    for (std::size_t i = 0; i < log.size(); ++i)
        in_train[i] = log.interactions[i].timestamp <= cutoff;

    std::vector<bool> user_in_train(log.user_count(), false);
    for (std::size_t i = 0; i < log.size(); ++i)
        if (in_train[i]) user_in_train[log.interactions[i].user] = true;
    for (std::size_t i = 0; i < log.size(); ++i)
        if (!in_train[i] && !user_in_train[log.interactions[i].user]) in_train[i] = true;

    std::vector<Interaction> train_rows, test_rows;
    for (std::size_t i = 0; i < log.size(); ++i)
        (in_train[i] ? train_rows : test_rows).push_back(log.interactions[i]);

    SplitPair pair;
    pair.train = make_view(log, train_rows);
    pair.test = make_view(log, test_rows);
    pair.ratio = log.size() ? static_cast<double>(train_rows.size()) / log.size() : 0.0;
    return pair;
}

FeatureTable load_features(const std::string& path, const IdMap& ids, const std::string& what) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open feature file: " + path);

    FeatureTable table;
    table.features.resize(ids.size());
    std::string line;
    std::size_t lineno = 0;
    bool first = true;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || (line.size() == 1 && line[0] == '\r')) continue;
        auto fields = split_fields(line, ',');
        if (fields.size() != 3)
            throw ParseError(path, lineno, "expected 3 fields id,column,value");
        if (first && fields[0] == "id" && fields[1] == "column" && fields[2] == "value") {
            first = false;
            continue;  // header
        }
        first = false;
        int idx = ids.lookup(fields[0]);
        if (idx < 0)
            throw ValidationError(path + ":" + std::to_string(lineno) + ": unknown " + what +
                                  " id '" + fields[0] + "' in feature table");
        table.features[idx].push_back(fields[1] + "=" + fields[2]);
    }
    return table;
}

}  // namespace lcrec
