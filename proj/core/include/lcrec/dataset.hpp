#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <unordered_map>
#include <vector>

namespace lcrec {

struct RatingScale {
    double min = 1.0;
    double max = 5.0;

    double clip(double r) const {
        if (r < min) return min;
        if (r > max) return max;
        return r;
    }
    bool contains(double r) const { return r >= min && r <= max; }
    bool operator==(const RatingScale&) const = default;
};

constexpr std::int64_t kNoTimestamp = std::numeric_limits<std::int64_t>::min();

struct Interaction {
    int user = 0;
    int item = 0;
    double rating = 0.0;
    std::int64_t timestamp = kNoTimestamp;

    bool has_timestamp() const { return timestamp != kNoTimestamp; }
    bool operator==(const Interaction&) const = default;
};

// Bidirectional string<->dense-index table. Indices are assigned in first-seen
// order, so construction is deterministic for a fixed input.
class IdMap {
public:
    int intern(const std::string& id);
    int lookup(const std::string& id) const;  // -1 if absent
    const std::string& name(int index) const { return names_[index]; }
    int size() const { return static_cast<int>(names_.size()); }
    const std::vector<std::string>& names() const { return names_; }
    bool operator==(const IdMap& o) const { return names_ == o.names_; }

private:
    std::vector<std::string> names_;
    std::unordered_map<std::string, int> index_;
};

// Filtered, index-interned rating log. Invariants: dense indices, every
// rating inside the scale, and (for ingest output) every user/item appearing
// in at least min_count interactions.
struct InteractionLog {
    std::vector<Interaction> interactions;
    IdMap users;
    IdMap items;
    RatingScale scale;

    int user_count() const { return users.size(); }
    int item_count() const { return items.size(); }
    std::size_t size() const { return interactions.size(); }
    bool operator==(const InteractionLog&) const = default;
};

struct SplitPair {
    InteractionLog train;
    InteractionLog test;
    std::uint64_t seed = 0;
    double ratio = 0.8;
};

// Reads a ratings CSV (user_id,item_id,rating[,timestamp], optional header),
// deduplicates (user,item) pairs keeping the latest, and applies the
// min_count frequency filter iterated to a fixpoint. Surviving ids are
// re-interned densely in first-appearance order.
InteractionLog ingest_ratings(const std::string& path, RatingScale scale, int min_count);

// Same pipeline over in-memory rows; ingest_ratings delegates here.
struct RawRating {
    std::string user;
    std::string item;
    double rating;
    std::int64_t timestamp = kNoTimestamp;
};
InteractionLog build_log(std::vector<RawRating> rows, RatingScale scale, int min_count);

// Applies only the fixpoint frequency filter to an existing log (used by the
// idempotence check). Returns a re-interned log.
InteractionLog filter_min_count(const InteractionLog& log, int min_count);

// Global uniform random split. Interactions of users whose draws all landed
// in test are moved back to train so every test user is present in train.
SplitPair split(const InteractionLog& log, double ratio, std::uint64_t seed);

// Temporal split: the last `days` worth of interactions (by timestamp) become
// the test set. Requires timestamps on every interaction.
SplitPair split_temporal(const InteractionLog& log, int days);

// Long-form feature table: entity id -> list of namespaced "column=value"
// feature strings. Multi-valued features appear as repeated rows.
struct FeatureTable {
    // parallel to the owning IdMap indices; entry i lists entity i's features
    std::vector<std::vector<std::string>> features;
};

// Loads a CSV with columns id,column,value and namespaces values as
// "column=value". Ids must already be interned in `ids`.
FeatureTable load_features(const std::string& path, const IdMap& ids,
                           const std::string& what);

}  // namespace lcrec
