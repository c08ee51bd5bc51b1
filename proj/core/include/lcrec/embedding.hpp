#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

namespace lcrec {

enum class EntityKind : int { User = 0, Item = 1, Node = 2 };

// id -> d-dimensional vector, the latent space all geometry operates in.
// Components are stored as IEEE-754 binary32, matching the on-disk format
// exactly so save/load round-trips are bit-identical.
class EmbeddingTable {
public:
    EmbeddingTable() = default;
    EmbeddingTable(int dim, EntityKind kind) : dim_(dim), kind_(kind) {}

    int dim() const { return dim_; }
    EntityKind kind() const { return kind_; }
    int size() const { return static_cast<int>(ids_.size()); }

    // Appends a row; vec.size() must equal dim and all components be finite.
    void add(const std::string& id, const std::vector<float>& vec);

    bool contains(const std::string& id) const { return index_.count(id) > 0; }
    int row_of(const std::string& id) const;  // -1 if absent
    const float* row(int r) const { return data_.data() + static_cast<std::size_t>(r) * dim_; }
    const std::string& id(int r) const { return ids_[r]; }
    const std::vector<std::string>& ids() const { return ids_; }
    const std::vector<float>& data() const { return data_; }

    void set_kind(EntityKind k) { kind_ = k; }

    // kind is in-memory metadata only; equality is over the stored content.
    bool operator==(const EmbeddingTable& o) const {
        return dim_ == o.dim_ && ids_ == o.ids_ && data_ == o.data_;
    }

private:
    int dim_ = 0;
    EntityKind kind_ = EntityKind::Node;
    std::vector<std::string> ids_;
    std::vector<float> data_;  // row-major size() x dim
    std::unordered_map<std::string, int> index_;
};

// Text format: line 1 "count dim", then one "id v_1 ... v_dim" line per
// entity, printed with enough digits to round-trip binary32 exactly.
void save_embeddings_text(const EmbeddingTable& table, const std::string& path);
EmbeddingTable load_embeddings_text(const std::string& path);

// Binary format: magic "LUEM", u32 LE version, u64 LE count, u64 LE dim,
// length-prefixed UTF-8 id table, then count*dim binary32 LE, row-major.
void save_embeddings_binary(const EmbeddingTable& table, const std::string& path);
EmbeddingTable load_embeddings_binary(const std::string& path);

// Dispatches on the file contents (binary magic vs text header).
EmbeddingTable load_embeddings(const std::string& path);

}  // namespace lcrec
