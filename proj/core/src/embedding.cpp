#include "lcrec/embedding.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "lcrec/error.hpp"

namespace lcrec {

namespace {

constexpr char kMagic[4] = {'L', 'U', 'E', 'M'};
constexpr std::uint32_t kVersion = 1;

void write_u32(std::ostream& out, std::uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
    out.write(reinterpret_cast<const char*>(b), 4);
}

void write_u64(std::ostream& out, std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
    out.write(reinterpret_cast<const char*>(b), 8);
}

void write_f32(std::ostream& out, float f) {
    std::uint32_t v;
    std::memcpy(&v, &f, 4);
    write_u32(out, v);
}

std::uint32_t read_u32(std::istream& in, const std::string& path) {
    unsigned char b[4];
    if (!in.read(reinterpret_cast<char*>(b), 4)) throw FormatError(path + ": truncated file");
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return v;
}

std::uint64_t read_u64(std::istream& in, const std::string& path) {
    unsigned char b[8];
    if (!in.read(reinterpret_cast<char*>(b), 8)) throw FormatError(path + ": truncated file");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
}

float read_f32(std::istream& in, const std::string& path) {
    std::uint32_t v = read_u32(in, path);
    float f;
    std::memcpy(&f, &v, 4);
    return f;
}

}  // namespace

void EmbeddingTable::add(const std::string& id, const std::vector<float>& vec) {
    if (static_cast<int>(vec.size()) != dim_)
        throw ValidationError("embedding for '" + id + "' has dimension " +
                              std::to_string(vec.size()) + ", table dim is " +
                              std::to_string(dim_));
    for (float f : vec)
        if (!std::isfinite(f))
            throw ValidationError("embedding for '" + id + "' contains a non-finite component");
    if (index_.count(id))
        throw ValidationError("duplicate embedding id '" + id + "'");
    index_.emplace(id, size());
    ids_.push_back(id);
    data_.insert(data_.end(), vec.begin(), vec.end());
}

int EmbeddingTable::row_of(const std::string& id) const {
    auto it = index_.find(id);
    return it == index_.end() ? -1 : it->second;
}

void save_embeddings_text(const EmbeddingTable& table, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write embeddings file: " + path);
    out << table.size() << ' ' << table.dim() << '\n';
    char buf[48];
    for (int r = 0; r < table.size(); ++r) {
        out << table.id(r);
        const float* row = table.row(r);
        for (int j = 0; j < table.dim(); ++j) {
            // %.9g round-trips binary32 exactly
            std::snprintf(buf, sizeof(buf), " %.9g", static_cast<double>(row[j]));
            out << buf;
        }
        out << '\n';
    }
}

EmbeddingTable load_embeddings_text(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open embeddings file: " + path);
    std::string header;
    if (!std::getline(in, header)) throw FormatError(path + ": empty file");
    std::istringstream hs(header);
    long long count = -1, dim = -1;
    if (!(hs >> count >> dim) || count < 0 || dim < 1)
        throw FormatError(path + ": header must be 'count dim'");

    EmbeddingTable table(static_cast<int>(dim), EntityKind::Node);
    std::string line;
    std::size_t lineno = 1;
    long long rows = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string id;
        ls >> id;
        std::vector<float> vec;
        vec.reserve(dim);
        double v;
        while (ls >> v) {
            if (!std::isfinite(v))
                throw FormatError(path + ":" + std::to_string(lineno) + ": non-finite value");
            vec.push_back(static_cast<float>(v));
        }
        if (static_cast<long long>(vec.size()) != dim)
            throw FormatError(path + ":" + std::to_string(lineno) + ": expected " +
                              std::to_string(dim) + " values, got " + std::to_string(vec.size()));
        table.add(id, vec);
        ++rows;
    }
    if (rows != count)
        throw FormatError(path + ": header declares " + std::to_string(count) + " rows, found " +
                          std::to_string(rows));
    return table;
}

void save_embeddings_binary(const EmbeddingTable& table, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write embeddings file: " + path);
    out.write(kMagic, 4);
    write_u32(out, kVersion);
    write_u64(out, static_cast<std::uint64_t>(table.size()));
    write_u64(out, static_cast<std::uint64_t>(table.dim()));
    for (int r = 0; r < table.size(); ++r) {
        const std::string& id = table.id(r);
        write_u32(out, static_cast<std::uint32_t>(id.size()));
        out.write(id.data(), static_cast<std::streamsize>(id.size()));
    }
    for (int r = 0; r < table.size(); ++r) {
        const float* row = table.row(r);
        for (int j = 0; j < table.dim(); ++j) write_f32(out, row[j]);
    }
}

EmbeddingTable load_embeddings_binary(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open embeddings file: " + path);
    char magic[4];
    if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0)
        throw FormatError(path + ": missing LUEM magic");
    std::uint32_t version = read_u32(in, path);
    if (version != kVersion)
        throw FormatError(path + ": unsupported format version " + std::to_string(version));
    std::uint64_t count = read_u64(in, path);
    std::uint64_t dim = read_u64(in, path);
    if (dim < 1) throw FormatError(path + ": invalid dimension");

    std::vector<std::string> ids(count);
    for (auto& id : ids) {
        std::uint32_t len = read_u32(in, path);
        id.resize(len);
        if (len && !in.read(id.data(), len)) throw FormatError(path + ": truncated id table");
    }
    EmbeddingTable table(static_cast<int>(dim), EntityKind::Node);
    std::vector<float> vec(dim);
    for (std::uint64_t r = 0; r < count; ++r) {
        for (auto& f : vec) {
            f = read_f32(in, path);
            if (!std::isfinite(f))
                throw FormatError(path + ": non-finite value in row " + std::to_string(r));
        }
        table.add(ids[r], vec);
    }
    return table;
}

EmbeddingTable load_embeddings(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open embeddings file: " + path);
    char magic[4] = {0, 0, 0, 0};
    in.read(magic, 4);
    in.close();
    if (std::memcmp(magic, kMagic, 4) == 0) return load_embeddings_binary(path);
    return load_embeddings_text(path);
}

}  // namespace lcrec
