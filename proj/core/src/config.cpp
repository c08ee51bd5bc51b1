#include "lcrec/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

#include "lcrec/error.hpp"
#include "lcrec/rng.hpp"

namespace lcrec {

std::string format_double_exact(double v) {
    char buf[40];
    for (int prec = 15; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
        double back;
        std::sscanf(buf, "%lf", &back);
        if (back == v) break;
    }
    return buf;
}

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

struct Field {
    std::string key;
    std::function<void(RunConfig&, const std::string&)> set;
    std::function<std::string(const RunConfig&)> get;
};

double to_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': '" + v + "' is not a number");
    }
}

int to_int(const std::string& key, const std::string& v) {
    int x = 0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc() || p != v.data() + v.size())
        throw ConfigError("config key '" + key + "': '" + v + "' is not an integer");
    return x;
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
    std::uint64_t x = 0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc() || p != v.data() + v.size())
        throw ConfigError("config key '" + key + "': '" + v + "' is not an unsigned integer");
    return x;
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ConfigError("config key '" + key + "': '" + v + "' is not a boolean (true/false)");
}

std::vector<double> to_grid(const std::string& key, const std::string& v) {
    std::vector<double> grid;
    std::stringstream ss(v);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        tok = trim(tok);
        if (!tok.empty()) grid.push_back(to_double(key, tok));
    }
    return grid;
}

std::string grid_to_string(const std::vector<double>& grid) {
    std::string s;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (i) s += ',';
        s += format_double_exact(grid[i]);
    }
    return s;
}

#define STR_FIELD(key, member)                                                  \
    {key, [](RunConfig& c, const std::string& v) { c.member = v; },             \
     [](const RunConfig& c) { return c.member; }}
#define DBL_FIELD(key, member)                                                        \
    {key, [](RunConfig& c, const std::string& v) { c.member = to_double(key, v); },   \
     [](const RunConfig& c) { return format_double_exact(c.member); }}
#define INT_FIELD(key, member)                                                     \
    {key, [](RunConfig& c, const std::string& v) { c.member = to_int(key, v); },   \
     [](const RunConfig& c) { return std::to_string(c.member); }}
#define BOOL_FIELD(key, member)                                                     \
    {key, [](RunConfig& c, const std::string& v) { c.member = to_bool(key, v); },   \
     [](const RunConfig& c) { return c.member ? "true" : "false"; }}

const std::vector<Field>& fields() {
    static const std::vector<Field> kFields = {
        {"seed", [](RunConfig& c, const std::string& v) { c.seed = to_u64("seed", v); },
         [](const RunConfig& c) { return std::to_string(c.seed); }},
        STR_FIELD("out", out),
        STR_FIELD("data.ratings", data.ratings),
        STR_FIELD("data.user_features", data.user_features),
        STR_FIELD("data.item_features", data.item_features),
        STR_FIELD("data.extra_edges", data.extra_edges),
        DBL_FIELD("data.scale_min", data.scale_min),
        DBL_FIELD("data.scale_max", data.scale_max),
        INT_FIELD("data.min_count", data.min_count),
        BOOL_FIELD("data.synthetic", data.synthetic),
        STR_FIELD("split.mode", split.mode),
        DBL_FIELD("split.ratio", split.ratio),
        INT_FIELD("split.temporal_days", split.temporal_days),
        STR_FIELD("embedding.method", embedding.method),
        INT_FIELD("embedding.dim", embedding.dim),
        STR_FIELD("embedding.path", embedding.path),
        INT_FIELD("walk.length", walk.length),
        INT_FIELD("walk.per_node", walk.per_node),
        DBL_FIELD("walk.c_uu", walk.c_uu),
        DBL_FIELD("walk.c_ue", walk.c_ue),
        DBL_FIELD("walk.c_ui", walk.c_ui),
        DBL_FIELD("walk.c_ei", walk.c_ei),
        DBL_FIELD("walk.c_ee", walk.c_ee),
        DBL_FIELD("walk.c_ii", walk.c_ii),
        STR_FIELD("walk.metapath", walk.metapath),
        INT_FIELD("skipgram.window", skipgram.window),
        INT_FIELD("skipgram.min_count", skipgram.min_count),
        INT_FIELD("skipgram.iterations", skipgram.iterations),
        INT_FIELD("skipgram.negatives", skipgram.negatives),
        DBL_FIELD("skipgram.learning_rate", skipgram.learning_rate),
        DBL_FIELD("ae.learning_rate", ae.learning_rate),
        INT_FIELD("ae.epochs", ae.epochs),
        INT_FIELD("ae.batch_size", ae.batch_size),
        STR_FIELD("estimator.kind", estimator.kind),
        INT_FIELD("mf.factors", mf.factors),
        DBL_FIELD("mf.learning_rate", mf.learning_rate),
        DBL_FIELD("mf.reg", mf.reg),
        INT_FIELD("mf.epochs", mf.epochs),
        INT_FIELD("nmf.factors", nmf.factors),
        DBL_FIELD("nmf.learning_rate", nmf.learning_rate),
        DBL_FIELD("nmf.reg", nmf.reg),
        INT_FIELD("nmf.epochs", nmf.epochs),
        INT_FIELD("knn.neighbors", knn.neighbors),
        DBL_FIELD("bias.reg", bias.reg),
        STR_FIELD("closure.kind", closure.kind),
        BOOL_FIELD("closure.sphere_half_diameter", closure.sphere_half_diameter),
        DBL_FIELD("closure.fw_tol", closure.fw_tol),
        INT_FIELD("closure.fw_max_iter", closure.fw_max_iter),
        DBL_FIELD("recommend.alpha", recommend.alpha),
        INT_FIELD("recommend.top_n", recommend.top_n),
        INT_FIELD("recommend.cold_start_threshold", recommend.cold_start_threshold),
        BOOL_FIELD("recommend.positive_only", recommend.positive_only),
        DBL_FIELD("eval.relevance_threshold", eval.relevance_threshold),
        {"sweep.grid",
         [](RunConfig& c, const std::string& v) { c.sweep.grid = to_grid("sweep.grid", v); },
         [](const RunConfig& c) { return grid_to_string(c.sweep.grid); }},
        INT_FIELD("synth.users", synth.users),
        INT_FIELD("synth.items", synth.items),
        INT_FIELD("synth.rank", synth.rank),
        DBL_FIELD("synth.noise", synth.noise),
        INT_FIELD("synth.clusters", synth.clusters),
        DBL_FIELD("synth.separation", synth.separation),
        DBL_FIELD("synth.cluster_sigma", synth.cluster_sigma),
        INT_FIELD("synth.embed_dim", synth.embed_dim),
        INT_FIELD("synth.ratings_per_user", synth.ratings_per_user),
        DBL_FIELD("synth.out_cluster_fraction", synth.out_cluster_fraction),
        DBL_FIELD("synth.factor_scale", synth.factor_scale),
        BOOL_FIELD("pipeline.reuse_embeddings", pipeline.reuse_embeddings),
        BOOL_FIELD("pipeline.reuse_model", pipeline.reuse_model),
        BOOL_FIELD("pipeline.reuse_closures", pipeline.reuse_closures),
    };
    return kFields;
}

#undef STR_FIELD
#undef DBL_FIELD
#undef INT_FIELD
#undef BOOL_FIELD

const Field* find_field(const std::string& key) {
    for (const auto& f : fields())
        if (f.key == key) return &f;
    return nullptr;
}

void check_enum(const std::string& key, const std::string& value,
                std::initializer_list<const char*> valid) {
    for (const char* v : valid)
        if (value == v) return;
    std::string msg = "config key '" + key + "': invalid value '" + value + "' (valid:";
    for (const char* v : valid) msg += std::string(" ") + v;
    msg += ")";
    throw ConfigError(msg);
}

void check(bool ok, const std::string& msg) {
    if (!ok) throw ConfigError(msg);
}

}  // namespace

RunConfig parse_config_text(const std::string& text, const std::string& what) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(what + ":" + std::to_string(lineno) + ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const Field* f = find_field(key);
        if (!f)
            throw ConfigError(what + ":" + std::to_string(lineno) + ": unknown config key '" +
                              key + "'");
        f->set(cfg, value);
    }
    validate_config(cfg);
    return cfg;
}

RunConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str(), path);
}

std::string serialize_config(const RunConfig& cfg) {
    std::string out;
    for (const auto& f : fields()) {
        out += f.key;
        out += " = ";
        out += f.get(cfg);
        out += '\n';
    }
    return out;
}

void save_config(const RunConfig& cfg, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write config file: " + path);
    out << serialize_config(cfg);
}

void validate_config(const RunConfig& cfg) {
    check_enum("split.mode", cfg.split.mode, {"random", "temporal"});
    check_enum("embedding.method", cfg.embedding.method, {"hine", "ae", "load"});
    check_enum("estimator.kind", cfg.estimator.kind, {"mf", "nmf", "knn"});
    check_enum("closure.kind", cfg.closure.kind, {"sphere", "box", "hull"});

    check(cfg.data.scale_min < cfg.data.scale_max, "data.scale_min must be < data.scale_max");
    check(cfg.data.min_count >= 1, "data.min_count must be >= 1");
    check(cfg.split.ratio > 0.0 && cfg.split.ratio < 1.0, "split.ratio must lie in (0,1)");
    check(cfg.split.temporal_days >= 1, "split.temporal_days must be >= 1");
    check(cfg.embedding.dim >= 1, "embedding.dim must be >= 1");
    check(cfg.walk.length >= 1, "walk.length must be >= 1");
    check(cfg.walk.per_node >= 1, "walk.per_node must be >= 1");
    check(cfg.walk.c_uu >= 0 && cfg.walk.c_ue >= 0 && cfg.walk.c_ui >= 0 && cfg.walk.c_ei >= 0 &&
              cfg.walk.c_ee >= 0 && cfg.walk.c_ii >= 0,
          "walk coefficients must be >= 0");
    for (char c : cfg.walk.metapath)
        check(c == 'U' || c == 'I' || c == 'E', "walk.metapath may only contain U, I, E");
    check(cfg.skipgram.window >= 1, "skipgram.window must be >= 1");
    check(cfg.skipgram.min_count >= 1, "skipgram.min_count must be >= 1");
    check(cfg.skipgram.iterations >= 1, "skipgram.iterations must be >= 1");
    check(cfg.skipgram.negatives >= 1, "skipgram.negatives must be >= 1");
    check(cfg.skipgram.learning_rate > 0, "skipgram.learning_rate must be > 0");
    check(cfg.ae.learning_rate > 0, "ae.learning_rate must be > 0");
    check(cfg.ae.epochs >= 1, "ae.epochs must be >= 1");
    check(cfg.ae.batch_size >= 1, "ae.batch_size must be >= 1");
    check(cfg.mf.factors >= 1 && cfg.nmf.factors >= 1, "factors must be >= 1");
    check(cfg.mf.epochs >= 1 && cfg.nmf.epochs >= 1, "epochs must be >= 1");
    check(cfg.mf.learning_rate > 0 && cfg.nmf.learning_rate > 0, "learning_rate must be > 0");
    check(cfg.mf.reg >= 0 && cfg.nmf.reg >= 0, "reg must be >= 0");
    check(cfg.knn.neighbors >= 1, "knn.neighbors must be >= 1");
    check(cfg.bias.reg >= 0, "bias.reg must be >= 0");
    check(cfg.closure.fw_tol > 0, "closure.fw_tol must be > 0");
    check(cfg.closure.fw_max_iter >= 0, "closure.fw_max_iter must be >= 0");
    check(cfg.recommend.alpha >= 0, "recommend.alpha must be >= 0");
    check(cfg.recommend.top_n >= 1, "recommend.top_n must be >= 1");
    check(cfg.recommend.cold_start_threshold >= 0,
          "recommend.cold_start_threshold must be >= 0");
    check(!cfg.sweep.grid.empty(), "sweep.grid must not be empty");
    for (std::size_t i = 0; i < cfg.sweep.grid.size(); ++i) {
        check(cfg.sweep.grid[i] >= 0, "sweep.grid values must be >= 0");
        if (i) check(cfg.sweep.grid[i] > cfg.sweep.grid[i - 1],
                     "sweep.grid must be strictly increasing");
    }
    check(cfg.synth.users >= 1 && cfg.synth.items >= 1, "synth counts must be >= 1");
    check(cfg.synth.rank >= 1, "synth.rank must be >= 1");
    check(cfg.synth.noise >= 0, "synth.noise must be >= 0");
    check(cfg.synth.clusters >= 1, "synth.clusters must be >= 1");
    check(cfg.synth.separation >= 0, "synth.separation must be >= 0");
    check(cfg.synth.cluster_sigma >= 0, "synth.cluster_sigma must be >= 0");
    check(cfg.synth.embed_dim >= 1, "synth.embed_dim must be >= 1");
    check(cfg.synth.embed_dim >= cfg.synth.clusters,
          "synth.embed_dim must be >= synth.clusters");
    check(cfg.synth.ratings_per_user >= 1, "synth.ratings_per_user must be >= 1");
    check(cfg.synth.out_cluster_fraction >= 0 && cfg.synth.out_cluster_fraction < 1,
          "synth.out_cluster_fraction must lie in [0,1)");
    check(cfg.synth.factor_scale >= 0, "synth.factor_scale must be >= 0");
}

std::string config_hash(const RunConfig& cfg) {
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(serialize_config(cfg))));
    return buf;
}

}  // namespace lcrec
