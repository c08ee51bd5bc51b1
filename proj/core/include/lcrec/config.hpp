#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace lcrec {

// Flat key=value run configuration with dotted section names. Every field has
// a default; parse -> serialize -> parse is the identity.
struct RunConfig {
    std::uint64_t seed = 42;
    std::string out = "out";

    struct Data {
        std::string ratings;
        std::string user_features;
        std::string item_features;
        std::string extra_edges;
        double scale_min = 1.0;
        double scale_max = 5.0;
        int min_count = 5;
        bool synthetic = false;
    } data;

    struct Split {
        std::string mode = "random";  // random | temporal
        double ratio = 0.8;
        int temporal_days = 1;
    } split;

    struct Embedding {
        std::string method = "hine";  // hine | ae | load
        int dim = 128;
        std::string path;  // for method=load
    } embedding;

    struct Walk {
        int length = 100;
        int per_node = 10;
        double c_uu = 1.0, c_ue = 1.0, c_ui = 1.0, c_ei = 1.0, c_ee = 1.0, c_ii = 1.0;
        std::string metapath;  // e.g. "UIU"; empty = unconstrained
    } walk;

    struct SkipGram {
        int window = 2;
        int min_count = 1;
        int iterations = 100;
        int negatives = 5;
        double learning_rate = 0.025;
    } skipgram;

    struct Ae {
        double learning_rate = 0.01;
        int epochs = 50;
        int batch_size = 32;
    } ae;

    struct Estimator {
        std::string kind = "mf";  // mf | nmf | knn
    } estimator;

    struct Mf {
        int factors = 32;
        double learning_rate = 0.005;
        double reg = 0.02;
        int epochs = 30;
    } mf, nmf;

    struct Knn {
        int neighbors = 40;
    } knn;

    struct Bias {
        double reg = 10.0;
    } bias;

    struct Closure {
        std::string kind = "hull";  // sphere | box | hull
        bool sphere_half_diameter = false;
        double fw_tol = 1e-8;
        int fw_max_iter = 0;  // 0 = max(1000, 10n)
    } closure;

    struct Recommend {
        double alpha = 0.03;
        int top_n = 5;
        int cold_start_threshold = 5;
        bool positive_only = false;
    } recommend;

    struct Eval {
        double relevance_threshold = 4.0;
    } eval;

    struct Sweep {
        std::vector<double> grid = {0.0,  0.01, 0.02, 0.03, 0.04, 0.05,
                                    0.06, 0.07, 0.08, 0.09, 0.1};
    } sweep;

    struct Synth {
        int users = 100;
        int items = 50;
        int rank = 3;
        double noise = 0.05;
        int clusters = 1;
        double separation = 10.0;
        double cluster_sigma = 0.5;
        int embed_dim = 16;
        int ratings_per_user = 20;
        double out_cluster_fraction = 0.25;
        double factor_scale = 0.5;
    } synth;

    struct Pipeline {
        bool reuse_embeddings = false;
        bool reuse_model = false;
        bool reuse_closures = false;
    } pipeline;
};

RunConfig parse_config(const std::string& path);
RunConfig parse_config_text(const std::string& text, const std::string& what);
std::string serialize_config(const RunConfig& cfg);
void save_config(const RunConfig& cfg, const std::string& path);

// Range/enumeration checks shared by parse and the CLI.
void validate_config(const RunConfig& cfg);

// FNV-1a over the canonical serialization, as a 16-hex-digit string.
std::string config_hash(const RunConfig& cfg);

// Shortest decimal that parses back to exactly the same double.
std::string format_double_exact(double v);

}  // namespace lcrec
