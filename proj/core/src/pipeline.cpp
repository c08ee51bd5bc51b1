#include "lcrec/pipeline.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "lcrec/autoencoder.hpp"
#include "lcrec/error.hpp"
#include "lcrec/hin.hpp"
#include "lcrec/rng.hpp"
#include "lcrec/skipgram.hpp"
#include "lcrec/walks.hpp"

namespace fs = std::filesystem;

namespace lcrec {

OutputLock::OutputLock(const std::string& out_dir) {
    fs::create_directories(out_dir);
    path_ = (fs::path(out_dir) / ".lcrec.lock").string();
    const int fd = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
    if (fd < 0)
        throw ValidationError("output directory is locked by another run (" + path_ +
                              " exists); remove the lock file if that run is gone");
    const std::string pid = std::to_string(::getpid()) + "\n";
    [[maybe_unused]] auto n = ::write(fd, pid.data(), pid.size());
    ::close(fd);
}

OutputLock::~OutputLock() { ::unlink(path_.c_str()); }

namespace {

void write_interactions_csv(const InteractionLog& log, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write " + path);
    char buf[64];
    for (const auto& r : log.interactions) {
        out << log.users.name(r.user) << ',' << log.items.name(r.item);
        std::snprintf(buf, sizeof(buf), ",%.12g", r.rating);
        out << buf;
        if (r.has_timestamp()) out << ',' << r.timestamp;
        out << '\n';
    }
}

}  // namespace

Pipeline::Pipeline(RunConfig cfg) : cfg_(std::move(cfg)) {
    validate_config(cfg_);
    fs::create_directories(cfg_.out);
}

std::string Pipeline::artifact(const std::string& name) const {
    return (fs::path(cfg_.out) / name).string();
}

RecommenderConfig Pipeline::recommender_config() const {
    RecommenderConfig rc;
    rc.alpha = cfg_.recommend.alpha;
    rc.top_n = cfg_.recommend.top_n;
    rc.cold_start_threshold = cfg_.recommend.cold_start_threshold;
    rc.closure_kind = closure_kind_from_name(cfg_.closure.kind);
    rc.sphere_mode = cfg_.closure.sphere_half_diameter ? SphereMode::HalfDiameter
                                                       : SphereMode::Enclosing;
    rc.positive_only = cfg_.recommend.positive_only;
    rc.relevance_threshold = cfg_.eval.relevance_threshold;
    rc.hull_tol = cfg_.closure.fw_tol;
    rc.hull_max_iter = cfg_.closure.fw_max_iter;
    return rc;
}

void Pipeline::prepare_data() {
    if (log_) return;
    const RatingScale scale{cfg_.data.scale_min, cfg_.data.scale_max};

    if (cfg_.data.synthetic) {
        SyntheticSpec spec;
        spec.users = cfg_.synth.users;
        spec.items = cfg_.synth.items;
        spec.rank = cfg_.synth.rank;
        spec.noise = cfg_.synth.noise;
        spec.clusters = cfg_.synth.clusters;
        spec.separation = cfg_.synth.separation;
        spec.cluster_sigma = cfg_.synth.cluster_sigma;
        spec.embed_dim = cfg_.synth.embed_dim;
        spec.scale = scale;
        spec.ratings_per_user = cfg_.synth.ratings_per_user;
        spec.out_cluster_fraction = cfg_.synth.out_cluster_fraction;
        spec.factor_scale = cfg_.synth.factor_scale;
        spec.seed = stage_seed(cfg_.seed, "synth");
        try {
            world_ = generate_synthetic(spec);
        } catch (const Error& e) {
            throw ValidationError(std::string("synth: ") + e.what());
        }
        log_ = world_->log;
        write_interactions_csv(*log_, artifact("ratings.csv"));
        save_ground_truth(*world_, cfg_.out);
        save_embeddings_binary(world_->item_embeddings, artifact("items_true.emb"));
    } else {
        if (cfg_.data.ratings.empty())
            throw ValidationError("ingest: data.ratings is required unless data.synthetic=true");
        try {
            log_ = ingest_ratings(cfg_.data.ratings, scale, cfg_.data.min_count);
        } catch (const Error& e) {
            throw ValidationError(std::string("ingest: ") + e.what());
        }
    }

    try {
        if (cfg_.split.mode == "temporal")
            split_ = split_temporal(*log_, cfg_.split.temporal_days);
        else
            split_ = split(*log_, cfg_.split.ratio, cfg_.seed);
    } catch (const Error& e) {
        throw ValidationError(std::string("split: ") + e.what());
    }
    write_interactions_csv(split_->train, artifact("train.csv"));
    write_interactions_csv(split_->test, artifact("test.csv"));
}

void Pipeline::compute_embeddings() {
    if (items_) return;
    prepare_data();
    const std::string path = artifact("items.emb");

    if (cfg_.pipeline.reuse_embeddings && fs::exists(path)) {
        items_ = load_embeddings(path);
        items_->set_kind(EntityKind::Item);
    } else if (cfg_.embedding.method == "load") {
        if (!cfg_.embedding.path.empty()) {
            items_ = load_embeddings(cfg_.embedding.path);
            items_->set_kind(EntityKind::Item);
        } else if (world_) {
            // synthetic runs: an empty path means the generated ground truth
            items_ = world_->item_embeddings;
        } else {
            throw ValidationError("embed: embedding.method=load requires embedding.path");
        }
    } else if (cfg_.embedding.method == "ae") {
        const auto& train = split_->train;
        FeatureTable user_f, item_f;
        const FeatureTable* user_fp = nullptr;
        const FeatureTable* item_fp = nullptr;
        if (!cfg_.data.user_features.empty()) {
            user_f = load_features(cfg_.data.user_features, train.users, "user");
            user_fp = &user_f;
        }
        if (!cfg_.data.item_features.empty()) {
            item_f = load_features(cfg_.data.item_features, train.items, "item");
            item_fp = &item_f;
        }
        const FeatureMatrix fm = multi_hot_features(train, user_fp, item_fp);
        AutoencoderConfig acfg;
        acfg.dim = cfg_.embedding.dim;
        acfg.learning_rate = cfg_.ae.learning_rate;
        acfg.epochs = cfg_.ae.epochs;
        acfg.batch_size = cfg_.ae.batch_size;
        acfg.seed = stage_seed(cfg_.seed, "ae");
        auto [model, nodes] = train_autoencoder(fm.ids, fm.rows, acfg);

        EmbeddingTable items(nodes.dim(), EntityKind::Item);
        std::vector<float> vec(nodes.dim());
        for (int i = 0; i < train.item_count(); ++i) {
            const int row = nodes.row_of(item_node_name(train.items.name(i)));
            if (row < 0) continue;
            const float* src = nodes.row(row);
            std::copy(src, src + nodes.dim(), vec.begin());
            items.add(train.items.name(i), vec);
        }
        items_ = std::move(items);
    } else {  // hine
        const auto& train = split_->train;
        FeatureTable user_f, item_f;
        const FeatureTable* user_fp = nullptr;
        const FeatureTable* item_fp = nullptr;
        if (!cfg_.data.user_features.empty()) {
            user_f = load_features(cfg_.data.user_features, train.users, "user");
            user_fp = &user_f;
        }
        if (!cfg_.data.item_features.empty()) {
            item_f = load_features(cfg_.data.item_features, train.items, "item");
            item_fp = &item_f;
        }
        std::vector<ExtraEdge> extra;
        if (!cfg_.data.extra_edges.empty()) extra = load_extra_edges(cfg_.data.extra_edges);

        const HinGraph graph = build_hin(train, user_fp, item_fp, extra);
        WalkConfig wcfg;
        wcfg.walk_length = cfg_.walk.length;
        wcfg.walks_per_node = cfg_.walk.per_node;
        wcfg.coefficients = {cfg_.walk.c_uu, cfg_.walk.c_ue, cfg_.walk.c_ui,
                             cfg_.walk.c_ei, cfg_.walk.c_ee, cfg_.walk.c_ii};
        for (char c : cfg_.walk.metapath)
            wcfg.metapath.push_back(c == 'U'   ? NodeType::User
                                    : c == 'I' ? NodeType::Item
                                               : NodeType::Entity);
        const WalkCorpus corpus = hetero_walks(graph, wcfg, stage_seed(cfg_.seed, "walks"));

        std::vector<std::string> names(graph.node_count());
        for (int n = 0; n < graph.node_count(); ++n) names[n] = graph.name(n);
        SkipGramConfig scfg;
        scfg.dim = cfg_.embedding.dim;
        scfg.window = cfg_.skipgram.window;
        scfg.min_count = cfg_.skipgram.min_count;
        scfg.iterations = cfg_.skipgram.iterations;
        scfg.negatives_k = cfg_.skipgram.negatives;
        scfg.learning_rate = cfg_.skipgram.learning_rate;
        scfg.seed = stage_seed(cfg_.seed, "skipgram");
        const EmbeddingTable nodes = train_skipgram(corpus, names, scfg);

        EmbeddingTable items(nodes.dim(), EntityKind::Item);
        std::vector<float> vec(nodes.dim());
        for (int i = 0; i < train.item_count(); ++i) {
            const int row = nodes.row_of(item_node_name(train.items.name(i)));
            if (row < 0) continue;
            const float* src = nodes.row(row);
            std::copy(src, src + nodes.dim(), vec.begin());
            items.add(train.items.name(i), vec);
        }
        items_ = std::move(items);
        save_embeddings_binary(nodes, artifact("nodes.emb"));
    }

    save_embeddings_binary(*items_, path);
    items_without_embedding_ = 0;
    for (int i = 0; i < log_->item_count(); ++i)
        if (!items_->contains(log_->items.name(i))) ++items_without_embedding_;
}

void Pipeline::build_user_closures() {
    if (!profiles_.empty()) return;
    compute_embeddings();
    const RecommenderConfig rc = recommender_config();
    profiles_ = build_profiles(split_->train, *items_, rc);

    const std::string path = artifact("closures.bin");
    if (cfg_.pipeline.reuse_closures && fs::exists(path)) {
        const auto cached = load_closures(path);
        for (const auto& uc : cached) {
            const int u = split_->train.users.lookup(uc.user_id);
            if (u >= 0) profiles_[u].closure = uc.closure;
        }
        return;
    }
    std::vector<UserClosure> cache;
    for (const auto& p : profiles_)
        if (p.closure)
            cache.push_back({split_->train.users.name(p.user), *p.closure});
    save_closures(cache, path);
}

void Pipeline::train_estimator() {
    if (model_) return;
    prepare_data();
    const std::string model_path = artifact("model.bin");
    const std::string pm_path = artifact("pm_model.bin");

    if (cfg_.pipeline.reuse_model && fs::exists(model_path) && fs::exists(pm_path)) {
        model_ = load_model(model_path);
        pm_model_ = load_model(pm_path);
        return;
    }

    const auto& train = split_->train;
    try {
        if (cfg_.estimator.kind == "mf") {
            MfConfig mcfg{cfg_.mf.factors, cfg_.mf.learning_rate, cfg_.mf.reg, cfg_.mf.epochs,
                          stage_seed(cfg_.seed, "estimator")};
            model_ = std::make_unique<MfModel>(train_mf(train, mcfg));
        } else if (cfg_.estimator.kind == "nmf") {
            MfConfig mcfg{cfg_.nmf.factors, cfg_.nmf.learning_rate, cfg_.nmf.reg, cfg_.nmf.epochs,
                          stage_seed(cfg_.seed, "estimator")};
            model_ = std::make_unique<NmfModel>(train_nmf(train, mcfg));
        } else {
            model_ = std::make_unique<KnnModel>(train_knn(train, KnnConfig{cfg_.knn.neighbors}));
        }
        pm_model_ = std::make_unique<BiasModel>(train_bias(train, cfg_.bias.reg));
    } catch (const DivergenceError& e) {
        throw DivergenceError(std::string("train: ") + e.what());
    } catch (const Error& e) {
        throw ValidationError(std::string("train: ") + e.what());
    }
    save_model(*model_, model_path);
    save_model(*pm_model_, pm_path);
}

void Pipeline::make_recommendations() {
    if (!recs_.empty()) return;
    build_user_closures();
    train_estimator();

    const RecommenderConfig rc = recommender_config();
    candidates_ = candidate_universe(*log_, *items_);
    recs_ = recommend_all(*model_, profiles_, *log_, *items_, rc, candidates_);

    RecommenderConfig pm_rc = rc;
    pm_rc.alpha = 0.0;  // the primitive model ranks by estimated rating alone
    pm_recs_ = recommend_all(*pm_model_, profiles_, *log_, *items_, pm_rc, candidates_);

    save_recommendations_csv(recs_, *log_, artifact("recs.csv"));
}

EvalReport Pipeline::evaluate_run() {
    make_recommendations();

    EvalInputs in;
    in.model = model_.get();
    in.recs = &recs_;
    in.pm_recs = &pm_recs_;
    in.profiles = &profiles_;
    in.train = &split_->train;
    in.test = &split_->test;
    in.items = &*items_;
    in.rec_cfg = recommender_config();
    in.estimator_tag = cfg_.estimator.kind;
    in.seed = cfg_.seed;
    EvalReport rep = evaluate(in);

    save_report_csv({rep}, artifact("report.csv"));
    write_manifest();
    return rep;
}

SweepTable Pipeline::sweep() {
    make_recommendations();

    SweepTable table;
    const RecommenderConfig base = recommender_config();
    for (double alpha : cfg_.sweep.grid) {
        RecommenderConfig rc = base;
        rc.alpha = alpha;
        const auto recs = recommend_all(*model_, profiles_, *log_, *items_, rc, candidates_);

        EvalInputs in;
        in.model = model_.get();
        in.recs = &recs;
        in.pm_recs = &pm_recs_;
        in.profiles = &profiles_;
        in.train = &split_->train;
        in.test = &split_->test;
        in.items = &*items_;
        in.rec_cfg = rc;
        in.estimator_tag = cfg_.estimator.kind;
        in.seed = cfg_.seed;
        table.rows.emplace_back(alpha, evaluate(in));
    }
    save_sweep_csv(table, artifact("sweep.csv"));
    write_manifest();
    return table;
}

void Pipeline::write_manifest() const {
    std::ofstream out(artifact("manifest.cfg"));
    if (!out) throw ValidationError("cannot write manifest");
    out << "# run manifest: feed back via --config to reproduce this run\n";
    out << "# config_hash = " << config_hash(cfg_) << "\n";
    out << "# stage seeds (derived from root seed " << cfg_.seed << "):\n";
    for (const char* s : {"synth", "split", "walks", "skipgram", "ae", "estimator"})
        out << "#   " << s << " = " << stage_seed(cfg_.seed, s) << "\n";
    out << serialize_config(cfg_);
}

EvalReport run_pipeline(const RunConfig& cfg) {
    Pipeline p(cfg);
    return p.evaluate_run();
}

}  // namespace lcrec
