// lcrec command line: batch pipeline for latent-closure unexpected
// recommendation experiments. Subcommands run pipeline stages; `evaluate`
// is the end-to-end runner and writes the manifest.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "lcrec/config.hpp"
#include "lcrec/error.hpp"
#include "lcrec/pca.hpp"
#include "lcrec/pipeline.hpp"
#include "lcrec/stats.hpp"

namespace fs = std::filesystem;

namespace {

struct GlobalArgs {
    std::string config_path;
    std::string out_override;
    std::int64_t seed_override = -1;
    std::vector<std::string> overrides;  // key=value pairs applied after the file
};

lcrec::RunConfig load_run_config(const GlobalArgs& g) {
    std::string text;
    if (!g.config_path.empty()) {
        std::ifstream in(g.config_path);
        if (!in) throw lcrec::ValidationError("cannot open config file: " + g.config_path);
        std::ostringstream ss;
        ss << in.rdbuf();
        text = ss.str();
    }
    for (const auto& kv : g.overrides) text += "\n" + kv;
    auto cfg = lcrec::parse_config_text(text, g.config_path.empty() ? "<cli>" : g.config_path);
    if (!g.out_override.empty()) cfg.out = g.out_override;
    if (g.seed_override >= 0) cfg.seed = static_cast<std::uint64_t>(g.seed_override);
    lcrec::validate_config(cfg);
    return cfg;
}

std::vector<double> read_sample(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw lcrec::ValidationError("cannot open sample file: " + path);
    std::vector<double> xs;
    double v;
    while (in >> v) xs.push_back(v);
    if (xs.empty()) throw lcrec::ValidationError("sample file is empty: " + path);
    return xs;
}

void print_report(const lcrec::EvalReport& r) {
    std::printf("estimator=%s closure=%s alpha=%g n=%d seed=%llu\n", r.estimator.c_str(),
                r.closure.c_str(), r.alpha, r.n, static_cast<unsigned long long>(r.seed));
    std::printf("  rmse=%.6f mae=%.6f pre@%d=%.6f rec@%d=%.6f\n", r.rmse, r.mae, r.n,
                r.precision_at_n, r.n, r.recall_at_n);
    std::printf("  unexp=%.6f ser=%.6f div=%.6f\n", r.unexpectedness, r.serendipity, r.diversity);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"latent-closure unexpected recommendation toolkit"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand

    GlobalArgs g;
    app.add_option("--config", g.config_path, "run configuration file (key = value)");
    app.add_option("--out", g.out_override, "output directory (overrides config)");
    app.add_option("--seed", g.seed_override, "root seed (overrides config)");
    app.add_option("--set", g.overrides,
                   "override any config key, e.g. --set recommend.alpha=0.05 (repeatable)");

    auto* cmd_ingest = app.add_subcommand("ingest", "ingest + filter + split, write dataset files");
    auto* cmd_synth = app.add_subcommand("synth", "generate a synthetic world with ground truth");
    auto* cmd_embed = app.add_subcommand("embed", "compute item embeddings (items.emb)");
    auto* cmd_closures = app.add_subcommand("closures", "build per-user closures (closures.bin)");
    auto* cmd_train = app.add_subcommand("train", "train the configured estimator (model.bin)");
    auto* cmd_recommend = app.add_subcommand("recommend", "emit top-n recommendations (recs.csv)");
    auto* cmd_evaluate =
        app.add_subcommand("evaluate", "full pipeline run: all stages, report.csv + manifest.cfg");
    auto* cmd_sweep = app.add_subcommand("sweep", "evaluate over the alpha grid (sweep.csv)");

    auto* cmd_project = app.add_subcommand("project", "PCA-project an embedding table to CSV");
    std::string project_in, project_out = "projection.csv";
    int project_dims = 2;
    cmd_project->add_option("--embeddings", project_in, "embedding table (text or binary)")
        ->required();
    cmd_project->add_option("--output", project_out, "output CSV path");
    cmd_project->add_option("--dims", project_dims, "number of components");

    auto* cmd_ttest = app.add_subcommand("ttest", "Welch t-test between two samples");
    std::string ttest_a, ttest_b;
    cmd_ttest->add_option("a", ttest_a, "file with one value per line")->required();
    cmd_ttest->add_option("b", ttest_b, "file with one value per line")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (cmd_project->parsed()) {
            const auto table = lcrec::load_embeddings(project_in);
            const auto proj = lcrec::pca_project(table, project_dims);
            lcrec::save_projection_csv(proj, project_out);
            std::printf("projected %d vectors to %d dims -> %s\n", table.size(), project_dims,
                        project_out.c_str());
            return 0;
        }
        if (cmd_ttest->parsed()) {
            const auto res = lcrec::welch_t_test(read_sample(ttest_a), read_sample(ttest_b));
            std::printf("t = %.6f\ndf = %.6f\np = %.6f\n", res.t, res.df, res.p);
            return 0;
        }

        lcrec::RunConfig cfg = load_run_config(g);
        if (cmd_synth->parsed()) cfg.data.synthetic = true;

        lcrec::OutputLock lock(cfg.out);
        lcrec::Pipeline pipeline(cfg);

        if (cmd_ingest->parsed() || cmd_synth->parsed()) {
            pipeline.prepare_data();
            const auto& sp = pipeline.split_pair();
            std::printf("dataset: %d users, %d items, %zu interactions (%zu train / %zu test)\n",
                        pipeline.full_log().user_count(), pipeline.full_log().item_count(),
                        pipeline.full_log().size(), sp.train.size(), sp.test.size());
        } else if (cmd_embed->parsed()) {
            pipeline.compute_embeddings();
            std::printf("embeddings: %d items x %d dims -> %s (%d items without embedding)\n",
                        pipeline.items().size(), pipeline.items().dim(),
                        pipeline.artifact("items.emb").c_str(),
                        pipeline.items_without_embedding());
        } else if (cmd_closures->parsed()) {
            pipeline.build_user_closures();
            int built = 0, cold = 0;
            for (const auto& p : pipeline.profiles()) {
                built += p.closure ? 1 : 0;
                cold += p.cold ? 1 : 0;
            }
            std::printf("closures: %d built (%s), %d cold users -> %s\n", built,
                        cfg.closure.kind.c_str(), cold, pipeline.artifact("closures.bin").c_str());
        } else if (cmd_train->parsed()) {
            pipeline.train_estimator();
            std::printf("model: %s -> %s\n", pipeline.model().kind(),
                        pipeline.artifact("model.bin").c_str());
        } else if (cmd_recommend->parsed()) {
            pipeline.make_recommendations();
            std::size_t total = 0;
            for (const auto& list : pipeline.recommendations()) total += list.size();
            std::printf("recommendations: %zu lists, %zu rows -> %s\n",
                        pipeline.recommendations().size(), total,
                        pipeline.artifact("recs.csv").c_str());
        } else if (cmd_evaluate->parsed()) {
            const auto rep = pipeline.evaluate_run();
            print_report(rep);
            std::printf("report -> %s\nmanifest -> %s\n", pipeline.artifact("report.csv").c_str(),
                        pipeline.artifact("manifest.cfg").c_str());
        } else if (cmd_sweep->parsed()) {
            const auto table = pipeline.sweep();
            std::printf("sweep: %zu alphas -> %s\n", table.rows.size(),
                        pipeline.artifact("sweep.csv").c_str());
        }
        return 0;
    } catch (const lcrec::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const lcrec::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
