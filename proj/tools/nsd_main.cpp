// Command-line surface over the seizure-detection pipeline: ingest raw
// EDF+annotations into window dumps, extract features, train/evaluate/apply
// models, benchmark end-to-end latency, and drive the full experiment grid.

#include <CLI11.hpp>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "nsd/bench.hpp"
#include "nsd/configfile.hpp"
#include "nsd/edf.hpp"
#include "nsd/features.hpp"
#include "nsd/grid.hpp"
#include "nsd/knn.hpp"
#include "nsd/metrics.hpp"
#include "nsd/model_io.hpp"
#include "nsd/pca.hpp"
#include "nsd/preprocess.hpp"
#include "nsd/protonn.hpp"

namespace {

namespace fs = std::filesystem;

struct FeatureTable {
    Eigen::MatrixXd X;
    std::vector<int> y;
    std::vector<nsd::feat::FeatureVector> rows;
};

FeatureTable featurize_dump(const nsd::prep::WindowDump& dump) {
    FeatureTable table;
    table.rows.reserve(dump.windows.size());
    for (const auto& win : dump.windows) table.rows.push_back(nsd::feat::extract_features(win));
    if (table.rows.empty()) throw nsd::EmptyInput("window dump holds no windows");
    const Eigen::Index width = static_cast<Eigen::Index>(table.rows.front().values.size());
    table.X.resize(static_cast<Eigen::Index>(table.rows.size()), width);
    table.y.reserve(table.rows.size());
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        table.X.row(static_cast<Eigen::Index>(i)) =
            Eigen::Map<const Eigen::VectorXd>(table.rows[i].values.data(), width);
        table.y.push_back(table.rows[i].label);
    }
    return table;
}

void apply_protonn_overrides(const nsd::cfg::KeyValueFile& kv, nsd::protonn::ProtoNNConfig& p) {
    p.proj_dim = static_cast<int>(kv.get_int("protonn_proj_dim", p.proj_dim));
    p.n_prototypes = static_cast<int>(kv.get_int("protonn_prototypes", p.n_prototypes));
    if (kv.has("protonn_gamma") && kv.get("protonn_gamma") != "auto")
        p.gamma = kv.get_double("protonn_gamma", 0.0);
    p.sparsity_w = kv.get_double("protonn_sparsity_w", p.sparsity_w);
    p.sparsity_b = kv.get_double("protonn_sparsity_b", p.sparsity_b);
    p.sparsity_z = kv.get_double("protonn_sparsity_z", p.sparsity_z);
    p.epochs = static_cast<int>(kv.get_int("protonn_epochs", p.epochs));
    p.batch = static_cast<int>(kv.get_int("protonn_batch", p.batch));
    p.step_w = kv.get_double("protonn_step_w", p.step_w);
    p.step_b = kv.get_double("protonn_step_b", p.step_b);
    p.step_z = kv.get_double("protonn_step_z", p.step_z);
    p.seed = static_cast<std::uint64_t>(kv.get_int("seed", static_cast<long long>(p.seed)));
}

void print_metrics(const nsd::metrics::MetricReport& m) {
    auto line = [](const char* key, double v) {
        std::printf("%s=%.6f\n", key, v);
    };
    line("accuracy", m.accuracy);
    line("precision0", m.precision[0]);
    line("precision1", m.precision[1]);
    line("recall0", m.recall[0]);
    line("recall1", m.recall[1]);
    line("f1_0", m.f1[0]);
    line("f1_1", m.f1[1]);
    line("auc", m.auc);
    line("sensitivity", m.sensitivity());
}

int run(int argc, char** argv) {
    CLI::App app{"Neonatal EEG seizure-detection pipeline"};
    app.require_subcommand(1);
    app.fallthrough();  // let `nsd grid --config f` reach the parent option
    std::string config_path;
    app.add_option("--config", config_path, "key=value config file applied to the subcommand");

    // --- ingest ---
    auto* ingest = app.add_subcommand("ingest", "EDF + annotation CSV -> window dump");
    std::string in_edf, in_csv, ingest_out = "windows.nsdw";
    int window_s = 4, label_threshold = -1;
    double fs_target = 32.0, highpass = 0.5;
    ingest->add_option("--edf", in_edf, "EDF recording")->required();
    ingest->add_option("--annotations", in_csv, "per-second expert CSV")->required();
    ingest->add_option("--out", ingest_out, "output window dump")->capture_default_str();
    ingest->add_option("--window", window_s, "window length in seconds")->capture_default_str();
    ingest->add_option("--fs-target", fs_target, "target sampling rate")->capture_default_str();
    ingest->add_option("--highpass", highpass, "high-pass cutoff in Hz")->capture_default_str();
    ingest->add_option("--threshold", label_threshold,
                       "expert-second fusion threshold (-1 = half the votes)")
        ->capture_default_str();

    // --- featurize ---
    auto* featurize = app.add_subcommand("featurize", "window dump -> feature CSV");
    std::string feat_in, feat_out = "features.csv";
    featurize->add_option("--in", feat_in, "window dump")->required();
    featurize->add_option("--out", feat_out, "output CSV")->capture_default_str();

    // --- train ---
    auto* train = app.add_subcommand("train", "window dump -> model container");
    std::string train_in, train_out = "model.nsdm", classifier = "protonn";
    int pca_dim = 20;
    std::optional<int> knn_k;
    train->add_option("--in", train_in, "window dump with labels")->required();
    train->add_option("--out", train_out, "output model container")->capture_default_str();
    train->add_option("--classifier", classifier, "protonn or knn")
        ->check(CLI::IsMember({"protonn", "knn"}))
        ->capture_default_str();
    train->add_option("--pca-dim", pca_dim, "projected feature count")->capture_default_str();
    int opt_k = 0;
    auto* kopt = train->add_option("--k", opt_k, "fixed k for the knn baseline");

    // --- evaluate ---
    auto* evaluate = app.add_subcommand("evaluate", "model + labeled window dump -> metrics");
    std::string eval_model, eval_in;
    evaluate->add_option("--model", eval_model, "model container")->required();
    evaluate->add_option("--in", eval_in, "labeled window dump")->required();

    // --- predict ---
    auto* predict = app.add_subcommand("predict", "model + EDF -> per-window label CSV");
    std::string pred_model, pred_edf, pred_out = "predictions.csv";
    predict->add_option("--model", pred_model, "model container")->required();
    predict->add_option("--edf", pred_edf, "EDF recording")->required();
    predict->add_option("--out", pred_out, "output CSV")->capture_default_str();

    // --- bench ---
    auto* bench = app.add_subcommand("bench", "model + EDF -> per-segment latency report");
    std::string bench_model, bench_edf;
    int warmup = 10;
    bench->add_option("--model", bench_model, "model container")->required();
    bench->add_option("--edf", bench_edf, "EDF recording supplying raw segments")->required();
    bench->add_option("--warmup", warmup, "unmeasured warm-up passes")->capture_default_str();

    // --- grid ---
    auto* grid = app.add_subcommand("grid", "full window x PCA experiment grid");
    std::string grid_data, grid_out;
    bool grid_bench = false;
    grid->add_option("--data-dir", grid_data, "directory of EDF/CSV pairs");
    grid->add_option("--out", grid_out, "output directory");
    grid->add_flag("--bench", grid_bench, "also measure per-cell inference latency");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);  // prints help or the offending flag
        return code == 0 ? 0 : 1;
    }

    nsd::cfg::KeyValueFile kv;
    if (!config_path.empty()) kv = nsd::cfg::KeyValueFile::load(config_path);

    if (*ingest) {
        nsd::prep::PreprocessConfig cfg;
        cfg.fs_target = fs_target;
        cfg.highpass_cutoff_hz = highpass;
        cfg.window_s = window_s;
        cfg.label_threshold = label_threshold;
        const nsd::edf::Recording rec = nsd::edf::read_recording(in_edf);
        const auto track = nsd::edf::read_annotations_csv(
            in_csv, static_cast<std::size_t>(std::llround(rec.duration_s)));
        for (const auto& warning : track.warnings) std::cerr << "warning: " << warning << "\n";
        nsd::prep::WindowDump dump;
        dump.fs_target = cfg.fs_target;
        dump.windows = nsd::prep::make_windows(rec, track, cfg);
        nsd::prep::write_window_dump(ingest_out, dump);
        std::cout << "wrote " << dump.windows.size() << " windows to " << ingest_out << "\n";
        return 0;
    }

    if (*featurize) {
        const auto dump = nsd::prep::read_window_dump(feat_in);
        const FeatureTable table = featurize_dump(dump);
        std::ofstream out(feat_out, std::ios::binary);
        if (!out) throw nsd::Error("cannot write " + feat_out);
        nsd::feat::write_feature_csv(out, table.rows);
        std::cout << "wrote " << table.rows.size() << " feature rows to " << feat_out << "\n";
        return 0;
    }

    if (*train) {
        const auto dump = nsd::prep::read_window_dump(train_in);
        const FeatureTable table = featurize_dump(dump);
        const nsd::pca::PcaModel reducer = nsd::pca::fit(table.X, pca_dim);
        const Eigen::MatrixXd reduced = nsd::pca::transform(reducer, table.X);

        if (classifier == "knn") {
            // the whole training set is the model; nothing worth serializing
            if (kopt->count()) knn_k = opt_k;
            int k = 0;
            if (knn_k) {
                k = *knn_k;
            } else {
                std::vector<int> grid_k;
                for (int c = 1; c <= std::min<int>(40, static_cast<int>(reduced.rows())); ++c)
                    grid_k.push_back(c);
                k = nsd::knn::knn_select_k(reduced, table.y, reduced, table.y, grid_k);
            }
            const auto model = nsd::knn::make_model(reduced, table.y, k);
            std::cout << "knn baseline: k=" << k
                      << " bytes=" << nsd::knn::knn_model_bytes(model)
                      << " (held in memory only; containers store the compressed model)\n";
            return 0;
        }

        nsd::protonn::ProtoNNConfig pcfg;
        apply_protonn_overrides(kv, pcfg);
        nsd::protonn::TrainLog log;
        const auto model = nsd::protonn::train(reduced, table.y, pcfg, &log);

        nsd::prep::PreprocessConfig prep_cfg;
        prep_cfg.fs_target = dump.fs_target;
        prep_cfg.window_s = static_cast<int>(std::llround(
            dump.windows.front().samples_per_channel() / dump.fs_target));
        const auto container = nsd::io::make_container(prep_cfg, reducer, model);
        nsd::io::save_model(train_out, container);
        std::cout << "trained protonn: gamma=" << log.gamma << " best_epoch=" << log.best_epoch
                  << " bytes=" << nsd::protonn::model_size_bytes(model) << " -> " << train_out
                  << "\n";
        return 0;
    }

    if (*evaluate) {
        const auto container = nsd::io::load_model(eval_model);
        const auto dump = nsd::prep::read_window_dump(eval_in);
        const FeatureTable table = featurize_dump(dump);
        const Eigen::MatrixXd reduced = nsd::pca::transform(container.pca_model, table.X);
        std::vector<int> preds;
        std::vector<double> scores;
        for (Eigen::Index i = 0; i < reduced.rows(); ++i) {
            const Eigen::VectorXd s =
                nsd::protonn::score(container.protonn_model, reduced.row(i).transpose());
            preds.push_back(s[1] >= s[0] ? 1 : 0);
            scores.push_back(s[1]);
        }
        auto report = nsd::metrics::metrics(nsd::metrics::confusion(preds, table.y));
        report.auc = nsd::metrics::auc(scores, table.y);
        print_metrics(report);
        return 0;
    }

    if (*predict) {
        const auto container = nsd::io::load_model(pred_model);
        const nsd::edf::Recording rec = nsd::edf::read_recording(pred_edf);
        const nsd::edf::Recording scaled =
            nsd::prep::preprocess_recording(rec, container.preprocess);
        const auto windows = nsd::prep::segment(scaled, container.preprocess.window_s);

        std::ofstream out(pred_out, std::ios::binary);
        if (!out) throw nsd::Error("cannot write " + pred_out);
        out << "t_start,label,score1\n";
        for (const auto& win : windows) {
            const auto fv = nsd::feat::extract_features(win);
            const Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(
                fv.values.data(), static_cast<Eigen::Index>(fv.values.size()));
            const Eigen::VectorXd s = nsd::protonn::score(
                container.protonn_model, nsd::pca::transform(container.pca_model, x));
            char buf[64];
            std::snprintf(buf, sizeof(buf), "%.1f,%d,%.6f\n", win.t_start,
                          s[1] >= s[0] ? 1 : 0, s[1]);
            out << buf;
        }
        std::cout << "wrote " << windows.size() << " predictions to " << pred_out << "\n";
        return 0;
    }

    if (*bench) {
        const auto container = nsd::io::load_model(bench_model);
        const nsd::edf::Recording rec = nsd::edf::read_recording(bench_edf);
        auto segments =
            nsd::bench::segments_from_recording(rec, container.preprocess.window_s);
        nsd::bench::BenchOptions options;
        options.warmup = warmup;
        const auto report = nsd::bench::bench_inference(container, segments, options);
        std::printf("segments=%d\nmean_ms=%.3f\nmin_ms=%.3f\np50_ms=%.3f\np95_ms=%.3f\n"
                    "model_bytes=%lld\n",
                    report.segments, report.mean_ms, report.min_ms, report.p50_ms, report.p95_ms,
                    report.model_bytes);
        return 0;
    }

    if (*grid) {
        if (config_path.empty()) throw nsd::Error("grid requires --config");
        nsd::grid::ExperimentConfig cfg = nsd::grid::load_experiment_config(config_path);
        if (!grid_data.empty()) cfg.data_dir = grid_data;
        if (!grid_out.empty()) cfg.output_dir = grid_out;
        if (grid_bench) cfg.bench = true;
        const auto result = nsd::grid::run_grid(cfg);
        std::cout << "wrote " << result.rows.size() << " rows to "
                  << result.report_csv.string() << "\n";
        return 0;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const nsd::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
