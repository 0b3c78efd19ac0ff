#include "nsd/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numeric>
#include <random>

#include "nsd/annotations.hpp"
#include "nsd/bench.hpp"
#include "nsd/configfile.hpp"
#include "nsd/edf.hpp"
#include "nsd/features.hpp"
#include "nsd/knn.hpp"
#include "nsd/model_io.hpp"
#include "nsd/pca.hpp"
#include "nsd/preprocess.hpp"
#include "nsd/svgplot.hpp"

namespace nsd::grid {

namespace {

std::string fmt(double v, const char* spec = "%.6f") {
    char buf[40];
    std::snprintf(buf, sizeof(buf), spec, v);
    return buf;
}

struct Corpus {
    std::vector<edf::Recording> recordings;
    std::vector<edf::AnnotationTrack> annotations;
    std::vector<int> split;  // 0 train, 1 val, 2 test
};

Corpus load_corpus(const ExperimentConfig& cfg) {
    std::vector<std::filesystem::path> edfs;
    if (std::filesystem::is_directory(cfg.data_dir))
        for (const auto& entry : std::filesystem::directory_iterator(cfg.data_dir))
            if (entry.is_regular_file() && entry.path().extension() == ".edf")
                edfs.push_back(entry.path());
    std::sort(edfs.begin(), edfs.end());

    Corpus corpus;
    for (const auto& path : edfs) {
        std::filesystem::path csv = path;
        csv.replace_extension(".csv");
        if (!std::filesystem::exists(csv)) {
            std::cerr << "grid: skipping " << path.filename().string()
                      << " (no annotation CSV)\n";
            continue;
        }
        edf::Recording rec = edf::read_recording(path);
        if (rec.id.empty()) rec.id = path.stem().string();
        corpus.annotations.push_back(edf::read_annotations_csv(
            csv, static_cast<std::size_t>(std::llround(rec.duration_s))));
        corpus.recordings.push_back(std::move(rec));
    }
    if (corpus.recordings.empty())
        throw NoDataFound("grid: no EDF/annotation pairs under " + cfg.data_dir.string());
    return corpus;
}

// Grouped split: whole recordings, greedy fill of the duration deficit in a
// seeded shuffle order, then a fix-up pass so no split ends up empty.
std::vector<int> split_recordings(const std::vector<edf::Recording>& recs,
                                  double f_train, double f_val, double f_test,
                                  std::uint64_t seed) {
    const std::size_t n = recs.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(seed);
    for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng() % i]);

    double total = 0.0;
    for (const auto& r : recs) total += r.duration_s;
    double deficit[3] = {f_train * total, f_val * total, f_test * total};

    std::vector<int> split(n, 0);
    for (std::size_t idx : order) {
        int best = 0;
        for (int s = 1; s < 3; ++s)
            if (deficit[s] > deficit[best]) best = s;
        split[idx] = best;
        deficit[best] -= recs[idx].duration_s;
    }

    for (int s = 0; s < 3; ++s) {
        if (std::count(split.begin(), split.end(), s) > 0) continue;
        int donor = 0;
        for (int t = 1; t < 3; ++t)
            if (std::count(split.begin(), split.end(), t) >
                std::count(split.begin(), split.end(), donor))
                donor = t;
        // hand over the last shuffled recording of the fullest split
        for (std::size_t i = order.size(); i > 0; --i)
            if (split[order[i - 1]] == donor) {
                split[order[i - 1]] = s;
                break;
            }
    }
    return split;
}

struct CellData {
    Eigen::MatrixXd X[3];
    std::vector<int> y[3];
};

CellData assemble(const std::vector<feat::FeatureVector>& features,
                  const std::vector<int>& owner, const std::vector<int>& split) {
    if (features.empty()) throw NoDataFound("grid: no windows survived preprocessing");
    const Eigen::Index width = static_cast<Eigen::Index>(features.front().values.size());
    Eigen::Index count[3] = {0, 0, 0};
    for (std::size_t i = 0; i < features.size(); ++i) ++count[split[static_cast<std::size_t>(owner[i])]];

    CellData cell;
    for (int s = 0; s < 3; ++s) {
        cell.X[s].resize(count[s], width);
        cell.y[s].reserve(static_cast<std::size_t>(count[s]));
    }
    Eigen::Index row[3] = {0, 0, 0};
    for (std::size_t i = 0; i < features.size(); ++i) {
        const int s = split[static_cast<std::size_t>(owner[i])];
        cell.X[s].row(row[s]++) = Eigen::Map<const Eigen::VectorXd>(
            features[i].values.data(), width);
        cell.y[s].push_back(features[i].label);
    }
    return cell;
}

metrics::MetricReport evaluate(const std::vector<int>& preds, const std::vector<double>& scores,
                               const std::vector<int>& labels) {
    metrics::MetricReport report = metrics::metrics(metrics::confusion(preds, labels));
    report.auc = metrics::auc(scores, labels);
    return report;
}

std::vector<bench::RawSegment> bench_segments(const Corpus& corpus, int window_s) {
    std::vector<bench::RawSegment> segs;
    for (std::size_t r = 0; r < corpus.recordings.size(); ++r) {
        if (corpus.split[r] != 2) continue;
        auto part = bench::segments_from_recording(corpus.recordings[r], window_s);
        segs.insert(segs.end(), part.begin(), part.end());
    }
    const std::size_t base = segs.size();
    if (base == 0) throw NoDataFound("grid: no test segments for benchmarking");
    for (std::size_t i = 0; segs.size() < 100; ++i) segs.push_back(segs[i % base]);
    return segs;
}

}  // namespace

ExperimentConfig load_experiment_config(const std::filesystem::path& file) {
    const cfg::KeyValueFile kv = cfg::KeyValueFile::load(file);
    ExperimentConfig out;
    out.data_dir = kv.get("data_dir");
    out.output_dir = kv.get("output_dir", out.output_dir.string());
    out.windows = kv.get_int_list("windows", out.windows);
    out.pca_dims = kv.get_int_list("pca_dims", out.pca_dims);

    const std::string classifier = kv.get("classifier", "protonn");
    if (classifier == "protonn") out.classifier = Classifier::protonn;
    else if (classifier == "knn") out.classifier = Classifier::knn;
    else if (classifier == "both") out.classifier = Classifier::both;
    else throw Error("config: classifier must be protonn, knn or both");

    out.train_fraction = kv.get_double("train_fraction", out.train_fraction);
    out.val_fraction = kv.get_double("val_fraction", out.val_fraction);
    out.test_fraction = kv.get_double("test_fraction", out.test_fraction);
    out.seed = static_cast<std::uint64_t>(kv.get_int("seed", static_cast<long long>(out.seed)));
    out.bench = kv.get_bool("bench", out.bench);
    out.k_grid = kv.get_int_list("k_grid", out.k_grid);
    out.highpass_cutoff_hz = kv.get_double("highpass_cutoff_hz", out.highpass_cutoff_hz);
    out.fs_target = kv.get_double("fs_target", out.fs_target);
    out.label_threshold = static_cast<int>(kv.get_int("label_threshold", out.label_threshold));

    protonn::ProtoNNConfig& p = out.protonn_cfg;
    p.proj_dim = static_cast<int>(kv.get_int("protonn_proj_dim", p.proj_dim));
    p.n_prototypes = static_cast<int>(kv.get_int("protonn_prototypes", p.n_prototypes));
    const std::string gamma = kv.get("protonn_gamma", "auto");
    if (gamma != "auto") p.gamma = kv.get_double("protonn_gamma", 0.0);
    p.sparsity_w = kv.get_double("protonn_sparsity_w", p.sparsity_w);
    p.sparsity_b = kv.get_double("protonn_sparsity_b", p.sparsity_b);
    p.sparsity_z = kv.get_double("protonn_sparsity_z", p.sparsity_z);
    p.epochs = static_cast<int>(kv.get_int("protonn_epochs", p.epochs));
    p.batch = static_cast<int>(kv.get_int("protonn_batch", p.batch));
    p.step_w = kv.get_double("protonn_step_w", p.step_w);
    p.step_b = kv.get_double("protonn_step_b", p.step_b);
    p.step_z = kv.get_double("protonn_step_z", p.step_z);
    p.seed = out.seed;

    if (out.windows.empty() || out.pca_dims.empty())
        throw Error("config: windows and pca_dims must be non-empty");
    const double sum = out.train_fraction + out.val_fraction + out.test_fraction;
    if (std::abs(sum - 1.0) > 1e-9 || out.train_fraction <= 0.0 || out.val_fraction <= 0.0 ||
        out.test_fraction <= 0.0)
        throw Error("config: split fractions must be positive and sum to 1");
    return out;
}

std::string format_report_csv(const std::vector<GridRow>& rows) {
    std::string out =
        "classifier,window_s,pca_dim,k,accuracy,precision0,precision1,"
        "recall0,recall1,f1_0,f1_1,auc,model_bytes,infer_ms\n";
    for (const GridRow& row : rows) {
        out += row.classifier;
        out += ',' + std::to_string(row.window_s);
        out += ',' + std::to_string(row.pca_dim);
        out += ',';
        if (row.k) out += std::to_string(*row.k);
        const metrics::MetricReport& m = row.report;
        out += ',' + fmt(m.accuracy);
        out += ',' + fmt(m.precision[0]) + ',' + fmt(m.precision[1]);
        out += ',' + fmt(m.recall[0]) + ',' + fmt(m.recall[1]);
        out += ',' + fmt(m.f1[0]) + ',' + fmt(m.f1[1]);
        out += ',' + fmt(m.auc);
        out += ',' + std::to_string(row.model_bytes);
        out += ',';
        if (row.infer_ms) out += fmt(*row.infer_ms, "%.3f");
        out += '\n';
    }
    return out;
}

GridResult run_grid(const ExperimentConfig& cfg) {
    Corpus corpus = load_corpus(cfg);
    corpus.split = split_recordings(corpus.recordings, cfg.train_fraction, cfg.val_fraction,
                                    cfg.test_fraction, cfg.seed);

    std::vector<int> k_grid = cfg.k_grid;
    if (k_grid.empty())
        for (int k = 1; k <= 40; ++k) k_grid.push_back(k);

    const bool want_protonn =
        cfg.classifier == Classifier::protonn || cfg.classifier == Classifier::both;
    const bool want_knn = cfg.classifier == Classifier::knn || cfg.classifier == Classifier::both;

    GridResult result;
    std::map<std::pair<std::string, int>, plot::Series> size_series;   // (classifier, w) -> bytes vs d
    std::map<std::pair<std::string, int>, plot::Series> time_series;   // (classifier, d) -> ms vs w

    for (int w : cfg.windows) {
        // features are independent of the PCA dim: extract once per window length
        prep::PreprocessConfig pcfg;
        pcfg.fs_target = cfg.fs_target;
        pcfg.highpass_cutoff_hz = cfg.highpass_cutoff_hz;
        pcfg.window_s = w;
        pcfg.label_threshold = cfg.label_threshold;

        std::vector<feat::FeatureVector> features;
        std::vector<int> owner;  // recording index per window
        for (std::size_t r = 0; r < corpus.recordings.size(); ++r) {
            const auto windows =
                prep::make_windows(corpus.recordings[r], corpus.annotations[r], pcfg);
            for (const auto& win : windows) {
                features.push_back(feat::extract_features(win));
                owner.push_back(static_cast<int>(r));
            }
        }
        const CellData cell = assemble(features, owner, corpus.split);

        std::vector<bench::RawSegment> segs;
        if (cfg.bench) segs = bench_segments(corpus, w);

        for (int d : cfg.pca_dims) {
            try {
                const pca::PcaModel reducer = pca::fit(cell.X[0], d);
                Eigen::MatrixXd R[3];
                for (int s = 0; s < 3; ++s) R[s] = pca::transform(reducer, cell.X[s]);

                if (want_protonn) {
                    protonn::ProtoNNConfig pc = cfg.protonn_cfg;
                    const protonn::ProtoNNModel model =
                        protonn::train(R[0], cell.y[0], pc, nullptr, &R[1], &cell.y[1]);

                    std::vector<int> preds;
                    std::vector<double> scores;
                    for (Eigen::Index i = 0; i < R[2].rows(); ++i) {
                        const Eigen::VectorXd s = protonn::score(model, R[2].row(i).transpose());
                        preds.push_back(s[1] >= s[0] ? 1 : 0);
                        scores.push_back(s[1]);
                    }

                    GridRow row;
                    row.classifier = "protonn";
                    row.window_s = w;
                    row.pca_dim = d;
                    row.report = evaluate(preds, scores, cell.y[2]);
                    row.model_bytes = protonn::model_size_bytes(model);
                    if (cfg.bench) {
                        const io::ModelContainer container =
                            io::make_container(pcfg, reducer, model);
                        row.infer_ms = bench::bench_inference(container, segs).mean_ms;
                        auto& ts = time_series[{row.classifier, d}];
                        ts.name = "protonn d=" + std::to_string(d);
                        ts.x.push_back(w);
                        ts.y.push_back(*row.infer_ms);
                    }
                    auto& ss = size_series[{row.classifier, w}];
                    ss.name = "protonn w=" + std::to_string(w);
                    ss.x.push_back(d);
                    ss.y.push_back(static_cast<double>(row.model_bytes));
                    result.rows.push_back(std::move(row));
                }

                if (want_knn) {
                    const int k = knn::knn_select_k(R[0], cell.y[0], R[1], cell.y[1], k_grid);
                    const knn::KnnModel model = knn::make_model(R[0], cell.y[0], k);

                    std::vector<int> preds;
                    std::vector<double> scores;
                    for (Eigen::Index i = 0; i < R[2].rows(); ++i) {
                        const Eigen::VectorXd q = R[2].row(i).transpose();
                        preds.push_back(knn::knn_predict(model, q));
                        scores.push_back(knn::knn_vote_fraction(model, q));
                    }

                    GridRow row;
                    row.classifier = "knn";
                    row.window_s = w;
                    row.pca_dim = d;
                    row.k = k;
                    row.report = evaluate(preds, scores, cell.y[2]);
                    row.model_bytes = knn::knn_model_bytes(model);
                    auto& ss = size_series[{row.classifier, w}];
                    ss.name = "knn w=" + std::to_string(w);
                    ss.x.push_back(d);
                    ss.y.push_back(static_cast<double>(row.model_bytes));
                    result.rows.push_back(std::move(row));
                }
            } catch (const Error& e) {
                throw Error("grid cell (w=" + std::to_string(w) + ", d=" + std::to_string(d) +
                            "): " + e.what());
            }
        }
    }

    std::filesystem::create_directories(cfg.output_dir);
    result.report_csv = cfg.output_dir / "report.csv";
    {
        std::ofstream out(result.report_csv, std::ios::binary);
        if (!out) throw Error("grid: cannot write " + result.report_csv.string());
        out << format_report_csv(result.rows);
    }

    std::vector<plot::Series> sizes;
    for (auto& [key, series] : size_series) sizes.push_back(series);
    plot::write_line_svg(cfg.output_dir / "model_size_vs_features.svg",
                         "Model size vs projected features", "PCA dimensions", "model bytes",
                         sizes);
    plot::write_series_csv(cfg.output_dir / "model_size_vs_features.csv", "pca_dim", sizes);

    if (cfg.bench) {
        std::vector<plot::Series> times;
        for (auto& [key, series] : time_series) times.push_back(series);
        plot::write_line_svg(cfg.output_dir / "inference_time_vs_window.svg",
                             "Inference time vs window length", "window length (s)",
                             "mean latency (ms)", times);
        plot::write_series_csv(cfg.output_dir / "inference_time_vs_window.csv", "window_s", times);
    }
    return result;
}

}  // namespace nsd::grid
