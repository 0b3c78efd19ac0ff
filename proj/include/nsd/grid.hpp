#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nsd/metrics.hpp"
#include "nsd/protonn.hpp"

namespace nsd::grid {

enum class Classifier { protonn, knn, both };

struct ExperimentConfig {
    std::filesystem::path data_dir;
    std::filesystem::path output_dir = "grid_out";
    std::vector<int> windows = {1, 2, 4, 8, 16};
    std::vector<int> pca_dims = {20, 50, 70, 100};
    Classifier classifier = Classifier::protonn;
    double train_fraction = 0.6;
    double val_fraction = 0.2;
    double test_fraction = 0.2;
    std::uint64_t seed = 42;
    bool bench = false;  // wall-clock latency is host-dependent; off keeps report.csv byte-reproducible
    std::vector<int> k_grid;  // empty = 1..40
    protonn::ProtoNNConfig protonn_cfg;
    double highpass_cutoff_hz = 0.5;
    double fs_target = 32.0;
    int label_threshold = -1;
};

ExperimentConfig load_experiment_config(const std::filesystem::path& file);

struct GridRow {
    std::string classifier;
    int window_s = 0;
    int pca_dim = 0;
    std::optional<int> k;
    metrics::MetricReport report;
    long long model_bytes = 0;
    std::optional<double> infer_ms;
};

struct GridResult {
    std::vector<GridRow> rows;
    std::filesystem::path report_csv;
};

/// One row per (window, pca_dim[, k]) cell: grouped 60/20/20 split by
/// recording, PCA fit on training windows only, then the configured
/// classifiers. Writes report.csv plus the model-size and (when benchmarking
/// is enabled) inference-time plot pairs. Deterministic for a fixed seed.
/// Throws NoDataFound when data_dir holds no EDF/annotation pairs.
GridResult run_grid(const ExperimentConfig& cfg);

std::string format_report_csv(const std::vector<GridRow>& rows);

}  // namespace nsd::grid
