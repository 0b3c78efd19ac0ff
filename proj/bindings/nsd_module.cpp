// Python bindings over the pipeline's main operations: EDF ingest,
// preprocessing, feature extraction, PCA, the two classifiers, metrics and
// model persistence.

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "nsd/annotations.hpp"
#include "nsd/bench.hpp"
#include "nsd/edf.hpp"
#include "nsd/features.hpp"
#include "nsd/grid.hpp"
#include "nsd/knn.hpp"
#include "nsd/metrics.hpp"
#include "nsd/model_io.hpp"
#include "nsd/pca.hpp"
#include "nsd/preprocess.hpp"
#include "nsd/protonn.hpp"

namespace py = pybind11;
using namespace nsd;

namespace {

feat::FeatureVector features_from_array(
    const Eigen::Ref<const Eigen::MatrixXd>& channels_by_samples) {
    prep::WindowInstance win;
    win.data.resize(static_cast<std::size_t>(channels_by_samples.rows()));
    for (Eigen::Index c = 0; c < channels_by_samples.rows(); ++c) {
        auto& ch = win.data[static_cast<std::size_t>(c)];
        ch.resize(static_cast<std::size_t>(channels_by_samples.cols()));
        for (Eigen::Index s = 0; s < channels_by_samples.cols(); ++s)
            ch[static_cast<std::size_t>(s)] = static_cast<float>(channels_by_samples(c, s));
    }
    return feat::extract_features(win);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Neonatal EEG seizure-detection pipeline (C++ core)";

    py::register_exception<Error>(m, "PipelineError", PyExc_RuntimeError);

    // --- EDF / annotations ---
    py::class_<edf::Channel>(m, "Channel")
        .def_readonly("label", &edf::Channel::label)
        .def_readonly("samples", &edf::Channel::samples);
    py::class_<edf::Recording>(m, "Recording")
        .def(py::init<>())
        .def_readwrite("id", &edf::Recording::id)
        .def_readwrite("channels", &edf::Recording::channels)
        .def_readwrite("fs", &edf::Recording::fs)
        .def_readwrite("duration_s", &edf::Recording::duration_s);
    py::class_<edf::AnnotationTrack>(m, "AnnotationTrack")
        .def_readonly("experts", &edf::AnnotationTrack::experts)
        .def_readonly("mask", &edf::AnnotationTrack::mask)
        .def_readonly("warnings", &edf::AnnotationTrack::warnings)
        .def("duration_s", &edf::AnnotationTrack::duration_s);
    m.def("read_recording",
          [](const std::filesystem::path& p) { return edf::read_recording(p); },
          py::arg("path"), "Parse an EDF file into physical-unit channels");
    m.def("read_annotations",
          [](const std::filesystem::path& p, std::size_t duration_s) {
              return edf::read_annotations_csv(p, duration_s);
          },
          py::arg("path"), py::arg("duration_s"));

    // --- preprocessing ---
    py::class_<prep::PreprocessConfig>(m, "PreprocessConfig")
        .def(py::init<>())
        .def_readwrite("fs_target", &prep::PreprocessConfig::fs_target)
        .def_readwrite("highpass_cutoff_hz", &prep::PreprocessConfig::highpass_cutoff_hz)
        .def_readwrite("window_s", &prep::PreprocessConfig::window_s)
        .def_readwrite("label_threshold", &prep::PreprocessConfig::label_threshold)
        .def("effective_threshold", &prep::PreprocessConfig::effective_threshold)
        .def("samples_per_window", &prep::PreprocessConfig::samples_per_window);
    py::class_<prep::WindowInstance>(m, "WindowInstance")
        .def_readonly("data", &prep::WindowInstance::data)
        .def_readonly("label", &prep::WindowInstance::label)
        .def_readonly("t_start", &prep::WindowInstance::t_start)
        .def_readonly("recording_id", &prep::WindowInstance::recording_id);
    m.def("downsample", &prep::downsample, py::arg("x"), py::arg("factor") = 8,
          py::arg("fs_source") = 256.0);
    m.def("highpass", &prep::highpass, py::arg("x"), py::arg("cutoff_hz"), py::arg("fs"));
    m.def("minmax_scale", &prep::minmax_scale, py::arg("x"));
    m.def("make_windows", &prep::make_windows, py::arg("recording"), py::arg("annotations"),
          py::arg("config"), "Preprocess, segment and label one recording");

    // --- features ---
    m.def("feature_names", [] {
        const auto& names = feat::feature_names();
        return std::vector<std::string>(names.begin(), names.end());
    });
    m.def("extract_features",
          [](const prep::WindowInstance& w) { return feat::extract_features(w).values; },
          py::arg("window"));
    m.def("extract_features",
          [](const Eigen::Ref<const Eigen::MatrixXd>& channels_by_samples) {
              return features_from_array(channels_by_samples).values;
          },
          py::arg("channels_by_samples"),
          "Feature vector for a (channels x samples) array scaled to [0,1]");

    // --- PCA ---
    py::class_<pca::PcaModel>(m, "PcaModel")
        .def_readonly("mean", &pca::PcaModel::mean)
        .def_readonly("scale", &pca::PcaModel::scale)
        .def_readonly("components", &pca::PcaModel::components)
        .def_readonly("explained_variance_ratio", &pca::PcaModel::explained_variance_ratio)
        .def("input_dim", &pca::PcaModel::input_dim)
        .def("output_dim", &pca::PcaModel::output_dim);
    m.def("pca_fit", &pca::fit, py::arg("X"), py::arg("target_dim"));
    m.def("pca_transform",
          py::overload_cast<const pca::PcaModel&, const Eigen::MatrixXd&>(&pca::transform),
          py::arg("model"), py::arg("X"));
    m.def("pca_inverse_transform", &pca::inverse_transform, py::arg("model"), py::arg("y"));

    // --- ProtoNN ---
    py::class_<protonn::ProtoNNConfig>(m, "ProtoNNConfig")
        .def(py::init<>())
        .def_readwrite("proj_dim", &protonn::ProtoNNConfig::proj_dim)
        .def_readwrite("n_prototypes", &protonn::ProtoNNConfig::n_prototypes)
        .def_readwrite("gamma", &protonn::ProtoNNConfig::gamma)
        .def_readwrite("sparsity_w", &protonn::ProtoNNConfig::sparsity_w)
        .def_readwrite("sparsity_b", &protonn::ProtoNNConfig::sparsity_b)
        .def_readwrite("sparsity_z", &protonn::ProtoNNConfig::sparsity_z)
        .def_readwrite("epochs", &protonn::ProtoNNConfig::epochs)
        .def_readwrite("batch", &protonn::ProtoNNConfig::batch)
        .def_readwrite("step_w", &protonn::ProtoNNConfig::step_w)
        .def_readwrite("step_b", &protonn::ProtoNNConfig::step_b)
        .def_readwrite("step_z", &protonn::ProtoNNConfig::step_z)
        .def_readwrite("seed", &protonn::ProtoNNConfig::seed);
    py::class_<protonn::ProtoNNModel>(m, "ProtoNNModel")
        .def_readonly("W", &protonn::ProtoNNModel::W)
        .def_readonly("B", &protonn::ProtoNNModel::B)
        .def_readonly("Z", &protonn::ProtoNNModel::Z)
        .def_readonly("gamma", &protonn::ProtoNNModel::gamma)
        .def_readonly("input_dim", &protonn::ProtoNNModel::input_dim)
        .def("proj_dim", &protonn::ProtoNNModel::proj_dim)
        .def("n_prototypes", &protonn::ProtoNNModel::n_prototypes);
    py::class_<protonn::TrainLog>(m, "TrainLog")
        .def_readonly("train_loss", &protonn::TrainLog::train_loss)
        .def_readonly("val_loss", &protonn::TrainLog::val_loss)
        .def_readonly("rejected_epochs", &protonn::TrainLog::rejected_epochs)
        .def_readonly("best_epoch", &protonn::TrainLog::best_epoch)
        .def_readonly("gamma", &protonn::TrainLog::gamma);
    m.def("protonn_train",
          [](const Eigen::MatrixXd& X, const std::vector<int>& y,
             const protonn::ProtoNNConfig& cfg) {
              protonn::TrainLog log;
              protonn::ProtoNNModel model = protonn::train(X, y, cfg, &log);
              return py::make_tuple(model, log);
          },
          py::arg("X"), py::arg("y"), py::arg("config") = protonn::ProtoNNConfig{});
    m.def("protonn_score", &protonn::score, py::arg("model"), py::arg("x"));
    m.def("protonn_predict", &protonn::predict, py::arg("model"), py::arg("x"));
    m.def("hard_threshold", &protonn::hard_threshold, py::arg("M"), py::arg("sparsity"));
    m.def("model_size_bytes", &protonn::model_size_bytes, py::arg("model"));

    // --- kNN baseline ---
    py::class_<knn::KnnModel>(m, "KnnModel")
        .def_readonly("points", &knn::KnnModel::points)
        .def_readonly("labels", &knn::KnnModel::labels)
        .def_readonly("k", &knn::KnnModel::k);
    m.def("knn_make", &knn::make_model, py::arg("points"), py::arg("labels"), py::arg("k"));
    m.def("knn_predict", &knn::knn_predict, py::arg("model"), py::arg("x"));
    m.def("knn_vote_fraction", &knn::knn_vote_fraction, py::arg("model"), py::arg("x"));
    m.def("knn_select_k", &knn::knn_select_k, py::arg("X_train"), py::arg("y_train"),
          py::arg("X_val"), py::arg("y_val"), py::arg("k_grid"));
    m.def("knn_model_bytes", &knn::knn_model_bytes, py::arg("model"));

    // --- metrics ---
    py::class_<metrics::ConfusionCounts>(m, "ConfusionCounts")
        .def(py::init<>())
        .def_readwrite("tp", &metrics::ConfusionCounts::tp)
        .def_readwrite("fp", &metrics::ConfusionCounts::fp)
        .def_readwrite("tn", &metrics::ConfusionCounts::tn)
        .def_readwrite("fn", &metrics::ConfusionCounts::fn)
        .def("total", &metrics::ConfusionCounts::total);
    py::class_<metrics::MetricReport>(m, "MetricReport")
        .def_readonly("accuracy", &metrics::MetricReport::accuracy)
        .def_readonly("precision", &metrics::MetricReport::precision)
        .def_readonly("recall", &metrics::MetricReport::recall)
        .def_readonly("f1", &metrics::MetricReport::f1)
        .def_readonly("auc", &metrics::MetricReport::auc)
        .def("sensitivity", &metrics::MetricReport::sensitivity);
    m.def("confusion", &metrics::confusion, py::arg("preds"), py::arg("labels"));
    m.def("metrics", &metrics::metrics, py::arg("counts"));
    m.def("auc", &metrics::auc, py::arg("scores"), py::arg("labels"));

    // --- persistence + end-to-end inference ---
    py::class_<io::ModelContainer>(m, "ModelContainer")
        .def_readonly("preprocess", &io::ModelContainer::preprocess)
        .def_readonly("pca_model", &io::ModelContainer::pca_model)
        .def_readonly("protonn_model", &io::ModelContainer::protonn_model);
    m.def("make_container", &io::make_container, py::arg("preprocess"), py::arg("pca_model"),
          py::arg("protonn_model"));
    m.def("save_model",
          [](const std::filesystem::path& p, const io::ModelContainer& c) { io::save_model(p, c); },
          py::arg("path"), py::arg("container"));
    m.def("load_model",
          [](const std::filesystem::path& p) { return io::load_model(p); }, py::arg("path"));
    m.def("classify_segment",
          [](const io::ModelContainer& container,
             const std::vector<std::vector<double>>& channels, double fs) {
              bench::RawSegment seg{channels, fs};
              Eigen::VectorXd score;
              const int label = bench::classify_segment(container, seg, &score);
              return py::make_tuple(label, score);
          },
          py::arg("container"), py::arg("channels"), py::arg("fs") = 256.0,
          "Label and score one raw multi-channel segment end to end");
}
