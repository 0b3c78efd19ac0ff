#include "nsd/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "nsd/features.hpp"
#include "nsd/preprocess.hpp"

namespace nsd::bench {

int classify_segment(const io::ModelContainer& container, const RawSegment& seg,
                     Eigen::VectorXd* score_out, const std::function<void()>& preprocess_tap) {
    if (seg.channels.empty()) throw EmptyInput("classify_segment: segment has no channels");

    edf::Recording raw;
    raw.fs = seg.fs;
    raw.channels.resize(seg.channels.size());
    for (std::size_t c = 0; c < seg.channels.size(); ++c) raw.channels[c].samples = seg.channels[c];
    raw.duration_s = static_cast<double>(raw.channels.front().samples.size()) / raw.fs;

    if (preprocess_tap) preprocess_tap();
    const edf::Recording scaled = prep::preprocess_recording(raw, container.preprocess);

    prep::WindowInstance window;
    window.data.resize(scaled.channels.size());
    for (std::size_t c = 0; c < scaled.channels.size(); ++c) {
        const auto& s = scaled.channels[c].samples;
        window.data[c].assign(s.begin(), s.end());
    }

    const feat::FeatureVector fv = feat::extract_features(window);
    if (static_cast<Eigen::Index>(fv.values.size()) != container.pca_model.mean.size())
        throw DimensionMismatch("classify_segment: feature width != model input width");
    const Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(
        fv.values.data(), static_cast<Eigen::Index>(fv.values.size()));
    const Eigen::VectorXd reduced = pca::transform(container.pca_model, x);
    const Eigen::VectorXd s = protonn::score(container.protonn_model, reduced);
    if (score_out) *score_out = s;
    return s[1] >= s[0] ? 1 : 0;
}

BenchReport bench_inference(const io::ModelContainer& container,
                            const std::vector<RawSegment>& segments,
                            const BenchOptions& options) {
    if (static_cast<int>(segments.size()) < 100)
        throw TooFewSegments("bench_inference: need at least 100 segments");

    using clock = std::chrono::steady_clock;
    for (int i = 0; i < options.warmup; ++i)
        classify_segment(container, segments[static_cast<std::size_t>(i) % segments.size()],
                         nullptr, options.preprocess_tap);

    std::vector<double> ms;
    ms.reserve(segments.size());
    for (const RawSegment& seg : segments) {
        const auto t0 = clock::now();
        classify_segment(container, seg, nullptr, options.preprocess_tap);
        const auto t1 = clock::now();
        ms.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
    }

    std::vector<double> sorted = ms;
    std::sort(sorted.begin(), sorted.end());
    auto quantile = [&](double q) {
        const double pos = q * static_cast<double>(sorted.size() - 1);
        const std::size_t lo = static_cast<std::size_t>(pos);
        const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
        const double frac = pos - static_cast<double>(lo);
        return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
    };

    BenchReport report;
    report.segments = static_cast<int>(ms.size());
    report.min_ms = sorted.front();
    report.p50_ms = quantile(0.5);
    report.p95_ms = quantile(0.95);
    double sum = 0.0;
    for (double v : ms) sum += v;
    report.mean_ms = sum / static_cast<double>(ms.size());
    report.model_bytes = protonn::model_size_bytes(container.protonn_model);
    return report;
}

std::vector<RawSegment> segments_from_recording(const edf::Recording& rec, int window_s) {
    if (rec.channels.empty()) throw EmptyInput("segments_from_recording: no channels");
    if (window_s < 1) throw Error("segments_from_recording: window must be at least 1 s");
    const std::size_t per_segment =
        static_cast<std::size_t>(std::llround(rec.fs * static_cast<double>(window_s)));
    const std::size_t n = rec.channels.front().samples.size();
    if (per_segment == 0 || per_segment > n)
        throw WindowLongerThanRecording("segments_from_recording: window exceeds recording");

    std::vector<RawSegment> out(n / per_segment);
    for (std::size_t s = 0; s < out.size(); ++s) {
        out[s].fs = rec.fs;
        out[s].channels.resize(rec.channels.size());
        for (std::size_t c = 0; c < rec.channels.size(); ++c) {
            const auto& src = rec.channels[c].samples;
            out[s].channels[c].assign(src.begin() + static_cast<long>(s * per_segment),
                                      src.begin() + static_cast<long>((s + 1) * per_segment));
        }
    }
    return out;
}

}  // namespace nsd::bench
