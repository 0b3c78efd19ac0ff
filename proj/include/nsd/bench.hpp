#pragma once

#include <functional>
#include <vector>

#include "nsd/model_io.hpp"

namespace nsd::bench {

/// One raw EEG segment as it would arrive on-device: per-channel physical
/// samples at the acquisition rate, covering one window.
struct RawSegment {
    std::vector<std::vector<double>> channels;
    double fs = 256.0;
};

struct BenchReport {
    double mean_ms = 0.0;
    double min_ms = 0.0;
    double p50_ms = 0.0;
    double p95_ms = 0.0;
    int segments = 0;
    long long model_bytes = 0;
};

struct BenchOptions {
    int warmup = 10;  // unmeasured passes over the first segments
    // Invoked inside the timed preprocess stage; lets tests verify that the
    // timed region really covers preprocessing.
    std::function<void()> preprocess_tap;
};

/// Classify one raw segment through the full chain: downsample, high-pass,
/// min-max scale, feature extraction, PCA transform, ProtoNN score.
int classify_segment(const io::ModelContainer& container, const RawSegment& seg,
                     Eigen::VectorXd* score_out = nullptr,
                     const std::function<void()>& preprocess_tap = {});

/// Wall-clock per-segment latency over the full preprocess-and-predict chain.
/// Warm-up passes are excluded; every provided segment is then measured once.
/// Requires at least 100 segments (TooFewSegments otherwise). Runs strictly
/// single-threaded.
BenchReport bench_inference(const io::ModelContainer& container,
                            const std::vector<RawSegment>& segments,
                            const BenchOptions& options = {});

/// Cut a raw recording into back-to-back segments of window_s seconds.
std::vector<RawSegment> segments_from_recording(const edf::Recording& rec, int window_s);

}  // namespace nsd::bench
