#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "nsd/annotations.hpp"
#include "nsd/edf.hpp"
#include "nsd/errors.hpp"

namespace nsd::prep {

struct PreprocessConfig {
    double fs_target = 32.0;        // must divide the source rate
    double highpass_cutoff_hz = 0.5;
    int window_s = 4;               // w in {1,2,4,8,16}
    int label_threshold = -1;       // -1 = floor(experts*window_s/2)
    // scaling scope is per channel per recording

    int effective_threshold(int experts) const {
        return label_threshold >= 0 ? label_threshold : experts * window_s / 2;
    }
    int samples_per_window() const { return static_cast<int>(window_s * fs_target); }
};

/// One fixed-length, non-overlapping classification unit: per-channel sample
/// vectors of length window_s*fs_target, scaled to [0,1], plus the fused label.
struct WindowInstance {
    std::vector<std::vector<float>> data;  // [channel][sample]
    int label = 0;
    double t_start = 0.0;  // seconds from recording start
    std::string recording_id;

    std::size_t channel_count() const { return data.size(); }
    std::size_t samples_per_channel() const { return data.empty() ? 0 : data.front().size(); }
};

/// Anti-alias low-pass (8th-order Butterworth at 0.8*new Nyquist, zero phase)
/// then take-every-`factor`-th decimation. Input is truncated to the floor
/// multiple of `factor` first. Throws EmptyInput.
std::vector<double> downsample(const std::vector<double>& x, int factor = 8, double fs_source = 256.0);

/// 4th-order Butterworth high-pass applied forward-backward. Empty in, empty out.
std::vector<double> highpass(const std::vector<double>& x, double cutoff_hz, double fs);

/// Affine rescale onto [0,1]; a constant signal maps to all-zeros.
std::vector<double> minmax_scale(const std::vector<double>& x);

/// Cut a scaled recording into floor(duration/w) consecutive windows of
/// w*fs samples per channel; the trailing partial window is dropped.
/// Throws WindowLongerThanRecording.
std::vector<WindowInstance> segment(const edf::Recording& rec, int window_s);

/// Fused window label: count of expert-second seizure marks in
/// [t_start, t_start+w) strictly greater than `threshold` gives 1.
/// Throws WindowOutsideAnnotations.
int fuse_labels(const edf::AnnotationTrack& ann, double t_start, int window_s, int threshold);

/// Full per-recording chain: downsample to fs_target, high-pass, min-max
/// scale per channel, leaving a recording at fs_target ready to segment.
edf::Recording preprocess_recording(const edf::Recording& rec, const PreprocessConfig& cfg);

/// preprocess + segment + fuse_labels in one call.
std::vector<WindowInstance> make_windows(const edf::Recording& rec,
                                         const edf::AnnotationTrack& ann,
                                         const PreprocessConfig& cfg);

// --- columnar binary window dump ("NSDW") ---
// magic "NSDW", version byte, u32 C, u32 w*fs, u32 count, then count*C*(w*fs)
// little-endian 32-bit floats window-major, followed by per-window labels,
// start times, recording-id table and fs_target.
struct WindowDump {
    std::vector<WindowInstance> windows;
    double fs_target = 32.0;
};

void write_window_dump(std::ostream& out, const WindowDump& dump);
void write_window_dump(const std::filesystem::path& file, const WindowDump& dump);
WindowDump read_window_dump(std::istream& in);
WindowDump read_window_dump(const std::filesystem::path& file);

}  // namespace nsd::prep
