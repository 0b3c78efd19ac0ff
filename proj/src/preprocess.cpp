#include "nsd/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "nsd/binio.hpp"
#include "nsd/dsp.hpp"

namespace nsd::prep {

std::vector<double> downsample(const std::vector<double>& x, int factor, double fs_source) {
    if (x.empty()) throw EmptyInput("downsample: empty input");
    if (factor < 1) throw Error("downsample: factor must be positive");
    if (factor == 1) return x;

    std::vector<double> in(x.begin(), x.begin() + (x.size() / factor) * factor);
    if (in.empty()) throw EmptyInput("downsample: input shorter than one decimation step");

    const double new_nyquist = fs_source / factor / 2.0;
    const auto sos = dsp::butter_lowpass(8, 0.8 * new_nyquist, fs_source);
    std::vector<double> filtered = dsp::filtfilt(sos, in);

    std::vector<double> out;
    out.reserve(filtered.size() / factor);
    for (std::size_t i = 0; i < filtered.size(); i += factor) out.push_back(filtered[i]);
    return out;
}

std::vector<double> highpass(const std::vector<double>& x, double cutoff_hz, double fs) {
    if (x.empty()) return {};
    if (!(cutoff_hz < fs / 2.0)) throw Error("highpass: cutoff must be below fs/2");
    const auto sos = dsp::butter_highpass(4, cutoff_hz, fs);
    return dsp::filtfilt(sos, x);
}

std::vector<double> minmax_scale(const std::vector<double>& x) {
    if (x.empty()) return {};
    const auto [lo_it, hi_it] = std::minmax_element(x.begin(), x.end());
    const double lo = *lo_it, hi = *hi_it;
    std::vector<double> out(x.size());
    if (hi == lo) {
        std::fill(out.begin(), out.end(), 0.0);  // degenerate range maps to zeros, not NaN
        return out;
    }
    const double inv = 1.0 / (hi - lo);
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = (x[i] - lo) * inv;
    return out;
}

std::vector<WindowInstance> segment(const edf::Recording& rec, int window_s) {
    if (rec.channels.empty()) throw EmptyInput("segment: recording has no channels");
    const std::size_t n = rec.channels.front().samples.size();
    for (const auto& ch : rec.channels)
        if (ch.samples.size() != n)
            throw ChannelLengthMismatch("segment: channels differ in length");

    const std::size_t spw = static_cast<std::size_t>(window_s * rec.fs);
    if (spw == 0) throw Error("segment: window too short for the sampling rate");
    if (spw > n)
        throw WindowLongerThanRecording("window of " + std::to_string(window_s) +
                                        " s exceeds the recording");

    const std::size_t count = n / spw;  // trailing partial window dropped
    std::vector<WindowInstance> out;
    out.reserve(count);
    for (std::size_t w = 0; w < count; ++w) {
        WindowInstance inst;
        inst.recording_id = rec.id;
        inst.t_start = static_cast<double>(w) * window_s;
        inst.data.resize(rec.channels.size());
        for (std::size_t c = 0; c < rec.channels.size(); ++c) {
            const double* src = rec.channels[c].samples.data() + w * spw;
            inst.data[c].assign(src, src + spw);
        }
        out.push_back(std::move(inst));
    }
    return out;
}

int fuse_labels(const edf::AnnotationTrack& ann, double t_start, int window_s, int threshold) {
    const auto begin_s = static_cast<long long>(std::floor(t_start));
    const long long end_s = begin_s + window_s;
    if (begin_s < 0 || static_cast<std::size_t>(end_s) > ann.duration_s())
        throw WindowOutsideAnnotations("window [" + std::to_string(begin_s) + ", " +
                                       std::to_string(end_s) + ") outside annotations of " +
                                       std::to_string(ann.duration_s()) + " s");
    long long marks = 0;
    for (int e = 0; e < ann.experts; ++e)
        for (long long s = begin_s; s < end_s; ++s) marks += ann.mask[e][s];
    return marks > threshold ? 1 : 0;  // strict: exactly t expert-seconds stays 0
}

edf::Recording preprocess_recording(const edf::Recording& rec, const PreprocessConfig& cfg) {
    if (rec.fs <= 0.0) throw Error("preprocess: recording has no sampling rate");
    const double ratio = rec.fs / cfg.fs_target;
    const int factor = static_cast<int>(std::lround(ratio));
    if (factor < 1 || std::abs(ratio - factor) > 1e-9)
        throw Error("preprocess: fs_target must divide the source rate");

    edf::Recording out;
    out.id = rec.id;
    out.fs = cfg.fs_target;
    out.channels.resize(rec.channels.size());
    for (std::size_t c = 0; c < rec.channels.size(); ++c) {
        out.channels[c].label = rec.channels[c].label;
        std::vector<double> x = factor == 1 ? rec.channels[c].samples
                                            : downsample(rec.channels[c].samples, factor, rec.fs);
        x = highpass(x, cfg.highpass_cutoff_hz, cfg.fs_target);
        out.channels[c].samples = minmax_scale(x);
    }
    out.duration_s = out.channels.empty()
                         ? 0.0
                         : out.channels.front().samples.size() / out.fs;
    return out;
}

std::vector<WindowInstance> make_windows(const edf::Recording& rec,
                                         const edf::AnnotationTrack& ann,
                                         const PreprocessConfig& cfg) {
    edf::Recording scaled = preprocess_recording(rec, cfg);
    std::vector<WindowInstance> windows = segment(scaled, cfg.window_s);
    const int threshold = cfg.effective_threshold(ann.experts);
    for (auto& w : windows) w.label = fuse_labels(ann, w.t_start, cfg.window_s, threshold);
    return windows;
}

// --- NSDW dump ---

namespace {
constexpr char kMagic[4] = {'N', 'S', 'D', 'W'};
constexpr std::uint8_t kVersion = 1;
}  // namespace

void write_window_dump(std::ostream& out, const WindowDump& dump) {
    const auto& ws = dump.windows;
    const std::uint32_t count = static_cast<std::uint32_t>(ws.size());
    const std::uint32_t channels = count ? static_cast<std::uint32_t>(ws[0].channel_count()) : 0;
    const std::uint32_t spc = count ? static_cast<std::uint32_t>(ws[0].samples_per_channel()) : 0;
    for (const auto& w : ws)
        if (w.channel_count() != channels || w.samples_per_channel() != spc)
            throw ChannelLengthMismatch("window dump requires uniform window shapes");

    out.write(kMagic, 4);
    io::write_le<std::uint8_t>(out, kVersion);
    io::write_le<std::uint32_t>(out, channels);
    io::write_le<std::uint32_t>(out, spc);
    io::write_le<std::uint32_t>(out, count);
    for (const auto& w : ws)
        for (const auto& ch : w.data)
            for (float v : ch) io::write_le<float>(out, v);

    std::vector<std::string> ids;
    for (const auto& w : ws) {
        if (std::find(ids.begin(), ids.end(), w.recording_id) == ids.end())
            ids.push_back(w.recording_id);
    }
    if (ids.size() > 0xffff) throw Error("too many distinct recording ids for the dump format");
    for (const auto& w : ws) io::write_le<std::uint8_t>(out, static_cast<std::uint8_t>(w.label));
    for (const auto& w : ws) io::write_le<float>(out, static_cast<float>(w.t_start));
    for (const auto& w : ws) {
        const auto it = std::find(ids.begin(), ids.end(), w.recording_id);
        io::write_le<std::uint16_t>(out, static_cast<std::uint16_t>(it - ids.begin()));
    }
    io::write_le<std::uint16_t>(out, static_cast<std::uint16_t>(ids.size()));
    for (const auto& id : ids) {
        io::write_le<std::uint16_t>(out, static_cast<std::uint16_t>(id.size()));
        out.write(id.data(), static_cast<std::streamsize>(id.size()));
    }
    io::write_le<float>(out, static_cast<float>(dump.fs_target));
}

WindowDump read_window_dump(std::istream& in) {
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0)
        throw BadMagic("not a window dump (bad magic)");
    const auto version = io::read_le<std::uint8_t>(in, "version");
    if (version != kVersion)
        throw VersionUnsupported("window dump version " + std::to_string(version));
    const auto channels = io::read_le<std::uint32_t>(in, "channel count");
    const auto spc = io::read_le<std::uint32_t>(in, "samples per channel");
    const auto count = io::read_le<std::uint32_t>(in, "window count");

    WindowDump dump;
    dump.windows.resize(count);
    for (auto& w : dump.windows) {
        w.data.assign(channels, std::vector<float>(spc));
        for (auto& ch : w.data)
            for (float& v : ch) v = io::read_le<float>(in, "window samples");
    }
    for (auto& w : dump.windows) w.label = io::read_le<std::uint8_t>(in, "labels");
    for (auto& w : dump.windows) w.t_start = io::read_le<float>(in, "start times");
    std::vector<std::uint16_t> rec_idx(count);
    for (auto& idx : rec_idx) idx = io::read_le<std::uint16_t>(in, "recording index");
    const auto n_ids = io::read_le<std::uint16_t>(in, "recording id count");
    std::vector<std::string> ids(n_ids);
    for (auto& id : ids) {
        const auto len = io::read_le<std::uint16_t>(in, "recording id length");
        id.resize(len);
        in.read(id.data(), len);
        if (!in) throw SectionLengthMismatch("truncated recording id");
    }
    for (std::uint32_t i = 0; i < count; ++i) {
        if (rec_idx[i] >= n_ids) throw SectionLengthMismatch("recording index out of range");
        dump.windows[i].recording_id = ids[rec_idx[i]];
    }
    dump.fs_target = io::read_le<float>(in, "fs_target");
    return dump;
}

void write_window_dump(const std::filesystem::path& file, const WindowDump& dump) {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw Error("cannot open for writing: " + file.string());
    write_window_dump(out, dump);
}

WindowDump read_window_dump(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw Error("cannot open window dump: " + file.string());
    return read_window_dump(in);
}

}  // namespace nsd::prep
