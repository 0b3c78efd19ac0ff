// Deterministic synthetic EEG corpus generator: paired .edf/.csv fixtures with
// rhythmic high-amplitude discharge episodes on an AR(1) background, annotated
// per second by simulated experts with boundary jitter and mark noise.

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <vector>

#include "nsd/annotations.hpp"
#include "nsd/edf.hpp"
#include "nsd/errors.hpp"

namespace {

struct Episode {
    double start_s = 0.0;
    double end_s = 0.0;
};

constexpr double kPi = 3.14159265358979323846;

std::vector<Episode> draw_episodes(std::mt19937_64& rng, double duration_s) {
    std::uniform_real_distribution<double> gap(20.0, 60.0);
    std::uniform_real_distribution<double> length(18.0, 45.0);
    std::vector<Episode> episodes;
    double t = 10.0 + gap(rng) * 0.5;
    while (true) {
        const double len = length(rng);
        if (t + len > duration_s - 10.0) break;
        episodes.push_back({t, t + len});
        t += len + gap(rng);
    }
    return episodes;
}

nsd::edf::Recording synth_recording(const std::string& id, int channels, double duration_s,
                                    double fs, const std::vector<Episode>& episodes,
                                    std::mt19937_64& rng) {
    const std::size_t n = static_cast<std::size_t>(duration_s * fs);
    std::normal_distribution<double> noise(0.0, 4.0);
    std::uniform_real_distribution<double> ripple_hz(8.0, 12.0);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * kPi);
    std::uniform_real_distribution<double> discharge_hz(2.5, 3.5);
    std::uniform_real_distribution<double> discharge_amp(60.0, 120.0);

    std::vector<double> episode_hz(episodes.size());
    for (auto& f : episode_hz) f = discharge_hz(rng);

    nsd::edf::Recording rec;
    rec.id = id;
    rec.fs = fs;
    rec.duration_s = duration_s;
    rec.channels.resize(static_cast<std::size_t>(channels));
    for (int c = 0; c < channels; ++c) {
        auto& ch = rec.channels[static_cast<std::size_t>(c)];
        char label[16];
        std::snprintf(label, sizeof(label), "EEG C%02d", c + 1);
        ch.label = label;
        ch.samples.resize(n);

        const double f_ripple = ripple_hz(rng);
        const double p_ripple = phase(rng);
        double ar = 0.0;
        std::vector<double> amp(episodes.size()), pha(episodes.size());
        for (std::size_t e = 0; e < episodes.size(); ++e) {
            amp[e] = discharge_amp(rng);
            pha[e] = phase(rng);
        }

        std::size_t e = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const double t = static_cast<double>(i) / fs;
            ar = 0.97 * ar + noise(rng);
            double v = ar + 5.0 * std::sin(2.0 * kPi * f_ripple * t + p_ripple);
            while (e < episodes.size() && t >= episodes[e].end_s) ++e;
            if (e < episodes.size() && t >= episodes[e].start_s) {
                const double u = (t - episodes[e].start_s) / (episodes[e].end_s - episodes[e].start_s);
                const double env = std::sin(kPi * u);
                v += amp[e] * env * env * std::sin(2.0 * kPi * episode_hz[e] * t + pha[e]);
            }
            ch.samples[i] = v;
        }
    }
    return rec;
}

nsd::edf::AnnotationTrack annotate(const std::vector<Episode>& episodes, double duration_s,
                                   int experts, std::mt19937_64& rng) {
    std::uniform_int_distribution<int> jitter(-2, 2);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const std::size_t seconds = static_cast<std::size_t>(duration_s);

    nsd::edf::AnnotationTrack track;
    track.experts = experts;
    track.mask.assign(static_cast<std::size_t>(experts),
                      std::vector<std::uint8_t>(seconds, 0));
    for (int e = 0; e < experts; ++e) {
        auto& row = track.mask[static_cast<std::size_t>(e)];
        for (const Episode& ep : episodes) {
            const long long lo = std::max<long long>(0, static_cast<long long>(ep.start_s) + jitter(rng));
            const long long hi = std::min<long long>(static_cast<long long>(seconds),
                                                     static_cast<long long>(ep.end_s) + jitter(rng));
            for (long long s = lo; s < hi; ++s) row[static_cast<std::size_t>(s)] = 1;
        }
        for (auto& mark : row)
            if (unit(rng) < 0.005) mark ^= 1;
    }
    return track;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Generate a deterministic synthetic EEG fixture corpus"};
    std::string out_dir = "fixtures";
    int recordings = 10, channels = 12, experts = 3;
    double duration = 360.0, fs = 256.0;
    std::uint64_t seed = 7;
    app.add_option("--out", out_dir, "Output directory")->capture_default_str();
    app.add_option("--recordings", recordings, "Number of recordings")->capture_default_str();
    app.add_option("--channels", channels, "EEG channels per recording")->capture_default_str();
    app.add_option("--experts", experts, "Annotators per recording")->capture_default_str();
    app.add_option("--duration", duration, "Recording length in seconds")->capture_default_str();
    app.add_option("--fs", fs, "Sampling rate in Hz")->capture_default_str();
    app.add_option("--seed", seed, "RNG seed")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        std::filesystem::create_directories(out_dir);
        for (int r = 0; r < recordings; ++r) {
            std::mt19937_64 rng(seed + static_cast<std::uint64_t>(r) * 7919);
            const auto episodes = draw_episodes(rng, duration);
            char name[32];
            std::snprintf(name, sizeof(name), "rec%02d", r + 1);
            const auto rec = synth_recording(name, channels, duration, fs, episodes, rng);
            const auto track = annotate(episodes, duration, experts, rng);

            const std::filesystem::path base = std::filesystem::path(out_dir) / name;
            nsd::edf::write_edf(base.string() + ".edf", rec);
            std::ofstream csv(base.string() + ".csv", std::ios::binary);
            if (!csv) throw nsd::Error("cannot write " + base.string() + ".csv");
            nsd::edf::write_annotations_csv(csv, track);
            std::cout << name << ": " << episodes.size() << " episodes, " << channels
                      << " channels, " << duration << " s\n";
        }
    } catch (const nsd::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
