#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"
#include "nsd/bench.hpp"
#include "nsd/configfile.hpp"
#include "nsd/model_io.hpp"
#include "nsd/svgplot.hpp"
#include "oracles.hpp"

using namespace nsd;

namespace {

// a small trained container over random features
io::ModelContainer make_fixture_container(std::uint64_t seed, int input_dim = 22) {
    std::mt19937_64 rng(seed);
    Eigen::MatrixXd X(80, input_dim);
    std::vector<int> y;
    for (int i = 0; i < 80; ++i) {
        const int label = static_cast<int>(rng() % 2);
        y.push_back(label);
        for (int j = 0; j < input_dim; ++j)
            X(i, j) = oracle::gaussian(rng) + (label == 1 ? 1.5 : -1.5);
    }
    const pca::PcaModel p = pca::fit(X, 8);
    const Eigen::MatrixXd R = pca::transform(p, X);

    protonn::ProtoNNConfig cfg;
    cfg.proj_dim = 5;
    cfg.n_prototypes = 6;
    cfg.epochs = 8;
    cfg.batch = 32;
    cfg.seed = seed;
    const protonn::ProtoNNModel m = protonn::train(R, y, cfg);

    prep::PreprocessConfig prep_cfg;
    prep_cfg.window_s = 4;
    return io::make_container(prep_cfg, p, m);
}

std::string save_to_string(const io::ModelContainer& c) {
    std::ostringstream out(std::ios::binary);
    io::save_model(out, c);
    return out.str();
}

}  // namespace

TEST_CASE("model container: save/load/save is a byte fixed point") {
    const io::ModelContainer c = make_fixture_container(301);
    const std::string bytes = save_to_string(c);
    CHECK(bytes.substr(0, 4) == "NSDM");

    std::istringstream in(bytes, std::ios::binary);
    const io::ModelContainer back = io::load_model(in);
    CHECK(save_to_string(back) == bytes);

    CHECK(back.preprocess.window_s == c.preprocess.window_s);
    CHECK(back.preprocess.fs_target == c.preprocess.fs_target);
    CHECK(back.pca_model.components == c.pca_model.components);
    CHECK(back.protonn_model.W == c.protonn_model.W);
    CHECK(back.protonn_model.gamma == c.protonn_model.gamma);
}

TEST_CASE("model container: loaded model scores bit-identically") {
    const io::ModelContainer c = make_fixture_container(307);
    std::istringstream in(save_to_string(c), std::ios::binary);
    const io::ModelContainer back = io::load_model(in);

    std::mt19937_64 rng(311);
    for (int trial = 0; trial < 100; ++trial) {
        Eigen::VectorXd f(22);
        for (int j = 0; j < 22; ++j) f(j) = 3.0 * oracle::gaussian(rng);
        const Eigen::VectorXd r = pca::transform(c.pca_model, f);
        const Eigen::VectorXd a = protonn::score(c.protonn_model, r);
        const Eigen::VectorXd b =
            protonn::score(back.protonn_model, pca::transform(back.pca_model, f));
        CHECK(a == b);  // exact, not approximate
    }
}

TEST_CASE("model container: sparse parameter blocks survive the round trip") {
    io::ModelContainer c = make_fixture_container(313);
    c.protonn_model.W = protonn::hard_threshold(c.protonn_model.W, 0.4);
    c.protonn_model.sparsity_w = 0.4;

    std::istringstream in(save_to_string(c), std::ios::binary);
    const io::ModelContainer back = io::load_model(in);
    CHECK(back.protonn_model.W == c.protonn_model.W);
    CHECK(back.protonn_model.sparsity_w == doctest::Approx(0.4));
}

TEST_CASE("model container: malformed inputs") {
    const std::string bytes = save_to_string(make_fixture_container(317));

    SUBCASE("bad magic") {
        std::string bad = bytes;
        bad[0] = 'X';
        std::istringstream in(bad, std::ios::binary);
        CHECK_THROWS_AS(io::load_model(in), BadMagic);
    }
    SUBCASE("unsupported version") {
        std::string bad = bytes;
        bad[4] = '\x7f';
        std::istringstream in(bad, std::ios::binary);
        CHECK_THROWS_AS(io::load_model(in), VersionUnsupported);
    }
    SUBCASE("truncated file") {
        std::istringstream in(bytes.substr(0, bytes.size() - 12), std::ios::binary);
        CHECK_THROWS_AS(io::load_model(in), SectionLengthMismatch);
    }
    SUBCASE("missing section") {
        // keep magic + version, drop everything else
        std::istringstream in(bytes.substr(0, 5), std::ios::binary);
        CHECK_THROWS_AS(io::load_model(in), MissingSection);
    }
}

TEST_CASE("model container: float32 rounding happens at build time") {
    const io::ModelContainer c = make_fixture_container(331);
    const auto is_f32 = [](double v) {
        return v == static_cast<double>(static_cast<float>(v));
    };
    for (int i = 0; i < c.pca_model.mean.size(); ++i) CHECK(is_f32(c.pca_model.mean(i)));
    for (int i = 0; i < c.pca_model.components.rows(); ++i)
        for (int j = 0; j < c.pca_model.components.cols(); ++j)
            CHECK(is_f32(c.pca_model.components(i, j)));
    CHECK(is_f32(c.protonn_model.gamma));
}

TEST_CASE("classify_segment: full chain agrees between saved and loaded containers") {
    const io::ModelContainer c = make_fixture_container(337, 22);
    std::istringstream in(save_to_string(c), std::ios::binary);
    const io::ModelContainer back = io::load_model(in);

    // raw 2-channel segment at 256 Hz covering one 4 s window
    std::mt19937_64 rng(347);
    bench::RawSegment seg;
    seg.fs = 256.0;
    for (int ch = 0; ch < 2; ++ch)
        seg.channels.push_back(oracle::random_signal(rng, 1024, 60.0));

    Eigen::VectorXd s1, s2;
    const int l1 = bench::classify_segment(c, seg, &s1);
    const int l2 = bench::classify_segment(back, seg, &s2);
    CHECK(l1 == l2);
    CHECK(s1 == s2);
}

TEST_CASE("bench_inference: report invariants and the preprocess tap") {
    const io::ModelContainer c = make_fixture_container(349, 22);
    std::mt19937_64 rng(353);
    std::vector<bench::RawSegment> segments;
    for (int i = 0; i < 120; ++i) {
        bench::RawSegment seg;
        seg.fs = 256.0;
        for (int ch = 0; ch < 2; ++ch)
            seg.channels.push_back(oracle::random_signal(rng, 1024, 60.0));
        segments.push_back(std::move(seg));
    }

    bench::BenchOptions opt;
    int tap_calls = 0;
    opt.preprocess_tap = [&] { ++tap_calls; };
    const bench::BenchReport r = bench::bench_inference(c, segments, opt);

    CHECK(r.segments == 120);
    CHECK(r.min_ms <= r.p50_ms);
    CHECK(r.p50_ms <= r.p95_ms);
    CHECK(r.min_ms <= r.mean_ms);
    CHECK(r.min_ms > 0.0);
    CHECK(r.model_bytes == protonn::model_size_bytes(c.protonn_model));
    // warm-up passes also run preprocessing
    CHECK(tap_calls == 120 + opt.warmup);

    CHECK_THROWS_AS(
        bench::bench_inference(c, std::vector<bench::RawSegment>(segments.begin(),
                                                                 segments.begin() + 50)),
        TooFewSegments);
}

TEST_CASE("config file: parsing, comments, typed getters") {
    std::istringstream in(
        "# experiment setup\n"
        "windows = 1,2,4\n"
        "seed=7\n"
        "train_fraction = 0.6  \n"
        "bench = on\n"
        "name = desk run\n"
        "\n");
    const cfg::KeyValueFile kv = cfg::KeyValueFile::parse(in);
    CHECK(kv.get_int_list("windows", {}) == std::vector<int>{1, 2, 4});
    CHECK(kv.get_int("seed", 0) == 7);
    CHECK(kv.get_double("train_fraction", 0.0) == doctest::Approx(0.6));
    CHECK(kv.get_bool("bench", false));
    CHECK(kv.get("name") == "desk run");
    CHECK(kv.get("missing", "fallback") == "fallback");
    CHECK(kv.get_int("missing", 3) == 3);
    CHECK_FALSE(kv.has("comment"));

    std::istringstream bad("seed = notanumber\n");
    const cfg::KeyValueFile kb = cfg::KeyValueFile::parse(bad);
    CHECK_THROWS_AS(kb.get_int("seed", 0), NonNumericField);
}

TEST_CASE("svg plots: file pair is written and the CSV carries the numbers") {
    const std::filesystem::path dir =
        std::filesystem::temp_directory_path() / "nsd_test_plots";
    std::filesystem::create_directories(dir);

    plot::Series a{"protonn", {20, 50, 70, 100}, {1760, 2960, 3760, 4960}};
    plot::write_line_svg(dir / "sizes.svg", "model size vs features", "pca_dim", "bytes", {a});
    plot::write_series_csv(dir / "sizes.csv", "pca_dim", {a});

    std::ifstream svg(dir / "sizes.svg");
    std::stringstream svg_text;
    svg_text << svg.rdbuf();
    CHECK(svg_text.str().find("<svg") != std::string::npos);
    CHECK(svg_text.str().find("polyline") != std::string::npos);

    std::ifstream csv(dir / "sizes.csv");
    std::string header, row;
    std::getline(csv, header);
    std::getline(csv, row);
    CHECK(header == "pca_dim,protonn");
    CHECK(row == "20,1760");

    std::filesystem::remove_all(dir);
}
