#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "nsd/edf.hpp"
#include "oracles.hpp"

using namespace nsd;

namespace {

edf::EdfHeader minimal_header(int n_signals, int samples_per_record, long long n_records) {
    edf::EdfHeader hdr;
    hdr.version = "0";
    hdr.patient_id = "X X X X";
    hdr.recording_id = "Startdate 01-JAN-2020 X X X";
    hdr.start_date = "01.01.20";
    hdr.start_time = "00.00.00";
    hdr.header_bytes = 256 * (1 + n_signals);
    hdr.n_records = n_records;
    hdr.record_duration_s = 1.0;
    hdr.n_signals = n_signals;
    for (int s = 0; s < n_signals; ++s) {
        edf::EdfSignal sig;
        sig.label = "EEG C" + std::to_string(s);
        sig.physical_dimension = "uV";
        sig.physical_min = -1000.0;
        sig.physical_max = 1000.0;
        sig.digital_min = -32768;
        sig.digital_max = 32767;
        sig.samples_per_record = samples_per_record;
        hdr.signals.push_back(sig);
    }
    return hdr;
}

edf::Recording sine_recording(int channels, int seconds, double fs) {
    edf::Recording rec;
    rec.id = "synth";
    rec.fs = fs;
    rec.duration_s = seconds;
    const std::size_t n = static_cast<std::size_t>(seconds * fs);
    for (int c = 0; c < channels; ++c) {
        edf::Channel ch;
        ch.label = "EEG C" + std::to_string(c);
        for (std::size_t i = 0; i < n; ++i)
            ch.samples.push_back(
                50.0 * std::sin(2.0 * M_PI * (2.0 + c) * static_cast<double>(i) / fs));
        rec.channels.push_back(std::move(ch));
    }
    return rec;
}

}  // namespace

TEST_CASE("header: minimal one-signal header decodes with header_bytes 512") {
    const std::string bytes = edf::encode_header(minimal_header(1, 256, 10));
    const edf::EdfHeader hdr = edf::parse_edf_header(bytes);
    CHECK(hdr.header_bytes == 512);
    CHECK(hdr.n_signals == 1);
    CHECK(hdr.n_records == 10);
    CHECK(hdr.record_duration_s == 1.0);
    CHECK(hdr.signals[0].samples_per_record == 256);
    CHECK(hdr.signals[0].digital_min == -32768);
}

TEST_CASE("header: encode/parse round-trips every field") {
    edf::EdfHeader hdr = minimal_header(3, 128, 42);
    hdr.signals[1].label = "EEG Fp1";
    hdr.signals[1].transducer = "AgAgCl electrode";
    hdr.signals[2].physical_min = -3276.8;
    hdr.signals[2].physical_max = 3276.7;
    const edf::EdfHeader back = edf::parse_edf_header(edf::encode_header(hdr));
    CHECK(back.version == hdr.version);
    CHECK(back.patient_id == hdr.patient_id);
    CHECK(back.recording_id == hdr.recording_id);
    CHECK(back.start_date == hdr.start_date);
    CHECK(back.start_time == hdr.start_time);
    CHECK(back.header_bytes == hdr.header_bytes);
    CHECK(back.n_records == hdr.n_records);
    CHECK(back.record_duration_s == hdr.record_duration_s);
    REQUIRE(back.n_signals == hdr.n_signals);
    for (int s = 0; s < hdr.n_signals; ++s) {
        CHECK(back.signals[s].label == hdr.signals[s].label);
        CHECK(back.signals[s].transducer == hdr.signals[s].transducer);
        CHECK(back.signals[s].physical_dimension == hdr.signals[s].physical_dimension);
        CHECK(back.signals[s].physical_min == doctest::Approx(hdr.signals[s].physical_min));
        CHECK(back.signals[s].physical_max == doctest::Approx(hdr.signals[s].physical_max));
        CHECK(back.signals[s].digital_min == hdr.signals[s].digital_min);
        CHECK(back.signals[s].digital_max == hdr.signals[s].digital_max);
        CHECK(back.signals[s].samples_per_record == hdr.signals[s].samples_per_record);
    }
}

TEST_CASE("header: validation failures") {
    SUBCASE("shorter than 256 bytes") {
        CHECK_THROWS_AS(edf::parse_edf_header(std::string(100, ' ')), TruncatedHeader);
    }
    SUBCASE("digital_min == digital_max") {
        edf::EdfHeader hdr = minimal_header(1, 256, 1);
        hdr.signals[0].digital_min = 5;
        hdr.signals[0].digital_max = 5;
        CHECK_THROWS_AS(edf::parse_edf_header(edf::encode_header(hdr)), InconsistentHeader);
    }
    SUBCASE("physical_min == physical_max") {
        edf::EdfHeader hdr = minimal_header(1, 256, 1);
        hdr.signals[0].physical_min = 1.0;
        hdr.signals[0].physical_max = 1.0;
        CHECK_THROWS_AS(edf::parse_edf_header(edf::encode_header(hdr)), InconsistentHeader);
    }
    SUBCASE("header_bytes inconsistent with n_signals") {
        std::string bytes = edf::encode_header(minimal_header(1, 256, 1));
        bytes.replace(184, 8, "768     ");  // claims 2 signals' worth
        CHECK_THROWS_AS(edf::parse_edf_header(bytes), InconsistentHeader);
    }
    SUBCASE("non-numeric n_records") {
        std::string bytes = edf::encode_header(minimal_header(1, 256, 1));
        bytes.replace(236, 8, "abc     ");
        CHECK_THROWS_AS(edf::parse_edf_header(bytes), NonNumericField);
    }
    SUBCASE("samples_per_record zero") {
        edf::EdfHeader hdr = minimal_header(1, 0, 1);
        CHECK_THROWS_AS(edf::parse_edf_header(edf::encode_header(hdr)), InconsistentHeader);
    }
}

TEST_CASE("calibration: affine endpoints and the midpoint value") {
    edf::EdfSignal sig;
    sig.physical_min = -1000.0;
    sig.physical_max = 1000.0;
    sig.digital_min = -32768;
    sig.digital_max = 32767;
    CHECK(edf::calibrate(sig.digital_min, sig) == doctest::Approx(-1000.0).epsilon(1e-12));
    CHECK(edf::calibrate(sig.digital_max, sig) == doctest::Approx(1000.0).epsilon(1e-12));
    // -1000 + 32768 * 2000 / 65535
    CHECK(edf::calibrate(0, sig) == doctest::Approx(0.015259).epsilon(1e-4));

    // monotone whenever physical_max > physical_min
    double prev = edf::calibrate(-32768, sig);
    for (int d = -32760; d <= 32767; d += 997) {
        const double cur = edf::calibrate(d, sig);
        CHECK(cur > prev);
        prev = cur;
    }
}

TEST_CASE("read_recording: write-then-parse round trip within one digital step") {
    const edf::Recording rec = sine_recording(4, 10, 256.0);
    std::stringstream buf;
    edf::write_edf(buf, rec);

    const edf::Recording back = edf::read_recording(buf, rec.id);
    REQUIRE(back.channels.size() == rec.channels.size());
    CHECK(back.fs == rec.fs);
    CHECK(back.duration_s == doctest::Approx(rec.duration_s));

    const double step = 2000.0 / 65535.0;  // one digital quantum on the +-1000 scale
    for (std::size_t c = 0; c < rec.channels.size(); ++c) {
        CHECK(back.channels[c].label == rec.channels[c].label);
        REQUIRE(back.channels[c].samples.size() == rec.channels[c].samples.size());
        for (std::size_t i = 0; i < rec.channels[c].samples.size(); ++i)
            CHECK(std::abs(back.channels[c].samples[i] - rec.channels[c].samples[i]) <=
                  step + 1e-12);
    }
}

TEST_CASE("read_recording: truncated data area is rejected") {
    const edf::Recording rec = sine_recording(2, 4, 256.0);
    std::stringstream buf;
    edf::write_edf(buf, rec);
    std::string bytes = buf.str();
    bytes.resize(bytes.size() - 100);
    std::istringstream cut(bytes);
    CHECK_THROWS_AS(edf::read_recording(cut, "cut"), TruncatedDataRecord);
}

TEST_CASE("read_recording: channels ordered as in the header, equal lengths") {
    const edf::Recording rec = sine_recording(6, 5, 256.0);
    std::stringstream buf;
    edf::write_edf(buf, rec);
    const edf::Recording back = edf::read_recording(buf, "order");
    for (std::size_t c = 0; c < back.channels.size(); ++c) {
        CHECK(back.channels[c].label == "EEG C" + std::to_string(c));
        CHECK(back.channels[c].samples.size() == back.channels[0].samples.size());
    }
}
