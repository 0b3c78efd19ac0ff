#include "nsd/edf.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace nsd::edf {

namespace {

// Fixed header: version(8) patient(80) recording(80) date(8) time(8)
// header_bytes(8) reserved(44) n_records(8) record_duration(8) n_signals(4)
constexpr std::size_t kFixedHeaderBytes = 256;
constexpr std::size_t kPerSignalBytes = 256;

std::string trim(std::string_view s) {
    std::size_t b = s.find_first_not_of(' ');
    if (b == std::string_view::npos) return {};
    std::size_t e = s.find_last_not_of(' ');
    return std::string(s.substr(b, e - b + 1));
}

struct Cursor {
    std::string_view bytes;
    std::size_t pos = 0;

    std::string_view take(std::size_t n) {
        std::string_view out = bytes.substr(pos, n);
        pos += n;
        return out;
    }
};

long long parse_int_field(std::string_view raw, const char* name) {
    std::string t = trim(raw);
    if (t.empty()) throw NonNumericField(name, std::string(raw));
    long long value = 0;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
    if (ec != std::errc{} || ptr != t.data() + t.size())
        throw NonNumericField(name, std::string(raw));
    return value;
}

double parse_double_field(std::string_view raw, const char* name) {
    std::string t = trim(raw);
    if (t.empty()) throw NonNumericField(name, std::string(raw));
    try {
        std::size_t used = 0;
        double value = std::stod(t, &used);
        if (used != t.size()) throw NonNumericField(name, std::string(raw));
        return value;
    } catch (const NonNumericField&) {
        throw;
    } catch (const std::exception&) {
        throw NonNumericField(name, std::string(raw));
    }
}

void put_field(std::string& out, const std::string& value, std::size_t width) {
    std::string v = value.substr(0, width);
    v.resize(width, ' ');
    out += v;
}

std::string format_double_field(double value, std::size_t width) {
    // shortest representation that fits the 8-char ASCII slot
    for (int prec = 6; prec >= 0; --prec) {
        std::ostringstream os;
        os << std::setprecision(prec) << std::fixed << value;
        std::string s = os.str();
        if (s.size() > width && s.find('.') != std::string::npos) {
            s.erase(s.find_last_not_of('0') + 1);
            if (!s.empty() && s.back() == '.') s.pop_back();
        }
        if (s.size() <= width) return s;
    }
    std::ostringstream os;
    os << std::setprecision(2) << value;
    return os.str().substr(0, width);
}

}  // namespace

EdfHeader parse_edf_header(std::string_view bytes) {
    if (bytes.size() < kFixedHeaderBytes)
        throw TruncatedHeader("EDF header shorter than 256 bytes");

    for (std::size_t i = 0; i < kFixedHeaderBytes; ++i) {
        unsigned char c = static_cast<unsigned char>(bytes[i]);
        if (c < 32 || c > 126)
            throw InconsistentHeader("non-printable byte in EDF header at offset " +
                                     std::to_string(i));
    }

    Cursor cur{bytes};
    EdfHeader hdr;
    hdr.version = trim(cur.take(8));
    hdr.patient_id = trim(cur.take(80));
    hdr.recording_id = trim(cur.take(80));
    hdr.start_date = trim(cur.take(8));
    hdr.start_time = trim(cur.take(8));
    hdr.header_bytes = static_cast<int>(parse_int_field(cur.take(8), "header_bytes"));
    hdr.reserved = trim(cur.take(44));
    hdr.n_records = parse_int_field(cur.take(8), "n_records");
    hdr.record_duration_s = parse_double_field(cur.take(8), "record_duration_s");
    hdr.n_signals = static_cast<int>(parse_int_field(cur.take(4), "n_signals"));

    if (hdr.n_signals < 1)
        throw InconsistentHeader("n_signals must be at least 1, got " +
                                 std::to_string(hdr.n_signals));
    const std::size_t want = kFixedHeaderBytes + kPerSignalBytes * hdr.n_signals;
    if (hdr.header_bytes != static_cast<int>(want))
        throw InconsistentHeader("header_bytes=" + std::to_string(hdr.header_bytes) +
                                 " but 256*(1+n_signals)=" + std::to_string(want));
    if (bytes.size() < want)
        throw TruncatedHeader("EDF header declares " + std::to_string(want) +
                              " bytes, only " + std::to_string(bytes.size()) + " present");
    if (hdr.n_records < 0)
        throw InconsistentHeader("n_records must be non-negative");
    if (hdr.record_duration_s <= 0.0)
        throw InconsistentHeader("record_duration_s must be positive");

    const int ns = hdr.n_signals;
    hdr.signals.resize(ns);
    // signal fields are stored field-major: all labels, all transducers, ...
    for (int i = 0; i < ns; ++i) hdr.signals[i].label = trim(cur.take(16));
    for (int i = 0; i < ns; ++i) hdr.signals[i].transducer = trim(cur.take(80));
    for (int i = 0; i < ns; ++i) hdr.signals[i].physical_dimension = trim(cur.take(8));
    for (int i = 0; i < ns; ++i)
        hdr.signals[i].physical_min = parse_double_field(cur.take(8), "physical_min");
    for (int i = 0; i < ns; ++i)
        hdr.signals[i].physical_max = parse_double_field(cur.take(8), "physical_max");
    for (int i = 0; i < ns; ++i)
        hdr.signals[i].digital_min = static_cast<int>(parse_int_field(cur.take(8), "digital_min"));
    for (int i = 0; i < ns; ++i)
        hdr.signals[i].digital_max = static_cast<int>(parse_int_field(cur.take(8), "digital_max"));
    for (int i = 0; i < ns; ++i) hdr.signals[i].prefiltering = trim(cur.take(80));
    for (int i = 0; i < ns; ++i)
        hdr.signals[i].samples_per_record =
            static_cast<int>(parse_int_field(cur.take(8), "samples_per_record"));
    for (int i = 0; i < ns; ++i) hdr.signals[i].reserved = trim(cur.take(32));

    for (int i = 0; i < ns; ++i) {
        const EdfSignal& s = hdr.signals[i];
        if (s.digital_min >= s.digital_max)
            throw InconsistentHeader("signal " + std::to_string(i) +
                                     ": digital_min must be below digital_max");
        if (s.physical_min == s.physical_max)
            throw InconsistentHeader("signal " + std::to_string(i) +
                                     ": physical_min equals physical_max");
        if (s.samples_per_record < 1)
            throw InconsistentHeader("signal " + std::to_string(i) +
                                     ": samples_per_record must be at least 1");
    }
    return hdr;
}

Recording read_recording(std::istream& in, const std::string& id) {
    std::array<char, kFixedHeaderBytes> fixed{};
    in.read(fixed.data(), fixed.size());
    if (in.gcount() != static_cast<std::streamsize>(fixed.size()))
        throw TruncatedHeader("file shorter than the fixed EDF header");

    // peek n_signals to size the full header read
    std::string head(fixed.data(), fixed.size());
    long long ns = 0;
    try {
        ns = parse_int_field(std::string_view(head).substr(252, 4), "n_signals");
    } catch (const NonNumericField&) {
        throw;
    }
    if (ns < 1) throw InconsistentHeader("n_signals must be at least 1");

    std::string rest(kPerSignalBytes * static_cast<std::size_t>(ns), '\0');
    in.read(rest.data(), static_cast<std::streamsize>(rest.size()));
    if (in.gcount() != static_cast<std::streamsize>(rest.size()))
        throw TruncatedHeader("signal header block truncated");

    EdfHeader hdr = parse_edf_header(head + rest);

    const int spr0 = hdr.signals.front().samples_per_record;
    for (const auto& s : hdr.signals)
        if (s.samples_per_record != spr0)
            throw ChannelLengthMismatch(
                "signals disagree on samples_per_record; a single-rate recording is required");

    Recording rec;
    rec.id = id.empty() ? hdr.recording_id : id;
    rec.fs = spr0 / hdr.record_duration_s;
    rec.duration_s = static_cast<double>(hdr.n_records) * hdr.record_duration_s;
    rec.channels.resize(hdr.n_signals);
    const std::size_t total = static_cast<std::size_t>(hdr.n_records) * spr0;
    for (int c = 0; c < hdr.n_signals; ++c) {
        rec.channels[c].label = hdr.signals[c].label;
        rec.channels[c].samples.reserve(total);
    }

    std::vector<char> record(static_cast<std::size_t>(hdr.n_signals) * spr0 * 2);
    for (long long r = 0; r < hdr.n_records; ++r) {
        in.read(record.data(), static_cast<std::streamsize>(record.size()));
        if (in.gcount() != static_cast<std::streamsize>(record.size()))
            throw TruncatedDataRecord("data record " + std::to_string(r) + " truncated");
        const char* p = record.data();
        for (int c = 0; c < hdr.n_signals; ++c) {
            const EdfSignal& sig = hdr.signals[c];
            auto& out = rec.channels[c].samples;
            for (int k = 0; k < spr0; ++k) {
                const auto lo = static_cast<unsigned char>(p[0]);
                const auto hi = static_cast<unsigned char>(p[1]);
                const auto digital =
                    static_cast<std::int16_t>(static_cast<std::uint16_t>(lo) |
                                              (static_cast<std::uint16_t>(hi) << 8));
                out.push_back(calibrate(digital, sig));
                p += 2;
            }
        }
    }
    return rec;
}

Recording read_recording(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw Error("cannot open EDF file: " + file.string());
    return read_recording(in, file.stem().string());
}

std::string encode_header(const EdfHeader& hdr) {
    std::string out;
    out.reserve(kFixedHeaderBytes + kPerSignalBytes * hdr.signals.size());
    put_field(out, hdr.version, 8);
    put_field(out, hdr.patient_id, 80);
    put_field(out, hdr.recording_id, 80);
    put_field(out, hdr.start_date, 8);
    put_field(out, hdr.start_time, 8);
    put_field(out, std::to_string(hdr.header_bytes), 8);
    put_field(out, hdr.reserved, 44);
    put_field(out, std::to_string(hdr.n_records), 8);
    put_field(out, format_double_field(hdr.record_duration_s, 8), 8);
    put_field(out, std::to_string(hdr.n_signals), 4);

    auto per_signal = [&](auto&& get, std::size_t width) {
        for (const auto& s : hdr.signals) put_field(out, get(s), width);
    };
    per_signal([](const EdfSignal& s) { return s.label; }, 16);
    per_signal([](const EdfSignal& s) { return s.transducer; }, 80);
    per_signal([](const EdfSignal& s) { return s.physical_dimension; }, 8);
    per_signal([](const EdfSignal& s) { return format_double_field(s.physical_min, 8); }, 8);
    per_signal([](const EdfSignal& s) { return format_double_field(s.physical_max, 8); }, 8);
    per_signal([](const EdfSignal& s) { return std::to_string(s.digital_min); }, 8);
    per_signal([](const EdfSignal& s) { return std::to_string(s.digital_max); }, 8);
    per_signal([](const EdfSignal& s) { return s.prefiltering; }, 80);
    per_signal([](const EdfSignal& s) { return std::to_string(s.samples_per_record); }, 8);
    per_signal([](const EdfSignal& s) { return s.reserved; }, 32);
    return out;
}

void write_edf(std::ostream& out, const Recording& rec, const EdfWriteOptions& opt) {
    if (rec.channels.empty()) throw Error("cannot write an EDF file with no channels");
    const std::size_t n_samples = rec.channels.front().samples.size();
    for (const auto& ch : rec.channels)
        if (ch.samples.size() != n_samples)
            throw ChannelLengthMismatch("all channels must have equal length for writing");

    const int spr = static_cast<int>(std::lround(rec.fs * opt.record_duration_s));
    if (spr < 1) throw Error("record duration too short for the sampling rate");
    const long long n_records = static_cast<long long>(n_samples) / spr;

    EdfHeader hdr;
    hdr.version = "0";
    hdr.patient_id = opt.patient_id;
    hdr.recording_id = opt.recording_id;
    hdr.start_date = opt.start_date;
    hdr.start_time = opt.start_time;
    hdr.header_bytes = static_cast<int>(kFixedHeaderBytes + kPerSignalBytes * rec.channels.size());
    hdr.n_records = n_records;
    hdr.record_duration_s = opt.record_duration_s;
    hdr.n_signals = static_cast<int>(rec.channels.size());
    hdr.signals.resize(rec.channels.size());
    for (std::size_t c = 0; c < rec.channels.size(); ++c) {
        EdfSignal& s = hdr.signals[c];
        s.label = rec.channels[c].label.empty() ? ("EEG ch" + std::to_string(c)) : rec.channels[c].label;
        s.transducer = "AgAgCl electrode";
        s.physical_dimension = "uV";
        s.physical_min = opt.physical_min;
        s.physical_max = opt.physical_max;
        s.digital_min = opt.digital_min;
        s.digital_max = opt.digital_max;
        s.prefiltering = "";
        s.samples_per_record = spr;
    }
    out << encode_header(hdr);

    const double phys_range = opt.physical_max - opt.physical_min;
    const double dig_range = static_cast<double>(opt.digital_max) - opt.digital_min;
    for (long long r = 0; r < n_records; ++r) {
        for (std::size_t c = 0; c < rec.channels.size(); ++c) {
            const auto& samples = rec.channels[c].samples;
            for (int k = 0; k < spr; ++k) {
                const double p = samples[static_cast<std::size_t>(r) * spr + k];
                double d = (p - opt.physical_min) / phys_range * dig_range + opt.digital_min;
                long v = std::lround(d);
                v = std::clamp(v, static_cast<long>(opt.digital_min),
                               static_cast<long>(opt.digital_max));
                const auto u = static_cast<std::uint16_t>(static_cast<std::int16_t>(v));
                const char bytes[2] = {static_cast<char>(u & 0xff),
                                       static_cast<char>((u >> 8) & 0xff)};
                out.write(bytes, 2);
            }
        }
    }
}

void write_edf(const std::filesystem::path& file, const Recording& rec,
               const EdfWriteOptions& opt) {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw Error("cannot open for writing: " + file.string());
    write_edf(out, rec, opt);
}

}  // namespace nsd::edf
