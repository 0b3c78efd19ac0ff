#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

#include "nsd/errors.hpp"

namespace nsd::edf {

// Per-signal block of the EDF header. ASCII field widths follow the
// container layout: label(16) transducer(80) physical_dimension(8)
// physical_min(8) physical_max(8) digital_min(8) digital_max(8)
// prefiltering(80) samples_per_record(8) reserved(32) = 248 + 8 = 256.
struct EdfSignal {
    std::string label;
    std::string transducer;
    std::string physical_dimension;
    double physical_min = 0.0;
    double physical_max = 0.0;
    int digital_min = 0;
    int digital_max = 0;
    std::string prefiltering;
    int samples_per_record = 0;
    std::string reserved;
};

struct EdfHeader {
    std::string version;       // ascii token, "0" for plain EDF
    std::string patient_id;    // text(80), trimmed
    std::string recording_id;  // text(80), trimmed
    std::string start_date;    // "dd.mm.yy"
    std::string start_time;    // "hh.mm.ss"
    int header_bytes = 0;      // must equal 256*(1 + n_signals)
    std::string reserved;
    long long n_records = 0;
    double record_duration_s = 0.0;
    int n_signals = 0;
    std::vector<EdfSignal> signals;
};

struct Channel {
    std::string label;
    std::vector<double> samples;  // physical units (microvolts for EEG)
};

struct Recording {
    std::string id;
    std::vector<Channel> channels;
    double fs = 0.0;
    double duration_s = 0.0;
};

/// Decode and validate the ASCII header. `bytes` must cover the fixed 256-byte
/// block plus 256 bytes per signal. Throws TruncatedHeader, NonNumericField,
/// InconsistentHeader.
EdfHeader parse_edf_header(std::string_view bytes);

/// Affine digital-to-physical calibration for one sample.
inline double calibrate(int digital, const EdfSignal& s) {
    return s.physical_min + (static_cast<double>(digital) - s.digital_min) *
                                (s.physical_max - s.physical_min) /
                                (static_cast<double>(s.digital_max) - s.digital_min);
}

/// Parse a full EDF file: header plus n_records data records of 2-byte
/// little-endian two's-complement samples, signal-major within each record.
/// All signals must share one sampling rate. Throws TruncatedDataRecord,
/// ChannelLengthMismatch and the header errors.
Recording read_recording(std::istream& in, const std::string& id = "");
Recording read_recording(const std::filesystem::path& file);

struct EdfWriteOptions {
    std::string patient_id = "X X X X";
    std::string recording_id = "Startdate 01-JAN-2020 X X X";
    std::string start_date = "01.01.20";
    std::string start_time = "00.00.00";
    double physical_min = -1000.0;
    double physical_max = 1000.0;
    int digital_min = -32768;
    int digital_max = 32767;
    double record_duration_s = 1.0;
};

/// Minimal writer used to generate test fixtures. Samples are quantized onto
/// the digital scale, so a write/read round trip is exact to one digital step.
/// Trailing samples that do not fill a whole record are dropped.
void write_edf(std::ostream& out, const Recording& rec, const EdfWriteOptions& opt = {});
void write_edf(const std::filesystem::path& file, const Recording& rec,
               const EdfWriteOptions& opt = {});

/// Serialize a fully specified header (fixture/round-trip support).
std::string encode_header(const EdfHeader& hdr);

}  // namespace nsd::edf
