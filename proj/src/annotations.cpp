#include "nsd/annotations.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace nsd::edf {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) {
        while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
        std::size_t b = cell.find_first_not_of(' ');
        out.push_back(b == std::string::npos ? "" : cell.substr(b));
    }
    if (!line.empty() && line.back() == ',') out.push_back("");
    return out;
}

long long parse_cell_int(const std::string& cell, std::size_t row) {
    long long v = 0;
    auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (ec != std::errc{} || ptr != cell.data() + cell.size())
        throw NonBinaryAnnotation(row);
    return v;
}

}  // namespace

AnnotationTrack read_annotations_csv(std::istream& in, std::size_t duration_s) {
    std::string line;
    if (!std::getline(in, line)) throw Error("annotation CSV is empty");
    auto header = split_csv_line(line);
    if (header.size() < 2 || header[0] != "time_s")
        throw Error("annotation CSV must start with header `time_s,expert1,...`");
    const int experts = static_cast<int>(header.size()) - 1;

    AnnotationTrack track;
    track.experts = experts;
    track.mask.assign(experts, std::vector<std::uint8_t>(duration_s, 0));
    std::vector<bool> seen(duration_s, false);

    std::size_t row = 0;
    std::size_t ignored_beyond = 0;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty() || line == "\r") continue;
        auto cells = split_csv_line(line);
        if (cells.size() != header.size())
            throw Error("annotation CSV row " + std::to_string(row) + " has " +
                        std::to_string(cells.size()) + " cells, expected " +
                        std::to_string(header.size()));
        const long long t = parse_cell_int(cells[0], row);
        if (t < 0) throw Error("negative time_s at row " + std::to_string(row));
        if (static_cast<std::size_t>(t) >= duration_s) {
            ++ignored_beyond;
            continue;
        }
        if (seen[t]) throw DuplicateTimestamp(row);
        seen[t] = true;
        for (int e = 0; e < experts; ++e) {
            const long long v = parse_cell_int(cells[e + 1], row);
            if (v != 0 && v != 1) throw NonBinaryAnnotation(row);
            track.mask[e][t] = static_cast<std::uint8_t>(v);
        }
    }

    // missing seconds stay zero (non-seizure); report them instead of inventing marks
    std::size_t s = 0;
    while (s < duration_s) {
        if (seen[s]) { ++s; continue; }
        std::size_t e = s;
        while (e < duration_s && !seen[e]) ++e;
        track.warnings.push_back("seconds " + std::to_string(s) + ".." + std::to_string(e - 1) +
                                 " missing from annotation CSV; zero-filled");
        s = e;
    }
    if (ignored_beyond > 0)
        track.warnings.push_back(std::to_string(ignored_beyond) +
                                 " rows beyond the recording duration were ignored");
    return track;
}

AnnotationTrack read_annotations_csv(const std::filesystem::path& file, std::size_t duration_s) {
    std::ifstream in(file);
    if (!in) throw Error("cannot open annotation CSV: " + file.string());
    return read_annotations_csv(in, duration_s);
}

void write_annotations_csv(std::ostream& out, const AnnotationTrack& track) {
    out << "time_s";
    for (int e = 1; e <= track.experts; ++e) out << ",expert" << e;
    out << "\n";
    for (std::size_t s = 0; s < track.duration_s(); ++s) {
        out << s;
        for (int e = 0; e < track.experts; ++e) out << ',' << int(track.mask[e][s]);
        out << "\n";
    }
}

}  // namespace nsd::edf
