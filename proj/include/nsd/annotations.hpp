#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <string>
#include <vector>

#include "nsd/errors.hpp"

namespace nsd::edf {

/// Per-second, per-expert binary seizure marks.
struct AnnotationTrack {
    int experts = 0;
    // mask[e][s] in {0,1}; all rows have length duration_s
    std::vector<std::vector<std::uint8_t>> mask;
    std::vector<std::string> warnings;

    std::size_t duration_s() const { return mask.empty() ? 0 : mask.front().size(); }
};

/// Read the per-second annotation CSV: header `time_s,expert1,...,expertE`,
/// one row per second, values in {0,1}. Seconds missing up to `duration_s`
/// are zero-filled and reported in the warning list. Throws
/// NonBinaryAnnotation and DuplicateTimestamp.
AnnotationTrack read_annotations_csv(std::istream& in, std::size_t duration_s);
AnnotationTrack read_annotations_csv(const std::filesystem::path& file, std::size_t duration_s);

void write_annotations_csv(std::ostream& out, const AnnotationTrack& track);

}  // namespace nsd::edf
