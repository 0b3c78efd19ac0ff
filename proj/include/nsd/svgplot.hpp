#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace nsd::plot {

struct Series {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
};

/// Minimal standalone SVG line chart; each figure is paired with a CSV holding
/// the same numbers so the CSV stays the testable artifact.
void write_line_svg(const std::filesystem::path& file, const std::string& title,
                    const std::string& x_label, const std::string& y_label,
                    const std::vector<Series>& series);

void write_series_csv(const std::filesystem::path& file, const std::string& x_label,
                      const std::vector<Series>& series);

}  // namespace nsd::plot
