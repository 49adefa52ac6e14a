#pragma once

#include <string>
#include <vector>

namespace qmalab {

/// Raw grid file: header of three little-endian uint32 (n, N, axis count)
/// followed by N^axes row-major float64, little-endian.
struct GridFile {
    uint32_t n = 0;
    uint32_t N = 0;
    uint32_t axes = 0;
    std::vector<double> data;
};

void write_grid_file(const std::string& path, const GridFile& g);
GridFile read_grid_file(const std::string& path);

/// Writes via a temp file in the same directory, then renames.
void atomic_write_file(const std::string& path, const std::string& contents);

/// Shortest round-trip-exact decimal representation (deterministic output).
std::string format_double(double v);

std::string csv_join(const std::vector<std::string>& cells);

struct SvgSeries {
    std::string label;
    std::vector<std::pair<double, double>> points;
};

struct SvgPanel {
    std::string x_label;
    std::string y_label;
    std::string title;
    std::vector<SvgSeries> series;
    bool log_x = false;
};

/// Side-by-side scatter panels; plain SVG, fixed formatting.
std::string render_svg_scatter(const std::vector<SvgPanel>& panels);

}  // namespace qmalab
