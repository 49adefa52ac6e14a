#include "qmalab/io.hpp"

#include <bit>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace qmalab {

static_assert(std::endian::native == std::endian::little,
              "grid file I/O assumes a little-endian host");

void write_grid_file(const std::string& path, const GridFile& g) {
    size_t expect = 1;
    for (uint32_t a = 0; a < g.axes; ++a) expect *= g.N;
    if (g.data.size() != expect)
        throw std::invalid_argument("write_grid_file: payload size does not match header");
    std::string buf;
    buf.resize(12 + g.data.size() * 8);
    uint32_t head[3] = {g.n, g.N, g.axes};
    std::memcpy(buf.data(), head, 12);
    std::memcpy(buf.data() + 12, g.data.data(), g.data.size() * 8);
    atomic_write_file(path, buf);
}

GridFile read_grid_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("read_grid_file: cannot open " + path);
    uint32_t head[3];
    in.read(reinterpret_cast<char*>(head), 12);
    if (!in) throw std::runtime_error("read_grid_file: truncated header in " + path);
    GridFile g;
    g.n = head[0];
    g.N = head[1];
    g.axes = head[2];
    if (g.n == 0 || g.N == 0 || g.axes == 0 || g.axes > 24)
        throw std::runtime_error("read_grid_file: implausible header in " + path);
    size_t expect = 1;
    for (uint32_t a = 0; a < g.axes; ++a) {
        if (expect > (size_t(1) << 40) / g.N)
            throw std::runtime_error("read_grid_file: grid too large in " + path);
        expect *= g.N;
    }
    g.data.resize(expect);
    in.read(reinterpret_cast<char*>(g.data.data()), static_cast<std::streamsize>(expect * 8));
    if (!in) throw std::runtime_error("read_grid_file: truncated payload in " + path);
    return g;
}

void atomic_write_file(const std::string& path, const std::string& contents) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("atomic_write_file: cannot open " + tmp);
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        if (!out) throw std::runtime_error("atomic_write_file: short write to " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw std::runtime_error("atomic_write_file: rename failed for " + path);
}

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    // shortest representation that round-trips
    for (int prec = 1; prec <= 17; ++prec) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        double back = 0.0;
        std::sscanf(buf, "%lf", &back);
        if (back == v) return buf;
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string csv_join(const std::vector<std::string>& cells) {
    std::string out;
    for (size_t i = 0; i < cells.size(); ++i) {
        if (i) out += ',';
        out += cells[i];
    }
    out += '\n';
    return out;
}

namespace {

struct AxisMap {
    double lo, hi;
    double p0, p1;  // pixel range
    bool log;
    double to_px(double v) const {
        double t = log ? std::log10(v) : v;
        double a = log ? std::log10(lo) : lo;
        double b = log ? std::log10(hi) : hi;
        if (b - a < 1e-300) return 0.5 * (p0 + p1);
        return p0 + (t - a) / (b - a) * (p1 - p0);
    }
};

std::string fmt_px(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

}  // namespace

std::string render_svg_scatter(const std::vector<SvgPanel>& panels) {
    const double pw = 360, ph = 300, margin_l = 62, margin_b = 46, margin_t = 30, margin_r = 16;
    const double width = pw * panels.size(), height = ph;
    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    svg << "<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
    const char* colors[] = {"#1f6fb2", "#d1495b", "#3a7d44", "#8d6a9f"};

    for (size_t pi = 0; pi < panels.size(); ++pi) {
        const SvgPanel& panel = panels[pi];
        const double x0 = pi * pw + margin_l, x1 = (pi + 1) * pw - margin_r;
        const double y0 = ph - margin_b, y1 = margin_t;
        double lo_x = 1e300, hi_x = -1e300, lo_y = 1e300, hi_y = -1e300;
        for (const auto& s : panel.series)
            for (const auto& [x, y] : s.points) {
                lo_x = std::min(lo_x, x);
                hi_x = std::max(hi_x, x);
                lo_y = std::min(lo_y, y);
                hi_y = std::max(hi_y, y);
            }
        if (lo_x > hi_x) {
            lo_x = 0;
            hi_x = 1;
            lo_y = 0;
            hi_y = 1;
        }
        const double pad_y = (hi_y - lo_y) * 0.08 + 1e-12;
        lo_y -= pad_y;
        hi_y += pad_y;
        if (!panel.log_x) {
            const double pad_x = (hi_x - lo_x) * 0.08 + 1e-12;
            lo_x -= pad_x;
            hi_x += pad_x;
        } else {
            lo_x /= 1.3;
            hi_x *= 1.3;
        }
        AxisMap xm{lo_x, hi_x, x0, x1, panel.log_x};
        AxisMap ym{lo_y, hi_y, y0, y1, false};

        svg << "<rect x=\"" << fmt_px(x0) << "\" y=\"" << fmt_px(y1) << "\" width=\""
            << fmt_px(x1 - x0) << "\" height=\"" << fmt_px(y0 - y1)
            << "\" fill=\"none\" stroke=\"#555\"/>\n";
        svg << "<text x=\"" << fmt_px((x0 + x1) / 2) << "\" y=\"" << fmt_px(y1 - 10)
            << "\" text-anchor=\"middle\" font-size=\"13\" font-family=\"sans-serif\">"
            << panel.title << "</text>\n";
        svg << "<text x=\"" << fmt_px((x0 + x1) / 2) << "\" y=\"" << fmt_px(ph - 10)
            << "\" text-anchor=\"middle\" font-size=\"12\" font-family=\"sans-serif\">"
            << panel.x_label << "</text>\n";
        svg << "<text x=\"" << fmt_px(pi * pw + 16) << "\" y=\"" << fmt_px((y0 + y1) / 2)
            << "\" text-anchor=\"middle\" font-size=\"12\" font-family=\"sans-serif\" "
               "transform=\"rotate(-90 "
            << fmt_px(pi * pw + 16) << " " << fmt_px((y0 + y1) / 2) << ")\">" << panel.y_label
            << "</text>\n";

        // axis range labels
        svg << "<text x=\"" << fmt_px(x0) << "\" y=\"" << fmt_px(y0 + 16)
            << "\" font-size=\"10\" font-family=\"sans-serif\">" << format_double(lo_x)
            << "</text>\n";
        svg << "<text x=\"" << fmt_px(x1) << "\" y=\"" << fmt_px(y0 + 16)
            << "\" text-anchor=\"end\" font-size=\"10\" font-family=\"sans-serif\">"
            << format_double(hi_x) << "</text>\n";
        svg << "<text x=\"" << fmt_px(x0 - 6) << "\" y=\"" << fmt_px(y0)
            << "\" text-anchor=\"end\" font-size=\"10\" font-family=\"sans-serif\">"
            << format_double(lo_y) << "</text>\n";
        svg << "<text x=\"" << fmt_px(x0 - 6) << "\" y=\"" << fmt_px(y1 + 4)
            << "\" text-anchor=\"end\" font-size=\"10\" font-family=\"sans-serif\">"
            << format_double(hi_y) << "</text>\n";

        for (size_t si = 0; si < panel.series.size(); ++si) {
            const auto& s = panel.series[si];
            const char* color = colors[si % 4];
            for (const auto& [x, y] : s.points)
                svg << "<circle cx=\"" << fmt_px(xm.to_px(x)) << "\" cy=\"" << fmt_px(ym.to_px(y))
                    << "\" r=\"4\" fill=\"" << color << "\" fill-opacity=\"0.85\"/>\n";
            svg << "<text x=\"" << fmt_px(x0 + 8) << "\" y=\"" << fmt_px(y1 + 14 + 13 * si)
                << "\" font-size=\"11\" font-family=\"sans-serif\" fill=\"" << color << "\">"
                << s.label << "</text>\n";
        }
    }
    svg << "</svg>\n";
    return svg.str();
}

}  // namespace qmalab
