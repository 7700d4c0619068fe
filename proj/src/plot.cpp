#include "whitham/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace whitham {

namespace {

const char* const palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

std::string fmt(const char* pattern, double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, pattern, x);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    void add(double x) {
        lo = std::min(lo, x);
        hi = std::max(hi, x);
    }
    bool empty() const { return !(lo <= hi); }
    void pad() {
        if (empty()) {
            lo = 0.0;
            hi = 1.0;
        } else if (hi == lo) {
            const double d = lo == 0.0 ? 1.0 : 0.5 * std::abs(lo);
            lo -= d;
            hi += d;
        }
    }
};

}  // namespace

std::string render_svg(const CsvTable& table, const PlotOptions& o) {
    if (o.columns.empty()) throw std::invalid_argument("no columns to plot");
    const std::size_t xi = table.column(o.x_column);
    std::vector<std::size_t> cols;
    for (const auto& c : o.columns) cols.push_back(table.column(c));

    auto ty = [&](double y) { return o.log_y ? std::log10(y) : y; };
    auto usable = [&](double y) { return std::isfinite(y) && (!o.log_y || y > 0.0); };

    Range xr, yr;
    for (const auto& row : table.rows) {
        if (!std::isfinite(row[xi])) continue;
        bool any = false;
        for (std::size_t c : cols)
            if (usable(row[c])) {
                yr.add(ty(row[c]));
                any = true;
            }
        if (any) xr.add(row[xi]);
    }
    xr.pad();
    yr.pad();

    const double left = 70, right = 20, top = 40, bottom = 50;
    const double pw = o.width - left - right, ph = o.height - top - bottom;
    auto px = [&](double x) { return left + (x - xr.lo) / (xr.hi - xr.lo) * pw; };
    auto py = [&](double y) { return top + ph - (y - yr.lo) / (yr.hi - yr.lo) * ph; };

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(o.width) + "\" height=\"" +
           std::to_string(o.height) + "\" viewBox=\"0 0 " + std::to_string(o.width) + " " + std::to_string(o.height) +
           "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    if (!o.title.empty())
        svg += "<text x=\"" + fmt("%.1f", o.width / 2.0) + "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" +
               escape(o.title) + "</text>\n";
    svg += "<rect x=\"" + fmt("%.1f", left) + "\" y=\"" + fmt("%.1f", top) + "\" width=\"" + fmt("%.1f", pw) +
           "\" height=\"" + fmt("%.1f", ph) + "\" fill=\"none\" stroke=\"black\"/>\n";

    // five ticks per axis
    for (int i = 0; i <= 4; ++i) {
        const double fx = xr.lo + (xr.hi - xr.lo) * i / 4.0;
        const double fy = yr.lo + (yr.hi - yr.lo) * i / 4.0;
        svg += "<text x=\"" + fmt("%.1f", px(fx)) + "\" y=\"" + fmt("%.1f", top + ph + 16) +
               "\" text-anchor=\"middle\">" + fmt("%.4g", fx) + "</text>\n";
        const std::string ylabel = o.log_y ? "1e" + fmt("%.3g", fy) : fmt("%.4g", fy);
        svg += "<text x=\"" + fmt("%.1f", left - 6) + "\" y=\"" + fmt("%.1f", py(fy) + 4) + "\" text-anchor=\"end\">" +
               ylabel + "</text>\n";
    }
    svg += "<text x=\"" + fmt("%.1f", left + pw / 2) + "\" y=\"" + fmt("%.1f", o.height - 10.0) +
           "\" text-anchor=\"middle\">" + escape(o.x_column) + "</text>\n";
    svg += "<text x=\"15\" y=\"" + fmt("%.1f", top + ph / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 15 " +
           fmt("%.1f", top + ph / 2) + ")\">" + (o.log_y ? "value (log10)" : "value") + "</text>\n";

    for (std::size_t k = 0; k < cols.size(); ++k) {
        const char* colour = palette[k % std::size(palette)];
        std::string points;
        for (const auto& row : table.rows) {
            if (!std::isfinite(row[xi]) || !usable(row[cols[k]])) continue;
            if (!points.empty()) points += ' ';
            points += fmt("%.2f", px(row[xi])) + "," + fmt("%.2f", py(ty(row[cols[k]])));
        }
        svg += "<polyline fill=\"none\" stroke=\"" + std::string(colour) + "\" stroke-width=\"1.5\" points=\"" + points +
               "\"/>\n";
        const double ly = top + 14.0 + 16.0 * static_cast<double>(k);
        svg += "<line x1=\"" + fmt("%.1f", left + pw - 130) + "\" y1=\"" + fmt("%.1f", ly - 4) + "\" x2=\"" +
               fmt("%.1f", left + pw - 110) + "\" y2=\"" + fmt("%.1f", ly - 4) + "\" stroke=\"" + colour +
               "\" stroke-width=\"2\"/>\n";
        svg += "<text x=\"" + fmt("%.1f", left + pw - 104) + "\" y=\"" + fmt("%.1f", ly) + "\">" +
               escape(o.columns[k]) + "</text>\n";
    }
    svg += "</svg>\n";
    return svg;
}

void emit_plot(const std::string& csv_path, const PlotOptions& options, const std::string& out_path) {
    const CsvTable table = CsvTable::parse(read_file(csv_path));
    write_file_atomic(out_path, render_svg(table, options));
}

}  // namespace whitham
