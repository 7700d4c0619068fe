/// @file plot.hpp
/// @brief Self-contained SVG line plots of CSV columns.
#pragma once

#include "whitham/io.hpp"

#include <string>
#include <vector>

namespace whitham {

struct PlotOptions {
    std::vector<std::string> columns;
    std::string x_column = "time";
    bool log_y = false;  ///< non-positive values are dropped on a log axis
    std::string title;
    int width = 640;
    int height = 400;
};

/// Deterministic SVG with one polyline per column, labeled axes and a
/// legend. Throws std::invalid_argument for unknown columns.
std::string render_svg(const CsvTable& table, const PlotOptions& options);

void emit_plot(const std::string& csv_path, const PlotOptions& options, const std::string& out_path);

}  // namespace whitham
