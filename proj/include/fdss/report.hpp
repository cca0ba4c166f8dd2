#pragma once

#include <span>
#include <string>
#include <vector>

namespace fdss::report {

/// Shortest decimal representation that round-trips a double; keeps CSV
/// output byte-identical across reruns.
std::string fmt(double v);

/// Writes via a temp file in the same directory, then renames into place.
void write_text_atomic(const std::string& path, const std::string& content);

/// One column of a CSV table.
struct Column {
    std::string name;
    std::vector<double> values;
};

void write_csv(const std::string& path, std::span<const Column> columns);

/// A named line for the SVG plotter.
struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

struct PlotOptions {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_y = false;  // plot log10(y) on a linear axis with decade ticks
};

/// Minimal self-contained SVG line plot (axes, ticks, legend, polylines).
void write_svg_plot(const std::string& path, std::span<const Series> series,
                    const PlotOptions& opt);

}  // namespace fdss::report
