#include "fdss/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace fdss::report {

std::string fmt(double v) {
    char buf[40];
    // try increasing precision until the value round-trips
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

void write_text_atomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open for writing: " + tmp.string());
        out << content;
        if (!out.flush()) throw std::runtime_error("write failed: " + tmp.string());
    }
    fs::rename(tmp, target);
}

void write_csv(const std::string& path, std::span<const Column> columns) {
    if (columns.empty()) throw std::runtime_error("write_csv: no columns");
    const std::size_t rows = columns[0].values.size();
    std::ostringstream out;
    for (std::size_t c = 0; c < columns.size(); ++c) {
        out << (c ? "," : "") << columns[c].name;
    }
    out << "\n";
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < columns.size(); ++c) {
            out << (c ? "," : "") << fmt(columns[c].values.at(r));
        }
        out << "\n";
    }
    write_text_atomic(path, out.str());
}

namespace {

constexpr double kWidth = 720.0, kHeight = 480.0;
constexpr double kLeft = 70.0, kRight = 24.0, kTop = 36.0, kBottom = 56.0;

const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                         "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

struct Ticks {
    std::vector<double> at;
};

Ticks linear_ticks(double lo, double hi) {
    Ticks t;
    if (!(hi > lo)) {
        t.at = {lo};
        return t;
    }
    const double raw = (hi - lo) / 6.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
        if (mag * m >= raw) {
            step = mag * m;
            break;
        }
    }
    for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * step; v += step) {
        t.at.push_back(v);
    }
    return t;
}

std::string trim_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

}  // namespace

void write_svg_plot(const std::string& path, std::span<const Series> series,
                    const PlotOptions& opt) {
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const auto& s : series) {
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            double y = s.y[i];
            if (opt.log_y) {
                if (!(y > 0.0)) continue;
                y = std::log10(y);
            }
            xmin = std::min(xmin, s.x[i]);
            xmax = std::max(xmax, s.x[i]);
            ymin = std::min(ymin, y);
            ymax = std::max(ymax, y);
        }
    }
    if (xmin > xmax) { xmin = 0; xmax = 1; ymin = 0; ymax = 1; }
    if (xmax == xmin) xmax = xmin + 1;
    if (ymax == ymin) ymax = ymin + 1;

    const double pw = kWidth - kLeft - kRight;
    const double ph = kHeight - kTop - kBottom;
    auto px = [&](double x) { return kLeft + (x - xmin) / (xmax - xmin) * pw; };
    auto py = [&](double y) { return kTop + (1.0 - (y - ymin) / (ymax - ymin)) * ph; };

    std::ostringstream s;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
      << "\" height=\"" << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    s << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw
      << "\" height=\"" << ph << "\" fill=\"none\" stroke=\"black\"/>\n";
    s << "<text x=\"" << kWidth / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">"
      << opt.title << "</text>\n";

    // x ticks
    for (double v : linear_ticks(xmin, xmax).at) {
        const double x = px(v);
        s << "<line x1=\"" << x << "\" y1=\"" << kTop << "\" x2=\"" << x << "\" y2=\""
          << kTop + ph << "\" stroke=\"#dddddd\"/>\n";
        s << "<text x=\"" << x << "\" y=\"" << kTop + ph + 16
          << "\" text-anchor=\"middle\">" << trim_num(v) << "</text>\n";
    }
    // y ticks: decades when log, else linear
    std::vector<double> yticks;
    if (opt.log_y) {
        for (double v = std::ceil(ymin); v <= std::floor(ymax) + 1e-9; v += 1.0) {
            yticks.push_back(v);
        }
        if (yticks.empty()) yticks = linear_ticks(ymin, ymax).at;
    } else {
        yticks = linear_ticks(ymin, ymax).at;
    }
    for (double v : yticks) {
        const double y = py(v);
        s << "<line x1=\"" << kLeft << "\" y1=\"" << y << "\" x2=\"" << kLeft + pw
          << "\" y2=\"" << y << "\" stroke=\"#dddddd\"/>\n";
        std::string label = opt.log_y ? ("1e" + trim_num(v)) : trim_num(v);
        s << "<text x=\"" << kLeft - 6 << "\" y=\"" << y + 4
          << "\" text-anchor=\"end\">" << label << "</text>\n";
    }
    s << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kHeight - 14
      << "\" text-anchor=\"middle\">" << opt.x_label << "</text>\n";
    s << "<text transform=\"translate(16," << kTop + ph / 2
      << ") rotate(-90)\" text-anchor=\"middle\">" << opt.y_label << "</text>\n";

    for (std::size_t si = 0; si < series.size(); ++si) {
        const auto& ser = series[si];
        const char* color = kColors[si % (sizeof(kColors) / sizeof(kColors[0]))];
        s << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < ser.x.size(); ++i) {
            double y = ser.y[i];
            if (opt.log_y) {
                if (!(y > 0.0)) continue;
                y = std::log10(y);
            }
            s << px(ser.x[i]) << "," << py(y) << " ";
        }
        s << "\"/>\n";
        const double ly = kTop + 16 + 16.0 * static_cast<double>(si);
        s << "<line x1=\"" << kLeft + pw - 150 << "\" y1=\"" << ly << "\" x2=\""
          << kLeft + pw - 126 << "\" y2=\"" << ly << "\" stroke=\"" << color
          << "\" stroke-width=\"1.5\"/>\n";
        s << "<text x=\"" << kLeft + pw - 120 << "\" y=\"" << ly + 4 << "\">" << ser.label
          << "</text>\n";
    }
    s << "</svg>\n";
    write_text_atomic(path, s.str());
}

}  // namespace fdss::report
