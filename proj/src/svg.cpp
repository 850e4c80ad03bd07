#include "cobro/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "cobro/errors.hpp"

namespace cobro {

namespace {

constexpr double kWidth = 800.0, kHeight = 520.0;
constexpr double kLeft = 78.0, kRight = 770.0, kTop = 56.0, kBottom = 452.0;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string esc(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '&') out += "&amp;";
        else if (c == '<') out += "&lt;";
        else if (c == '>') out += "&gt;";
        else out += c;
    }
    return out;
}

std::string fmt(double v, const char* spec = "%.2f") {
    char buf[40];
    std::snprintf(buf, sizeof(buf), spec, v);
    return buf;
}

} // namespace

void write_line_chart(const std::string& path, const std::string& title,
                      const std::string& x_label, const std::string& y_label,
                      const std::vector<SvgSeries>& series) {
    double x_min = 0.0, x_max = 1.0, y_min = 0.0, y_max = 1.0;
    bool have = false;
    for (const SvgSeries& s : series)
        for (const auto& [x, y] : s.points) {
            if (!std::isfinite(x) || !std::isfinite(y)) continue;
            if (!have) {
                x_min = x_max = x;
                y_min = y_max = y;
                have = true;
            } else {
                x_min = std::min(x_min, x);
                x_max = std::max(x_max, x);
                y_min = std::min(y_min, y);
                y_max = std::max(y_max, y);
            }
        }
    if (x_max - x_min < 1e-12) { x_min -= 0.5; x_max += 0.5; }
    if (y_max - y_min < 1e-12) { y_min -= 0.5; y_max += 0.5; }
    const double y_pad = 0.06 * (y_max - y_min);
    y_min -= y_pad;
    y_max += y_pad;

    const auto px = [&](double x) {
        return kLeft + (x - x_min) / (x_max - x_min) * (kRight - kLeft);
    };
    const auto py = [&](double y) {
        return kBottom - (y - y_min) / (y_max - y_min) * (kBottom - kTop);
    };

    std::ofstream out(path, std::ios::binary);
    if (!out) throw config_error("cannot open output file: " + path);

    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << kWidth
        << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight
        << "\">\n"
        << "<rect width=\"" << kWidth << "\" height=\"" << kHeight << "\" fill=\"white\"/>\n"
        << "<text x=\"" << 0.5 * kWidth << "\" y=\"30\" text-anchor=\"middle\" "
           "font-family=\"sans-serif\" font-size=\"17\">"
        << esc(title) << "</text>\n";

    // Axes, ticks and grid lines (5 divisions per axis).
    out << "<g font-family=\"sans-serif\" font-size=\"12\" fill=\"#333\">\n";
    for (int i = 0; i <= 5; ++i) {
        const double fx = x_min + (x_max - x_min) * i / 5.0;
        const double fy = y_min + (y_max - y_min) * i / 5.0;
        const double gx = px(fx), gy = py(fy);
        out << "<line x1=\"" << fmt(gx) << "\" y1=\"" << kTop << "\" x2=\"" << fmt(gx)
            << "\" y2=\"" << kBottom << "\" stroke=\"#ddd\"/>\n"
            << "<line x1=\"" << kLeft << "\" y1=\"" << fmt(gy) << "\" x2=\"" << kRight
            << "\" y2=\"" << fmt(gy) << "\" stroke=\"#ddd\"/>\n"
            << "<text x=\"" << fmt(gx) << "\" y=\"" << kBottom + 20.0
            << "\" text-anchor=\"middle\">" << fmt(fx, "%.4g") << "</text>\n"
            << "<text x=\"" << kLeft - 8.0 << "\" y=\"" << fmt(gy + 4.0)
            << "\" text-anchor=\"end\">" << fmt(fy, "%.4g") << "</text>\n";
    }
    out << "</g>\n"
        << "<line x1=\"" << kLeft << "\" y1=\"" << kBottom << "\" x2=\"" << kRight
        << "\" y2=\"" << kBottom << "\" stroke=\"black\"/>\n"
        << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\""
        << kBottom << "\" stroke=\"black\"/>\n"
        << "<text x=\"" << 0.5 * (kLeft + kRight) << "\" y=\"" << kBottom + 44.0
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">"
        << esc(x_label) << "</text>\n"
        << "<text x=\"22\" y=\"" << 0.5 * (kTop + kBottom)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\" "
           "transform=\"rotate(-90 22 "
        << 0.5 * (kTop + kBottom) << ")\">" << esc(y_label) << "</text>\n";

    for (size_t s = 0; s < series.size(); ++s) {
        const char* color = kPalette[s % 6];
        std::string seg;
        int seg_count = 0;
        const auto flush = [&]() {
            if (seg_count >= 2)
                out << "<polyline fill=\"none\" stroke=\"" << color
                    << "\" stroke-width=\"1.8\" points=\"" << seg << "\"/>\n";
            seg.clear();
            seg_count = 0;
        };
        for (const auto& [x, y] : series[s].points) {
            if (!std::isfinite(x) || !std::isfinite(y)) {
                flush();
                continue;
            }
            seg += fmt(px(x)) + "," + fmt(py(y)) + " ";
            ++seg_count;
        }
        flush();

        const double ly = kTop + 18.0 * static_cast<double>(s) + 4.0;
        out << "<line x1=\"" << kRight - 150.0 << "\" y1=\"" << fmt(ly) << "\" x2=\""
            << kRight - 120.0 << "\" y2=\"" << fmt(ly) << "\" stroke=\"" << color
            << "\" stroke-width=\"1.8\"/>\n"
            << "<text x=\"" << kRight - 114.0 << "\" y=\"" << fmt(ly + 4.0)
            << "\" font-family=\"sans-serif\" font-size=\"12\">" << esc(series[s].label)
            << "</text>\n";
    }

    out << "</svg>\n";
    if (!out) throw config_error("svg write failed");
}

} // namespace cobro
