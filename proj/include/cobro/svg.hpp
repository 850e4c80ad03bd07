#pragma once

#include <string>
#include <utility>
#include <vector>

namespace cobro {

struct SvgSeries {
    std::string label;
    std::vector<std::pair<double, double>> points; // non-finite y makes a gap
};

// Writes a self-contained SVG 1.1 line chart.  Output is a pure function of
// the inputs (fixed canvas, palette and tick layout), so files are
// byte-reproducible.
void write_line_chart(const std::string& path, const std::string& title,
                      const std::string& x_label, const std::string& y_label,
                      const std::vector<SvgSeries>& series);

} // namespace cobro
