#pragma once

#include <string>
#include <vector>

namespace rdsec {

struct SvgSeries {
    std::string label;
    std::string color;
    std::vector<double> x;
    std::vector<double> y;
};

// Self-contained line chart (inline styling, no external assets) on a fixed
// 800x500 viewbox with labeled axes. Returns the SVG document text.
std::string svg_line_chart(const std::string& x_label, const std::string& y_label,
                           const std::vector<SvgSeries>& series);

}  // namespace rdsec
