#include "rdsec/svg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace rdsec {

namespace {

constexpr double kWidth = 800.0, kHeight = 500.0;
constexpr double kLeft = 70.0, kRight = 30.0, kTop = 30.0, kBottom = 60.0;

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

}  // namespace

std::string svg_line_chart(const std::string& x_label, const std::string& y_label,
                           const std::vector<SvgSeries>& series) {
    double xmin = 0.0, xmax = 1.0, ymin = 0.0, ymax = 1.0;
    bool first = true;
    for (const auto& s : series) {
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (first) {
                xmin = xmax = s.x[i];
                ymin = ymax = s.y[i];
                first = false;
            }
            xmin = std::min(xmin, s.x[i]);
            xmax = std::max(xmax, s.x[i]);
            ymin = std::min(ymin, s.y[i]);
            ymax = std::max(ymax, s.y[i]);
        }
    }
    if (xmax <= xmin) xmax = xmin + 1.0;
    if (ymax <= ymin) ymax = ymin + 1.0;
    ymin = std::min(0.0, ymin);
    ymax *= 1.05;

    const double pw = kWidth - kLeft - kRight;
    const double ph = kHeight - kTop - kBottom;
    auto sx = [&](double x) { return kLeft + (x - xmin) / (xmax - xmin) * pw; };
    auto sy = [&](double y) { return kTop + ph - (y - ymin) / (ymax - ymin) * ph; };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 800 500\" width=\"800\" height=\"500\">\n";
    os << "<rect x=\"0\" y=\"0\" width=\"800\" height=\"500\" fill=\"white\"/>\n";

    // Axes.
    os << "<line x1=\"" << kLeft << "\" y1=\"" << kTop + ph << "\" x2=\"" << kLeft + pw << "\" y2=\""
       << kTop + ph << "\" stroke=\"black\" stroke-width=\"1.5\"/>\n";
    os << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\"" << kTop + ph
       << "\" stroke=\"black\" stroke-width=\"1.5\"/>\n";

    // Ticks.
    for (int i = 0; i <= 5; ++i) {
        const double tx = xmin + (xmax - xmin) * i / 5.0;
        const double ty = ymin + (ymax - ymin) * i / 5.0;
        os << "<line x1=\"" << sx(tx) << "\" y1=\"" << kTop + ph << "\" x2=\"" << sx(tx) << "\" y2=\""
           << kTop + ph + 6 << "\" stroke=\"black\"/>\n";
        os << "<text x=\"" << sx(tx) << "\" y=\"" << kTop + ph + 22
           << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" << fmt(tx)
           << "</text>\n";
        os << "<line x1=\"" << kLeft - 6 << "\" y1=\"" << sy(ty) << "\" x2=\"" << kLeft << "\" y2=\"" << sy(ty)
           << "\" stroke=\"black\"/>\n";
        os << "<text x=\"" << kLeft - 10 << "\" y=\"" << sy(ty) + 4
           << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"13\">" << fmt(ty) << "</text>\n";
    }
    os << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kHeight - 12
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">" << x_label << "</text>\n";
    os << "<text x=\"18\" y=\"" << kTop + ph / 2
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\" transform=\"rotate(-90 18 "
       << kTop + ph / 2 << ")\">" << y_label << "</text>\n";

    // Series and legend.
    double ly = kTop + 8;
    for (const auto& s : series) {
        os << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"2\" points=\"";
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            os << fmt(sx(s.x[i])) << "," << fmt(sy(s.y[i])) << (i + 1 < s.x.size() ? " " : "");
        }
        os << "\"/>\n";
        os << "<line x1=\"" << kLeft + pw - 150 << "\" y1=\"" << ly << "\" x2=\"" << kLeft + pw - 120
           << "\" y2=\"" << ly << "\" stroke=\"" << s.color << "\" stroke-width=\"2\"/>\n";
        os << "<text x=\"" << kLeft + pw - 112 << "\" y=\"" << ly + 4
           << "\" font-family=\"sans-serif\" font-size=\"13\">" << s.label << "</text>\n";
        ly += 20;
    }
    os << "</svg>\n";
    return os.str();
}

}  // namespace rdsec
