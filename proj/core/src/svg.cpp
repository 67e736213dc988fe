#include "randmoll/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "randmoll/errors.hpp"

namespace randmoll {

void write_svg_line_plot(const std::string& file_path, const std::string& title,
                         const std::vector<double>& x,
                         const std::vector<std::vector<double>>& series,
                         const std::vector<std::string>& labels) {
    if (x.empty() || series.empty()) return;
    const double W = 720, H = 480, ml = 70, mr = 20, mt = 40, mb = 50;
    double xmin = x.front(), xmax = x.back();
    double ymin = std::numeric_limits<double>::infinity(), ymax = -ymin;
    for (const auto& s : series)
        for (double v : s) {
            if (!std::isfinite(v)) continue;
            ymin = std::min(ymin, v);
            ymax = std::max(ymax, v);
        }
    if (!(ymax > ymin)) {
        ymax = ymin + 1;
        ymin -= 1;
    }
    if (!(xmax > xmin)) xmax = xmin + 1;
    auto px = [&](double v) { return ml + (v - xmin) / (xmax - xmin) * (W - ml - mr); };
    auto py = [&](double v) { return H - mb - (v - ymin) / (ymax - ymin) * (H - mt - mb); };

    std::ofstream os(file_path);
    if (!os) throw ConfigError("cannot write " + file_path);
    os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W << "' height='" << H << "'>\n";
    os << "<rect width='100%' height='100%' fill='white'/>\n";
    os << "<text x='" << W / 2 << "' y='24' text-anchor='middle' font-size='16'>" << title
       << "</text>\n";
    os << "<line x1='" << ml << "' y1='" << H - mb << "' x2='" << W - mr << "' y2='" << H - mb
       << "' stroke='black'/>\n";
    os << "<line x1='" << ml << "' y1='" << mt << "' x2='" << ml << "' y2='" << H - mb
       << "' stroke='black'/>\n";
    const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
    for (std::size_t s = 0; s < series.size(); ++s) {
        os << "<polyline fill='none' stroke='" << colors[s % 5] << "' stroke-width='1.5' points='";
        for (std::size_t i = 0; i < x.size() && i < series[s].size(); ++i) {
            double v = series[s][i];
            if (!std::isfinite(v)) continue;
            os << px(x[i]) << ',' << py(v) << ' ';
        }
        os << "'/>\n";
        if (s < labels.size())
            os << "<text x='" << W - mr - 150 << "' y='" << mt + 18 * (s + 1)
               << "' font-size='12' fill='" << colors[s % 5] << "'>" << labels[s] << "</text>\n";
    }
    // axis extremes
    os << "<text x='" << ml << "' y='" << H - mb + 18 << "' font-size='11'>" << xmin
       << "</text>\n";
    os << "<text x='" << W - mr << "' y='" << H - mb + 18
       << "' text-anchor='end' font-size='11'>" << xmax << "</text>\n";
    os << "<text x='" << ml - 6 << "' y='" << H - mb << "' text-anchor='end' font-size='11'>"
       << ymin << "</text>\n";
    os << "<text x='" << ml - 6 << "' y='" << mt + 4 << "' text-anchor='end' font-size='11'>"
       << ymax << "</text>\n";
    os << "</svg>\n";
}

}  // namespace randmoll
