#ifndef QUENCHLAB_SVGPLOT_HPP
#define QUENCHLAB_SVGPLOT_HPP

#include <string>
#include <utility>
#include <vector>

namespace quenchlab {

struct PlotSeries {
    std::string label;
    std::vector<std::pair<double, double>> points;
};

struct PlotSpec {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_x = false;
    bool log_y = false;
    std::vector<PlotSeries> series;
};

// Static polyline plot. Log axes get decade ticks; points that cannot be
// drawn on a log axis (<= 0) are skipped. Coordinates are printed with the
// same fixed 17-digit formatting as the CSVs, so identical runs emit
// identical SVG bytes.
void write_svg_plot(const std::string& path, const PlotSpec& spec);

}  // namespace quenchlab

#endif
