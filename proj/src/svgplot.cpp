#include "quenchlab/svgplot.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "quenchlab/csvio.hpp"
#include "quenchlab/errors.hpp"

namespace quenchlab {

namespace {

constexpr double kWidth = 960.0, kHeight = 640.0;
constexpr double kLeft = 80.0, kRight = 40.0, kTop = 50.0, kBottom = 60.0;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                          "#8c564b", "#e377c2", "#17becf", "#7f7f7f", "#bcbd22"};

struct Axis {
    bool log = false;
    double lo = 0.0, hi = 1.0;  // in plot units (log10 if log)

    double to_unit(double v) const { return log ? std::log10(v) : v; }
    bool drawable(double v) const { return !log || v > 0.0; }
};

std::string num(double v) { return format_double(v); }

std::vector<double> linear_ticks(double lo, double hi) {
    const double span = hi - lo;
    if (!(span > 0.0)) return {lo};
    const double raw = span / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (const double m : {1.0, 2.0, 5.0, 10.0}) {
        if (raw <= m * mag) {
            step = m * mag;
            break;
        }
    }
    std::vector<double> ticks;
    for (double v = std::ceil(lo / step) * step; v <= hi + 1e-12 * span; v += step)
        ticks.push_back(v);
    return ticks;
}

}  // namespace

void write_svg_plot(const std::string& path, const PlotSpec& spec) {
    Axis x{spec.log_x}, y{spec.log_y};
    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    for (const auto& s : spec.series) {
        for (const auto& [px, py] : s.points) {
            if (!x.drawable(px) || !y.drawable(py)) continue;
            xmin = std::min(xmin, x.to_unit(px));
            xmax = std::max(xmax, x.to_unit(px));
            ymin = std::min(ymin, y.to_unit(py));
            ymax = std::max(ymax, y.to_unit(py));
        }
    }
    if (!(xmin <= xmax)) {  // nothing drawable; emit an empty frame
        xmin = 0.0;
        xmax = 1.0;
        ymin = 0.0;
        ymax = 1.0;
    }
    if (xmax == xmin) {
        xmax += 0.5;
        xmin -= 0.5;
    }
    if (ymax == ymin) {
        ymax += 0.5;
        ymin -= 0.5;
    }
    const double pad_x = 0.03 * (xmax - xmin), pad_y = 0.05 * (ymax - ymin);
    x.lo = xmin - pad_x;
    x.hi = xmax + pad_x;
    y.lo = ymin - pad_y;
    y.hi = ymax + pad_y;

    auto px_of = [&](double u) { return kLeft + (u - x.lo) / (x.hi - x.lo) * (kWidth - kLeft - kRight); };
    auto py_of = [&](double u) { return kHeight - kBottom - (u - y.lo) / (y.hi - y.lo) * (kHeight - kTop - kBottom); };

    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError(path + ": cannot open file for writing");

    f << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " << num(kWidth) << ' '
      << num(kHeight) << "\">\n";
    f << "<rect width=\"" << num(kWidth) << "\" height=\"" << num(kHeight)
      << "\" fill=\"white\"/>\n";
    f << "<text x=\"" << num(kWidth / 2) << "\" y=\"28\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"18\">" << spec.title << "</text>\n";

    // frame
    f << "<rect x=\"" << num(kLeft) << "\" y=\"" << num(kTop) << "\" width=\""
      << num(kWidth - kLeft - kRight) << "\" height=\"" << num(kHeight - kTop - kBottom)
      << "\" fill=\"none\" stroke=\"black\"/>\n";

    // ticks
    auto emit_xtick = [&](double unit, const std::string& label) {
        const double px = px_of(unit);
        if (px < kLeft - 0.5 || px > kWidth - kRight + 0.5) return;
        f << "<line x1=\"" << num(px) << "\" y1=\"" << num(kHeight - kBottom) << "\" x2=\""
          << num(px) << "\" y2=\"" << num(kHeight - kBottom + 6) << "\" stroke=\"black\"/>\n";
        f << "<text x=\"" << num(px) << "\" y=\"" << num(kHeight - kBottom + 22)
          << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" << label
          << "</text>\n";
    };
    auto emit_ytick = [&](double unit, const std::string& label) {
        const double py = py_of(unit);
        if (py < kTop - 0.5 || py > kHeight - kBottom + 0.5) return;
        f << "<line x1=\"" << num(kLeft - 6) << "\" y1=\"" << num(py) << "\" x2=\"" << num(kLeft)
          << "\" y2=\"" << num(py) << "\" stroke=\"black\"/>\n";
        f << "<text x=\"" << num(kLeft - 10) << "\" y=\"" << num(py + 4)
          << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\">" << label
          << "</text>\n";
    };
    if (x.log) {
        for (int d = static_cast<int>(std::floor(x.lo)); d <= static_cast<int>(std::ceil(x.hi)); ++d)
            emit_xtick(d, "1e" + std::to_string(d));
    } else {
        for (const double v : linear_ticks(x.lo, x.hi)) emit_xtick(v, format_double(v));
    }
    if (y.log) {
        for (int d = static_cast<int>(std::floor(y.lo)); d <= static_cast<int>(std::ceil(y.hi)); ++d)
            emit_ytick(d, "1e" + std::to_string(d));
    } else {
        for (const double v : linear_ticks(y.lo, y.hi)) emit_ytick(v, format_double(v));
    }

    // axis labels
    f << "<text x=\"" << num(kWidth / 2) << "\" y=\"" << num(kHeight - 14)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">" << spec.x_label
      << "</text>\n";
    f << "<text x=\"20\" y=\"" << num(kHeight / 2)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\" "
      << "transform=\"rotate(-90 20 " << num(kHeight / 2) << ")\">" << spec.y_label
      << "</text>\n";

    // series
    for (std::size_t i = 0; i < spec.series.size(); ++i) {
        const auto& s = spec.series[i];
        const char* color = kPalette[i % (sizeof kPalette / sizeof kPalette[0])];
        f << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        bool first = true;
        for (const auto& [px, py] : s.points) {
            if (!x.drawable(px) || !y.drawable(py)) continue;
            if (!first) f << ' ';
            f << num(px_of(x.to_unit(px))) << ',' << num(py_of(y.to_unit(py)));
            first = false;
        }
        f << "\"/>\n";
        if (!s.label.empty()) {
            const double ly = kTop + 16 + 16 * static_cast<double>(i);
            f << "<line x1=\"" << num(kWidth - kRight - 150) << "\" y1=\"" << num(ly - 4)
              << "\" x2=\"" << num(kWidth - kRight - 120) << "\" y2=\"" << num(ly - 4)
              << "\" stroke=\"" << color << "\" stroke-width=\"1.5\"/>\n";
            f << "<text x=\"" << num(kWidth - kRight - 114) << "\" y=\"" << num(ly)
              << "\" font-family=\"sans-serif\" font-size=\"12\">" << s.label << "</text>\n";
        }
    }
    f << "</svg>\n";
    if (!f) throw IoError(path + ": write failed");
}

}  // namespace quenchlab
