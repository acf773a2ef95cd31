#include "twolevel/plot.hpp"

#include "twolevel/csv.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace twolevel {

namespace {

constexpr int kMarginLeft = 80;
constexpr int kMarginRight = 20;
constexpr int kMarginTop = 40;
constexpr int kMarginBottom = 50;

std::string fixed(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '&': out += "&amp;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

// Round step so that about `target` ticks cover [lo, hi].
std::vector<double> nice_ticks(double lo, double hi, int target) {
    const double span = hi - lo;
    const double raw = span / target;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
        step = m * mag;
        if (step >= raw) break;
    }
    std::vector<double> ticks;
    for (double t = std::ceil(lo / step) * step; t <= hi + 1e-9 * span; t += step)
        ticks.push_back(std::abs(t) < 1e-12 * span ? 0.0 : t);
    return ticks;
}

} // namespace

std::string emit_plot(std::span<const double> x, std::span<const double> y, const PlotStyle& style) {
    if (x.empty() || x.size() != y.size()) throw std::invalid_argument("emit_plot: empty or mismatched data");

    std::vector<double> ys(y.begin(), y.end());
    if (style.log_y) {
        const double top = *std::max_element(ys.begin(), ys.end());
        if (!(top > 0.0)) throw std::invalid_argument("emit_plot: log scale needs positive data");
        const double floor = top * 1e-15;
        for (double& v : ys) v = std::log10(std::max(v, floor));
    }

    auto [xmin_it, xmax_it] = std::minmax_element(x.begin(), x.end());
    auto [ymin_it, ymax_it] = std::minmax_element(ys.begin(), ys.end());
    double x0 = *xmin_it, x1 = *xmax_it, y0 = *ymin_it, y1 = *ymax_it;
    if (x1 == x0) { x0 -= 0.5; x1 += 0.5; }
    if (y1 == y0) { y0 -= 0.5; y1 += 0.5; }
    const double pad = 0.05 * (y1 - y0);
    y0 -= pad;
    y1 += pad;

    const double plot_w = style.width - kMarginLeft - kMarginRight;
    const double plot_h = style.height - kMarginTop - kMarginBottom;
    auto px = [&](double v) { return kMarginLeft + (v - x0) / (x1 - x0) * plot_w; };
    auto py = [&](double v) { return kMarginTop + (y1 - v) / (y1 - y0) * plot_h; };

    // Min/max decimation per pixel column keeps long traces small but faithful.
    std::vector<std::size_t> keep;
    const std::size_t columns = static_cast<std::size_t>(plot_w);
    if (x.size() <= 4 * columns) {
        for (std::size_t i = 0; i < x.size(); ++i) keep.push_back(i);
    } else {
        std::size_t i = 0;
        while (i < x.size()) {
            const long col = std::lround(px(x[i]));
            std::size_t lo = i, hi = i, end = i;
            while (end < x.size() && std::lround(px(x[end])) == col) {
                if (ys[end] < ys[lo]) lo = end;
                if (ys[end] > ys[hi]) hi = end;
                ++end;
            }
            std::vector<std::size_t> pts{i, lo, hi, end - 1};
            std::sort(pts.begin(), pts.end());
            pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
            keep.insert(keep.end(), pts.begin(), pts.end());
            i = end;
        }
    }

    std::ostringstream svg;
    svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << style.width << "\" height=\"" << style.height
        << "\" viewBox=\"0 0 " << style.width << ' ' << style.height << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << "<rect class=\"frame\" x=\"" << kMarginLeft << "\" y=\"" << kMarginTop << "\" width=\"" << fixed(plot_w)
        << "\" height=\"" << fixed(plot_h) << "\" fill=\"none\" stroke=\"black\"/>\n";

    svg << "<g class=\"ticks\" font-family=\"sans-serif\" font-size=\"11\">\n";
    for (double t : nice_ticks(x0, x1, 8)) {
        const std::string p = fixed(px(t));
        svg << "<text x=\"" << p << "\" y=\"" << fixed(kMarginTop + plot_h + 16) << "\" text-anchor=\"middle\">"
            << tick_label(t) << "</text>\n";
    }
    for (double t : nice_ticks(y0, y1, 6)) {
        const std::string label = style.log_y ? "1e" + tick_label(t) : tick_label(t);
        svg << "<text x=\"" << kMarginLeft - 6 << "\" y=\"" << fixed(py(t) + 4) << "\" text-anchor=\"end\">"
            << escape(label) << "</text>\n";
    }
    svg << "</g>\n";

    svg << "<path class=\"trace\" fill=\"none\" stroke=\"#1f4e99\" stroke-width=\"1\" d=\"";
    for (std::size_t n = 0; n < keep.size(); ++n) {
        const std::size_t i = keep[n];
        svg << (n == 0 ? "M" : " L") << fixed(px(x[i])) << ',' << fixed(py(ys[i]));
    }
    svg << "\"/>\n";

    svg << "<g font-family=\"sans-serif\" font-size=\"13\">\n";
    if (!style.title.empty())
        svg << "<text x=\"" << style.width / 2 << "\" y=\"24\" text-anchor=\"middle\">" << escape(style.title)
            << "</text>\n";
    svg << "<text x=\"" << fixed(kMarginLeft + plot_w / 2) << "\" y=\"" << style.height - 10
        << "\" text-anchor=\"middle\">" << escape(style.x_label) << "</text>\n";
    const std::string ylab = style.log_y ? style.y_label + " (log scale)" : style.y_label;
    svg << "<text transform=\"translate(16," << fixed(kMarginTop + plot_h / 2) << ") rotate(-90)\" text-anchor=\"middle\">"
        << escape(ylab) << "</text>\n";
    svg << "</g>\n</svg>\n";
    return svg.str();
}

std::string emit_plot(const TimeSeries& series, PlotStyle style) {
    std::vector<double> cycles(series.tau.size());
    std::transform(series.tau.begin(), series.tau.end(), cycles.begin(), [](double t) { return t / (2.0 * pi); });
    if (style.x_label.empty()) style.x_label = "tau / 2pi (cycles)";
    if (style.y_label.empty()) style.y_label = value_column(series.kind);
    return emit_plot(cycles, series.value, style);
}

std::string emit_plot(const SpectrumSeries& spectrum, PlotStyle style) {
    if (style.x_label.empty()) style.x_label = "z (harmonic order)";
    if (style.y_label.empty()) style.y_label = "intensity";
    return emit_plot(spectrum.z, spectrum.intensity, style);
}

} // namespace twolevel
