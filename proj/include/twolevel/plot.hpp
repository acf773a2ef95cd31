#pragma once

#include "twolevel/propagator.hpp"
#include "twolevel/spectrum.hpp"

#include <span>
#include <string>

namespace twolevel {

struct PlotStyle {
    bool log_y = false;
    std::string title;
    std::string x_label;
    std::string y_label;
    int width = 800;
    int height = 480;
};

/// Standalone SVG line plot. The data trace is a single <path class="trace">.
/// Throws std::invalid_argument on empty or mismatched input.
std::string emit_plot(std::span<const double> x, std::span<const double> y, const PlotStyle& style);

/// Time axis in cycles (tau / 2 pi).
std::string emit_plot(const TimeSeries& series, PlotStyle style);
/// Intensity against z in harmonic orders.
std::string emit_plot(const SpectrumSeries& spectrum, PlotStyle style);

} // namespace twolevel
