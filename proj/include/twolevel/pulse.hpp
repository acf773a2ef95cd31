#pragma once

#include <numbers>
#include <variant>
#include <vector>

namespace twolevel {

inline constexpr double pi = std::numbers::pi;

// Envelope families. Widths are given in carrier cycles.
struct BoxShape {
    bool operator==(const BoxShape&) const = default;
};
struct SechShape {
    double n_fwhm = 1.72;
    bool operator==(const SechShape&) const = default;
};
struct SincShape {
    double n_fwhm = 1.81;
    bool operator==(const SincShape&) const = default;
};
/// Gaussian rise over `ramp_cycles` cycles, then flat at 1.
struct GaussianRampFlatShape {
    double ramp_cycles = 10.0;
    bool operator==(const GaussianRampFlatShape&) const = default;
};

using PulseShape = std::variant<BoxShape, SechShape, SincShape, GaussianRampFlatShape>;

/// Dimensionless description of the drive h(tau) = f(tau) sin(tau - tau_ref + phi).
///
/// `x` is the Rabi frequency over the carrier frequency, `y` the level
/// splitting over the carrier frequency. The simulation window is
/// 0 <= tau <= 2 pi n_cycles.
struct PulseSpec {
    PulseShape shape = BoxShape{};
    double n_cycles = 2.0;
    double x = 1.0;
    double y = 1.0;
    double phi = 0.0;

    /// Throws ConfigError naming the first offending field.
    void validate() const;

    /// True for shapes whose peak sits at the window midpoint (sech, sinc).
    bool centered() const;
    /// Window midpoint pi N.
    double center() const { return pi * n_cycles; }
    /// Carrier reference: 0 for box and ramp, the envelope peak otherwise.
    double carrier_reference() const { return centered() ? center() : 0.0; }
    double window_end() const { return 2.0 * pi * n_cycles; }

    bool operator==(const PulseSpec&) const = default;
};

/// Partition of the window into slices of width pi/K.
class SliceGrid {
public:
    SliceGrid(int k, double n_cycles);

    int k() const { return k_; }
    double n_cycles() const { return n_cycles_; }
    /// ceil(2 N K); the last slice may extend past the window end.
    int slice_count() const { return count_; }
    double width() const { return pi / k_; }

    // Slices are 1-based, matching the recurrence index j.
    double start(int j) const;
    double midpoint(int j) const;
    /// Width of slice j clipped to the window (only the last slice can be short).
    double clipped_width(int j) const;

private:
    void check(int j) const;

    int k_;
    double n_cycles_;
    int count_;
};

/// Smallest even window (in cycles) of at least max(16, 10 n_fwhm) cycles. For
/// sech envelopes the window is widened until the edge value drops below 1e-4.
double default_window_cycles(const PulseShape& shape);

/// Envelope f(tau); |f| <= 1 with peak value 1.
double envelope(const PulseSpec& spec, double tau);
/// Normalized field h(tau) = f(tau) sin(tau - tau_ref + phi).
double field_profile(const PulseSpec& spec, double tau);

/// Constant drive x_j = x h(tau_j^m) used inside slice j.
double slice_drive(const PulseSpec& spec, const SliceGrid& grid, int j);
/// All slice drives, index 0 holding slice 1.
std::vector<double> slice_drives(const PulseSpec& spec, const SliceGrid& grid);

/// sqrt(4 x_j^2 + y^2).
double effective_rabi(double x_j, double y);

/// Envelope area of a sech pulse with strength x: (2 pi^2 / 1.763) n_fwhm x.
double strength_to_area(double x, double n_fwhm);
double area_to_strength(double area, double n_fwhm);

} // namespace twolevel
