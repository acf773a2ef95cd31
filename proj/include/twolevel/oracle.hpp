#pragma once

// Reference integrators for the two-level amplitude equations. These take the
// continuous field h(tau) directly and share nothing with the slice propagator
// beyond PulseSpec, so they serve as ground truth for it.

#include "twolevel/propagator.hpp"
#include "twolevel/pulse.hpp"

#include <string>
#include <vector>

namespace twolevel {

/// Level energies used by the amplitude integrator. Symmetric puts the levels
/// at -y/2 and +y/2, which makes b2/b1 coincide with the ratio propagated by
/// the slice method.
enum class Gauge { symmetric, ground_at_zero };

struct OracleConfig {
    int steps_per_cycle = 2000;
    Gauge gauge = Gauge::symmetric;

    void validate() const;
    bool operator==(const OracleConfig&) const = default;
};

struct AmplitudeResult {
    TimeSeries inversion;
    TimeSeries dipole;
    /// (b1, b2) at tau = j pi / boundary_k for j = 0..ceil(2 N boundary_k), the last clipped to the window.
    std::vector<SliceState> boundary_states;
    double max_norm_drift = 0.0;
};

/// Fixed-step classical RK4 on the amplitude equations, from the ground state.
/// Throws NumericalError when the norm drifts by more than 1e-6.
AmplitudeResult integrate_amplitudes(const PulseSpec& spec, const OracleConfig& config, int boundary_k = 1);

struct RiccatiResult {
    std::vector<double> tau;
    std::vector<complex> ratio;
    /// Set when |r| exceeded the blow-up guard; the trajectory stops there.
    bool blew_up = false;
    std::string diagnostic;

    TimeSeries inversion() const;
};

inline constexpr double kRiccatiBlowUp = 1e6;

/// Fixed-step RK4 on i dr/dtau = (r^2 - 1) x h(tau) + y r.
RiccatiResult integrate_riccati(const PulseSpec& spec, const OracleConfig& config, complex r0 = {});

struct SwaSetup {
    PulseSpec spec;
    SliceGrid grid;
};

/// Square-wave approximation: one slice per half cycle with |x_j| = 2x/pi.
/// Only defined for box pulses; the carrier phase is fixed at 0.
SwaSetup swa_grid(const PulseSpec& spec);

struct SeriesError {
    double max_abs = 0.0;
    double rms = 0.0;
};

/// Pointwise error of `a` against `b`. When the grids differ, `b` is linearly
/// interpolated onto the samples of `a` that fall inside its range.
SeriesError compare_series(const TimeSeries& a, const TimeSeries& b);

} // namespace twolevel
