#pragma once

#include "twolevel/pulse.hpp"

#include <array>
#include <complex>
#include <span>
#include <vector>

namespace twolevel {

using complex = std::complex<double>;

/// Amplitude pair (b1, b2) at a slice boundary, kept normalized.
///
/// The pair is projective: only beta/alpha and the populations matter to the
/// observables, and it stays finite when the ground level empties. The
/// propagator keeps it equal to the symmetric-gauge amplitudes.
struct SliceState {
    complex alpha{1.0, 0.0};
    complex beta{0.0, 0.0};

    double norm() const { return std::norm(alpha) + std::norm(beta); }
    /// I = beta/alpha; infinite when alpha == 0.
    complex ratio() const;
};

struct BlochVector {
    double u = 0.0;
    double v = 0.0;
    double w = -1.0;
};

BlochVector bloch_vector(const SliceState& s);

enum class SeriesKind { inversion, dipole, emitted_field };

struct TimeSeries {
    std::vector<double> tau;
    std::vector<double> value;
    SeriesKind kind = SeriesKind::inversion;

    std::size_t size() const { return tau.size(); }
};

/// Closed-form evolution inside one constant-field slice, expressed through
/// the state at the slice start. Offsets are measured from the slice start.
class SliceSolution {
public:
    SliceSolution(const SliceState& start, double x_j, double y);

    double inversion(double offset) const;
    double dipole(double offset) const;
    /// First derivative of dipole() in tau.
    double dipole_rate(double offset) const;
    /// Second derivative of dipole(); the forward-scattered field up to a constant.
    double emitted_field(double offset) const;

    double drive() const { return x_; }
    double splitting() const { return y_; }
    double x_eff() const { return x_eff_; }
    /// |b1|^2 - |b2|^2 at the slice start, i.e. (1 - |I|^2) / (1 + |I|^2).
    double population_difference() const { return p_; }
    /// b2 conj(b1) at the slice start, i.e. I / (1 + |I|^2).
    complex coherence() const { return c_; }

private:
    double x_;
    double y_;
    double x_eff_;
    double p_;
    complex c_;
};

/// Advance a boundary state across one slice of width pi/k with constant drive x_j.
SliceState advance_slice(const SliceState& state, double x_j, double y, int k);

/// The 2x2 slice map (before the -i x_eff scaling is removed), row-major.
/// beta'/alpha' under this matrix reproduces the scalar ratio recurrence.
std::array<complex, 4> slice_matrix(double x_j, double y, int k);

/// Boundary states for every slice, starting from the ground state; returns
/// slice_count + 1 entries.
std::vector<SliceState> propagate(const PulseSpec& spec, const SliceGrid& grid);
std::vector<SliceState> propagate(std::span<const double> drives, double y, int k);

TimeSeries inversion_series(std::span<const SliceState> states, const PulseSpec& spec, const SliceGrid& grid,
                            int samples_per_slice = 8);
TimeSeries dipole_series(std::span<const SliceState> states, const PulseSpec& spec, const SliceGrid& grid,
                         int samples_per_slice = 8);
TimeSeries emitted_field_series(std::span<const SliceState> states, const PulseSpec& spec, const SliceGrid& grid,
                                int samples_per_slice = 8);

} // namespace twolevel
