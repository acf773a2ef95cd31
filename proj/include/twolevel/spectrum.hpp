#pragma once

#include "twolevel/propagator.hpp"
#include "twolevel/pulse.hpp"

#include <span>
#include <vector>

namespace twolevel {

/// Spectrometer frequencies z (in units of the carrier frequency).
struct FrequencyGrid {
    double z_min = 0.0;
    double z_max = 10.0;
    double dz = 1e-3;

    void validate() const;
    std::size_t size() const;
    double at(std::size_t i) const { return z_min + static_cast<double>(i) * dz; }

    bool operator==(const FrequencyGrid&) const = default;
};

struct SpectrumSeries {
    std::vector<double> z;
    std::vector<complex> amplitude;
    std::vector<double> intensity;

    std::size_t size() const { return z.size(); }
};

/// Integral of exp(-i w s) over 0 <= s <= width, in the cancellation-free form
/// -i width exp(-i w width / 2) sinc(w width / 2).
complex slice_kernel(double w, double width);
/// Kernel for slice of width pi/k at w = z + q x_eff, q in {-1, 0, 1}.
complex slice_kernel(double z, double x_eff, int q, int k);

/// Fourier transform of the dipole, integral of d(tau) exp(-i z tau), summed
/// analytically slice by slice.
SpectrumSeries dipole_spectrum(std::span<const SliceState> states, const PulseSpec& spec, const SliceGrid& grid,
                               const FrequencyGrid& fgrid);
/// Same transform applied to the emitted field (second derivative of the dipole).
SpectrumSeries field_spectrum(std::span<const SliceState> states, const PulseSpec& spec, const SliceGrid& grid,
                              const FrequencyGrid& fgrid);

/// Samples of `sp` with lo <= z <= hi.
SpectrumSeries restrict_band(const SpectrumSeries& sp, double lo, double hi);

struct Peak {
    double z = 0.0;
    double height = 0.0;
};

/// Interior local maxima above rel_threshold * max(intensity), refined with a
/// three-point parabola on log intensity. Sorted by z.
std::vector<Peak> find_peaks(const SpectrumSeries& sp, double rel_threshold);

struct HarmonicHeight {
    int order = 0;
    /// Tallest local maximum within +-0.5 of `order`, divided by the one at 3; 0 if none.
    double height = 0.0;
};

/// Odd-harmonic heights 1, 3, ..., max_odd normalized to the third harmonic.
/// Throws std::runtime_error if no peak is found near z = 3.
std::vector<HarmonicHeight> harmonic_heights(const SpectrumSeries& sp, int max_odd);

enum class SpectrumKind { dipole, field };

/// For each carrier-envelope phase, propagate `pulse` and record the largest
/// spectral intensity within |z - z_target| <= window.
std::vector<double> phase_scan(const PulseSpec& pulse, int k, std::span<const double> phis,
                               const FrequencyGrid& fgrid, double z_target, double window,
                               SpectrumKind kind = SpectrumKind::field);

} // namespace twolevel
