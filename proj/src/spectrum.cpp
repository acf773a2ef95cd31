#include "twolevel/spectrum.hpp"

#include "twolevel/errors.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace twolevel {

void FrequencyGrid::validate() const {
    if (!(std::isfinite(z_min) && z_min >= 0.0)) throw ConfigError("frequency_grid.z_min", "must be >= 0");
    if (!(std::isfinite(z_max) && z_max > z_min)) throw ConfigError("frequency_grid.z_max", "must exceed z_min");
    if (!(std::isfinite(dz) && dz > 0.0)) throw ConfigError("frequency_grid.dz", "must be positive");
    const double steps = (z_max - z_min) / dz;
    if (std::abs(steps - std::round(steps)) > 1e-6)
        throw ConfigError("frequency_grid.dz", "(z_max - z_min) / dz must be an integer");
}

std::size_t FrequencyGrid::size() const { return static_cast<std::size_t>(std::llround((z_max - z_min) / dz)) + 1; }

complex slice_kernel(double w, double width) {
    const double half = 0.5 * w * width;
    const double sinc = half == 0.0 ? 1.0 : std::sin(half) / half;
    return complex{0.0, -width} * std::polar(sinc, -half);
}

complex slice_kernel(double z, double x_eff, int q, int k) {
    if (k < 1) throw std::invalid_argument("slice_kernel: k must be >= 1");
    if (q < -1 || q > 1) throw std::invalid_argument("slice_kernel: q must be -1, 0 or 1");
    return slice_kernel(z + q * x_eff, pi / k);
}

namespace {

// Per-slice data that does not depend on z.
struct SliceTerms {
    double start;
    double width;
    double x_eff;
    complex rot;      // exp(-i x_eff width)
    complex sum_coef; // multiplies f(-1) + f(+1)
    complex dif_coef; // multiplies f(-1) - f(+1)
    complex zero_coef; // multiplies f(0)
};

// (exp(-i w width) - 1) / w given e = exp(-i w width). Falls back to the sinc
// form where the difference would cancel.
complex kernel_from_phase(const complex& e, double w, double width) {
    if (std::abs(w * width) < 1e-2) return slice_kernel(w, width);
    return (e - 1.0) / w;
}

SpectrumSeries transform(std::span<const SliceState> states, const PulseSpec& spec, const SliceGrid& grid,
                         const FrequencyGrid& fgrid, SpectrumKind kind) {
    fgrid.validate();
    const int count = grid.slice_count();
    if (states.size() < static_cast<std::size_t>(count)) throw std::invalid_argument("too few boundary states for grid");

    std::vector<SliceTerms> terms;
    terms.reserve(static_cast<std::size_t>(count));
    const double y = spec.y;
    for (int j = 1; j <= count; ++j) {
        const SliceSolution sol(states[j - 1], slice_drive(spec, grid, j), y);
        const double x = sol.drive(), xe = sol.x_eff(), p = sol.population_difference();
        const double re = sol.coherence().real(), im = sol.coherence().imag();
        SliceTerms t{};
        t.start = grid.start(j);
        t.width = grid.clipped_width(j);
        t.x_eff = xe;
        t.rot = std::polar(1.0, -xe * t.width);
        if (kind == SpectrumKind::dipole) {
            const double inv = 1.0 / (xe * xe);
            t.zero_coef = complex{0.0, 2.0 * x * (y * p + 4.0 * x * re) * inv};
            t.sum_coef = complex{0.0, -y * (x * p - y * re) * inv};
            t.dif_coef = complex{y * xe * im * inv, 0.0};
        } else {
            t.zero_coef = 0.0;
            t.sum_coef = complex{0.0, y * (x * p - y * re)};
            t.dif_coef = complex{-y * xe * im, 0.0};
        }
        terms.push_back(t);
    }

    const std::size_t nz = fgrid.size();
    SpectrumSeries out;
    out.z.resize(nz);
    out.amplitude.resize(nz);
    out.intensity.resize(nz);
    const double full = grid.width();
    for (std::size_t i = 0; i < nz; ++i) {
        const double z = fgrid.at(i);
        const complex step = std::polar(1.0, -z * full);
        complex shift{1.0, 0.0}; // exp(-i z start_j)
        complex acc{};
        for (std::size_t j = 0; j < terms.size(); ++j) {
            const SliceTerms& t = terms[j];
            // The last slice may be clipped; recompute its phases exactly.
            const complex ez = t.width == full ? step : std::polar(1.0, -z * t.width);
            if (j + 1 == terms.size()) shift = std::polar(1.0, -z * t.start);
            const complex fm = kernel_from_phase(ez * std::conj(t.rot), z - t.x_eff, t.width);
            const complex fp = kernel_from_phase(ez * t.rot, z + t.x_eff, t.width);
            complex term = t.sum_coef * (fm + fp) + t.dif_coef * (fm - fp);
            if (kind == SpectrumKind::dipole) term += t.zero_coef * kernel_from_phase(ez, z, t.width);
            acc += shift * term;
            shift *= step;
        }
        out.z[i] = z;
        out.amplitude[i] = acc;
        out.intensity[i] = std::norm(acc);
    }
    return out;
}

} // namespace

SpectrumSeries dipole_spectrum(std::span<const SliceState> states, const PulseSpec& spec, const SliceGrid& grid,
                               const FrequencyGrid& fgrid) {
    return transform(states, spec, grid, fgrid, SpectrumKind::dipole);
}

SpectrumSeries field_spectrum(std::span<const SliceState> states, const PulseSpec& spec, const SliceGrid& grid,
                              const FrequencyGrid& fgrid) {
    return transform(states, spec, grid, fgrid, SpectrumKind::field);
}

SpectrumSeries restrict_band(const SpectrumSeries& sp, double lo, double hi) {
    SpectrumSeries out;
    for (std::size_t i = 0; i < sp.size(); ++i) {
        if (sp.z[i] < lo || sp.z[i] > hi) continue;
        out.z.push_back(sp.z[i]);
        out.amplitude.push_back(sp.amplitude[i]);
        out.intensity.push_back(sp.intensity[i]);
    }
    return out;
}

namespace {

std::vector<Peak> local_maxima(const SpectrumSeries& sp, double threshold) {
    std::vector<Peak> peaks;
    const auto& in = sp.intensity;
    for (std::size_t i = 1; i + 1 < in.size(); ++i) {
        if (!(in[i] > in[i - 1] && in[i] >= in[i + 1]) || in[i] < threshold) continue;
        Peak pk{sp.z[i], in[i]};
        if (in[i - 1] > 0.0 && in[i + 1] > 0.0) {
            const double lm = std::log(in[i - 1]), l0 = std::log(in[i]), lp = std::log(in[i + 1]);
            const double denom = lm - 2.0 * l0 + lp;
            if (denom < 0.0) {
                const double delta = 0.5 * (lm - lp) / denom;
                pk.z = sp.z[i] + delta * (sp.z[i + 1] - sp.z[i - 1]) * 0.5;
                pk.height = std::exp(l0 - 0.25 * (lm - lp) * delta);
            }
        }
        peaks.push_back(pk);
    }
    return peaks;
}

} // namespace

std::vector<Peak> find_peaks(const SpectrumSeries& sp, double rel_threshold) {
    if (!(rel_threshold > 0.0 && rel_threshold < 1.0))
        throw std::invalid_argument("find_peaks: rel_threshold must lie in (0, 1)");
    if (sp.size() < 3) return {};
    const double top = *std::max_element(sp.intensity.begin(), sp.intensity.end());
    if (!(top > 0.0)) return {};
    auto raw = local_maxima(sp, rel_threshold * top);
    std::sort(raw.begin(), raw.end(), [](const Peak& a, const Peak& b) { return a.z < b.z; });

    const double dz = sp.z[1] - sp.z[0];
    std::vector<Peak> peaks;
    for (const Peak& p : raw) {
        if (!peaks.empty() && p.z - peaks.back().z < dz) {
            if (p.height > peaks.back().height) peaks.back() = p;
            continue;
        }
        peaks.push_back(p);
    }
    return peaks;
}

std::vector<HarmonicHeight> harmonic_heights(const SpectrumSeries& sp, int max_odd) {
    if (max_odd < 3) throw std::invalid_argument("harmonic_heights: max_odd must be >= 3");
    if (sp.size() < 3 || sp.z.back() < max_odd) throw std::invalid_argument("harmonic_heights: spectrum too short");
    const auto peaks = local_maxima(sp, 0.0);
    auto tallest_near = [&](int n) {
        double best = 0.0;
        for (const Peak& p : peaks)
            if (std::abs(p.z - n) <= 0.5) best = std::max(best, p.height);
        return best;
    };
    const double third = tallest_near(3);
    if (!(third > 0.0)) throw std::runtime_error("harmonic_heights: no third-harmonic peak to normalize by");
    std::vector<HarmonicHeight> out;
    for (int n = 1; n <= max_odd; n += 2) out.push_back({n, tallest_near(n) / third});
    return out;
}

std::vector<double> phase_scan(const PulseSpec& pulse, int k, std::span<const double> phis,
                               const FrequencyGrid& fgrid, double z_target, double window, SpectrumKind kind) {
    if (!(window > 0.0)) throw std::invalid_argument("phase_scan: window must be positive");
    const SliceGrid grid(k, pulse.n_cycles);
    std::vector<double> heights;
    heights.reserve(phis.size());
    for (double phi : phis) {
        PulseSpec spec = pulse;
        spec.phi = phi;
        const auto states = propagate(spec, grid);
        const auto sp = kind == SpectrumKind::field ? field_spectrum(states, spec, grid, fgrid)
                                                    : dipole_spectrum(states, spec, grid, fgrid);
        double best = 0.0;
        for (std::size_t i = 0; i < sp.size(); ++i)
            if (std::abs(sp.z[i] - z_target) <= window) best = std::max(best, sp.intensity[i]);
        heights.push_back(best);
    }
    return heights;
}

} // namespace twolevel
