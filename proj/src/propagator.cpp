#include "twolevel/propagator.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace twolevel {

complex SliceState::ratio() const {
    if (alpha == complex{}) {
        constexpr double inf = std::numeric_limits<double>::infinity();
        return {inf, inf};
    }
    return beta / alpha;
}

BlochVector bloch_vector(const SliceState& s) {
    const complex c = std::conj(s.alpha) * s.beta;
    const double n = s.norm();
    return {2.0 * c.real() / n, 2.0 * c.imag() / n, (std::norm(s.beta) - std::norm(s.alpha)) / n};
}

SliceSolution::SliceSolution(const SliceState& start, double x_j, double y)
    : x_(x_j), y_(y), x_eff_(effective_rabi(x_j, y)) {
    const double n = start.norm();
    p_ = (std::norm(start.alpha) - std::norm(start.beta)) / n;
    c_ = start.beta * std::conj(start.alpha) / n;
}

double SliceSolution::inversion(double offset) const {
    const double ph = x_eff_ * offset;
    const double re = c_.real(), im = c_.imag();
    return -(y_ * (y_ * p_ + 4.0 * x_ * re) + 4.0 * x_ * (x_ * p_ - y_ * re) * std::cos(ph) -
             4.0 * x_ * x_eff_ * im * std::sin(ph)) /
           (x_eff_ * x_eff_);
}

double SliceSolution::dipole(double offset) const {
    const double ph = x_eff_ * offset;
    const double re = c_.real(), im = c_.imag();
    return 2.0 *
           (x_ * (y_ * p_ + 4.0 * x_ * re) - y_ * (x_ * p_ - y_ * re) * std::cos(ph) +
            y_ * x_eff_ * im * std::sin(ph)) /
           (x_eff_ * x_eff_);
}

double SliceSolution::dipole_rate(double offset) const {
    const double ph = x_eff_ * offset;
    const double re = c_.real(), im = c_.imag();
    return 2.0 * y_ * ((x_ * p_ - y_ * re) * std::sin(ph) + x_eff_ * im * std::cos(ph)) / x_eff_;
}

double SliceSolution::emitted_field(double offset) const {
    const double ph = x_eff_ * offset;
    const double re = c_.real(), im = c_.imag();
    return 2.0 * y_ * ((x_ * p_ - y_ * re) * std::cos(ph) - x_eff_ * im * std::sin(ph));
}

std::array<complex, 4> slice_matrix(double x_j, double y, int k) {
    const double x_eff = effective_rabi(x_j, y);
    const double theta = pi * x_eff / (2.0 * k);
    const double s = std::sin(theta), c = std::cos(theta);
    return {complex{y * s, -x_eff * c}, complex{2.0 * x_j * s, 0.0}, complex{2.0 * x_j * s, 0.0},
            complex{-y * s, -x_eff * c}};
}

SliceState advance_slice(const SliceState& state, double x_j, double y, int k) {
    const auto m = slice_matrix(x_j, y, k);
    SliceState next{m[0] * state.alpha + m[1] * state.beta, m[2] * state.alpha + m[3] * state.beta};
    // The matrix is -i x_eff times the unitary slice propagator; dividing it out
    // keeps the pair equal to the symmetric-gauge amplitudes.
    const complex unscale{0.0, 1.0 / effective_rabi(x_j, y)};
    next.alpha *= unscale;
    next.beta *= unscale;
    const double n = std::sqrt(next.norm());
    next.alpha /= n;
    next.beta /= n;
    return next;
}

std::vector<SliceState> propagate(std::span<const double> drives, double y, int k) {
    std::vector<SliceState> states;
    states.reserve(drives.size() + 1);
    states.emplace_back();
    for (double x_j : drives) states.push_back(advance_slice(states.back(), x_j, y, k));
    return states;
}

std::vector<SliceState> propagate(const PulseSpec& spec, const SliceGrid& grid) {
    const auto drives = slice_drives(spec, grid);
    return propagate(drives, spec.y, grid.k());
}

namespace {

template <class Eval>
TimeSeries sample_series(std::span<const SliceState> states, const PulseSpec& spec, const SliceGrid& grid,
                         int samples_per_slice, SeriesKind kind, Eval eval) {
    if (samples_per_slice < 1) throw std::invalid_argument("samples_per_slice must be >= 1");
    const int count = grid.slice_count();
    if (states.size() < static_cast<std::size_t>(count)) throw std::invalid_argument("too few boundary states for grid");

    TimeSeries out;
    out.kind = kind;
    const std::size_t n = static_cast<std::size_t>(count) * samples_per_slice + 1;
    out.tau.resize(n);
    out.value.resize(n);

    for (int j = 1; j <= count; ++j) {
        const SliceSolution sol(states[j - 1], slice_drive(spec, grid, j), spec.y);
        const double start = grid.start(j);
        const double step = grid.clipped_width(j) / samples_per_slice;
        for (int m = 0; m < samples_per_slice; ++m) {
            const std::size_t idx = static_cast<std::size_t>(j - 1) * samples_per_slice + m;
            out.tau[idx] = start + m * step;
            out.value[idx] = eval(sol, m * step);
        }
    }
    const SliceSolution last(states[count - 1], slice_drive(spec, grid, count), spec.y);
    out.tau[n - 1] = grid.start(count) + grid.clipped_width(count);
    out.value[n - 1] = eval(last, grid.clipped_width(count));
    return out;
}

} // namespace

TimeSeries inversion_series(std::span<const SliceState> states, const PulseSpec& spec, const SliceGrid& grid,
                            int samples_per_slice) {
    return sample_series(states, spec, grid, samples_per_slice, SeriesKind::inversion,
                         [](const SliceSolution& s, double t) { return s.inversion(t); });
}

TimeSeries dipole_series(std::span<const SliceState> states, const PulseSpec& spec, const SliceGrid& grid,
                         int samples_per_slice) {
    return sample_series(states, spec, grid, samples_per_slice, SeriesKind::dipole,
                         [](const SliceSolution& s, double t) { return s.dipole(t); });
}

TimeSeries emitted_field_series(std::span<const SliceState> states, const PulseSpec& spec, const SliceGrid& grid,
                                int samples_per_slice) {
    return sample_series(states, spec, grid, samples_per_slice, SeriesKind::emitted_field,
                         [](const SliceSolution& s, double t) { return s.emitted_field(t); });
}

} // namespace twolevel
