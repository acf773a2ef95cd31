#include "twolevel/oracle.hpp"

#include "twolevel/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace twolevel {

void OracleConfig::validate() const {
    if (steps_per_cycle < 100) throw ConfigError("oracle.steps_per_cycle", "must be >= 100");
}

namespace {

using Amplitudes = std::array<complex, 2>;

struct AmplitudeRhs {
    const PulseSpec& spec;
    double e1;
    double e2;

    Amplitudes operator()(double tau, const Amplitudes& b) const {
        const double coupling = spec.x * field_profile(spec, tau);
        constexpr complex minus_i{0.0, -1.0};
        return {minus_i * (e1 * b[0] - coupling * b[1]), minus_i * (e2 * b[1] - coupling * b[0])};
    }
};

template <class State, class Rhs>
State rk4_step(const Rhs& f, double t, const State& s, double h) {
    auto axpy = [](const State& a, double c, const State& k) {
        State r = a;
        for (std::size_t i = 0; i < r.size(); ++i) r[i] += c * k[i];
        return r;
    };
    const State k1 = f(t, s);
    const State k2 = f(t + 0.5 * h, axpy(s, 0.5 * h, k1));
    const State k3 = f(t + 0.5 * h, axpy(s, 0.5 * h, k2));
    const State k4 = f(t + h, axpy(s, h, k3));
    State out = s;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    return out;
}

int step_count(const PulseSpec& spec, const OracleConfig& config) {
    return static_cast<int>(std::ceil(config.steps_per_cycle * spec.n_cycles - 1e-9));
}

} // namespace

AmplitudeResult integrate_amplitudes(const PulseSpec& spec, const OracleConfig& config, int boundary_k) {
    config.validate();
    if (boundary_k < 1) throw std::invalid_argument("boundary_k must be >= 1");

    const double e1 = config.gauge == Gauge::symmetric ? -0.5 * spec.y : 0.0;
    const double e2 = config.gauge == Gauge::symmetric ? 0.5 * spec.y : spec.y;
    const AmplitudeRhs rhs{spec, e1, e2};

    const int steps = step_count(spec, config);
    const double end = spec.window_end();
    const double h = end / steps;

    std::vector<Amplitudes> traj(static_cast<std::size_t>(steps) + 1);
    traj[0] = {complex{1.0, 0.0}, complex{}};
    AmplitudeResult out;
    for (int i = 0; i < steps; ++i) {
        traj[i + 1] = rk4_step(rhs, i * h, traj[i], h);
        const double drift = std::abs(std::norm(traj[i + 1][0]) + std::norm(traj[i + 1][1]) - 1.0);
        out.max_norm_drift = std::max(out.max_norm_drift, drift);
        if (!std::isfinite(drift) || drift > 1e-6) {
            std::ostringstream msg;
            msg << "amplitude oracle norm drift " << drift << " at tau=" << (i + 1) * h
                << "; increase oracle.steps_per_cycle";
            throw NumericalError(msg.str());
        }
    }

    out.inversion.kind = SeriesKind::inversion;
    out.dipole.kind = SeriesKind::dipole;
    out.inversion.tau.resize(traj.size());
    out.inversion.value.resize(traj.size());
    out.dipole.value.resize(traj.size());
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const auto& b = traj[i];
        out.inversion.tau[i] = static_cast<double>(i) * h;
        out.inversion.value[i] = std::norm(b[1]) - std::norm(b[0]);
        out.dipole.value[i] = 2.0 * (std::conj(b[0]) * b[1]).real();
    }
    out.dipole.tau = out.inversion.tau;

    const SliceGrid grid(boundary_k, spec.n_cycles);
    out.boundary_states.reserve(static_cast<std::size_t>(grid.slice_count()) + 1);
    for (int j = 0; j <= grid.slice_count(); ++j) {
        const double tb = std::min(j * grid.width(), end);
        int i = std::min(static_cast<int>(std::floor(tb / h)), steps);
        const double rest = tb - i * h;
        Amplitudes b = traj[i];
        if (rest > 1e-12 * h) b = rk4_step(rhs, i * h, b, rest);
        out.boundary_states.push_back({b[0], b[1]});
    }
    return out;
}

TimeSeries RiccatiResult::inversion() const {
    TimeSeries s;
    s.kind = SeriesKind::inversion;
    s.tau = tau;
    s.value.reserve(ratio.size());
    for (const complex& r : ratio) {
        const double m = std::norm(r);
        s.value.push_back((m - 1.0) / (m + 1.0));
    }
    return s;
}

RiccatiResult integrate_riccati(const PulseSpec& spec, const OracleConfig& config, complex r0) {
    config.validate();
    auto rhs = [&spec](double tau, const std::array<complex, 1>& r) -> std::array<complex, 1> {
        const double coupling = spec.x * field_profile(spec, tau);
        return {complex{0.0, -1.0} * ((r[0] * r[0] - 1.0) * coupling + spec.y * r[0])};
    };

    const int steps = step_count(spec, config);
    const double h = spec.window_end() / steps;
    RiccatiResult out;
    out.tau.reserve(static_cast<std::size_t>(steps) + 1);
    out.ratio.reserve(static_cast<std::size_t>(steps) + 1);
    std::array<complex, 1> r{r0};
    out.tau.push_back(0.0);
    out.ratio.push_back(r0);
    for (int i = 0; i < steps; ++i) {
        r = rk4_step(rhs, i * h, r, h);
        if (!std::isfinite(std::abs(r[0])) || std::abs(r[0]) > kRiccatiBlowUp) {
            out.blew_up = true;
            std::ostringstream msg;
            msg << "|r| exceeded " << kRiccatiBlowUp << " at tau=" << (i + 1) * h
                << " (ground level nearly empty); use the amplitude integrator";
            out.diagnostic = msg.str();
            break;
        }
        out.tau.push_back((i + 1) * h);
        out.ratio.push_back(r[0]);
    }
    return out;
}

SwaSetup swa_grid(const PulseSpec& spec) {
    if (!std::holds_alternative<BoxShape>(spec.shape))
        throw ConfigError("pulse.shape", "square-wave approximation requires a box pulse");
    PulseSpec swa = spec;
    swa.x = 2.0 / pi * spec.x;
    swa.phi = 0.0;
    return {swa, SliceGrid(1, spec.n_cycles)};
}

SeriesError compare_series(const TimeSeries& a, const TimeSeries& b) {
    if (a.tau.empty() || b.tau.empty()) throw std::invalid_argument("compare_series: empty series");
    const bool same_grid = a.tau.size() == b.tau.size() &&
                           std::equal(a.tau.begin(), a.tau.end(), b.tau.begin(),
                                      [](double p, double q) { return std::abs(p - q) <= 1e-12 * (1.0 + std::abs(p)); });

    double max_abs = 0.0, sum_sq = 0.0;
    std::size_t n = 0;
    const double lo = b.tau.front(), hi = b.tau.back();
    const double slack = 1e-12 * (1.0 + std::abs(hi));
    for (std::size_t i = 0; i < a.tau.size(); ++i) {
        double ref;
        if (same_grid) {
            ref = b.value[i];
        } else {
            const double t = a.tau[i];
            if (t < lo - slack || t > hi + slack) continue;
            auto it = std::upper_bound(b.tau.begin(), b.tau.end(), t);
            std::size_t hi_idx = static_cast<std::size_t>(it - b.tau.begin());
            if (hi_idx >= b.tau.size()) hi_idx = b.tau.size() - 1;
            const std::size_t lo_idx = hi_idx == 0 ? 0 : hi_idx - 1;
            if (hi_idx == lo_idx) {
                ref = b.value[lo_idx];
            } else {
                const double frac = std::clamp((t - b.tau[lo_idx]) / (b.tau[hi_idx] - b.tau[lo_idx]), 0.0, 1.0);
                ref = b.value[lo_idx] + frac * (b.value[hi_idx] - b.value[lo_idx]);
            }
        }
        const double e = std::abs(a.value[i] - ref);
        max_abs = std::max(max_abs, e);
        sum_sq += e * e;
        ++n;
    }
    if (n == 0) throw std::invalid_argument("compare_series: tau ranges do not overlap");
    return {max_abs, std::sqrt(sum_sq / static_cast<double>(n))};
}

} // namespace twolevel
