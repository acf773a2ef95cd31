#pragma once

#include "twolevel/propagator.hpp"
#include "twolevel/pulse.hpp"

#include <cmath>
#include <complex>
#include <functional>
#include <random>

namespace testing {

using twolevel::complex;

// Fixed seeds keep every randomized sweep reproducible.
inline std::mt19937_64& rng() {
    static std::mt19937_64 gen(20240611);
    return gen;
}

inline double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng()); }
inline int uniform_int(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng()); }

inline complex random_ratio() { return {uniform(-3.0, 3.0), uniform(-3.0, 3.0)}; }

inline twolevel::SliceState state_from_ratio(complex r) {
    const double n = std::sqrt(1.0 + std::norm(r));
    return {1.0 / n, r / n};
}

inline twolevel::PulseShape random_shape() {
    switch (uniform_int(0, 3)) {
    case 0: return twolevel::BoxShape{};
    case 1: return twolevel::SechShape{uniform(0.8, 3.0)};
    case 2: return twolevel::SincShape{uniform(0.8, 3.0)};
    default: return twolevel::GaussianRampFlatShape{uniform(0.5, 3.0)};
    }
}

inline double relative(complex a, complex b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

// Classical RK4 on i dr/dtau = (r^2 - 1) x(tau) + y r, written out here so the
// propagator is checked against something that shares no code with it.
inline complex riccati_rk4(complex r, double t0, double t1, int steps, double y,
                           const std::function<double(double)>& drive) {
    const complex I{0.0, 1.0};
    auto f = [&](double t, complex v) { return -I * ((v * v - 1.0) * drive(t) + y * v); };
    const double h = (t1 - t0) / steps;
    for (int n = 0; n < steps; ++n) {
        const double t = t0 + n * h;
        const complex k1 = f(t, r);
        const complex k2 = f(t + h / 2, r + h / 2 * k1);
        const complex k3 = f(t + h / 2, r + h / 2 * k2);
        const complex k4 = f(t + h, r + h * k3);
        r += h / 6 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return r;
}

} // namespace testing
