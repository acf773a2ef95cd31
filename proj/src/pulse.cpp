#include "twolevel/pulse.hpp"

#include "twolevel/errors.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace twolevel {

namespace {

// tau_FWHM / tau0, with the width taken on the intensity profile sech^2(u) and (sin(u)/u)^2.
constexpr double kSechFwhmRatio = 1.763;
constexpr double kSincFwhmRatio = 2.7831148;

double sech_tau0(double n_fwhm) { return 2.0 * pi * n_fwhm / kSechFwhmRatio; }
double sinc_tau0(double n_fwhm) { return 2.0 * pi * n_fwhm / kSincFwhmRatio; }

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

void require(bool ok, const char* field, const char* what) {
    if (!ok) throw ConfigError(field, what);
}

} // namespace

void PulseSpec::validate() const {
    require(std::isfinite(n_cycles) && n_cycles > 0.0, "pulse.n_cycles", "must be a positive number");
    require(std::isfinite(x) && x >= 0.0, "pulse.x", "must be a nonnegative number");
    require(std::isfinite(y) && y > 0.0, "pulse.y", "must be a positive number");
    require(std::isfinite(phi), "pulse.phi", "must be finite");
    std::visit(overloaded{
                   [](const BoxShape&) {},
                   [](const SechShape& s) {
                       require(std::isfinite(s.n_fwhm) && s.n_fwhm > 0.0, "pulse.shape.n_fwhm", "must be positive");
                   },
                   [](const SincShape& s) {
                       require(std::isfinite(s.n_fwhm) && s.n_fwhm > 0.0, "pulse.shape.n_fwhm", "must be positive");
                   },
                   [](const GaussianRampFlatShape& s) {
                       require(std::isfinite(s.ramp_cycles) && s.ramp_cycles > 0.0, "pulse.shape.ramp_cycles",
                               "must be positive");
                   },
               },
               shape);
}

bool PulseSpec::centered() const {
    return std::holds_alternative<SechShape>(shape) || std::holds_alternative<SincShape>(shape);
}

SliceGrid::SliceGrid(int k, double n_cycles) : k_(k), n_cycles_(n_cycles) {
    if (k < 1) throw ConfigError("grid.k", "must be >= 1");
    if (!(std::isfinite(n_cycles) && n_cycles > 0.0)) throw ConfigError("pulse.n_cycles", "must be a positive number");
    // Guard against 2NK landing a hair above an integer.
    count_ = static_cast<int>(std::ceil(2.0 * n_cycles * k - 1e-9));
}

void SliceGrid::check(int j) const {
    if (j < 1 || j > count_)
        throw std::out_of_range("slice index " + std::to_string(j) + " outside [1, " + std::to_string(count_) + "]");
}

double SliceGrid::start(int j) const {
    check(j);
    return (j - 1) * width();
}

double SliceGrid::midpoint(int j) const {
    check(j);
    return j * width() - 0.5 * width();
}

double SliceGrid::clipped_width(int j) const {
    check(j);
    if (j < count_) return width();
    return std::min(width(), 2.0 * pi * n_cycles_ - start(j));
}

double default_window_cycles(const PulseShape& shape) {
    double n_fwhm = 0.0;
    if (const auto* s = std::get_if<SechShape>(&shape)) n_fwhm = s->n_fwhm;
    else if (const auto* s = std::get_if<SincShape>(&shape)) n_fwhm = s->n_fwhm;
    double n = std::ceil(std::max(16.0, 10.0 * n_fwhm));
    if (std::fmod(n, 2.0) != 0.0) n += 1.0;
    if (const auto* s = std::get_if<SechShape>(&shape)) {
        while (1.0 / std::cosh(pi * n / sech_tau0(s->n_fwhm)) >= 1e-4) n += 2.0;
    }
    return n;
}

double envelope(const PulseSpec& spec, double tau) {
    const double shifted = tau - spec.center();
    return std::visit(overloaded{
                          [](const BoxShape&) { return 1.0; },
                          [&](const SechShape& s) { return 1.0 / std::cosh(shifted / sech_tau0(s.n_fwhm)); },
                          [&](const SincShape& s) {
                              const double u = shifted / sinc_tau0(s.n_fwhm);
                              return u == 0.0 ? 1.0 : std::sin(u) / u;
                          },
                          [&](const GaussianRampFlatShape& s) {
                              const double top = 2.0 * pi * s.ramp_cycles;
                              if (tau >= top) return 1.0;
                              const double u = (tau - top) / (pi * s.ramp_cycles);
                              return std::exp(-u * u);
                          },
                      },
                      spec.shape);
}

double field_profile(const PulseSpec& spec, double tau) {
    return envelope(spec, tau) * std::sin(tau - spec.carrier_reference() + spec.phi);
}

double slice_drive(const PulseSpec& spec, const SliceGrid& grid, int j) {
    return spec.x * field_profile(spec, grid.midpoint(j));
}

std::vector<double> slice_drives(const PulseSpec& spec, const SliceGrid& grid) {
    std::vector<double> drives(static_cast<std::size_t>(grid.slice_count()));
    for (int j = 1; j <= grid.slice_count(); ++j) drives[j - 1] = slice_drive(spec, grid, j);
    return drives;
}

double effective_rabi(double x_j, double y) { return std::sqrt(4.0 * x_j * x_j + y * y); }

double strength_to_area(double x, double n_fwhm) { return 2.0 * pi * pi / kSechFwhmRatio * n_fwhm * x; }

double area_to_strength(double area, double n_fwhm) { return kSechFwhmRatio * area / (2.0 * pi * pi * n_fwhm); }

} // namespace twolevel
