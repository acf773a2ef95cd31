// Structural checks on the published scenarios (peak positions, counts and
// orderings); the figures themselves exist only as plots.
#include "twolevel/scenario.hpp"
#include "twolevel/spectrum.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace twolevel;

namespace {

struct Spectra {
    SpectrumSeries dipole, field;
};

Spectra compute(const ScenarioConfig& c, const Variant& v = {}) {
    const PulseSpec p = c.resolve(v);
    const SliceGrid g(c.k, p.n_cycles);
    const auto st = propagate(p, g);
    return {dipole_spectrum(st, p, g, c.frequency_grid), field_spectrum(st, p, g, c.frequency_grid)};
}

std::vector<Peak> within(const std::vector<Peak>& peaks, double lo, double hi) {
    std::vector<Peak> out;
    std::copy_if(peaks.begin(), peaks.end(), std::back_inserter(out), [&](const Peak& p) { return p.z >= lo && p.z <= hi; });
    return out;
}

Peak tallest(const std::vector<Peak>& peaks) {
    REQUIRE_FALSE(peaks.empty());
    return *std::max_element(peaks.begin(), peaks.end(), [](const Peak& a, const Peak& b) { return a.height < b.height; });
}

} // namespace

TEST_CASE("Fig. 2b: odd harmonics with doublets around even orders") {
    const auto c = preset("fig2b");
    const auto s = compute(c);
    const auto peaks = find_peaks(s.dipole, 1e-6);
    for (int n : {3, 5, 7}) {
        CAPTURE(n);
        CHECK(std::abs(tallest(within(peaks, n - 0.3, n + 0.3)).z - n) < 0.01);
    }
    for (int n : {2, 4, 6}) {
        CAPTURE(n);
        auto near = within(peaks, n - 0.3, n + 0.3);
        std::sort(near.begin(), near.end(), [](const Peak& a, const Peak& b) { return a.height > b.height; });
        REQUIRE(near.size() >= 2);
        const double lo = std::min(near[0].z, near[1].z), hi = std::max(near[0].z, near[1].z);
        CHECK(lo < n - 0.1);
        CHECK(hi > n + 0.1);
        CHECK(std::abs(0.5 * (lo + hi) - n) < 0.01);
    }
    // Away from the pulse edges the emitted field is the dipole's second
    // derivative, so the two spectra differ by z^4 at the strong lines.
    for (double z : {3.0, 5.0}) {
        const auto i = static_cast<std::size_t>(std::llround(z / c.frequency_grid.dz));
        CHECK(s.field.intensity[i] / (std::pow(z, 4) * s.dipole.intensity[i]) == doctest::Approx(1.0).epsilon(1e-2));
    }
}

TEST_CASE("Fig. 3: harmonic plateau and sensitivity to the coupling strength") {
    const auto c = preset("fig3");
    std::vector<std::vector<HarmonicHeight>> profiles;
    for (const auto& v : c.variants) {
        CAPTURE(v.label);
        const auto s = compute(c, v);
        const auto peaks = find_peaks(s.dipole, 1e-12);
        for (int n = 1; n <= 21; n += 2) {
            CAPTURE(n);
            CHECK(std::abs(tallest(within(peaks, n - 0.5, n + 0.5)).z - n) < 0.01);
        }
        profiles.push_back(harmonic_heights(s.dipole, 21));
        CHECK(profiles.back()[1].height == 1.0);
    }
    REQUIRE(profiles.size() == 2);
    double worst = 0.0;
    for (std::size_t i = 0; i < profiles[0].size(); ++i) {
        const double a = profiles[0][i].height, b = profiles[1][i].height;
        worst = std::max(worst, std::abs(a - b) / std::max(a, b));
    }
    CHECK(worst > 0.1);
}

TEST_CASE("Fig. 4: the doublet near z = 2 coalesces") {
    auto band_peaks = [](const std::string& name) {
        const auto s = compute(preset(name));
        return find_peaks(restrict_band(s.dipole, 1.7, 2.3), 0.1);
    };
    CHECK(band_peaks("fig4a").size() == 2);
    CHECK(band_peaks("fig4b").size() == 1);
}

TEST_CASE("Fig. 7a: second-harmonic peak dominates the z = 1.5 feature") {
    const auto s = compute(preset("fig7a"));
    const auto peaks = find_peaks(s.field, 1e-3);
    const Peak second = tallest(within(peaks, 1.8, 2.2));
    const Peak feature = tallest(within(peaks, 1.35, 1.65));
    CHECK(second.height > feature.height);
    CHECK(feature.height > 0.1 * second.height);
}
