#include <catch2/catch_amalgamated.hpp>

#include "starkafc/comb_fit.hpp"
#include "starkafc/rng.hpp"

using namespace starkafc;

namespace {

CombParams fig_comb() {
    CombParams c;
    c.delta = 15.4 * kMHz;
    c.finesse = 8.5556;
    c.bandwidth = 100.0 * kMHz;
    c.tooth_depth = 4.208;
    c.background_d0 = 0.3;
    return c;
}

FrequencyAxis wide_grid(double step = 150.0 * kKHz) {
    const auto n = 2 * static_cast<std::size_t>(std::ceil(150.0 * kMHz / step)) + 1;
    return {-0.5 * step * static_cast<double>(n - 1), step, n};
}

}  // namespace

TEST_CASE("comb derived quantities") {
    const auto c = fig_comb();
    CHECK(c.gamma() == Catch::Approx(1.8 * kMHz).epsilon(1e-3));
    CHECK(c.storage_time() == Catch::Approx(64.935 * kNs).epsilon(1e-4));
    CHECK(c.readout_time(3) == Catch::Approx(3.0 / c.delta));
    CHECK(c.tooth_count() == 7);
    CHECK(effective_depth(c) == Catch::Approx(0.5235491628601852).epsilon(1e-12));
}

TEST_CASE("storage efficiency law anchors") {
    const auto c = fig_comb();
    // Decay-law value on the first-order echo near 65 ns.
    CHECK(analytic_efficiency(c, 65.0 * kNs) ==
          Catch::Approx(0.10912573820587017).epsilon(1e-12));
    // Peak of the law at zero delay.
    const double dt = effective_depth(c);
    CHECK(analytic_efficiency(c, 0.0) ==
          Catch::Approx(dt * dt * std::exp(-dt) * std::exp(-0.3)).epsilon(1e-12));

    CombParams c160;
    c160.delta = 6.25 * kMHz;
    c160.finesse = 7.8;
    c160.bandwidth = 100.0 * kMHz;
    c160.tooth_depth = 3.623;
    c160.background_d0 = 0.3;
    CHECK(analytic_efficiency(c160, 320.0 * kNs) ==
          Catch::Approx(0.06916916684084363).epsilon(1e-12));
}

TEST_CASE("efficiency law limits") {
    auto c = fig_comb();
    // Wider teeth (lower finesse at fixed spacing) dephase faster.
    auto narrow = c, wide = c;
    narrow.finesse = 14.5;
    wide.finesse = 7.8;
    const double t = c.storage_time();
    const double rn = analytic_efficiency(narrow, t) / analytic_efficiency(narrow, 0.0);
    const double rw = analytic_efficiency(wide, t) / analytic_efficiency(wide, 0.0);
    CHECK(rn > rw);
    // Background only attenuates.
    auto clean = c;
    clean.background_d0 = 0.0;
    CHECK(analytic_efficiency(c, t) ==
          Catch::Approx(analytic_efficiency(clean, t) * std::exp(-0.3)).epsilon(1e-12));
}

TEST_CASE("carving lays down the right teeth") {
    const auto c = fig_comb();
    const auto s = carve_comb(c, wide_grid());
    // Central tooth peak sits on the grid centre.
    CHECK(s.depth_at(0.0) == Catch::Approx(c.background_d0 + c.tooth_depth).epsilon(1e-4));
    // Between teeth the profile falls to the background.
    CHECK(s.depth_at(0.5 * c.delta) == Catch::Approx(c.background_d0).margin(1e-6));
    const auto peaks = detect_teeth(s);
    CHECK(peaks.size() == c.tooth_count());
    for (const auto p : peaks) {
        const double f = s.grid.point(p);
        const double k = std::round(f / c.delta);
        CHECK(std::abs(f - k * c.delta) <= s.grid.step);
    }
    CHECK(tooth_fwhm(s, 0.0) == Catch::Approx(c.gamma()).epsilon(0.02));
}

TEST_CASE("carving rejects unusable grids") {
    const auto c = fig_comb();
    CHECK_THROWS_AS(carve_comb(c, FrequencyAxis{-150.0 * kMHz, 1.0 * kMHz, 301}), ConfigError);
    CHECK_THROWS_AS(carve_comb(c, FrequencyAxis{-40.0 * kMHz, 0.1 * kMHz, 801}), ConfigError);
    auto bad = c;
    bad.finesse = 0.9;
    CHECK_THROWS_AS(carve_comb(bad, wide_grid()), ConfigError);
}

TEST_CASE("superimposed combs add their profiles") {
    auto a = fig_comb();
    CombParams b = a;
    b.delta = 5.5 * kMHz;
    b.finesse = 5.5 / 1.8;
    b.tooth_depth = 2.0;
    b.background_d0 = 0.1;
    const auto grid = wide_grid(100.0 * kKHz);
    const auto sa = carve_comb(a, grid);
    const auto s_ab = superimpose_combs(a, b, grid);
    CHECK(s_ab.background_d0 == Catch::Approx(0.4));
    const auto sb = carve_comb(b, grid);
    for (const double f : {0.0, 3.3 * kMHz, 15.4 * kMHz, -27.5 * kMHz})
        CHECK(s_ab.depth_at(f) == Catch::Approx(sa.depth_at(f) + sb.depth_at(f)).epsilon(1e-9));
}

TEST_CASE("comb fit recovers the carved parameters") {
    const auto c = fig_comb();
    const auto s = carve_comb(c, wide_grid(100.0 * kKHz));
    const auto fit = fit_comb(s);
    CHECK(fit.params.delta == Catch::Approx(c.delta).epsilon(0.01));
    CHECK(fit.params.finesse == Catch::Approx(c.finesse).epsilon(0.01));
    CHECK(fit.params.tooth_depth == Catch::Approx(c.tooth_depth).epsilon(0.01));
    CHECK(fit.params.background_d0 == Catch::Approx(c.background_d0).margin(0.01));
    CHECK(fit.n_teeth == c.tooth_count());
    CHECK(fit.residual_rms < 0.01);
}

TEST_CASE("comb fit survives measurement noise") {
    const auto c = fig_comb();
    auto s = carve_comb(c, wide_grid(100.0 * kKHz));
    for (std::size_t i = 0; i < s.d.size(); ++i)
        s.d[i] *= 1.0 + 0.02 * (2.0 * rng::uniform(7, 0, i) - 1.0);
    const auto fit = fit_comb(s);
    CHECK(fit.params.delta == Catch::Approx(c.delta).epsilon(0.05));
    CHECK(fit.params.finesse == Catch::Approx(c.finesse).epsilon(0.05));
    CHECK(fit.params.tooth_depth == Catch::Approx(c.tooth_depth).epsilon(0.05));
}

TEST_CASE("comb fit separates the two published finesses") {
    // Same spacing, different tooth widths; the fit must tell 8.7 from 14.5.
    for (const double f_true : {8.7, 14.5}) {
        CombParams c;
        c.delta = 15.4 * kMHz;
        c.finesse = f_true;
        c.bandwidth = 100.0 * kMHz;
        c.tooth_depth = 3.0;
        c.background_d0 = 0.2;
        auto s = carve_comb(c, wide_grid(50.0 * kKHz));
        for (std::size_t i = 0; i < s.d.size(); ++i)
            s.d[i] *= 1.0 + 0.02 * (2.0 * rng::uniform(11, 0, i) - 1.0);
        const auto fit = fit_comb(s);
        const double other = (f_true == 8.7) ? 14.5 : 8.7;
        CHECK(std::abs(fit.params.finesse - f_true) < std::abs(fit.params.finesse - other));
    }
}

TEST_CASE("fit needs at least three teeth") {
    CombParams c;
    c.delta = 60.0 * kMHz;
    c.finesse = 8.0;
    c.bandwidth = 60.0 * kMHz;  // a single tooth
    c.tooth_depth = 2.0;
    const auto s = carve_comb(c, wide_grid(500.0 * kKHz));
    CHECK_THROWS_AS(fit_comb(s), ConfigError);
}
