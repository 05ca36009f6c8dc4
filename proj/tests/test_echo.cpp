#include <catch2/catch_amalgamated.hpp>

#include "starkafc/comb.hpp"
#include "starkafc/echo_sim.hpp"

using namespace starkafc;

namespace {

CombParams make_comb(double delta_mhz, double finesse, double depth, double d0,
                     double center_mhz = 0.0) {
    CombParams c;
    c.delta = delta_mhz * kMHz;
    c.finesse = finesse;
    c.bandwidth = 100.0 * kMHz;
    c.tooth_depth = depth;
    c.background_d0 = d0;
    c.center = center_mhz * kMHz;
    return c;
}

AbsorptionSpectrum carve(const CombParams& c, double step_khz = 150.0, double half_mhz = 150.0) {
    const double step = step_khz * kKHz;
    const auto n = 2 * static_cast<std::size_t>(std::ceil(half_mhz * kMHz / step)) + 1;
    return carve_comb(c, {-0.5 * step * static_cast<double>(n - 1), step, n});
}

TimeAxis trace_grid(double start_ns, double end_ns, double step_ns = 0.25) {
    const auto n =
        static_cast<std::size_t>(std::llround((end_ns - start_ns) / step_ns)) + 1;
    return {start_ns * kNs, step_ns * kNs, n};
}

double order_efficiency(const IntensityTrace& tr, const CombParams& c, std::size_t n,
                        double fwhm) {
    return echo_efficiency(tr, echo_window(c.delta, n, fwhm));
}

}  // namespace

TEST_CASE("simulated first-order echo follows the decay law") {
    const double fwhm = 15.0 * kNs;
    const auto tgrid = trace_grid(-50.0, 250.0);
    for (const auto& [depth, d0] : {std::pair{2.0, 0.0}, std::pair{3.0, 0.15},
                                    std::pair{4.0, 0.3}, std::pair{5.0, 0.6}}) {
        const auto c = make_comb(6.25, 8.7, depth, d0);
        const auto tr = simulate_trace(carve(c, 50.0), {}, single_pulse(fwhm), tgrid);
        const double eta = order_efficiency(tr, c, 1, fwhm);
        CHECK(eta == Catch::Approx(analytic_efficiency(c, c.storage_time())).epsilon(0.05));
    }
}

TEST_CASE("published comb reproduces its echo train") {
    const auto c = make_comb(15.4, 8.5556, 4.208, 0.3);
    const double fwhm = 15.0 * kNs;
    const auto tr = simulate_trace(carve(c), {}, single_pulse(fwhm), trace_grid(-50.0, 250.0));
    CHECK_FALSE(tr.passivity_capped);
    // First echo near 65 ns at 10.9 % efficiency.
    const double eta1 = order_efficiency(tr, c, 1, fwhm);
    CHECK(eta1 == Catch::Approx(0.10914697846889695).epsilon(0.03));
    // Later orders keep following the law.
    for (const std::size_t n : {2u, 3u})
        CHECK(order_efficiency(tr, c, n, fwhm) ==
              Catch::Approx(analytic_efficiency(c, c.readout_time(n))).epsilon(0.10));
    // Echoes arrive on the comb clock.
    for (const std::size_t n : {1u, 2u, 3u})
        CHECK(echo_peak_time(tr, c.readout_time(n), 15.0 * kNs) ==
              Catch::Approx(c.readout_time(n)).margin(0.5 * kNs));
}

TEST_CASE("response is linear in the input field") {
    const auto c = make_comb(15.4, 8.5556, 4.208, 0.3);
    const auto tgrid = trace_grid(-50.0, 250.0);
    const auto full = simulate_trace(carve(c), {}, single_pulse(15.0 * kNs, 0.0, 1.0), tgrid);
    const auto dim = simulate_trace(carve(c), {}, single_pulse(15.0 * kNs, 0.0, 0.3), tgrid);
    double peak = 0.0;
    for (const double v : full.intensity) peak = std::max(peak, v);
    REQUIRE(peak > 0.0);
    for (std::size_t i = 0; i < tgrid.n; ++i)
        CHECK(std::abs(dim.intensity[i] - 0.09 * full.intensity[i]) <= 1e-12 * peak);
    CHECK(dim.input_energy == Catch::Approx(0.09 * full.input_energy).epsilon(1e-12));
}

TEST_CASE("quarter-turn pair silences the first echo and recovers the second") {
    const auto c = make_comb(6.25, 7.8, 3.623, 0.3);
    const double fwhm = 15.0 * kNs;
    const auto s = carve(c, 50.0);
    const auto tgrid = trace_grid(-50.0, 400.0);
    const auto free_run = simulate_trace(s, {}, single_pulse(fwhm), tgrid);
    const auto gated =
        simulate_trace(s, design_retrieval_schedule(c.delta, 2, 18.0 * kNs, fwhm),
                       single_pulse(fwhm), tgrid);
    const double f1 = order_efficiency(free_run, c, 1, fwhm);
    const double f2 = order_efficiency(free_run, c, 2, fwhm);
    const double g1 = order_efficiency(gated, c, 1, fwhm);
    const double g2 = order_efficiency(gated, c, 2, fwhm);
    REQUIRE(f1 > 0.01);
    CHECK(g1 / f1 <= 1e-4);
    CHECK(g2 / f2 >= 0.99);
    CHECK(g2 / f2 <= 1.005);
}

TEST_CASE("coefficient scatter damps the recovered echo monotonically") {
    // Short trace so the direct pair sum stays cheap.
    const auto c = make_comb(15.4, 8.5556, 4.208, 0.3);
    const double fwhm = 8.0 * kNs;
    const auto s = carve(c, 150.0, 75.0);
    const auto tgrid = trace_grid(-50.0, 150.0, 0.5);
    auto control = design_retrieval_schedule(c.delta, 2, 10.0 * kNs, fwhm);

    auto eta2 = [&](double spread) {
        control.spread_rel = spread;
        const auto tr = simulate_trace(s, control, single_pulse(fwhm), tgrid);
        return order_efficiency(tr, c, 2, fwhm);
    };
    const double e0 = eta2(0.0);
    const double e1 = eta2(0.1);
    const double e2 = eta2(0.2);
    REQUIRE(e0 > 1e-3);
    CHECK(e1 < e0);
    CHECK(e2 < e1);
    // Intensity damping of a recovered pair of quarter turns: exp(-s^2 pi^2 / 2).
    CHECK(e1 / e0 == Catch::Approx(std::exp(-0.01 * std::numbers::pi * std::numbers::pi / 2.0))
                         .epsilon(0.02));
}

TEST_CASE("direct pair sum agrees with the factorized path") {
    const auto c = make_comb(15.4, 8.5556, 4.208, 0.3);
    const double fwhm = 8.0 * kNs;
    const auto s = carve(c, 150.0, 75.0);
    const auto tgrid = trace_grid(-50.0, 150.0, 0.5);
    auto control = design_retrieval_schedule(c.delta, 2, 10.0 * kNs, fwhm);

    control.spread_rel = 0.0;
    const auto fast = simulate_trace(s, control, single_pulse(fwhm), tgrid);
    control.spread_rel = 1e-300;  // slow path, vanishing damping
    const auto slow = simulate_trace(s, control, single_pulse(fwhm), tgrid);

    double peak = 0.0;
    for (const double v : fast.intensity) peak = std::max(peak, std::sqrt(v));
    double worst = 0.0;
    for (std::size_t i = 0; i < tgrid.n; ++i)
        worst = std::max(worst, std::abs(fast.field[i] - slow.field[i]));
    CHECK(worst <= 1e-9 * peak);
}

TEST_CASE("re-emission never exceeds what was absorbed") {
    // Deep comb with narrow teeth: the bare order sum would top the absorbed
    // energy, so the cap must engage.
    const auto c = make_comb(25.0, 12.5, 23.5, 0.0);
    const double fwhm = 6.0 * kNs;
    const auto tr = simulate_trace(carve(c), {}, single_pulse(fwhm), trace_grid(-50.0, 460.0));
    CHECK(tr.passivity_capped);
    CHECK(tr.emitted_energy == Catch::Approx(tr.absorbed_energy).epsilon(1e-9));
    double eta_sum = 0.0;
    for (std::size_t n = 1; n <= 10; ++n) eta_sum += order_efficiency(tr, c, n, fwhm);
    CHECK(eta_sum <= tr.absorbed_energy / tr.input_energy + 1e-9);
    CHECK(eta_sum <= 1.0);
}

TEST_CASE("structureless medium only attenuates") {
    AbsorptionSpectrum s;
    const double step = 150.0 * kKHz;
    s.grid = {-150.0 * kMHz, step, 2001};
    s.background_d0 = 0.5;
    s.d.assign(2001, 0.5);
    const auto tr = simulate_trace(s, {}, single_pulse(15.0 * kNs), trace_grid(-50.0, 250.0));
    // Transmitted pulse attenuated by exp(-d).
    CHECK(echo_efficiency(tr, {-30.0 * kNs, 30.0 * kNs}) ==
          Catch::Approx(std::exp(-0.5)).epsilon(1e-3));
    // No structure, no echo.
    CHECK(echo_efficiency(tr, {140.0 * kNs, 180.0 * kNs}) <= 1e-12);
    CHECK(tr.emitted_energy <= 1e-12 * tr.input_energy);
}

TEST_CASE("comb detuning writes its phase onto the echo") {
    // Shifting the whole comb by df turns into an echo phase 2 pi df t, the
    // fringe mechanism used by the interference analyzer.
    const double fwhm = 15.0 * kNs;
    const auto tgrid = trace_grid(-50.0, 360.0);
    const double t_read = 320.0 * kNs;

    std::vector<double> shifts_mhz{-0.5, -0.25, 0.0, 0.25, 0.5};
    std::vector<cplx> at_read;
    for (const double sh : shifts_mhz) {
        const auto c = make_comb(6.25, 7.8, 3.623, 0.3, sh);
        const auto tr = simulate_trace(carve(c, 50.0), {}, single_pulse(fwhm), tgrid);
        at_read.push_back(tr.field[tr.grid.index_near(t_read)]);
    }

    const cplx ref = at_read[2];
    REQUIRE(std::abs(ref) > 0.0);
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    const auto m = static_cast<double>(shifts_mhz.size());
    for (std::size_t i = 0; i < at_read.size(); ++i) {
        const double x = shifts_mhz[i] * kMHz;
        const double y = std::arg(at_read[i] * std::conj(ref));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    CHECK(slope == Catch::Approx(kTwoPi * t_read).epsilon(0.01));
}

TEST_CASE("simulation rejects unusable setups") {
    const auto c = make_comb(15.4, 8.5556, 4.208, 0.3);
    const auto s = carve(c);
    // Input tail sticks out of the trace.
    CHECK_THROWS_AS(simulate_trace(s, {}, single_pulse(15.0 * kNs), trace_grid(-40.0, 200.0)),
                    ConfigError);
    // Time step cannot carry the spectral bandwidth.
    CHECK_THROWS_AS(simulate_trace(s, {}, single_pulse(15.0 * kNs), trace_grid(-50.0, 250.0, 2.0)),
                    ConfigError);
    // Identically zero input field.
    CHECK_THROWS_AS(
        simulate_trace(s, {}, single_pulse(15.0 * kNs, 0.0, 0.0), trace_grid(-50.0, 250.0)),
        ConfigError);

    const auto tr = simulate_trace(s, {}, single_pulse(15.0 * kNs), trace_grid(-50.0, 180.0));
    CHECK_THROWS_AS(echo_efficiency(tr, {190.0 * kNs, 230.0 * kNs}), ConfigError);
    CHECK_THROWS_AS(echo_peak_time(tr, 190.0 * kNs, 15.0 * kNs), ConfigError);
}

TEST_CASE("overfine spectra are refused rather than mangled") {
    AbsorptionSpectrum s;
    s.grid = {-150.0 * kMHz, 0.5 * kKHz, 600001};
    s.background_d0 = 0.1;
    s.d.assign(600001, 0.1);
    CHECK_THROWS_AS(simulate_trace(s, {}, single_pulse(10.0 * kNs), trace_grid(-50.0, 50.0)),
                    NumericalError);
}
