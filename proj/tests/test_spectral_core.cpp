#include <catch2/catch_amalgamated.hpp>

#include "starkafc/hyperfine.hpp"
#include "starkafc/rng.hpp"

using namespace starkafc;

TEST_CASE("axis points and bounds") {
    Axis a{-10.0, 2.5, 9};
    CHECK(a.point(0) == -10.0);
    CHECK(a.back() == Catch::Approx(10.0));
    CHECK(a.span() == Catch::Approx(20.0));
    CHECK(a.contains(0.0));
    CHECK_FALSE(a.contains(10.1));
    CHECK(a.index_near(-10.0) == 0);
    CHECK(a.index_near(-8.9) == 0);
    CHECK(a.index_near(-8.7) == 1);
    CHECK(a.index_near(99.0) == 8);
    CHECK_THROWS_AS((Axis{0.0, 0.0, 9}.validate("t")), ConfigError);
    CHECK_THROWS_AS((Axis{0.0, 1.0, 1}.validate("t")), ConfigError);
}

TEST_CASE("spectrum interpolation is linear between samples") {
    AbsorptionSpectrum s;
    s.grid = {0.0, 1.0, 3};
    s.d = {1.0, 3.0, 2.0};
    s.background_d0 = 0.5;
    CHECK(s.depth_at(0.5) == Catch::Approx(2.0));
    CHECK(s.depth_at(1.75) == Catch::Approx(2.25));
    CHECK(s.depth_at(2.0) == Catch::Approx(2.0));
    CHECK_THROWS_AS(s.depth_at(-0.1), ConfigError);
    CHECK(s.depth_or_background(-5.0) == 0.5);
    CHECK(s.depth_or_background(99.0) == 0.5);
}

TEST_CASE("gaussian shape hits half maximum at half the FWHM") {
    CHECK(gaussian_fwhm(0.0, 3.0) == 1.0);
    CHECK(gaussian_fwhm(1.5, 3.0) == Catch::Approx(0.5).epsilon(1e-12));
    CHECK(gaussian_fwhm(-1.5, 3.0) == Catch::Approx(0.5).epsilon(1e-12));
    CHECK(fwhm_to_sigma(kFwhmPerSigma) == Catch::Approx(1.0));
    CHECK(sigma_to_fwhm(fwhm_to_sigma(7.7)) == Catch::Approx(7.7));
}

TEST_CASE("initial spectrum superposes the sub-lines") {
    const auto ens = default_ensemble();
    REQUIRE(ens.levels.size() == 8);
    CHECK(ens.total_population() == Catch::Approx(1.0).epsilon(1e-12));
    FrequencyAxis grid{-1000.0 * kMHz, 1.0 * kMHz, 2001};
    const auto s = build_initial_spectrum(ens, grid);
    // Depth on the +100 MHz sub-line: its own peak plus the neighbours' tails.
    CHECK(s.depth_at(100.0 * kMHz) == Catch::Approx(0.7608500983910074).epsilon(1e-9));
    // Symmetric profile.
    CHECK(s.depth_at(-300.0 * kMHz) == Catch::Approx(s.depth_at(300.0 * kMHz)).epsilon(1e-12));
    const auto s2 = build_initial_spectrum(ens, grid, 0.25);
    CHECK(s2.depth_at(100.0 * kMHz) - s.depth_at(100.0 * kMHz) == Catch::Approx(0.25));
}

TEST_CASE("band fraction follows the error function") {
    const double lo = -900.0 * kMHz, hi = -100.0 * kMHz;
    CHECK(band_fraction(-100.0 * kMHz, 150.0 * kMHz, lo, hi) == Catch::Approx(0.5).epsilon(1e-12));
    CHECK(band_fraction(-500.0 * kMHz, 150.0 * kMHz, lo, hi) ==
          Catch::Approx(0.9999999996603803).epsilon(1e-12));
    CHECK(band_fraction(300.0 * kMHz, 150.0 * kMHz, lo, hi) < 1e-9);
}

TEST_CASE("branching matrices are row stochastic") {
    const auto id = BranchingMatrix::identity(8);
    CHECK_NOTHROW(id.validate());
    const auto nn = BranchingMatrix::nearest_neighbor(8, 0.25);
    CHECK_NOTHROW(nn.validate());
    CHECK(nn.at(0, 1) == 0.25);
    CHECK(nn.at(0, 0) == 0.75);  // reflecting edge keeps the row stochastic
    CHECK(nn.at(3, 2) == 0.25);
    CHECK(nn.at(3, 3) == 0.5);
    CHECK_THROWS_AS(BranchingMatrix::nearest_neighbor(8, 0.6), ConfigError);
    BranchingMatrix bad = nn;
    bad.p[0] += 0.1;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}

namespace {

PumpSweep red_sweep(double rate, std::size_t reps) {
    PumpSweep sw;
    sw.center = -500.0 * kMHz;
    sw.bandwidth = 800.0 * kMHz;
    sw.pump_rate = rate;
    sw.duration = 1.0 * kMs;
    sw.repetitions = reps;
    return sw;
}

}  // namespace

TEST_CASE("zero pump rate leaves the ensemble unchanged") {
    const auto ens = default_ensemble();
    const auto out = apply_pump_sweep(ens, red_sweep(0.0, 10), BranchingMatrix::nearest_neighbor(8, 0.25));
    for (std::size_t j = 0; j < 8; ++j)
        CHECK(out.levels[j].population == ens.levels[j].population);
}

TEST_CASE("pumping conserves population") {
    const auto ens = default_ensemble();
    for (const double beta : {0.0, 0.1, 0.25, 0.5}) {
        const auto out = apply_pump_sweep(ens, red_sweep(200.0, 1500),
                                          BranchingMatrix::nearest_neighbor(8, beta));
        CHECK(out.total_population() == Catch::Approx(1.0).epsilon(1e-9));
        for (const auto& lv : out.levels) CHECK(lv.population >= -1e-9);
    }
}

TEST_CASE("identity branching makes pumping a no-op") {
    // Whatever leaves a level comes straight back: populations freeze, so
    // nothing outside the swept band can ever grow.
    const auto ens = default_ensemble();
    const auto out = apply_pump_sweep(ens, red_sweep(200.0, 100), BranchingMatrix::identity(8));
    for (std::size_t j = 0; j < 8; ++j)
        CHECK(out.levels[j].population == Catch::Approx(0.125).epsilon(1e-12));
}

TEST_CASE("doubling repetitions never refills the swept band") {
    const auto ens = default_ensemble();
    const auto nn = BranchingMatrix::nearest_neighbor(8, 0.25);
    double prev = 1.0;
    for (const std::size_t reps : {5u, 10u, 20u, 40u}) {
        const auto out = apply_pump_sweep(ens, red_sweep(200.0, reps), nn);
        double in_band = 0.0;
        for (std::size_t j = 0; j < 4; ++j) in_band += out.levels[j].population;
        CHECK(in_band <= prev + 1e-12);
        prev = in_band;
    }
}

TEST_CASE("red-detuned sweep piles population onto the preparation line") {
    const auto ens = default_ensemble();
    const auto out = apply_pump_sweep(ens, red_sweep(200.0, 1500),
                                      BranchingMatrix::nearest_neighbor(8, 0.25));
    FrequencyAxis grid{-1000.0 * kMHz, 2.0 * kMHz, 1001};
    const auto before = build_initial_spectrum(ens, grid);
    const auto after = build_initial_spectrum(out, grid);
    const double probe = 100.0 * kMHz;
    CHECK(after.depth_at(probe) / before.depth_at(probe) > 2.0);
    // The swept band itself is emptied.
    CHECK(after.depth_at(-500.0 * kMHz) < 0.05 * before.depth_at(-500.0 * kMHz));
}

TEST_CASE("runaway step counts are refused") {
    const auto ens = default_ensemble();
    CHECK_THROWS_AS(
        apply_pump_sweep(ens, red_sweep(1e12, 1500), BranchingMatrix::nearest_neighbor(8, 0.25)),
        NumericalError);
}

TEST_CASE("pump preconditions are enforced") {
    const auto ens = default_ensemble();
    auto sw = red_sweep(100.0, 10);
    CHECK_THROWS_AS(apply_pump_sweep(ens, sw, BranchingMatrix::identity(4)), ConfigError);
    sw.bandwidth = 0.0;
    CHECK_THROWS_AS(apply_pump_sweep(ens, sw, BranchingMatrix::identity(8)), ConfigError);
    LevelEnsemble tiny;
    tiny.levels = {{0.0, 1.0}};
    tiny.sub_linewidth = 1.0 * kMHz;
    tiny.peak_d = 1.0;
    CHECK_THROWS_AS(apply_pump_sweep(tiny, red_sweep(100.0, 10), BranchingMatrix::identity(1)),
                    ConfigError);
}
