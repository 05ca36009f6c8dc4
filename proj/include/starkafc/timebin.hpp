#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "starkafc/classical_bound.hpp"
#include "starkafc/comb.hpp"
#include "starkafc/detection.hpp"
#include "starkafc/fidelity.hpp"

namespace starkafc {

// Time-bin qubit: complex amplitudes on the early and late bin.
struct QubitState {
    cplx a_early{1.0, 0.0};
    cplx a_late{0.0, 0.0};
    std::string label = "e";

    // Phase of the late amplitude relative to the early one.
    double alpha() const { return std::arg(a_late / a_early); }
};

inline std::array<QubitState, 4> standard_states() {
    const double r = 1.0 / std::numbers::sqrt2;
    std::array<QubitState, 4> s;
    s[0] = {cplx{1.0, 0.0}, cplx{0.0, 0.0}, "e"};
    s[1] = {cplx{0.0, 0.0}, cplx{1.0, 0.0}, "l"};
    s[2] = {cplx{r, 0.0}, cplx{0.0, r}, "e+il"};
    const double a = 0.75 * std::numbers::pi;
    s[3] = {cplx{r, 0.0}, r * cplx{std::cos(a), std::sin(a)}, "e+e(3pi/4)l"};
    return s;
}

// Double-comb qubit memory bench. Two interleaved combs store the two bins;
// reading out at second order makes the early bin through the slow comb and
// the late bin through the fast comb arrive together and interfere. The
// analyzer phase is set by shifting the fast comb by delta_f, with
// beta_offset radians of deliberate miscalibration.
struct TimebinBenchConfig {
    double delta_a = 6.25 * kMHz;           // fast comb: 160 ns storage
    double bin_separation = 40.0 * kNs;     // fixes delta_b: 180 ns storage
    double gamma = 6.25 * kMHz / 7.8;       // tooth FWHM, both combs
    double depth_a = 5.4957;
    double depth_b = 4.8852;
    double background_d0 = 0.2;
    double comb_bandwidth = 100.0 * kMHz;
    double input_fwhm = 12.0 * kNs;
    double control_pulse = 18.0 * kNs;
    double stark_coefficient = kDefaultStarkCoefficient;
    double window_width = 20.0 * kNs;
    double beta_offset = 0.274;             // rad
    DetectorModel detector{};
    std::vector<double> mu_list{0.2, 0.4, 0.8, 1.6, 3.2};
    std::uint64_t trials = 5000;
    std::uint64_t seed = 1;
    double bound_eta = 0.069;               // memory efficiency fed to the bound

    double delta_b() const { return 1.0 / (1.0 / delta_a + 0.5 * bin_separation); }
    double analyzer_delay() const { return 2.0 / delta_a; }

    void validate() const {
        if (!(delta_a > 0.0)) throw ConfigError("bench: delta_a <= 0");
        if (!(bin_separation > 0.0)) throw ConfigError("bench: bin_separation <= 0");
        if (mu_list.empty()) throw ConfigError("bench: empty mu list");
        if (trials == 0) throw ConfigError("bench: zero trials");
        detector.validate();
    }
};

struct FidelityRow {
    double mu = 0.0;
    double f_early = 0.0, f_early_se = 0.0;
    double f_late = 0.0, f_late_se = 0.0;
    double f_plus_i = 0.0, f_plus_i_se = 0.0;
    double f_plus_3pi4 = 0.0, f_plus_3pi4_se = 0.0;
    double f_total = 0.0, f_total_se = 0.0;
    double bound = 0.0;
    double violation_sigma = 0.0;
};

struct BenchResult {
    std::vector<FidelityRow> rows;
    double eta_early_window = 0.0;  // per-photon window fractions, diagnostics
    double eta_late_window = 0.0;
    double eta_fringe_max = 0.0;
    double eta_fringe_min = 0.0;
};

namespace detail {

struct TimebinMedium {
    AbsorptionSpectrum spectrum;
    StarkControl control;
};

// Carve both combs into one medium, the fast comb offset by delta_f, and
// design the silencing / release schedule around the bin times.
inline TimebinMedium make_timebin_medium(const TimebinBenchConfig& cfg, double delta_f) {
    const double gmin = cfg.gamma;
    FrequencyAxis grid{-1.5 * 0.5 * cfg.comb_bandwidth - 25.0 * kMHz, gmin / 12.0, 0};
    grid.n = static_cast<std::size_t>(std::ceil(-2.0 * grid.start / grid.step)) + 1;

    CombParams a;
    a.delta = cfg.delta_a;
    a.finesse = cfg.delta_a / cfg.gamma;
    a.bandwidth = cfg.comb_bandwidth;
    a.tooth_depth = cfg.depth_a;
    a.background_d0 = cfg.background_d0;
    a.center = delta_f;

    CombParams b = a;
    b.delta = cfg.delta_b();
    b.finesse = b.delta / cfg.gamma;
    b.tooth_depth = cfg.depth_b;
    b.background_d0 = 0.0;
    b.center = 0.0;

    TimebinMedium m;
    m.spectrum = superimpose_combs(a, b, grid);
    m.control = design_timebin_schedule(cfg.delta_a, cfg.delta_b(), cfg.bin_separation,
                                        cfg.control_pulse, cfg.input_fwhm, 0.0,
                                        cfg.stark_coefficient);
    return m;
}

inline TimeAxis timebin_trace_grid(const TimebinBenchConfig& cfg) {
    const double t_end = 2.0 / cfg.delta_b() + cfg.bin_separation + 4.0 * cfg.input_fwhm;
    const double t_start = -4.0 * cfg.input_fwhm;
    const double dt = 0.25 * kNs;
    TimeAxis g{t_start, dt, static_cast<std::size_t>(std::ceil((t_end - t_start) / dt)) + 1};
    return g;
}

inline InputField qubit_input(const TimebinBenchConfig& cfg, const QubitState& st) {
    InputField in;
    in.fwhm = cfg.input_fwhm;
    in.components.clear();
    in.components.push_back({st.a_early, 0.0});
    in.components.push_back({st.a_late, cfg.bin_separation});
    return in;
}

}  // namespace detail

// The three readout windows: early bin through the fast comb, the shared
// interference slot, late bin through the slow comb.
struct TimebinWindows {
    Window early;         // early bin at 2/delta_a
    Window interference;  // common slot: early at 2/delta_b meets late at separation + 2/delta_a
    Window late;          // late bin at separation + 2/delta_b
};

inline TimebinWindows timebin_windows(const TimebinBenchConfig& cfg) {
    const double h = 0.5 * cfg.window_width;
    const double ta2 = 2.0 / cfg.delta_a;
    const double tb2 = 2.0 / cfg.delta_b();
    TimebinWindows w;
    w.early = {ta2 - h, ta2 + h};
    w.interference = {tb2 - h, tb2 + h};
    w.late = {tb2 + cfg.bin_separation - h, tb2 + cfg.bin_separation + h};
    return w;
}

// Analyzer phase -> fast-comb frequency shift.
inline double beta_to_comb_shift(const TimebinBenchConfig& cfg, double beta) {
    return beta / (kTwoPi * cfg.analyzer_delay());
}

// Full fidelity-versus-mu sweep in the shape of the fidelity table: basis
// states are scored by correct-versus-wrong window counts, superpositions by
// fringe visibility at the two analyzer settings, all from the same
// counter-seeded detector draws.
inline BenchResult run_timebin_bench(const TimebinBenchConfig& cfg) {
    cfg.validate();
    const auto states = standard_states();
    const auto windows = timebin_windows(cfg);
    const TimeAxis tgrid = detail::timebin_trace_grid(cfg);

    // Basis medium (no analyzer shift) and the four analyzer settings.
    const auto basis_medium = detail::make_timebin_medium(cfg, 0.0);
    const IntensityTrace tr_e =
        simulate_trace(basis_medium.spectrum, basis_medium.control,
                       detail::qubit_input(cfg, states[0]), tgrid);
    const IntensityTrace tr_l =
        simulate_trace(basis_medium.spectrum, basis_medium.control,
                       detail::qubit_input(cfg, states[1]), tgrid);

    // For superposition alpha, constructive at beta = -alpha (+ the configured
    // miscalibration), destructive half a turn away.
    std::array<IntensityTrace, 4> tr_fringe;  // [state 2 max, state 2 min, state 3 max, state 3 min]
    for (int si = 0; si < 2; ++si) {
        const auto& st = states[2 + si];
        for (int setting = 0; setting < 2; ++setting) {
            const double beta = -st.alpha() + cfg.beta_offset +
                                (setting == 1 ? std::numbers::pi : 0.0);
            const auto medium = detail::make_timebin_medium(cfg, beta_to_comb_shift(cfg, beta));
            tr_fringe[2 * si + setting] = simulate_trace(
                medium.spectrum, medium.control, detail::qubit_input(cfg, st), tgrid);
        }
    }

    BenchResult out;
    out.eta_early_window = echo_efficiency(tr_e, windows.early);
    out.eta_late_window = echo_efficiency(tr_l, windows.late);
    out.eta_fringe_max = echo_efficiency(tr_fringe[0], windows.interference);
    out.eta_fringe_min = echo_efficiency(tr_fringe[1], windows.interference);

    for (std::size_t mi = 0; mi < cfg.mu_list.size(); ++mi) {
        const double mu = cfg.mu_list[mi];
        FidelityRow row;
        row.mu = mu;

        auto stream = [&](std::uint64_t run, std::uint64_t window) {
            return (mi * 16 + run) * 4 + window;
        };
        auto counts = [&](const IntensityTrace& tr, const Window& w, std::uint64_t run,
                          std::uint64_t window) {
            const double p = click_probability(tr, w, mu, cfg.detector);
            return static_cast<double>(
                count_clicks(p, cfg.trials, cfg.seed, stream(run, window)));
        };

        const double e_ok = counts(tr_e, windows.early, 0, 0);
        const double e_bad = counts(tr_e, windows.late, 0, 2);
        row.f_early = fidelity_from_counts(e_ok, e_bad);
        row.f_early_se = counts_fidelity_se(e_ok, e_bad);

        const double l_ok = counts(tr_l, windows.late, 1, 2);
        const double l_bad = counts(tr_l, windows.early, 1, 0);
        row.f_late = fidelity_from_counts(l_ok, l_bad);
        row.f_late_se = counts_fidelity_se(l_ok, l_bad);

        double f_pm[2], f_pm_se[2];
        for (int si = 0; si < 2; ++si) {
            const double cmax = counts(tr_fringe[2 * si], windows.interference, 2 + 2 * si, 1);
            const double cmin = counts(tr_fringe[2 * si + 1], windows.interference, 3 + 2 * si, 1);
            const double v = visibility(std::max(cmax, cmin), std::min(cmax, cmin));
            f_pm[si] = fidelity_from_visibility(v);
            f_pm_se[si] = 0.5 * visibility_se(std::max(cmax, cmin), std::min(cmax, cmin));
        }
        row.f_plus_i = f_pm[0];
        row.f_plus_i_se = f_pm_se[0];
        row.f_plus_3pi4 = f_pm[1];
        row.f_plus_3pi4_se = f_pm_se[1];

        const double f_el = 0.5 * (row.f_early + row.f_late);
        const double f_sup = 0.5 * (f_pm[0] + f_pm[1]);
        row.f_total = total_fidelity(f_el, f_sup);
        const double var_el = 0.25 * (row.f_early_se * row.f_early_se +
                                      row.f_late_se * row.f_late_se);
        const double var_sup = 0.25 * (f_pm_se[0] * f_pm_se[0] + f_pm_se[1] * f_pm_se[1]);
        row.f_total_se = std::sqrt(var_el / 9.0 + 4.0 * var_sup / 9.0);

        row.bound = classical_bound(mu, cfg.bound_eta);
        row.violation_sigma = row.f_total_se > 0.0
                                  ? (row.f_total - row.bound) / row.f_total_se
                                  : 0.0;
        out.rows.push_back(row);
    }
    return out;
}

// Echo signal-to-noise: click counts in a narrow window on the echo versus an
// equally sized empty window, as a counts ratio.
inline double storage_snr(const IntensityTrace& tr, const Window& signal, const Window& empty,
                          double mu, const DetectorModel& det, std::uint64_t trials,
                          std::uint64_t seed) {
    if (std::abs(signal.width() - empty.width()) > 1e-15)
        throw ConfigError("storage_snr: windows must have equal width");
    const double ps = click_probability(tr, signal, mu, det);
    const double pn = click_probability(tr, empty, mu, det);
    const auto cs = count_clicks(ps, trials, seed, 101);
    const auto cn = count_clicks(pn, trials, seed, 102);
    if (cn == 0) throw NumericalError("storage_snr: no noise counts; raise trials");
    return static_cast<double>(cs) / static_cast<double>(cn);
}

}  // namespace starkafc
