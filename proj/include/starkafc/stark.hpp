#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "starkafc/errors.hpp"
#include "starkafc/units.hpp"

namespace starkafc {

// Linear Stark coefficient for the two electric-dipole subclasses, Hz per V/cm.
inline constexpr double kDefaultStarkCoefficient = 11.68 * kKHz;

// One rectangular field pulse across the crystal.
struct StarkPulse {
    double field = 0.0;     // signed, V/cm
    double start = 0.0;     // s, absolute trace time
    double duration = 0.0;  // s

    double end() const { return start + duration; }
};

// Field schedule plus the material response: the two subclasses shift by
// +/- coefficient * field, and the per-pulse coefficient scatters with
// relative width spread_rel across the ensemble.
struct StarkControl {
    double coefficient = kDefaultStarkCoefficient;  // Hz/(V/cm)
    double spread_rel = 0.0;
    std::vector<StarkPulse> pulses;

    void validate() const {
        if (!(coefficient > 0.0)) throw ConfigError("stark: coefficient <= 0");
        if (spread_rel < 0.0) throw ConfigError("stark: spread_rel < 0");
        for (const auto& p : pulses) {
            if (!(p.duration > 0.0)) throw ConfigError("stark: pulse duration <= 0");
            if (!std::isfinite(p.field)) throw ConfigError("stark: pulse field not finite");
        }
    }
};

// Frequency shift of one subclass in a static field.
inline double stark_shift(const StarkControl& c, double field) { return c.coefficient * field; }

// Separation of the two subclass lines.
inline double stark_splitting(const StarkControl& c, double field) {
    return 2.0 * stark_shift(c, field);
}

inline double overlap_length(double a, double b, double s, double e) {
    const double lo = std::max(a, s);
    const double hi = std::min(b, e);
    return hi > lo ? hi - lo : 0.0;
}

// Phase one subclass accumulates between t0 and t1 from pulse p.
inline double pulse_phase(const StarkControl& c, const StarkPulse& p, double t0, double t1) {
    return kTwoPi * c.coefficient * p.field * overlap_length(t0, t1, p.start, p.end());
}

// Phase of one subclass accumulated from the schedule start up to t.
inline double accumulated_phase(const StarkControl& c, double t) {
    double phi = 0.0;
    for (const auto& p : c.pulses) phi += pulse_phase(c, p, -1e30, t);
    return phi;
}

// Phase between the two subclasses; pi means first-order echoes are silenced.
inline double relative_phase(const StarkControl& c, double t) {
    return 2.0 * accumulated_phase(c, t);
}

// Ensemble-averaged dephasing factor multiplying the kernel for a dipole
// excited at t_abs and emitting at t_emit: subclass average gives
// cos(total phase), coefficient scatter damps it per pulse independently.
inline double pair_factor(const StarkControl& c, double t_emit, double t_abs) {
    double theta = 0.0, q = 0.0;
    for (const auto& p : c.pulses) {
        const double th = pulse_phase(c, p, t_abs, t_emit);
        theta += th;
        q += th * th;
    }
    double f = std::cos(theta);
    if (c.spread_rel > 0.0) f *= std::exp(-0.5 * c.spread_rel * c.spread_rel * q);
    return f;
}

// Echo acceptance window: order n of spacing delta, sized to the input pulse.
struct Window {
    double lo = 0.0;
    double hi = 0.0;

    double width() const { return hi - lo; }
    bool contains(double t) const { return t >= lo && t <= hi; }
};

inline double window_half_width(double input_fwhm) { return 1.5 * input_fwhm; }

inline Window echo_window(double delta, std::size_t n, double input_fwhm,
                          double input_center = 0.0) {
    const double t = input_center + static_cast<double>(n) / delta;
    const double h = window_half_width(input_fwhm);
    return {t - h, t + h};
}

namespace detail {

// Quarter-turn pulse ending just before a protected window opens.
inline StarkPulse quarter_pulse_before(double window_open, double earliest, double duration,
                                       double field, const char* what) {
    const double margin = 0.01 * duration;
    const double end = window_open - margin;
    const double start = end - duration;
    if (start < earliest)
        throw ConfigError(std::string(what) +
                          ": control pulse does not fit between input and echo window");
    return {field, start, duration};
}

}  // namespace detail

// Two-pulse on-demand schedule: pulse 1 freezes first-order emission before
// the first echo window, pulse 2 (opposite polarity) releases it before the
// n_target-th. Field strength solves coefficient * field * duration = 1/4.
inline StarkControl design_retrieval_schedule(double delta, std::size_t n_target,
                                              double pulse_duration, double input_fwhm,
                                              double input_center = 0.0,
                                              double coefficient = kDefaultStarkCoefficient) {
    if (!(delta > 0.0)) throw ConfigError("design_retrieval_schedule: delta <= 0");
    if (n_target < 2) throw ConfigError("design_retrieval_schedule: n_target must be >= 2");
    if (!(pulse_duration > 0.0)) throw ConfigError("design_retrieval_schedule: pulse duration <= 0");

    StarkControl c;
    c.coefficient = coefficient;
    const double field = 1.0 / (4.0 * coefficient * pulse_duration);
    const double h = window_half_width(input_fwhm);

    const Window w1 = echo_window(delta, 1, input_fwhm, input_center);
    c.pulses.push_back(detail::quarter_pulse_before(w1.lo, input_center + h, pulse_duration,
                                                    field, "design_retrieval_schedule"));

    const Window wn = echo_window(delta, n_target, input_fwhm, input_center);
    const double earliest2 =
        std::max(c.pulses[0].end(),
                 input_center + static_cast<double>(n_target - 1) / delta + h);
    c.pulses.push_back(detail::quarter_pulse_before(wn.lo, earliest2, pulse_duration, -field,
                                                    "design_retrieval_schedule"));
    return c;
}

// Same two-pulse scheme for the double-comb qubit memory: silence both combs'
// first-order echoes, release before the earliest second-order window.
inline StarkControl design_timebin_schedule(double delta_a, double delta_b,
                                            double bin_separation, double pulse_duration,
                                            double input_fwhm, double first_bin_center = 0.0,
                                            double coefficient = kDefaultStarkCoefficient) {
    if (!(delta_a > delta_b)) throw ConfigError("design_timebin_schedule: need delta_a > delta_b");
    const double ta = 1.0 / delta_a, tb = 1.0 / delta_b;
    if (std::abs(bin_separation - 2.0 * (tb - ta)) > 1e-12)
        throw ConfigError("design_timebin_schedule: bin separation != 2 * storage-time difference");

    StarkControl c;
    c.coefficient = coefficient;
    const double field = 1.0 / (4.0 * coefficient * pulse_duration);
    const double h = window_half_width(input_fwhm);
    const double late_center = first_bin_center + bin_separation;

    // First-order emission spans [early + ta, late + tb].
    const double first_order_open = first_bin_center + ta - h;
    c.pulses.push_back(detail::quarter_pulse_before(first_order_open, late_center + h,
                                                    pulse_duration, field,
                                                    "design_timebin_schedule"));

    // Earliest second-order window is the early bin through comb a.
    const double second_order_open = first_bin_center + 2.0 * ta - h;
    const double last_first_order = late_center + tb + h;
    const double earliest2 = std::max(c.pulses[0].end(), last_first_order);
    c.pulses.push_back(detail::quarter_pulse_before(second_order_open, earliest2, pulse_duration,
                                                    -field, "design_timebin_schedule"));
    return c;
}

struct ScheduleReport {
    bool ok = true;
    std::vector<std::string> issues;

    void flag(const std::string& msg) {
        ok = false;
        issues.push_back(msg);
    }
};

// Static checks of a schedule against a comb and input timing: pulses must
// not touch the input or any echo window up to n_target, each pulse should
// be a quarter turn, and the net rotation must end recovered.
inline ScheduleReport validate_schedule(const StarkControl& c, double delta,
                                        std::size_t n_target, double input_fwhm,
                                        double input_center = 0.0) {
    c.validate();
    ScheduleReport rep;
    if (c.pulses.empty()) {
        rep.flag("schedule has no pulses; echoes arrive on the comb clock only");
        return rep;
    }
    const double h = window_half_width(input_fwhm);
    for (std::size_t i = 0; i < c.pulses.size(); ++i) {
        const auto& p = c.pulses[i];
        const std::string tag = "pulse " + std::to_string(i + 1);
        if (overlap_length(input_center - h, input_center + h, p.start, p.end()) > 0.0)
            rep.flag(tag + " overlaps the input pulse");
        for (std::size_t n = 1; n <= n_target; ++n) {
            const Window w = echo_window(delta, n, input_fwhm, input_center);
            if (overlap_length(w.lo, w.hi, p.start, p.end()) > 0.0)
                rep.flag(tag + " overlaps echo window " + std::to_string(n));
        }
        const double turn = 4.0 * c.coefficient * std::abs(p.field) * p.duration;
        if (std::abs(turn - 1.0) > 1e-6)
            rep.flag(tag + " is not a quarter turn (got " + std::to_string(turn / 4.0) +
                     " of a cycle, want 0.25)");
    }
    const double residual = accumulated_phase(c, 1e30);
    if (std::abs(std::remainder(residual, std::numbers::pi)) > 1e-9)
        rep.flag("net rotation does not return the comb to an emitting state");
    return rep;
}

}  // namespace starkafc
