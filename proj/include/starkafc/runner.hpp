#pragma once

#include <filesystem>
#include <thread>

#include "starkafc/comb_fit.hpp"
#include "starkafc/io.hpp"
#include "starkafc/scenario.hpp"

namespace starkafc {

struct RunOptions {
    std::string out_dir = "out";
    std::string format = "both";  // csv | json | both
    std::uint64_t seed = 1;
    bool seed_set = false;  // true when given on the command line; overrides the scenario
    unsigned workers = 1;
    bool write_outputs = true;
};

namespace detail {

inline void ensure_dir(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw ConfigError("cannot create output directory: " + dir);
}

inline bool want_csv(const RunOptions& o) { return o.format == "csv" || o.format == "both"; }
inline bool want_json(const RunOptions& o) { return o.format == "json" || o.format == "both"; }

inline AbsorptionSpectrum carve_scenario_spectrum(const SingleAfcScenario& s) {
    const FrequencyAxis grid = s.grid.axis();
    if (s.has_comb_b) return superimpose_combs(s.comb, s.comb_b, grid);
    return carve_comb(s.comb, grid);
}

inline StarkControl scenario_schedule(const SingleAfcScenario& s) {
    StarkControl c;
    c.coefficient = s.stark.coefficient;
    c.spread_rel = s.stark.spread_rel;
    if (s.stark.mode == "none") return c;
    if (s.stark.mode == "pulses") {
        c.pulses = s.stark.pulses;
        return c;
    }
    c = design_retrieval_schedule(s.comb.delta, s.stark.n_target, s.stark.pulse_duration,
                                  s.input.fwhm, s.input.center, s.stark.coefficient);
    c.spread_rel = s.stark.spread_rel;
    if (s.input.has_bins) {
        const double latest = s.input.center + s.input.bin_separation;
        if (c.pulses[0].start < latest + window_half_width(s.input.fwhm))
            throw ConfigError("stark: designed first pulse collides with the late bin");
    }
    return c;
}

}  // namespace detail

struct SingleAfcResult {
    IntensityTrace trace;
    AbsorptionSpectrum spectrum;
    StarkControl schedule;
    json summary;
};

// Carve, schedule, propagate, window. Writes spectrum, trace and summary when
// asked; the summary always reports the measured echo orders next to the
// closed-form law.
inline SingleAfcResult run_single_afc(const SingleAfcScenario& s, const RunOptions& opts) {
    SingleAfcResult r;
    r.spectrum = detail::carve_scenario_spectrum(s);
    r.schedule = detail::scenario_schedule(s);
    const TimeAxis tgrid = s.trace.axis();
    r.trace = simulate_trace(r.spectrum, r.schedule, s.input.field(), tgrid);

    json echoes = json::array();
    for (const auto n : s.readout_orders) {
        const Window w = echo_window(s.comb.delta, n, s.input.fwhm, s.input.center);
        if (w.lo < tgrid.start || w.hi > tgrid.back()) continue;
        json e;
        e["order"] = n;
        e["window_ns"] = {w.lo / kNs, w.hi / kNs};
        e["efficiency"] = echo_efficiency(r.trace, w);
        e["analytic_efficiency"] = analytic_efficiency(s.comb, s.comb.readout_time(n));
        e["peak_time_ns"] =
            echo_peak_time(r.trace, s.input.center + s.comb.readout_time(n),
                           std::min(0.45 / s.comb.delta, 2.0 * s.input.fwhm)) /
            kNs;
        e["expected_time_ns"] = (s.input.center + s.comb.readout_time(n)) / kNs;
        echoes.push_back(e);
    }

    const Window wt{s.input.center - window_half_width(s.input.fwhm),
                    s.input.center + window_half_width(s.input.fwhm)};
    json summary;
    summary["kind"] = "single_afc";
    summary["echoes"] = echoes;
    summary["transmitted_fraction"] = echo_efficiency(r.trace, wt);
    summary["input_energy"] = r.trace.input_energy;
    summary["absorbed_energy"] = r.trace.absorbed_energy;
    summary["emitted_energy"] = r.trace.emitted_energy;
    summary["passivity_capped"] = r.trace.passivity_capped;
    summary["effective_depth"] = effective_depth(s.comb);
    summary["storage_time_ns"] = s.comb.storage_time() / kNs;

    json sched;
    sched["pulses"] = json::array();
    for (const auto& p : r.schedule.pulses)
        sched["pulses"].push_back({{"field_v_per_cm", p.field},
                                   {"start_ns", p.start / kNs},
                                   {"duration_ns", p.duration / kNs}});
    const auto rep = validate_schedule(r.schedule, s.comb.delta, s.stark.n_target, s.input.fwhm,
                                       s.input.center);
    sched["valid"] = rep.ok;
    sched["issues"] = rep.issues;
    summary["schedule"] = sched;
    r.summary = summary;

    if (opts.write_outputs) {
        detail::ensure_dir(opts.out_dir);
        const auto base = std::filesystem::path(opts.out_dir);
        save_spectrum(r.spectrum, (base / "spectrum").string());
        save_trace(r.trace, (base / "trace").string());
        if (detail::want_json(opts)) write_json_file((base / "summary.json").string(), summary);
        if (detail::want_csv(opts)) {
            std::string csv = "order,efficiency,analytic_efficiency,peak_time_ns\n";
            for (const auto& e : echoes)
                csv += std::to_string(e.at("order").get<std::size_t>()) + "," +
                       fmt_g(e.at("efficiency").get<double>()) + "," +
                       fmt_g(e.at("analytic_efficiency").get<double>()) + "," +
                       fmt_g(e.at("peak_time_ns").get<double>()) + "\n";
            write_text_file((base / "echoes.csv").string(), csv);
        }
    }
    return r;
}

struct TimebinRunResult {
    BenchResult bench;
    json summary;
};

inline TimebinRunResult run_timebin(const TimebinBenchConfig& cfg_in, const RunOptions& opts) {
    TimebinBenchConfig cfg = cfg_in;
    if (opts.seed_set) cfg.seed = opts.seed;
    TimebinRunResult r;
    r.bench = run_timebin_bench(cfg);

    json rows = json::array();
    for (const auto& row : r.bench.rows) rows.push_back(fidelity_row_json(row));
    r.summary["kind"] = "timebin";
    r.summary["rows"] = rows;
    r.summary["eta_early_window"] = r.bench.eta_early_window;
    r.summary["eta_late_window"] = r.bench.eta_late_window;
    r.summary["eta_fringe_max"] = r.bench.eta_fringe_max;
    r.summary["eta_fringe_min"] = r.bench.eta_fringe_min;
    r.summary["trials"] = cfg.trials;
    r.summary["seed"] = cfg.seed;

    if (opts.write_outputs) {
        detail::ensure_dir(opts.out_dir);
        const auto base = std::filesystem::path(opts.out_dir);
        write_text_file((base / "fidelity_table.txt").string(), fidelity_table_text(r.bench));
        if (detail::want_csv(opts))
            write_text_file((base / "fidelity_table.csv").string(),
                            fidelity_table_csv(r.bench));
        if (detail::want_json(opts))
            write_json_file((base / "fidelity_table.json").string(), r.summary);
    }
    return r;
}

struct PumpRunResult {
    LevelEnsemble before, after;
    AbsorptionSpectrum spectrum_before, spectrum_after;
    json summary;
};

inline PumpRunResult run_pump(const PumpScenario& p, const RunOptions& opts) {
    PumpRunResult r;
    r.before = p.ensemble();
    const FrequencyAxis grid = p.grid.axis();
    r.spectrum_before = build_initial_spectrum(r.before, grid);
    r.after = apply_pump_sweep(r.before, p.sweep, p.branching());
    r.spectrum_after = build_initial_spectrum(r.after, grid);

    const double d_before = r.spectrum_before.depth_at(p.probe);
    const double d_after = r.spectrum_after.depth_at(p.probe);
    json pops_before = json::array(), pops_after = json::array();
    for (const auto& lv : r.before.levels) pops_before.push_back(lv.population);
    for (const auto& lv : r.after.levels) pops_after.push_back(lv.population);

    r.summary["kind"] = "pump";
    r.summary["probe_mhz"] = p.probe / kMHz;
    r.summary["depth_before"] = d_before;
    r.summary["depth_after"] = d_after;
    r.summary["enhancement"] = d_after / d_before;
    r.summary["population_before"] = pops_before;
    r.summary["population_after"] = pops_after;
    r.summary["population_total_before"] = r.before.total_population();
    r.summary["population_total_after"] = r.after.total_population();

    if (opts.write_outputs) {
        detail::ensure_dir(opts.out_dir);
        const auto base = std::filesystem::path(opts.out_dir);
        save_spectrum(r.spectrum_before, (base / "spectrum_before").string());
        save_spectrum(r.spectrum_after, (base / "spectrum_after").string());
        if (detail::want_json(opts)) write_json_file((base / "summary.json").string(), r.summary);
    }
    return r;
}

// Generic run for a parsed scenario; returns the summary.
inline json run_scenario(const Scenario& sc, const RunOptions& opts) {
    if (sc.kind == "single_afc") return run_single_afc(sc.single_afc, opts).summary;
    if (sc.kind == "timebin") return run_timebin(sc.bench, opts).summary;
    if (sc.kind == "pump") return run_pump(sc.pump, opts).summary;
    throw ConfigError("run_scenario: unknown kind " + sc.kind);
}

struct SweepPoint {
    double value = 0.0;
    json summary;
};

// Re-run a scenario with one numeric field swept over a list of values.
// parameter is a JSON pointer into the scenario file. Points are distributed
// over workers; results are assembled in input order, so the output does not
// depend on the worker count.
inline std::vector<SweepPoint> sweep_scenario(const nlohmann::json& scenario_json,
                                              const std::string& parameter,
                                              const std::vector<double>& values,
                                              const RunOptions& opts) {
    if (values.empty()) throw ConfigError("sweep: empty value list");
    nlohmann::json::json_pointer ptr;
    try {
        ptr = nlohmann::json::json_pointer(parameter);
    } catch (const nlohmann::json::exception&) {
        throw ConfigError("sweep: bad JSON pointer \"" + parameter + "\"");
    }

    std::vector<SweepPoint> points(values.size());
    std::vector<std::string> errors(values.size());
    const unsigned workers = std::max(1u, opts.workers);

    auto work = [&](unsigned w) {
        for (std::size_t i = w; i < values.size(); i += workers) {
            try {
                nlohmann::json j = scenario_json;
                // Integer-valued targets (orders, counts) must stay integers.
                if (j.contains(ptr) && j.at(ptr).is_number_integer() &&
                    values[i] == std::floor(values[i]))
                    j[ptr] = static_cast<long long>(values[i]);
                else
                    j[ptr] = values[i];
                const Scenario sc = Scenario::from_json(j);
                RunOptions quiet = opts;
                quiet.write_outputs = false;
                points[i].value = values[i];
                points[i].summary = run_scenario(sc, quiet);
            } catch (const std::exception& e) {
                errors[i] = e.what();
            }
        }
    };
    if (workers == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
        for (auto& t : pool) t.join();
    }
    for (std::size_t i = 0; i < values.size(); ++i)
        if (!errors[i].empty())
            throw ConfigError("sweep point " + std::to_string(i) + " (value " +
                              fmt_g(values[i]) + "): " + errors[i]);
    return points;
}

// Flatten sweep results to one CSV row per point.
inline std::string sweep_csv(const std::vector<SweepPoint>& points) {
    std::string out = "value";
    if (!points.empty() && points.front().summary.contains("echoes")) {
        for (const auto& e : points.front().summary.at("echoes"))
            out += ",eta_order_" + std::to_string(e.at("order").get<std::size_t>());
        out += ",transmitted_fraction\n";
        for (const auto& p : points) {
            out += fmt_g(p.value);
            for (const auto& e : p.summary.at("echoes"))
                out += "," + fmt_g(e.at("efficiency").get<double>());
            out += "," + fmt_g(p.summary.at("transmitted_fraction").get<double>()) + "\n";
        }
    } else {
        out += ",enhancement\n";
        for (const auto& p : points) {
            out += fmt_g(p.value) + "," +
                   fmt_g(p.summary.value("enhancement", 0.0)) + "\n";
        }
    }
    return out;
}

}  // namespace starkafc
