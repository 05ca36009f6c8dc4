#pragma once

#include <fstream>
#include <set>
#include <string>

#include <json.hpp>

#include "starkafc/comb.hpp"
#include "starkafc/hyperfine.hpp"
#include "starkafc/stark.hpp"
#include "starkafc/timebin.hpp"

namespace starkafc {

// Scenario files are strict: unknown keys are rejected with their path so a
// typo never silently falls back to a default.
inline void check_keys(const nlohmann::json& j, const std::string& ctx,
                       const std::set<std::string>& allowed) {
    if (!j.is_object()) throw ConfigError(ctx + ": expected an object");
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (!allowed.count(key)) throw ConfigError(ctx + ": unknown key \"" + key + "\"");
    }
}

namespace detail {

inline const nlohmann::json& need(const nlohmann::json& j, const std::string& ctx,
                                  const char* key) {
    auto it = j.find(key);
    if (it == j.end()) throw ConfigError(ctx + ": missing key \"" + key + "\"");
    return *it;
}

inline double num(const nlohmann::json& j, const std::string& ctx, const char* key) {
    const auto& v = need(j, ctx, key);
    if (!v.is_number()) throw ConfigError(ctx + "/" + key + ": expected a number");
    return v.get<double>();
}

inline double num_or(const nlohmann::json& j, const std::string& ctx, const char* key,
                     double fallback) {
    if (!j.contains(key)) return fallback;
    return num(j, ctx, key);
}

inline std::uint64_t uint_or(const nlohmann::json& j, const std::string& ctx, const char* key,
                             std::uint64_t fallback) {
    if (!j.contains(key)) return fallback;
    const auto& v = j.at(key);
    if (!v.is_number_unsigned() && !v.is_number_integer())
        throw ConfigError(ctx + "/" + key + ": expected an integer");
    const auto i = v.get<long long>();
    if (i < 0) throw ConfigError(ctx + "/" + key + ": expected a non-negative integer");
    return static_cast<std::uint64_t>(i);
}

inline std::string str(const nlohmann::json& j, const std::string& ctx, const char* key) {
    const auto& v = need(j, ctx, key);
    if (!v.is_string()) throw ConfigError(ctx + "/" + key + ": expected a string");
    return v.get<std::string>();
}

}  // namespace detail

struct GridSpec {
    double span = 0.0;  // Hz, full width centred on zero
    double step = 0.0;  // Hz

    FrequencyAxis axis() const {
        FrequencyAxis g;
        g.step = step;
        g.n = 2 * static_cast<std::size_t>(std::ceil(0.5 * span / step)) + 1;
        g.start = -0.5 * g.step * static_cast<double>(g.n - 1);
        return g;
    }

    static GridSpec from_json(const nlohmann::json& j, const std::string& ctx) {
        check_keys(j, ctx, {"span_mhz", "step_khz"});
        GridSpec g;
        g.span = detail::num(j, ctx, "span_mhz") * kMHz;
        g.step = detail::num(j, ctx, "step_khz") * kKHz;
        if (!(g.span > 0.0) || !(g.step > 0.0)) throw ConfigError(ctx + ": span and step must be > 0");
        return g;
    }

    nlohmann::json to_json() const {
        return {{"span_mhz", span / kMHz}, {"step_khz", step / kKHz}};
    }
};

inline CombParams comb_from_json(const nlohmann::json& j, const std::string& ctx) {
    check_keys(j, ctx,
               {"delta_mhz", "finesse", "bandwidth_mhz", "tooth_depth", "background_d0",
                "center_mhz"});
    CombParams c;
    c.delta = detail::num(j, ctx, "delta_mhz") * kMHz;
    c.finesse = detail::num(j, ctx, "finesse");
    c.bandwidth = detail::num(j, ctx, "bandwidth_mhz") * kMHz;
    c.tooth_depth = detail::num(j, ctx, "tooth_depth");
    c.background_d0 = detail::num_or(j, ctx, "background_d0", 0.0);
    c.center = detail::num_or(j, ctx, "center_mhz", 0.0) * kMHz;
    c.validate();
    return c;
}

inline nlohmann::json comb_to_json(const CombParams& c) {
    return {{"delta_mhz", c.delta / kMHz},       {"finesse", c.finesse},
            {"bandwidth_mhz", c.bandwidth / kMHz}, {"tooth_depth", c.tooth_depth},
            {"background_d0", c.background_d0},  {"center_mhz", c.center / kMHz}};
}

struct InputSpec {
    double fwhm = 15.0 * kNs;
    double center = 0.0;
    double carrier_detuning = 0.0;
    bool has_bins = false;
    double bin_separation = 0.0;
    std::string state = "e";

    static InputSpec from_json(const nlohmann::json& j, const std::string& ctx) {
        check_keys(j, ctx, {"fwhm_ns", "center_ns", "carrier_detuning_mhz", "bins"});
        InputSpec in;
        in.fwhm = detail::num(j, ctx, "fwhm_ns") * kNs;
        in.center = detail::num_or(j, ctx, "center_ns", 0.0) * kNs;
        in.carrier_detuning = detail::num_or(j, ctx, "carrier_detuning_mhz", 0.0) * kMHz;
        if (j.contains("bins")) {
            const auto& b = j.at("bins");
            check_keys(b, ctx + "/bins", {"separation_ns", "state"});
            in.has_bins = true;
            in.bin_separation = detail::num(b, ctx + "/bins", "separation_ns") * kNs;
            in.state = detail::str(b, ctx + "/bins", "state");
        }
        return in;
    }

    nlohmann::json to_json() const {
        nlohmann::json j{{"fwhm_ns", fwhm / kNs},
                         {"center_ns", center / kNs},
                         {"carrier_detuning_mhz", carrier_detuning / kMHz}};
        if (has_bins)
            j["bins"] = {{"separation_ns", bin_separation / kNs}, {"state", state}};
        return j;
    }

    QubitState qubit_state() const {
        for (const auto& s : standard_states())
            if (s.label == state) return s;
        throw ConfigError("input/bins/state: unknown state \"" + state + "\"");
    }

    InputField field() const {
        InputField f;
        f.fwhm = fwhm;
        f.carrier_detuning = carrier_detuning;
        f.components.clear();
        if (has_bins) {
            const auto st = qubit_state();
            f.components.push_back({st.a_early, center});
            f.components.push_back({st.a_late, center + bin_separation});
        } else {
            f.components.push_back({cplx{1.0, 0.0}, center});
        }
        return f;
    }
};

struct StarkSpec {
    std::string mode = "none";  // none | designed | pulses
    std::size_t n_target = 2;
    double pulse_duration = 18.0 * kNs;
    double coefficient = kDefaultStarkCoefficient;
    double spread_rel = 0.0;
    std::vector<StarkPulse> pulses;

    static StarkSpec from_json(const nlohmann::json& j, const std::string& ctx) {
        check_keys(j, ctx,
                   {"mode", "n_target", "pulse_ns", "coefficient_khz_per_v_per_cm",
                    "spread_rel", "pulses"});
        StarkSpec s;
        s.mode = detail::str(j, ctx, "mode");
        if (s.mode != "none" && s.mode != "designed" && s.mode != "pulses")
            throw ConfigError(ctx + "/mode: expected none, designed or pulses");
        s.n_target = detail::uint_or(j, ctx, "n_target", 2);
        s.pulse_duration = detail::num_or(j, ctx, "pulse_ns", 18.0) * kNs;
        s.coefficient =
            detail::num_or(j, ctx, "coefficient_khz_per_v_per_cm", 11.68) * kKHz;
        s.spread_rel = detail::num_or(j, ctx, "spread_rel", 0.0);
        if (j.contains("pulses")) {
            const auto& arr = j.at("pulses");
            if (!arr.is_array()) throw ConfigError(ctx + "/pulses: expected an array");
            std::size_t i = 0;
            for (const auto& p : arr) {
                const std::string pctx = ctx + "/pulses/" + std::to_string(i++);
                check_keys(p, pctx, {"field_v_per_cm", "start_ns", "duration_ns"});
                StarkPulse sp;
                sp.field = detail::num(p, pctx, "field_v_per_cm");
                sp.start = detail::num(p, pctx, "start_ns") * kNs;
                sp.duration = detail::num(p, pctx, "duration_ns") * kNs;
                s.pulses.push_back(sp);
            }
        }
        if (s.mode == "pulses" && s.pulses.empty())
            throw ConfigError(ctx + ": mode \"pulses\" needs a pulses array");
        return s;
    }

    nlohmann::json to_json() const {
        nlohmann::json j{{"mode", mode},
                         {"n_target", n_target},
                         {"pulse_ns", pulse_duration / kNs},
                         {"coefficient_khz_per_v_per_cm", coefficient / kKHz},
                         {"spread_rel", spread_rel}};
        if (!pulses.empty()) {
            nlohmann::json arr = nlohmann::json::array();
            for (const auto& p : pulses)
                arr.push_back({{"field_v_per_cm", p.field},
                               {"start_ns", p.start / kNs},
                               {"duration_ns", p.duration / kNs}});
            j["pulses"] = arr;
        }
        return j;
    }
};

struct TraceSpec {
    double start = 0.0, end = 0.0, step = 0.0;

    TimeAxis axis() const {
        TimeAxis g;
        g.start = start;
        g.step = step;
        g.n = static_cast<std::size_t>(std::ceil((end - start) / step)) + 1;
        return g;
    }

    static TraceSpec from_json(const nlohmann::json& j, const std::string& ctx) {
        check_keys(j, ctx, {"start_ns", "end_ns", "step_ns"});
        TraceSpec t;
        t.start = detail::num(j, ctx, "start_ns") * kNs;
        t.end = detail::num(j, ctx, "end_ns") * kNs;
        t.step = detail::num(j, ctx, "step_ns") * kNs;
        if (!(t.end > t.start) || !(t.step > 0.0))
            throw ConfigError(ctx + ": need end > start and step > 0");
        return t;
    }

    nlohmann::json to_json() const {
        return {{"start_ns", start / kNs}, {"end_ns", end / kNs}, {"step_ns", step / kNs}};
    }
};

inline DetectorModel detector_from_json(const nlohmann::json& j, const std::string& ctx) {
    check_keys(j, ctx, {"efficiency", "dark_rate_per_s"});
    DetectorModel d;
    d.efficiency = detail::num_or(j, ctx, "efficiency", 1.0);
    d.dark_rate = detail::num_or(j, ctx, "dark_rate_per_s", 1.2e4);
    d.validate();
    return d;
}

inline nlohmann::json detector_to_json(const DetectorModel& d) {
    return {{"efficiency", d.efficiency}, {"dark_rate_per_s", d.dark_rate}};
}

struct SingleAfcScenario {
    CombParams comb;
    bool has_comb_b = false;
    CombParams comb_b;
    GridSpec grid;
    InputSpec input;
    StarkSpec stark;
    TraceSpec trace;
    std::vector<std::size_t> readout_orders{1, 2, 3, 4};
};

struct PumpScenario {
    std::size_t level_count = 8;
    double splitting = 200.0 * kMHz;
    double sub_linewidth = 150.0 * kMHz;
    double peak_d = 6.0;
    std::string branching_type = "nearest_neighbor";
    double branching_beta = 0.25;
    PumpSweep sweep;
    GridSpec grid;
    double probe = 300.0 * kMHz;

    BranchingMatrix branching() const {
        if (branching_type == "identity") return BranchingMatrix::identity(level_count);
        if (branching_type == "nearest_neighbor")
            return BranchingMatrix::nearest_neighbor(level_count, branching_beta);
        throw ConfigError("pump/branching/type: unknown type \"" + branching_type + "\"");
    }

    LevelEnsemble ensemble() const {
        LevelEnsemble e = default_ensemble(splitting, sub_linewidth, peak_d);
        if (level_count != e.levels.size()) {
            e.levels.clear();
            for (std::size_t i = 0; i < level_count; ++i) {
                const double c =
                    (static_cast<double>(i) - 0.5 * static_cast<double>(level_count - 1)) *
                    splitting;
                e.levels.push_back({c, 1.0 / static_cast<double>(level_count)});
            }
        }
        return e;
    }
};

struct Scenario {
    int schema_version = 1;
    std::string kind;  // single_afc | timebin | pump
    SingleAfcScenario single_afc;
    TimebinBenchConfig bench;
    PumpScenario pump;

    static Scenario from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;

    static Scenario load(const std::string& path) {
        std::ifstream f(path);
        if (!f) throw ConfigError("cannot open scenario: " + path);
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(f, nullptr, true, true);
        } catch (const nlohmann::json::parse_error& e) {
            throw ConfigError("scenario parse error in " + path + ": " + e.what());
        }
        return from_json(j);
    }
};

inline Scenario Scenario::from_json(const nlohmann::json& j) {
    check_keys(j, "scenario",
               {"schema_version", "kind", "comb", "comb_b", "frequency_grid", "input", "stark",
                "trace", "readout_orders", "bench", "levels", "branching", "sweep", "probe_mhz"});
    Scenario sc;
    sc.schema_version = static_cast<int>(detail::uint_or(j, "scenario", "schema_version", 1));
    if (sc.schema_version != 1)
        throw ConfigError("scenario/schema_version: only version 1 is supported");
    sc.kind = detail::str(j, "scenario", "kind");

    if (sc.kind == "single_afc") {
        auto& s = sc.single_afc;
        s.comb = comb_from_json(detail::need(j, "scenario", "comb"), "scenario/comb");
        if (j.contains("comb_b")) {
            s.has_comb_b = true;
            s.comb_b = comb_from_json(j.at("comb_b"), "scenario/comb_b");
        }
        s.grid = GridSpec::from_json(detail::need(j, "scenario", "frequency_grid"),
                                     "scenario/frequency_grid");
        s.input = InputSpec::from_json(detail::need(j, "scenario", "input"), "scenario/input");
        s.stark = StarkSpec::from_json(detail::need(j, "scenario", "stark"), "scenario/stark");
        s.trace = TraceSpec::from_json(detail::need(j, "scenario", "trace"), "scenario/trace");
        if (j.contains("readout_orders")) {
            s.readout_orders.clear();
            for (const auto& v : j.at("readout_orders")) {
                if (!v.is_number_unsigned() && !v.is_number_integer())
                    throw ConfigError("scenario/readout_orders: expected integers");
                const auto n = v.get<long long>();
                if (n < 1) throw ConfigError("scenario/readout_orders: orders start at 1");
                s.readout_orders.push_back(static_cast<std::size_t>(n));
            }
            if (s.readout_orders.empty())
                throw ConfigError("scenario/readout_orders: empty list");
        }
    } else if (sc.kind == "timebin") {
        const auto& b = detail::need(j, "scenario", "bench");
        check_keys(b, "scenario/bench",
                   {"delta_a_mhz", "bin_separation_ns", "gamma_mhz", "depth_a", "depth_b",
                    "background_d0", "bandwidth_mhz", "input_fwhm_ns", "control_pulse_ns",
                    "window_ns", "beta_offset_rad", "mu", "trials", "seed", "bound_eta",
                    "detector", "coefficient_khz_per_v_per_cm"});
        auto& cfg = sc.bench;
        cfg.delta_a = detail::num(b, "scenario/bench", "delta_a_mhz") * kMHz;
        cfg.bin_separation = detail::num(b, "scenario/bench", "bin_separation_ns") * kNs;
        cfg.gamma = detail::num(b, "scenario/bench", "gamma_mhz") * kMHz;
        cfg.depth_a = detail::num(b, "scenario/bench", "depth_a");
        cfg.depth_b = detail::num(b, "scenario/bench", "depth_b");
        cfg.background_d0 = detail::num_or(b, "scenario/bench", "background_d0", 0.0);
        cfg.comb_bandwidth = detail::num(b, "scenario/bench", "bandwidth_mhz") * kMHz;
        cfg.input_fwhm = detail::num(b, "scenario/bench", "input_fwhm_ns") * kNs;
        cfg.control_pulse = detail::num(b, "scenario/bench", "control_pulse_ns") * kNs;
        cfg.stark_coefficient =
            detail::num_or(b, "scenario/bench", "coefficient_khz_per_v_per_cm", 11.68) * kKHz;
        cfg.window_width = detail::num(b, "scenario/bench", "window_ns") * kNs;
        cfg.beta_offset = detail::num_or(b, "scenario/bench", "beta_offset_rad", 0.0);
        if (b.contains("mu")) {
            cfg.mu_list.clear();
            for (const auto& v : b.at("mu")) cfg.mu_list.push_back(v.get<double>());
        }
        cfg.trials = detail::uint_or(b, "scenario/bench", "trials", 5000);
        cfg.seed = detail::uint_or(b, "scenario/bench", "seed", 1);
        cfg.bound_eta = detail::num_or(b, "scenario/bench", "bound_eta", 0.069);
        if (b.contains("detector"))
            cfg.detector = detector_from_json(b.at("detector"), "scenario/bench/detector");
        cfg.validate();
    } else if (sc.kind == "pump") {
        auto& p = sc.pump;
        const auto& lv = detail::need(j, "scenario", "levels");
        check_keys(lv, "scenario/levels", {"count", "splitting_mhz", "sub_linewidth_mhz", "peak_d"});
        p.level_count = detail::uint_or(lv, "scenario/levels", "count", 8);
        p.splitting = detail::num(lv, "scenario/levels", "splitting_mhz") * kMHz;
        p.sub_linewidth = detail::num(lv, "scenario/levels", "sub_linewidth_mhz") * kMHz;
        p.peak_d = detail::num(lv, "scenario/levels", "peak_d");
        if (j.contains("branching")) {
            const auto& br = j.at("branching");
            check_keys(br, "scenario/branching", {"type", "beta"});
            p.branching_type = detail::str(br, "scenario/branching", "type");
            p.branching_beta = detail::num_or(br, "scenario/branching", "beta", 0.25);
        }
        const auto& sw = detail::need(j, "scenario", "sweep");
        check_keys(sw, "scenario/sweep",
                   {"center_mhz", "bandwidth_mhz", "rate_per_s", "duration_ms", "repetitions"});
        p.sweep.center = detail::num(sw, "scenario/sweep", "center_mhz") * kMHz;
        p.sweep.bandwidth = detail::num(sw, "scenario/sweep", "bandwidth_mhz") * kMHz;
        p.sweep.pump_rate = detail::num(sw, "scenario/sweep", "rate_per_s");
        p.sweep.duration = detail::num(sw, "scenario/sweep", "duration_ms") * kMs;
        p.sweep.repetitions = detail::uint_or(sw, "scenario/sweep", "repetitions", 1);
        p.grid = GridSpec::from_json(detail::need(j, "scenario", "frequency_grid"),
                                     "scenario/frequency_grid");
        p.probe = detail::num_or(j, "scenario", "probe_mhz", 300.0) * kMHz;
    } else {
        throw ConfigError("scenario/kind: expected single_afc, timebin or pump");
    }
    return sc;
}

inline nlohmann::json Scenario::to_json() const {
    nlohmann::json j;
    j["schema_version"] = schema_version;
    j["kind"] = kind;
    if (kind == "single_afc") {
        const auto& s = single_afc;
        j["comb"] = comb_to_json(s.comb);
        if (s.has_comb_b) j["comb_b"] = comb_to_json(s.comb_b);
        j["frequency_grid"] = s.grid.to_json();
        j["input"] = s.input.to_json();
        j["stark"] = s.stark.to_json();
        j["trace"] = s.trace.to_json();
        j["readout_orders"] = s.readout_orders;
    } else if (kind == "timebin") {
        const auto& c = bench;
        j["bench"] = {{"delta_a_mhz", c.delta_a / kMHz},
                      {"bin_separation_ns", c.bin_separation / kNs},
                      {"gamma_mhz", c.gamma / kMHz},
                      {"depth_a", c.depth_a},
                      {"depth_b", c.depth_b},
                      {"background_d0", c.background_d0},
                      {"bandwidth_mhz", c.comb_bandwidth / kMHz},
                      {"input_fwhm_ns", c.input_fwhm / kNs},
                      {"control_pulse_ns", c.control_pulse / kNs},
                      {"coefficient_khz_per_v_per_cm", c.stark_coefficient / kKHz},
                      {"window_ns", c.window_width / kNs},
                      {"beta_offset_rad", c.beta_offset},
                      {"mu", c.mu_list},
                      {"trials", c.trials},
                      {"seed", c.seed},
                      {"bound_eta", c.bound_eta},
                      {"detector", detector_to_json(c.detector)}};
    } else if (kind == "pump") {
        const auto& p = pump;
        j["levels"] = {{"count", p.level_count},
                       {"splitting_mhz", p.splitting / kMHz},
                       {"sub_linewidth_mhz", p.sub_linewidth / kMHz},
                       {"peak_d", p.peak_d}};
        j["branching"] = {{"type", p.branching_type}, {"beta", p.branching_beta}};
        j["sweep"] = {{"center_mhz", p.sweep.center / kMHz},
                      {"bandwidth_mhz", p.sweep.bandwidth / kMHz},
                      {"rate_per_s", p.sweep.pump_rate},
                      {"duration_ms", p.sweep.duration / kMs},
                      {"repetitions", p.sweep.repetitions}};
        j["frequency_grid"] = p.grid.to_json();
        j["probe_mhz"] = p.probe / kMHz;
    }
    return j;
}

}  // namespace starkafc
