// Command line front end: load a scenario file, run it, write spectra,
// traces and tables under the output directory.

#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>

#include "starkafc/runner.hpp"
#include "starkafc/timeline.hpp"

namespace {

using namespace starkafc;

std::string default_out_dir() {
    if (const char* env = std::getenv("STARKAFC_OUT")) return env;
    return "out";
}

void add_common(CLI::App* cmd, RunOptions& opts, std::string& scenario_path,
                bool need_scenario = true) {
    auto* s = cmd->add_option("--scenario", scenario_path, "scenario JSON file");
    if (need_scenario) s->required();
    cmd->add_option("--out", opts.out_dir, "output directory");
    cmd->add_option("--seed", opts.seed, "random seed");
    cmd->add_option("--format", opts.format, "table format")
        ->check(CLI::IsMember({"csv", "json", "both"}));
}

int run_simulate(const std::string& path, const RunOptions& opts) {
    const Scenario sc = Scenario::load(path);
    if (sc.kind == "pump") {
        const auto r = run_pump(sc.pump, opts);
        std::cout << "probe depth " << fmt_g(r.summary.at("depth_before").get<double>())
                  << " -> " << fmt_g(r.summary.at("depth_after").get<double>())
                  << " (x" << fmt_fixed(r.summary.at("enhancement").get<double>(), 3) << ")\n";
        return 0;
    }
    if (sc.kind != "single_afc")
        throw ConfigError("simulate expects a single_afc or pump scenario, got " + sc.kind);
    const auto r = run_single_afc(sc.single_afc, opts);
    for (const auto& e : r.summary.at("echoes"))
        std::cout << "order " << e.at("order").get<std::size_t>() << ": efficiency "
                  << fmt_fixed(100.0 * e.at("efficiency").get<double>(), 3) << "% (law "
                  << fmt_fixed(100.0 * e.at("analytic_efficiency").get<double>(), 3)
                  << "%), peak at " << fmt_fixed(e.at("peak_time_ns").get<double>(), 2)
                  << " ns\n";
    if (r.trace.passivity_capped) std::cout << "note: re-emission capped at absorbed energy\n";
    return 0;
}

int run_timebin_cmd(const std::string& path, const RunOptions& opts) {
    const Scenario sc = Scenario::load(path);
    if (sc.kind != "timebin")
        throw ConfigError("timebin expects a timebin scenario, got " + sc.kind);
    const auto r = run_timebin(sc.bench, opts);
    std::cout << fidelity_table_text(r.bench);
    return 0;
}

int run_bound(double mu, double eta) {
    const double b = classical_bound(mu, eta);
    std::cout << "classical fidelity bound(mu=" << fmt_fixed(mu, 3) << ", eta="
              << fmt_fixed(eta, 3) << ") = " << fmt_fixed(b, 6) << "\n";
    return 0;
}

int run_sweep(const std::string& path, const std::string& parameter,
              const std::vector<double>& values, const RunOptions& opts) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open scenario file: " + path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("scenario parse error: ") + e.what());
    }
    const auto points = sweep_scenario(j, parameter, values, opts);
    const std::string csv = sweep_csv(points);
    detail::ensure_dir(opts.out_dir);
    const auto base = std::filesystem::path(opts.out_dir);
    write_text_file((base / "sweep.csv").string(), csv);
    if (detail::want_json(opts)) {
        json out = json::array();
        for (const auto& p : points)
            out.push_back({{"value", p.value}, {"summary", p.summary}});
        write_json_file((base / "sweep.json").string(), out);
    }
    std::cout << csv;
    return 0;
}

int run_timeline_cmd(const std::string& which, const RunOptions& opts) {
    Timeline tl;
    if (which == "single")
        tl = single_afc_timeline();
    else if (which == "double")
        tl = double_afc_timeline();
    else
        throw ConfigError("timeline expects single or double, got " + which);
    const std::string text = timeline_text(tl);
    std::cout << text;
    detail::ensure_dir(opts.out_dir);
    write_text_file((std::filesystem::path(opts.out_dir) / "timeline.txt").string(), text);
    return 0;
}

int run_validate(const std::string& path) {
    const Scenario sc = Scenario::load(path);
    std::cout << "ok: " << sc.kind << " scenario\n";
    if (sc.kind == "single_afc") {
        const auto& s = sc.single_afc;
        const auto ctl = detail::scenario_schedule(s);
        if (!ctl.pulses.empty()) {
            const auto rep = validate_schedule(ctl, s.comb.delta, s.stark.n_target,
                                               s.input.fwhm, s.input.center);
            for (const auto& issue : rep.issues) std::cout << "issue: " << issue << "\n";
            if (!rep.ok) throw ConfigError("schedule validation failed");
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Stark-controlled atomic frequency comb memory simulator"};
    app.require_subcommand(1);

    starkafc::RunOptions opts;
    opts.out_dir = default_out_dir();
    std::string scenario_path;
    std::string sweep_param;
    std::vector<double> sweep_values;
    std::string timeline_kind = "single";
    double bound_mu = 0.8, bound_eta = 0.069;

    auto* c_sim = app.add_subcommand("simulate", "run a storage scenario");
    add_common(c_sim, opts, scenario_path);

    auto* c_tb = app.add_subcommand("timebin", "run the time-bin qubit benchmark");
    add_common(c_tb, opts, scenario_path);

    auto* c_bound = app.add_subcommand("bound", "print the classical fidelity bound");
    c_bound->add_option("--mu", bound_mu, "mean photon number");
    c_bound->add_option("--eta", bound_eta, "system efficiency");

    auto* c_sweep = app.add_subcommand("sweep", "re-run a scenario over parameter values");
    add_common(c_sweep, opts, scenario_path);
    c_sweep->add_option("--param", sweep_param, "JSON pointer into the scenario")->required();
    c_sweep->add_option("--values", sweep_values, "values to substitute")->required();
    c_sweep->add_option("--workers", opts.workers, "worker threads");

    auto* c_tl = app.add_subcommand("timeline", "print an experiment duty cycle");
    c_tl->add_option("--kind", timeline_kind, "single or double");
    c_tl->add_option("--out", opts.out_dir, "output directory");

    auto* c_val = app.add_subcommand("validate", "parse and check a scenario file");
    c_val->add_option("--scenario", scenario_path, "scenario JSON file")->required();

    try {
        app.parse(argc, argv);
        for (auto* sub : {c_sim, c_tb, c_sweep})
            if (sub->parsed() && sub->count("--seed") > 0) opts.seed_set = true;
        if (c_sim->parsed()) return run_simulate(scenario_path, opts);
        if (c_tb->parsed()) return run_timebin_cmd(scenario_path, opts);
        if (c_bound->parsed()) return run_bound(bound_mu, bound_eta);
        if (c_sweep->parsed()) return run_sweep(scenario_path, sweep_param, sweep_values, opts);
        if (c_tl->parsed()) return run_timeline_cmd(timeline_kind, opts);
        if (c_val->parsed()) return run_validate(scenario_path);
        return 2;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const starkafc::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const starkafc::NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
