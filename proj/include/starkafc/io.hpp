#pragma once

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "starkafc/echo_sim.hpp"
#include "starkafc/spectrum.hpp"
#include "starkafc/timebin.hpp"
#include "starkafc/timeline.hpp"

namespace starkafc {

using json = nlohmann::json;

// Shortest round-trip decimal form, reproducible across runs.
inline std::string fmt_g(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string fmt_fixed(double v, int prec) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", prec, v);
    return buf;
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot open for writing: " + path);
    f << content;
    if (!f) throw ConfigError("write failed: " + path);
}

inline void write_json_file(const std::string& path, const json& j) {
    write_text_file(path, j.dump(2) + "\n");
}

// Spectrum: two-column CSV plus a JSON sidecar with the grid and background.
inline void save_spectrum(const AbsorptionSpectrum& s, const std::string& base) {
    std::string csv = "detuning_Hz,optical_depth\n";
    for (std::size_t i = 0; i < s.grid.n; ++i)
        csv += fmt_g(s.grid.point(i)) + "," + fmt_g(s.d[i]) + "\n";
    write_text_file(base + ".csv", csv);
    json meta;
    meta["grid"] = {{"start_hz", s.grid.start}, {"step_hz", s.grid.step}, {"n", s.grid.n}};
    meta["background_d0"] = s.background_d0;
    write_json_file(base + ".json", meta);
}

inline AbsorptionSpectrum load_spectrum(const std::string& base) {
    std::ifstream meta_f(base + ".json");
    if (!meta_f) throw ConfigError("cannot open spectrum header: " + base + ".json");
    json meta = json::parse(meta_f, nullptr, true, true);
    AbsorptionSpectrum s;
    s.grid.start = meta.at("grid").at("start_hz").get<double>();
    s.grid.step = meta.at("grid").at("step_hz").get<double>();
    s.grid.n = meta.at("grid").at("n").get<std::size_t>();
    s.background_d0 = meta.at("background_d0").get<double>();

    std::ifstream csv(base + ".csv");
    if (!csv) throw ConfigError("cannot open spectrum data: " + base + ".csv");
    std::string line;
    std::getline(csv, line);  // header
    while (std::getline(csv, line)) {
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw ConfigError("bad spectrum CSV row: " + line);
        s.d.push_back(std::stod(line.substr(comma + 1)));
    }
    s.validate();
    return s;
}

// Trace: (time_ns, intensity) CSV plus JSON metadata.
inline void save_trace(const IntensityTrace& tr, const std::string& base, const json& extra = {}) {
    std::string csv = "time_ns,intensity\n";
    for (std::size_t i = 0; i < tr.grid.n; ++i)
        csv += fmt_fixed(tr.grid.point(i) / kNs, 4) + "," + fmt_g(tr.intensity[i]) + "\n";
    write_text_file(base + ".csv", csv);
    json meta;
    meta["grid"] = {{"start_ns", tr.grid.start / kNs},
                    {"step_ns", tr.grid.step / kNs},
                    {"n", tr.grid.n}};
    meta["input_energy"] = tr.input_energy;
    meta["absorbed_energy"] = tr.absorbed_energy;
    meta["emitted_energy"] = tr.emitted_energy;
    meta["passivity_capped"] = tr.passivity_capped;
    if (!extra.is_null() && !extra.empty()) meta["run"] = extra;
    write_json_file(base + ".json", meta);
}

inline json fidelity_row_json(const FidelityRow& r) {
    return json{{"mu", r.mu},
                {"f_early", r.f_early},
                {"f_early_se", r.f_early_se},
                {"f_late", r.f_late},
                {"f_late_se", r.f_late_se},
                {"f_plus_i", r.f_plus_i},
                {"f_plus_i_se", r.f_plus_i_se},
                {"f_plus_3pi4", r.f_plus_3pi4},
                {"f_plus_3pi4_se", r.f_plus_3pi4_se},
                {"f_total", r.f_total},
                {"f_total_se", r.f_total_se},
                {"classical_bound", r.bound},
                {"violation_sigma", r.violation_sigma}};
}

// Aligned percent table, one row per mean photon number.
inline std::string fidelity_table_text(const BenchResult& b) {
    std::string out;
    out += "  mu    F_e [%]        F_l [%]        F_+i [%]       F_+3pi/4 [%]   F_total [%]    bound [%]  sigma\n";
    for (const auto& r : b.rows) {
        char line[256];
        std::snprintf(line, sizeof line,
                      "%4.1f   %5.2f +- %4.2f  %5.2f +- %4.2f  %5.2f +- %4.2f  %5.2f +- %4.2f  "
                      "%5.2f +- %4.2f  %7.2f  %5.1f\n",
                      r.mu, 100 * r.f_early, 100 * r.f_early_se, 100 * r.f_late,
                      100 * r.f_late_se, 100 * r.f_plus_i, 100 * r.f_plus_i_se,
                      100 * r.f_plus_3pi4, 100 * r.f_plus_3pi4_se, 100 * r.f_total,
                      100 * r.f_total_se, 100 * r.bound, r.violation_sigma);
        out += line;
    }
    return out;
}

inline std::string fidelity_table_csv(const BenchResult& b) {
    std::string out =
        "mu,f_early,f_early_se,f_late,f_late_se,f_plus_i,f_plus_i_se,f_plus_3pi4,"
        "f_plus_3pi4_se,f_total,f_total_se,classical_bound,violation_sigma\n";
    for (const auto& r : b.rows) {
        out += fmt_g(r.mu) + "," + fmt_g(r.f_early) + "," + fmt_g(r.f_early_se) + "," +
               fmt_g(r.f_late) + "," + fmt_g(r.f_late_se) + "," + fmt_g(r.f_plus_i) + "," +
               fmt_g(r.f_plus_i_se) + "," + fmt_g(r.f_plus_3pi4) + "," + fmt_g(r.f_plus_3pi4_se) +
               "," + fmt_g(r.f_total) + "," + fmt_g(r.f_total_se) + "," + fmt_g(r.bound) + "," +
               fmt_g(r.violation_sigma) + "\n";
    }
    return out;
}

inline std::string timeline_text(const Timeline& t) {
    std::string out = "phase                     each        reps      total\n";
    for (const auto& p : t.phases) {
        char line[160];
        std::snprintf(line, sizeof line, "%-24s %8.3f ms %7zu %9.3f ms\n", p.name.c_str(),
                      p.duration_each / kMs, p.repetitions, p.total() / kMs);
        out += line;
    }
    char tot[64];
    std::snprintf(tot, sizeof tot, "%-24s %21s %9.3f ms\n", "total", "", t.total_duration() / kMs);
    out += tot;
    return out;
}

}  // namespace starkafc
