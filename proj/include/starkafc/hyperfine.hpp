#pragma once

#include <cstddef>
#include <vector>

#include "starkafc/spectrum.hpp"
#include "starkafc/units.hpp"

namespace starkafc {

// One ground-state hyperfine sub-line: centre detuning and fractional
// population of the ensemble sitting in it.
struct HyperfineLevel {
    double center_offset = 0.0;  // Hz
    double population = 0.0;
};

// Ensemble model: a handful of Gaussian sub-lines of common width. peak_d is
// the single-pass depth a fully populated level would show at its centre.
struct LevelEnsemble {
    std::vector<HyperfineLevel> levels;
    double sub_linewidth = 0.0;  // FWHM, Hz
    double peak_d = 0.0;

    void validate() const {
        if (levels.size() < 2) throw ConfigError("ensemble: need at least 2 levels");
        if (!(sub_linewidth > 0.0)) throw ConfigError("ensemble: sub_linewidth <= 0");
        if (!(peak_d > 0.0)) throw ConfigError("ensemble: peak_d <= 0");
        for (const auto& lv : levels)
            if (lv.population < -1e-9) throw NumericalError("ensemble: negative population");
    }

    double total_population() const {
        double s = 0.0;
        for (const auto& lv : levels) s += lv.population;
        return s;
    }
};

// Chirped pump band applied repeatedly: flat spectral coverage over
// [center - bandwidth/2, center + bandwidth/2].
struct PumpSweep {
    double center = 0.0;      // Hz
    double bandwidth = 0.0;   // Hz
    double pump_rate = 0.0;   // peak depletion rate, 1/s
    double duration = 0.0;    // one chirp, s
    std::size_t repetitions = 1;

    void validate() const {
        if (!(bandwidth > 0.0)) throw ConfigError("pump: bandwidth <= 0");
        if (pump_rate < 0.0) throw ConfigError("pump: pump_rate < 0");
        if (!(duration > 0.0)) throw ConfigError("pump: duration <= 0");
        if (repetitions == 0) throw ConfigError("pump: repetitions == 0");
    }
};

// Row-stochastic redistribution matrix: entry (j,i) is the probability that
// population pumped out of level j relaxes into level i.
struct BranchingMatrix {
    std::size_t n = 0;
    std::vector<double> p;  // row-major n*n

    double at(std::size_t j, std::size_t i) const { return p[j * n + i]; }

    void validate() const {
        if (n < 2 || p.size() != n * n) throw ConfigError("branching: bad shape");
        for (std::size_t j = 0; j < n; ++j) {
            double row = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                if (at(j, i) < 0.0) throw ConfigError("branching: negative entry");
                row += at(j, i);
            }
            if (std::abs(row - 1.0) > 1e-12) throw ConfigError("branching: row does not sum to 1");
        }
    }

    static BranchingMatrix identity(std::size_t n) {
        BranchingMatrix b;
        b.n = n;
        b.p.assign(n * n, 0.0);
        for (std::size_t i = 0; i < n; ++i) b.p[i * n + i] = 1.0;
        return b;
    }

    // Nearest-neighbour relaxation: fraction beta to each neighbour, edges
    // reflect so rows stay stochastic.
    static BranchingMatrix nearest_neighbor(std::size_t n, double beta) {
        if (!(beta >= 0.0 && beta <= 0.5)) throw ConfigError("branching: beta outside [0, 0.5]");
        BranchingMatrix b;
        b.n = n;
        b.p.assign(n * n, 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            double stay = 1.0;
            if (j > 0) {
                b.p[j * n + (j - 1)] = beta;
                stay -= beta;
            }
            if (j + 1 < n) {
                b.p[j * n + (j + 1)] = beta;
                stay -= beta;
            }
            b.p[j * n + j] = stay;
        }
        return b;
    }
};

// Eight equally spaced sub-lines with equal population.
inline LevelEnsemble default_ensemble(double splitting = 200.0 * kMHz,
                                      double sub_linewidth = 150.0 * kMHz,
                                      double peak_d = 6.0) {
    LevelEnsemble e;
    e.sub_linewidth = sub_linewidth;
    e.peak_d = peak_d;
    const std::size_t n = 8;
    for (std::size_t i = 0; i < n; ++i) {
        const double c = (static_cast<double>(i) - 3.5) * splitting;
        e.levels.push_back({c, 1.0 / static_cast<double>(n)});
    }
    return e;
}

// d(f) = peak_d * sum_i p_i * exp(-(f - c_i)^2 / 2 sigma^2)
inline AbsorptionSpectrum build_initial_spectrum(const LevelEnsemble& ens,
                                                 const FrequencyAxis& grid,
                                                 double background_d0 = 0.0) {
    ens.validate();
    grid.validate("build_initial_spectrum");
    AbsorptionSpectrum s;
    s.grid = grid;
    s.background_d0 = background_d0;
    s.d.resize(grid.n);
    for (std::size_t k = 0; k < grid.n; ++k) {
        const double f = grid.point(k);
        double v = background_d0;
        for (const auto& lv : ens.levels)
            v += ens.peak_d * lv.population * gaussian_fwhm(f - lv.center_offset, ens.sub_linewidth);
        s.d[k] = v;
    }
    return s;
}

// Fraction of a level's Gaussian line sitting inside the swept band.
inline double band_fraction(double center, double fwhm, double lo, double hi) {
    const double s = fwhm_to_sigma(fwhm);
    const double a = (lo - center) / (s * std::numbers::sqrt2);
    const double b = (hi - center) / (s * std::numbers::sqrt2);
    return 0.5 * (std::erf(b) - std::erf(a));
}

// Rate-equation pumping over the full schedule (duration * repetitions):
//   dp_j/dt = -R_j p_j + sum_k R_k p_k B(k -> j)
// Explicit Euler with the step held well under the fastest rate.
inline LevelEnsemble apply_pump_sweep(const LevelEnsemble& ens, const PumpSweep& sweep,
                                      const BranchingMatrix& branching) {
    ens.validate();
    sweep.validate();
    branching.validate();
    const std::size_t n = ens.levels.size();
    if (branching.n != n) throw ConfigError("apply_pump_sweep: branching size != level count");

    std::vector<double> rate(n);
    double rmax = 0.0;
    const double lo = sweep.center - 0.5 * sweep.bandwidth;
    const double hi = sweep.center + 0.5 * sweep.bandwidth;
    for (std::size_t j = 0; j < n; ++j) {
        rate[j] = sweep.pump_rate * band_fraction(ens.levels[j].center_offset, ens.sub_linewidth, lo, hi);
        rmax = std::max(rmax, rate[j]);
    }

    const double total_time = sweep.duration * static_cast<double>(sweep.repetitions);
    double dt = total_time;
    if (rmax > 0.0) dt = std::min(dt, 0.05 / rmax);
    auto steps = static_cast<std::size_t>(std::ceil(total_time / dt));
    if (steps == 0) steps = 1;
    if (steps > 50'000'000) throw NumericalError("apply_pump_sweep: step count explodes; lower pump_rate or duration");
    dt = total_time / static_cast<double>(steps);

    std::vector<double> p(n), flow(n);
    for (std::size_t j = 0; j < n; ++j) p[j] = ens.levels[j].population;

    for (std::size_t s = 0; s < steps; ++s) {
        for (std::size_t j = 0; j < n; ++j) flow[j] = rate[j] * p[j];
        for (std::size_t j = 0; j < n; ++j) {
            double in = 0.0;
            for (std::size_t k = 0; k < n; ++k) in += flow[k] * branching.at(k, j);
            p[j] += dt * (in - flow[j]);
        }
        for (double v : p)
            if (v < -1e-9 || !std::isfinite(v))
                throw NumericalError("apply_pump_sweep: population left [0,1]; step unstable");
    }

    LevelEnsemble out = ens;
    for (std::size_t j = 0; j < n; ++j) out.levels[j].population = p[j];
    return out;
}

}  // namespace starkafc
