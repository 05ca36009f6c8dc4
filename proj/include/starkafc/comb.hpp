#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "starkafc/spectrum.hpp"
#include "starkafc/units.hpp"

namespace starkafc {

// Gaussian-tooth atomic frequency comb parameters. finesse = spacing / tooth
// FWHM; bandwidth is the full extent covered with teeth.
struct CombParams {
    double delta = 0.0;          // tooth spacing, Hz
    double finesse = 0.0;
    double bandwidth = 0.0;      // Hz
    double tooth_depth = 0.0;    // peak depth above background
    double background_d0 = 0.0;
    double center = 0.0;         // offset of the central tooth, Hz

    double gamma() const { return delta / finesse; }
    double storage_time() const { return 1.0 / delta; }
    double readout_time(std::size_t n) const { return static_cast<double>(n) / delta; }

    std::size_t tooth_count() const {
        return 2 * static_cast<std::size_t>(std::floor(0.5 * bandwidth / delta)) + 1;
    }

    void validate() const {
        if (!(delta > 0.0)) throw ConfigError("comb: delta <= 0");
        if (!(finesse > 1.0)) throw ConfigError("comb: finesse <= 1");
        if (!(bandwidth >= delta)) throw ConfigError("comb: bandwidth < delta");
        if (!(tooth_depth > 0.0)) throw ConfigError("comb: tooth_depth <= 0");
        if (background_d0 < 0.0) throw ConfigError("comb: background_d0 < 0");
    }
};

// Average depth of the periodic part of a Gaussian comb. For tooth depth d and
// finesse F this is d/F * sqrt(pi / (4 ln 2)).
inline constexpr double kToothShapeFactor = 1.0644670194312262;

inline double effective_depth(const CombParams& c) {
    return c.tooth_depth / c.finesse * kToothShapeFactor;
}

// Width parameter of the echo decay envelope set by the tooth width:
// amplitude envelope exp(-gt^2 t^2 / 2) with gt = 2 pi gamma / sqrt(8 ln 2).
inline double gamma_tilde(const CombParams& c) {
    return kTwoPi * c.gamma() / kFwhmPerSigma;
}

// Echo intensity efficiency at delay t for a comb read out once:
//   eta(t) = dt^2 exp(-dt) exp(-gt^2 t^2) exp(-d0),  dt = effective depth.
inline double analytic_efficiency(const CombParams& c, double t) {
    const double dt = effective_depth(c);
    const double gt = gamma_tilde(c);
    return dt * dt * std::exp(-dt) * std::exp(-gt * gt * t * t) * std::exp(-c.background_d0);
}

inline double tooth_positions_sum(const CombParams& c, double f) {
    const auto half = static_cast<long>(std::floor(0.5 * c.bandwidth / c.delta));
    double v = 0.0;
    for (long k = -half; k <= half; ++k)
        v += gaussian_fwhm(f - c.center - static_cast<double>(k) * c.delta, c.gamma());
    return v;
}

// Write the comb profile onto a fresh spectrum over the given grid. The grid
// must resolve a tooth with at least 10 samples across its FWHM.
inline AbsorptionSpectrum carve_comb(const CombParams& c, const FrequencyAxis& grid) {
    c.validate();
    grid.validate("carve_comb");
    if (grid.step * 10.0 > c.gamma())
        throw ConfigError("carve_comb: grid step too coarse, need >= 10 samples per tooth FWHM");
    if (grid.span() < c.bandwidth)
        throw ConfigError("carve_comb: grid narrower than comb bandwidth");
    AbsorptionSpectrum s;
    s.grid = grid;
    s.background_d0 = c.background_d0;
    s.d.resize(grid.n);
    for (std::size_t i = 0; i < grid.n; ++i)
        s.d[i] = c.background_d0 + c.tooth_depth * tooth_positions_sum(c, grid.point(i));
    return s;
}

// Two tooth patterns sharing one medium: weighted sum of both combs' teeth and
// backgrounds on a common grid.
inline AbsorptionSpectrum superimpose_combs(const CombParams& a, const CombParams& b,
                                            const FrequencyAxis& grid, double weight_a = 1.0,
                                            double weight_b = 1.0) {
    a.validate();
    b.validate();
    grid.validate("superimpose_combs");
    if (weight_a < 0.0 || weight_b < 0.0) throw ConfigError("superimpose_combs: negative weight");
    const double gmin = std::min(a.gamma(), b.gamma());
    if (grid.step * 10.0 > gmin)
        throw ConfigError("superimpose_combs: grid step too coarse for the narrower tooth");
    AbsorptionSpectrum s;
    s.grid = grid;
    s.background_d0 = weight_a * a.background_d0 + weight_b * b.background_d0;
    s.d.resize(grid.n);
    for (std::size_t i = 0; i < grid.n; ++i) {
        const double f = grid.point(i);
        s.d[i] = s.background_d0 + weight_a * a.tooth_depth * tooth_positions_sum(a, f) +
                 weight_b * b.tooth_depth * tooth_positions_sum(b, f);
    }
    return s;
}

// Indices of local maxima rising above background + threshold_frac * (max - background).
inline std::vector<std::size_t> detect_teeth(const AbsorptionSpectrum& s,
                                             double threshold_frac = 0.5) {
    s.validate();
    std::vector<double> sorted = s.d;
    std::sort(sorted.begin(), sorted.end());
    const double floor_est = sorted[sorted.size() / 10];
    const double top = sorted.back();
    const double thr = floor_est + threshold_frac * (top - floor_est);
    std::vector<std::size_t> peaks;
    for (std::size_t i = 1; i + 1 < s.grid.n; ++i)
        if (s.d[i] > thr && s.d[i] >= s.d[i - 1] && s.d[i] > s.d[i + 1]) peaks.push_back(i);
    return peaks;
}

// FWHM of the tooth nearest f, by linear interpolation of the half-depth
// crossings above the local floor.
inline double tooth_fwhm(const AbsorptionSpectrum& s, double f) {
    const auto peaks = detect_teeth(s);
    if (peaks.empty()) throw ConfigError("tooth_fwhm: no teeth detected");
    std::size_t best = peaks.front();
    for (auto p : peaks)
        if (std::abs(s.grid.point(p) - f) < std::abs(s.grid.point(best) - f)) best = p;

    std::vector<double> sorted = s.d;
    std::sort(sorted.begin(), sorted.end());
    const double floor_est = sorted[sorted.size() / 10];
    const double half = floor_est + 0.5 * (s.d[best] - floor_est);

    auto cross = [&](long dir) -> double {
        long i = static_cast<long>(best);
        while (true) {
            const long j = i + dir;
            if (j < 0 || j >= static_cast<long>(s.grid.n))
                throw ConfigError("tooth_fwhm: half crossing left the grid");
            if (s.d[j] <= half) {
                const double w = (s.d[i] - half) / (s.d[i] - s.d[j]);
                return s.grid.point(i) + w * (s.grid.point(j) - s.grid.point(i));
            }
            i = j;
        }
    };
    return cross(+1) - cross(-1);
}

}  // namespace starkafc
