#pragma once

#include <cstdint>

#include "starkafc/echo_sim.hpp"
#include "starkafc/rng.hpp"

namespace starkafc {

// Threshold (click / no-click) detector. Efficiencies are folded into one
// factor; counts-referenced analyses keep it at 1. Dark counts arrive at a
// constant rate, so the per-window noise probability scales with the window.
struct DetectorModel {
    double efficiency = 1.0;
    double dark_rate = 1.2e4;  // counts per second

    void validate() const {
        if (!(efficiency > 0.0) || efficiency > 1.0)
            throw ConfigError("detector: efficiency outside (0, 1]");
        if (dark_rate < 0.0) throw ConfigError("detector: dark_rate < 0");
    }

    double dark_probability(const Window& w) const { return dark_rate * w.width(); }
};

// Click probability for a coherent state of mean photon number mu sent through
// the trace, counting inside the window: 1 - (1-p_dark) exp(-lambda).
inline double click_probability(const IntensityTrace& tr, const Window& w, double mu,
                                const DetectorModel& det) {
    det.validate();
    if (mu < 0.0) throw ConfigError("click_probability: mu < 0");
    const double lambda = mu * det.efficiency * echo_efficiency(tr, w);
    const double p_dark = det.dark_probability(w);
    if (p_dark >= 1.0) throw ConfigError("click_probability: dark probability >= 1");
    return 1.0 - (1.0 - p_dark) * std::exp(-lambda);
}

// Bernoulli counts over repeated trials, counter-seeded per (stream, trial).
inline std::uint64_t count_clicks(double p, std::uint64_t trials, std::uint64_t seed,
                                  std::uint64_t stream) {
    std::uint64_t c = 0;
    for (std::uint64_t t = 0; t < trials; ++t)
        if (rng::uniform(seed, stream, t) < p) ++c;
    return c;
}

}  // namespace starkafc
