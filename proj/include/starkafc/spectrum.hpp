#pragma once

#include <vector>

#include "starkafc/grid.hpp"

namespace starkafc {

// Single-pass optical depth d(f) on a uniform detuning axis, plus the flat
// residual background d0 assumed to extend beyond the stored range.
struct AbsorptionSpectrum {
    FrequencyAxis grid;
    std::vector<double> d;
    double background_d0 = 0.0;

    void validate() const {
        grid.validate("spectrum");
        if (d.size() != grid.n) throw ConfigError("spectrum: depth array length != grid.n");
        if (background_d0 < 0.0) throw ConfigError("spectrum: background_d0 < 0");
        for (double v : d)
            if (!std::isfinite(v)) throw NumericalError("spectrum: non-finite depth");
    }

    // Linear interpolation between stored samples; querying outside the grid
    // is a caller bug, not a smooth extrapolation.
    double depth_at(double f) const {
        if (!grid.contains(f)) throw ConfigError("depth_at: detuning outside spectrum grid");
        const double u = (f - grid.start) / grid.step;
        auto i = static_cast<std::size_t>(u);
        if (i >= grid.n - 1) i = grid.n - 2;
        const double w = u - static_cast<double>(i);
        return d[i] * (1.0 - w) + d[i + 1] * w;
    }

    // Same interpolation but falling back to the flat background outside the
    // stored range. Internal sampling for transforms.
    double depth_or_background(double f) const {
        if (!grid.contains(f)) return background_d0;
        const double u = (f - grid.start) / grid.step;
        auto i = static_cast<std::size_t>(u);
        if (i >= grid.n - 1) i = grid.n - 2;
        const double w = u - static_cast<double>(i);
        return d[i] * (1.0 - w) + d[i + 1] * w;
    }
};

}  // namespace starkafc
