#pragma once

#include <cmath>
#include <cstddef>

#include "starkafc/errors.hpp"

namespace starkafc {

// Uniform sample axis. Used for both detuning (Hz) and time (s).
struct Axis {
    double start = 0.0;
    double step = 0.0;
    std::size_t n = 0;

    double point(std::size_t i) const { return start + step * static_cast<double>(i); }
    double back() const { return point(n - 1); }
    double span() const { return step * static_cast<double>(n - 1); }

    bool contains(double x) const { return x >= start && x <= back(); }

    // Nearest sample index, clamped to the axis.
    std::size_t index_near(double x) const {
        if (x <= start) return 0;
        const double u = (x - start) / step;
        const auto i = static_cast<std::size_t>(std::llround(u));
        return i >= n ? n - 1 : i;
    }

    void validate(const char* what) const {
        if (!(step > 0.0) || n < 2 || !std::isfinite(start) || !std::isfinite(step))
            throw ConfigError(std::string(what) + ": axis needs step > 0 and n >= 2");
    }
};

using FrequencyAxis = Axis;  // detuning from line centre, Hz
using TimeAxis = Axis;       // trace time, s

}  // namespace starkafc
