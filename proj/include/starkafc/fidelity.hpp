#pragma once

#include <cmath>
#include <cstdint>

#include "starkafc/errors.hpp"

namespace starkafc {

// Basis-state fidelity from counts in the correct and the opposite window:
// with signal S above noise N this is (S+N)/(S+2N).
inline double fidelity_from_counts(double correct, double wrong) {
    if (correct < 0.0 || wrong < 0.0) throw ConfigError("fidelity_from_counts: negative counts");
    if (correct + wrong <= 0.0) throw ConfigError("fidelity_from_counts: no counts");
    return correct / (correct + wrong);
}

inline double fidelity_from_snr(double snr) {
    if (snr < 0.0) throw ConfigError("fidelity_from_snr: negative SNR");
    return (snr + 1.0) / (snr + 2.0);
}

inline double visibility(double vmax, double vmin) {
    if (vmax < vmin) throw ConfigError("visibility: max < min");
    if (vmax + vmin <= 0.0) throw ConfigError("visibility: empty fringe");
    return (vmax - vmin) / (vmax + vmin);
}

inline double fidelity_from_visibility(double v) {
    if (v < 0.0 || v > 1.0) throw ConfigError("fidelity_from_visibility: V outside [0,1]");
    return 0.5 * (1.0 + v);
}

// Qubit fidelity: one third basis, two thirds superposition.
inline double total_fidelity(double f_basis_mean, double f_superposition_mean) {
    return f_basis_mean / 3.0 + 2.0 * f_superposition_mean / 3.0;
}

// Standard errors from Poisson counting statistics. Zero-count windows are
// floored at one count so the error never collapses to zero.
inline double counts_fidelity_se(double correct, double wrong) {
    const double a = std::max(correct, 1.0), b = std::max(wrong, 1.0);
    const double s = a + b;
    return std::sqrt(a * b / (s * s * s));
}

inline double visibility_se(double vmax, double vmin) {
    const double a = std::max(vmax, 1.0), b = std::max(vmin, 1.0);
    const double s = a + b;
    return 2.0 * std::sqrt(a * b / (s * s * s));
}

inline double binomial_se(double p, std::uint64_t trials) {
    if (trials == 0) throw ConfigError("binomial_se: zero trials");
    return std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
}

}  // namespace starkafc
