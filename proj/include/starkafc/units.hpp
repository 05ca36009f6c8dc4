#pragma once

#include <cmath>
#include <numbers>

// Internal unit system: seconds, hertz, volts per centimetre. Scenario files
// carry unit-suffixed keys (ns, MHz, kV/cm) converted once at parse time.

namespace starkafc {

inline constexpr double kNs = 1e-9;    // ns -> s
inline constexpr double kUs = 1e-6;    // us -> s
inline constexpr double kMs = 1e-3;    // ms -> s
inline constexpr double kKHz = 1e3;    // kHz -> Hz
inline constexpr double kMHz = 1e6;    // MHz -> Hz
inline constexpr double kGHz = 1e9;    // GHz -> Hz
inline constexpr double kKVPerCm = 1e3;  // kV/cm -> V/cm

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Gaussian FWHM <-> sigma.
inline constexpr double kFwhmPerSigma = 2.3548200450309493;  // sqrt(8 ln 2)

inline double fwhm_to_sigma(double fwhm) { return fwhm / kFwhmPerSigma; }
inline double sigma_to_fwhm(double sigma) { return sigma * kFwhmPerSigma; }

// Peak-normalized Gaussian with given FWHM.
inline double gaussian_fwhm(double x, double fwhm) {
    const double s = fwhm_to_sigma(fwhm);
    const double u = x / s;
    return std::exp(-0.5 * u * u);
}

}  // namespace starkafc
