#pragma once

#include <unsupported/Eigen/FFT>

#include <complex>
#include <cstddef>
#include <vector>

#include "starkafc/spectrum.hpp"
#include "starkafc/stark.hpp"

namespace starkafc {

using cplx = std::complex<double>;

// Gaussian field component: amplitude, centre time, and the shared envelope
// parameters. fwhm refers to the intensity profile.
struct FieldComponent {
    cplx amplitude{1.0, 0.0};
    double center = 0.0;  // s
};

struct InputField {
    std::vector<FieldComponent> components{FieldComponent{}};
    double fwhm = 15.0 * kNs;           // intensity FWHM, s
    double carrier_detuning = 0.0;      // Hz, offset from the comb frame origin

    void validate() const {
        if (components.empty()) throw ConfigError("input: no field components");
        if (!(fwhm > 0.0)) throw ConfigError("input: fwhm <= 0");
    }

    cplx field_at(double t) const {
        // intensity FWHM w -> field envelope exp(-2 ln2 (t/w)^2)
        cplx v{0.0, 0.0};
        for (const auto& c : components) {
            const double u = (t - c.center) / fwhm;
            v += c.amplitude * std::exp(-2.0 * std::numbers::ln2 * u * u);
        }
        if (carrier_detuning != 0.0) {
            const double ph = kTwoPi * carrier_detuning * t;
            v *= cplx{std::cos(ph), std::sin(ph)};
        }
        return v;
    }

    double earliest_center() const {
        double c = components.front().center;
        for (const auto& x : components) c = std::min(c, x.center);
        return c;
    }
    double latest_center() const {
        double c = components.front().center;
        for (const auto& x : components) c = std::max(c, x.center);
        return c;
    }
};

inline InputField single_pulse(double fwhm, double center = 0.0, double amplitude = 1.0,
                               double carrier_detuning = 0.0) {
    InputField in;
    in.components = {FieldComponent{cplx{amplitude, 0.0}, center}};
    in.fwhm = fwhm;
    in.carrier_detuning = carrier_detuning;
    return in;
}

struct IntensityTrace {
    TimeAxis grid;
    std::vector<cplx> field;
    std::vector<double> intensity;
    double input_energy = 0.0;   // integral of |E_in|^2 dt over the trace
    double absorbed_energy = 0.0;
    double emitted_energy = 0.0; // re-emitted, after any passivity rescale
    bool passivity_capped = false;
};

namespace detail {

inline std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

struct Lattice {
    std::size_t n = 0;
    double dt = 0.0;
    double df = 0.0;

    // FFT-ordered frequency of bin j.
    double freq(std::size_t j) const {
        const auto half = n / 2;
        return (j < half ? static_cast<double>(j) : static_cast<double>(j) - static_cast<double>(n)) * df;
    }
    // FFT-ordered delay of bin m (second half is negative delay).
    double delay(std::size_t m) const {
        const auto half = n / 2;
        return (m < half ? static_cast<double>(m) : static_cast<double>(m) - static_cast<double>(n)) * dt;
    }
};

// Pick the internal lattice: fine enough in frequency to resolve the stored
// spectrum, long enough in time that circular wrap cannot reach the trace.
inline Lattice make_lattice(const AbsorptionSpectrum& s, const TimeAxis& tgrid) {
    Lattice lat;
    lat.dt = tgrid.step;
    const auto by_trace = 4 * tgrid.n;
    const auto by_spectrum =
        static_cast<std::size_t>(std::ceil(1.0 / (s.grid.step * lat.dt)));
    lat.n = next_pow2(std::max<std::size_t>(std::max(by_trace, by_spectrum), 1024));
    if (lat.n > (1u << 22))
        throw NumericalError("simulate_trace: internal lattice exceeds 2^22 bins; coarsen the "
                             "spectrum grid or the time step");
    lat.df = 1.0 / (static_cast<double>(lat.n) * lat.dt);
    return lat;
}

}  // namespace detail

// Propagate a weak input through the prepared medium under the field schedule.
//
// Output = transmitted pulse + coherent re-emission:
//  - the transmitted pulse sees the smoothed depth profile (what a pulse of
//    this duration can resolve), attenuated exp(-d_smooth/2) in amplitude;
//  - all periodic structure drives the first-order re-emission kernel, the
//    inverse transform of (d - d_smooth), scaled by exp(-(mean depth)/2) and
//    gated dipole pair by pair with the Stark factor cos(phase difference).
// Re-emitted energy is capped at the absorbed energy (uniform rescale) so the
// echo train can never exceed what the medium took in.
inline IntensityTrace simulate_trace(const AbsorptionSpectrum& spectrum,
                                     const StarkControl& control, const InputField& input,
                                     const TimeAxis& tgrid) {
    spectrum.validate();
    control.validate();
    input.validate();
    tgrid.validate("simulate_trace");

    const double band = std::max({std::abs(spectrum.grid.start), std::abs(spectrum.grid.back()),
                                  std::abs(input.carrier_detuning) + 2.0 / input.fwhm});
    if (tgrid.step > 1.0 / (4.0 * band))
        throw ConfigError("simulate_trace: time step too coarse for the spectral bandwidth");
    if (input.earliest_center() - 3.0 * input.fwhm < tgrid.start ||
        input.latest_center() + 3.0 * input.fwhm > tgrid.back())
        throw ConfigError("simulate_trace: input pulse not contained in the time grid");

    const auto lat = detail::make_lattice(spectrum, tgrid);
    const std::size_t N = lat.n;
    Eigen::FFT<double> fft;

    // Depth profile on the lattice and its smoothed part.
    std::vector<cplx> d_full(N);
    for (std::size_t j = 0; j < N; ++j)
        d_full[j] = cplx{spectrum.depth_or_background(lat.freq(j)), 0.0};

    std::vector<cplx> d_delay(N);
    fft.fwd(d_delay, d_full);
    const double smooth_fwhm = 1.0 / input.fwhm;
    std::vector<cplx> smooth_delay(N);
    for (std::size_t m = 0; m < N; ++m) {
        const double tau = lat.delay(m);
        const double arg = std::numbers::pi * smooth_fwhm * tau;
        const double s = std::exp(-arg * arg / (4.0 * std::numbers::ln2));
        smooth_delay[m] = d_delay[m] * s;
    }
    std::vector<cplx> d_smooth(N);
    fft.inv(d_smooth, smooth_delay);

    // Re-emission kernel: inverse transform of the structured depth profile,
    // causal half only.
    std::vector<cplx> d_struct(N);
    for (std::size_t j = 0; j < N; ++j) d_struct[j] = d_full[j] - d_smooth[j];
    std::vector<cplx> kernel(N);
    fft.inv(kernel, d_struct);
    for (std::size_t m = N / 2; m < N; ++m) kernel[m] = cplx{0.0, 0.0};

    // Input field on the lattice (trace window, zero-padded).
    std::vector<cplx> e_in(N, cplx{0.0, 0.0});
    for (std::size_t i = 0; i < tgrid.n; ++i) e_in[i] = input.field_at(tgrid.point(i));

    std::vector<cplx> e_in_f(N);
    fft.fwd(e_in_f, e_in);

    // Mean depth over the input spectrum sets the kernel scale.
    double wsum = 0.0, dsum = 0.0;
    for (std::size_t j = 0; j < N; ++j) {
        const double w = std::norm(e_in_f[j]);
        wsum += w;
        dsum += w * d_full[j].real();
    }
    if (!(wsum > 0.0)) throw ConfigError("simulate_trace: input field is identically zero");
    const double mean_depth = dsum / wsum;
    const double scale = std::exp(-0.5 * mean_depth);

    // Transmitted pulse.
    std::vector<cplx> e_prompt_f(N);
    for (std::size_t j = 0; j < N; ++j)
        e_prompt_f[j] = e_in_f[j] * std::exp(-0.5 * d_smooth[j].real());
    std::vector<cplx> e_prompt(N);
    fft.inv(e_prompt, e_prompt_f);

    // Re-emission. Without coefficient scatter the Stark factor separates,
    // cos(ph(t) - ph(t')) = cos ph(t) cos ph(t') + sin ph(t) sin ph(t'),
    // so two transform convolutions cover it; with scatter the damping couples
    // emission and absorption times and the pair sum runs directly.
    std::vector<cplx> e_re(tgrid.n, cplx{0.0, 0.0});
    const bool has_pulses = !control.pulses.empty();
    if (control.spread_rel == 0.0) {
        std::vector<double> cph(N, 1.0), sph(N, 0.0);
        if (has_pulses)
            for (std::size_t i = 0; i < tgrid.n; ++i) {
                const double ph = accumulated_phase(control, tgrid.point(i));
                cph[i] = std::cos(ph);
                sph[i] = std::sin(ph);
            }
        std::vector<cplx> ker_f(N), xc(N), xs(N);
        fft.fwd(ker_f, kernel);
        for (std::size_t i = 0; i < N; ++i) xc[i] = e_in[i] * cph[i];
        std::vector<cplx> xcf(N);
        fft.fwd(xcf, xc);
        for (std::size_t j = 0; j < N; ++j) xcf[j] *= ker_f[j];
        std::vector<cplx> conv_c(N);
        fft.inv(conv_c, xcf);
        if (has_pulses) {
            for (std::size_t i = 0; i < N; ++i) xs[i] = e_in[i] * sph[i];
            std::vector<cplx> xsf(N);
            fft.fwd(xsf, xs);
            for (std::size_t j = 0; j < N; ++j) xsf[j] *= ker_f[j];
            std::vector<cplx> conv_s(N);
            fft.inv(conv_s, xsf);
            for (std::size_t i = 0; i < tgrid.n; ++i)
                e_re[i] = -scale * (cph[i] * conv_c[i] + sph[i] * conv_s[i]);
        } else {
            for (std::size_t i = 0; i < tgrid.n; ++i) e_re[i] = -scale * conv_c[i];
        }
    } else {
        for (std::size_t i = 0; i < tgrid.n; ++i) {
            const double t = tgrid.point(i);
            cplx acc{0.0, 0.0};
            for (std::size_t k = 0; k <= i; ++k) {
                const cplx kv = kernel[i - k];
                if (kv.real() == 0.0 && kv.imag() == 0.0) continue;
                acc += kv * e_in[k] * pair_factor(control, t, tgrid.point(k));
            }
            e_re[i] = -scale * acc;
        }
    }

    // Energy bookkeeping on the lattice (transmitted) and trace (re-emitted).
    double in_energy_lat = 0.0, out_energy_lat = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        in_energy_lat += std::norm(e_in[i]);
        out_energy_lat += std::norm(e_prompt[i]);
    }
    double absorbed = std::max(0.0, (in_energy_lat - out_energy_lat) * lat.dt);
    double emitted = 0.0;
    for (const auto& v : e_re) emitted += std::norm(v);
    emitted *= lat.dt;

    IntensityTrace tr;
    tr.grid = tgrid;
    tr.passivity_capped = emitted > absorbed * (1.0 + 1e-12);
    double cap = 1.0;
    if (tr.passivity_capped) cap = emitted > 0.0 ? std::sqrt(absorbed / emitted) : 0.0;

    tr.field.resize(tgrid.n);
    tr.intensity.resize(tgrid.n);
    double in_energy_trace = 0.0;
    for (std::size_t i = 0; i < tgrid.n; ++i) {
        tr.field[i] = e_prompt[i] + cap * e_re[i];
        tr.intensity[i] = std::norm(tr.field[i]);
        in_energy_trace += std::norm(e_in[i]);
        if (!std::isfinite(tr.intensity[i]))
            throw NumericalError("simulate_trace: non-finite field in output trace");
    }
    tr.input_energy = in_energy_trace * tgrid.step;
    tr.absorbed_energy = absorbed;
    tr.emitted_energy = emitted * cap * cap;
    return tr;
}

// Fraction of the input energy arriving inside the window.
inline double echo_efficiency(const IntensityTrace& tr, const Window& w) {
    if (!(tr.input_energy > 0.0)) throw ConfigError("echo_efficiency: trace has no input energy");
    if (w.lo < tr.grid.start || w.hi > tr.grid.back())
        throw ConfigError("echo_efficiency: window outside trace");
    double e = 0.0;
    for (std::size_t i = 0; i < tr.grid.n; ++i) {
        const double t = tr.grid.point(i);
        if (w.contains(t)) e += tr.intensity[i];
    }
    return e * tr.grid.step / tr.input_energy;
}

// Arrival time of the intensity maximum near an expected echo time.
inline double echo_peak_time(const IntensityTrace& tr, double expected, double half_width) {
    const Window w{expected - half_width, expected + half_width};
    if (w.lo < tr.grid.start || w.hi > tr.grid.back())
        throw ConfigError("echo_peak_time: search window outside trace");
    double best = -1.0, tbest = expected;
    for (std::size_t i = 0; i < tr.grid.n; ++i) {
        const double t = tr.grid.point(i);
        if (w.contains(t) && tr.intensity[i] > best) {
            best = tr.intensity[i];
            tbest = t;
        }
    }
    return tbest;
}

}  // namespace starkafc
