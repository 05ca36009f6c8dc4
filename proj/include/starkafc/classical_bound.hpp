#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "starkafc/errors.hpp"

namespace starkafc {

inline double poisson_pmf(std::size_t n, double mu) {
    if (mu < 0.0) throw ConfigError("poisson_pmf: mu < 0");
    if (mu == 0.0) return n == 0 ? 1.0 : 0.0;
    double logp = -mu + static_cast<double>(n) * std::log(mu);
    for (std::size_t k = 2; k <= n; ++k) logp -= std::log(static_cast<double>(k));
    return std::exp(logp);
}

// Best average fidelity a measure-and-prepare attack reaches on an N-photon
// time-bin qubit.
inline double measure_prepare_fidelity(std::size_t n) {
    return (static_cast<double>(n) + 1.0) / (static_cast<double>(n) + 2.0);
}

// Best classical fidelity for coherent-state inputs of mean photon number mu
// against a memory of efficiency eta. The attack picks per-photon-number
// acceptance fractions q_N in [0,1], must reproduce the success budget
// eta * (1 - P(0)), and cashes in high-N trials first since F(N) grows with N:
//   maximize sum q_N P(N) F(N) / budget  s.t.  sum q_N P(N) = budget.
inline double classical_bound(double mu, double eta, std::size_t n_max = 40) {
    if (!(mu > 0.0)) throw ConfigError("classical_bound: mu <= 0");
    if (!(eta > 0.0) || eta > 1.0) throw ConfigError("classical_bound: eta outside (0, 1]");
    const double budget = eta * (1.0 - std::exp(-mu));
    double remaining = budget;
    double gain = 0.0;
    for (std::size_t n = n_max; n > 0 && remaining > 0.0; --n) {
        const double p = poisson_pmf(n, mu);
        const double take = std::min(p, remaining);
        gain += take * measure_prepare_fidelity(n);
        remaining -= take;
    }
    if (remaining > 1e-12 * budget)
        throw NumericalError("classical_bound: n_max too small for this mu");
    return gain / budget;
}

// Independent check: the same linear program solved by vertex enumeration.
// Every optimum sits at a vertex where each q_N is 0 or 1 except at most one
// fractional coordinate; enumerate all of them. Exponential in n_max, meant
// for n_max <= 12.
inline double classical_bound_lp_oracle(double mu, double eta, std::size_t n_max = 12) {
    if (n_max > 20) throw ConfigError("classical_bound_lp_oracle: n_max too large to enumerate");
    const double budget = eta * (1.0 - std::exp(-mu));
    std::vector<double> p(n_max + 1), f(n_max + 1);
    for (std::size_t n = 0; n <= n_max; ++n) {
        p[n] = poisson_pmf(n, mu);
        f[n] = measure_prepare_fidelity(n);
    }
    double best = -1.0;
    const std::size_t m = n_max;  // photon numbers 1..n_max; N=0 never helps but try anyway
    const std::uint64_t lim = 1ull << (m + 1);
    for (std::uint64_t mask = 0; mask < lim; ++mask) {
        double used = 0.0, gain = 0.0;
        for (std::size_t n = 0; n <= m; ++n)
            if (mask & (1ull << n)) {
                used += p[n];
                gain += p[n] * f[n];
            }
        if (used > budget + 1e-15) continue;
        // Top up with one fractional coordinate.
        const double slack = budget - used;
        for (std::size_t n = 0; n <= m; ++n) {
            if (mask & (1ull << n)) continue;
            const double take = std::min(p[n], slack);
            const double val = (gain + take * f[n]) / budget;
            if (val > best && take >= slack - 1e-18) best = val;
        }
        if (slack <= 1e-18 && gain / budget > best) best = gain / budget;
    }
    if (best < 0.0) throw NumericalError("classical_bound_lp_oracle: infeasible budget");
    return best;
}

}  // namespace starkafc
