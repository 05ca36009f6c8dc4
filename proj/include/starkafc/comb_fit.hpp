#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "starkafc/comb.hpp"

namespace starkafc {

struct CombFitResult {
    CombParams params;
    double residual_rms = 0.0;
    std::size_t n_teeth = 0;
};

namespace detail {

// Comb model and its parameter gradient at one detuning.
// p = {delta, gamma, depth, d0, f0}
inline double comb_model(const double* p, double f, long half, double* grad) {
    const double delta = p[0], gamma = p[1], depth = p[2], d0 = p[3], f0 = p[4];
    const double c = 4.0 * std::numbers::ln2 / (gamma * gamma);
    double sum = 0.0, su = 0.0, suk = 0.0, su2 = 0.0;
    for (long k = -half; k <= half; ++k) {
        const double u = f - f0 - static_cast<double>(k) * delta;
        const double g = std::exp(-c * u * u);
        sum += g;
        su += g * u;
        suk += g * u * static_cast<double>(k);
        su2 += g * u * u;
    }
    if (grad) {
        const double cc = 2.0 * c;
        grad[0] = depth * cc * suk;             // d/d delta
        grad[1] = depth * cc * su2 / gamma;     // d/d gamma
        grad[2] = sum;                          // d/d depth
        grad[3] = 1.0;                          // d/d d0
        grad[4] = depth * cc * su;              // d/d f0
    }
    return d0 + depth * sum;
}

}  // namespace detail

// Least-squares recovery of comb parameters from a measured spectrum
// (Levenberg-Marquardt on {spacing, tooth width, depth, floor, centre}).
inline CombFitResult fit_comb(const AbsorptionSpectrum& s) {
    s.validate();
    const auto peaks = detect_teeth(s);
    if (peaks.size() < 3) throw ConfigError("fit_comb: fewer than 3 teeth detected");

    std::vector<double> pos;
    pos.reserve(peaks.size());
    for (auto i : peaks) {
        // Parabolic refinement of each peak position.
        double f = s.grid.point(i);
        if (i > 0 && i + 1 < s.grid.n) {
            const double y0 = s.d[i - 1], y1 = s.d[i], y2 = s.d[i + 1];
            const double den = y0 - 2.0 * y1 + y2;
            if (std::abs(den) > 1e-300) f += 0.5 * (y0 - y2) / den * s.grid.step * -1.0;
        }
        pos.push_back(f);
    }

    std::vector<double> gaps;
    for (std::size_t i = 1; i < pos.size(); ++i) gaps.push_back(pos[i] - pos[i - 1]);
    std::sort(gaps.begin(), gaps.end());
    const double delta0 = gaps[gaps.size() / 2];

    double centroid = 0.0;
    for (double f : pos) centroid += f;
    centroid /= static_cast<double>(pos.size());
    double f00 = pos.front();
    for (double f : pos)
        if (std::abs(f - centroid) < std::abs(f00 - centroid)) f00 = f;
    long half = 0;
    for (double f : pos)
        half = std::max(half, static_cast<long>(std::llround(std::abs(f - f00) / delta0)));

    std::vector<double> sorted = s.d;
    std::sort(sorted.begin(), sorted.end());
    const double d00 = sorted[sorted.size() / 10];
    const double depth0 = sorted.back() - d00;
    double gamma0 = delta0 / 8.0;
    try {
        gamma0 = tooth_fwhm(s, f00);
    } catch (const ConfigError&) {
    }

    const std::size_t n = s.grid.n;
    Eigen::VectorXd p(5);
    p << delta0, gamma0, depth0, d00, f00;

    Eigen::VectorXd r(n);
    Eigen::MatrixXd J(n, 5);
    double lambda = 1e-3;
    double prev_cost = -1.0;
    for (int it = 0; it < 60; ++it) {
        for (std::size_t i = 0; i < n; ++i) {
            double grad[5];
            r(i) = detail::comb_model(p.data(), s.grid.point(i), half, grad) - s.d[i];
            for (int c = 0; c < 5; ++c) J(i, c) = grad[c];
        }
        const double cost = r.squaredNorm();
        if (prev_cost >= 0.0 && std::abs(prev_cost - cost) < 1e-14 * (1.0 + cost)) break;
        prev_cost = cost;

        const Eigen::MatrixXd H = J.transpose() * J;
        const Eigen::VectorXd g = J.transpose() * r;
        for (int tries = 0; tries < 12; ++tries) {
            Eigen::MatrixXd Hd = H;
            for (int c = 0; c < 5; ++c) Hd(c, c) += lambda * std::max(H(c, c), 1e-12);
            const Eigen::VectorXd step = Hd.ldlt().solve(-g);
            Eigen::VectorXd q = p + step;
            if (q(0) > 0.0 && q(1) > 0.0 && q(2) > 0.0) {
                double c2 = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    const double m = detail::comb_model(q.data(), s.grid.point(i), half, nullptr);
                    c2 += (m - s.d[i]) * (m - s.d[i]);
                }
                if (c2 < cost) {
                    p = q;
                    lambda = std::max(lambda * 0.3, 1e-9);
                    break;
                }
            }
            lambda *= 4.0;
        }
    }

    double cost = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double m = detail::comb_model(p.data(), s.grid.point(i), half, nullptr);
        cost += (m - s.d[i]) * (m - s.d[i]);
    }

    CombFitResult out;
    out.n_teeth = static_cast<std::size_t>(2 * half + 1);
    out.params.delta = p(0);
    out.params.finesse = p(0) / p(1);
    out.params.bandwidth = static_cast<double>(2 * half) * p(0);
    out.params.tooth_depth = p(2);
    out.params.background_d0 = std::max(p(3), 0.0);
    out.params.center = p(4);
    out.residual_rms = std::sqrt(cost / static_cast<double>(n));
    return out;
}

}  // namespace starkafc
