#pragma once

#include <cmath>
#include <cstddef>
#include <memory>
#include <vector>

#include "squeeze/grid.hpp"
#include "squeeze/state.hpp"

namespace squeeze {

/// Lap - Lap^2 with pinned boundary conditions, diagonal in the sine basis:
/// it multiplies mode k by -nu_k, nu_k = mu_k + mu_k^2.
class PinnedOperator {
public:
    explicit PinnedOperator(const Grid& grid) : grid_(grid) {
        const auto mu = grid_.eigenvalues();
        std::vector<double> nu(mu.size()), om(mu.size());
        for (std::size_t k = 0; k < mu.size(); ++k) {
            nu[k] = mu[k] + mu[k] * mu[k];
            om[k] = std::sqrt(nu[k]);
        }
        nu_ = std::make_shared<const std::vector<double>>(std::move(nu));
        omega_ = std::make_shared<const std::vector<double>>(std::move(om));
    }

    const Grid& grid() const { return grid_; }
    std::span<const double> nu() const { return *nu_; }
    std::span<const double> omega() const { return *omega_; }

private:
    Grid grid_;
    std::shared_ptr<const std::vector<double>> nu_;
    std::shared_ptr<const std::vector<double>> omega_;
};

inline SpectralCoeffs apply_Aop(const PinnedOperator& op, const SpectralCoeffs& w) {
    detail::require_same_grid(op.grid(), w.grid, "apply_Aop");
    SpectralCoeffs out(w.grid);
    const auto nu = op.nu();
    for (std::size_t k = 0; k < nu.size(); ++k) out.coeffs[k] = -nu[k] * w.coeffs[k];
    return out;
}

/// Block generator [[0, A], [1, 0]] acting on (v, w).
inline StateX apply_generator(const PinnedOperator& op, const StateX& s) {
    return StateX(apply_Aop(op, s.w), s.v);
}

/// Exact flow of w'' = A w: a rotation per mode. Any real t is accepted.
inline StateX semigroup_apply(const PinnedOperator& op, const StateX& s, double t) {
    detail::require_same_grid(op.grid(), s.grid(), "semigroup_apply");
    StateX out(s.grid());
    const auto om = op.omega();
    for (std::size_t k = 0; k < om.size(); ++k) {
        const double c = std::cos(om[k] * t), sn = std::sin(om[k] * t);
        const double v = s.v.coeffs[k], w = s.w.coeffs[k];
        out.w.coeffs[k] = w * c + v / om[k] * sn;
        out.v.coeffs[k] = -om[k] * w * sn + v * c;
    }
    return out;
}

/// ||(T(h)s - s)/h - As||_X.
inline double generator_check(const PinnedOperator& op, const StateX& s, double h = 1e-4) {
    const StateX fd = (1.0 / h) * (semigroup_apply(op, s, h) - s);
    return norm_X(fd - apply_generator(op, s));
}

/// Per-mode weights of int_0^dt T(dt - s) (g(s), 0) ds for a source that is
/// linear on [0, dt]: g(s) = g0 + (s/dt)(g1 - g0).
///
/// The integral is alpha * g0 + (beta / dt) * (g1 - g0) in each slot.
struct DuhamelWeights {
    double dt = 0.0;
    std::vector<double> alpha_v, alpha_w, beta_v, beta_w;
};

inline DuhamelWeights duhamel_weights(const PinnedOperator& op, double dt) {
    const auto om = op.omega();
    const std::size_t m = om.size();
    DuhamelWeights d{dt, std::vector<double>(m), std::vector<double>(m), std::vector<double>(m), std::vector<double>(m)};
    for (std::size_t k = 0; k < m; ++k) {
        const double w = om[k];
        const double x = w * dt;
        const double half = std::sin(0.5 * x);
        const double one_minus_cos = 2.0 * half * half;
        d.alpha_v[k] = std::sin(x) / w;
        d.alpha_w[k] = one_minus_cos / (w * w);
        d.beta_v[k] = d.alpha_w[k];
        if (std::abs(x) < 1.0) {
            // (x - sin x) / x^3 = sum_j (-1)^j x^{2j} / (2j + 3)!, free of cancellation
            const double x2 = x * x;
            double term = 1.0 / 6.0, sum = 0.0;
            for (int j = 0; j < 12; ++j) {
                sum += term;
                term *= -x2 / ((2.0 * j + 4.0) * (2.0 * j + 5.0));
            }
            d.beta_w[k] = dt * dt * dt * sum;
        } else {
            d.beta_w[k] = (x - std::sin(x)) / (w * w * w);
        }
    }
    return d;
}

}  // namespace squeeze
