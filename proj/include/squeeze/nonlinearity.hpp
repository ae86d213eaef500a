#pragma once

#include <cmath>
#include <limits>
#include <string>

#include "squeeze/ball.hpp"
#include "squeeze/errors.hpp"
#include "squeeze/grid.hpp"
#include "squeeze/norms.hpp"

namespace squeeze {

struct PhysParams {
    double beta_F = 0.1;
    double beta_p = 0.1;
    double theta_1 = 1.0;
    double theta_2 = 1.0;

    /// Thetas must be positive. The couplings may be zero, which switches the
    /// nonlinearity off and is used for degenerate checks.
    void validate() const {
        if (!(theta_1 > 0.0) || !std::isfinite(theta_1)) throw ConfigError("theta_1 must be positive");
        if (!(theta_2 > 0.0) || !std::isfinite(theta_2)) throw ConfigError("theta_2 must be positive");
        if (!(beta_F >= 0.0) || !std::isfinite(beta_F)) throw ConfigError("beta_F must be non-negative");
        if (!(beta_p >= 0.0) || !std::isfinite(beta_p)) throw ConfigError("beta_p must be non-negative");
    }

    friend bool operator==(const PhysParams&, const PhysParams&) = default;
};

/// Trace of G on the boundary, where w_tilde = 0.
inline double G_boundary_value(const PhysParams& p) {
    return -p.beta_F / (p.theta_2 * p.theta_2) + p.beta_p * (p.theta_1 - 1.0);
}

namespace detail {

inline void require_gap(const GridField& w_tilde, double theta_2, const char* where) {
    for (std::size_t i = 0; i < w_tilde.values.size(); ++i) {
        const double gap = w_tilde.values[i] + theta_2;
        if (!(gap > 0.0))
            throw QuenchError(std::string(where) + ": gap is non-positive", std::numeric_limits<double>::quiet_NaN(),
                              w_tilde.grid.node(i), gap);
    }
}

}  // namespace detail

/// G(w) = -beta_F / (w + theta_2)^2 + beta_p (theta_1 - 1), nodewise.
inline GridField eval_G(const PhysParams& p, const GridField& w_tilde) {
    detail::require_gap(w_tilde, p.theta_2, "eval_G");
    GridField out(w_tilde.grid);
    const double shift = p.beta_p * (p.theta_1 - 1.0);
    for (std::size_t i = 0; i < out.values.size(); ++i) {
        const double w = w_tilde.values[i] + p.theta_2;
        out.values[i] = -p.beta_F / (w * w) + shift;
    }
    return out;
}

/// G'(w) q = 2 beta_F q / (w + theta_2)^3, nodewise.
inline GridField eval_Gprime(const PhysParams& p, const GridField& w_tilde, const GridField& q) {
    detail::require_same_grid(w_tilde.grid, q.grid, "eval_Gprime");
    detail::require_gap(w_tilde, p.theta_2, "eval_Gprime");
    GridField out(w_tilde.grid);
    for (std::size_t i = 0; i < out.values.size(); ++i) {
        const double w = w_tilde.values[i] + p.theta_2;
        out.values[i] = 2.0 * p.beta_F * q.values[i] / (w * w * w);
    }
    return out;
}

/// 1 / (w_tilde + theta_2)^k, nodewise; its boundary trace is theta_2^{-k}.
inline GridField inverse_power(const GridField& w_tilde, double theta_2, int k) {
    detail::require_gap(w_tilde, theta_2, "inverse_power");
    GridField out(w_tilde.grid);
    for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] = std::pow(w_tilde.values[i] + theta_2, -k);
    return out;
}

/// Full H2 norm of 1 / (w_tilde + theta_2)^k.
inline double inverse_power_norm_H2(const GridField& w_tilde, double theta_2, int k) {
    return norm_H2_lifted(inverse_power(w_tilde, theta_2, k), std::pow(theta_2, -k));
}

/// Full H2 norm of G(w_tilde), lifted by its constant trace.
inline double G_norm_H2(const PhysParams& p, const GridField& w_tilde) {
    return norm_H2_lifted(eval_G(p, w_tilde), G_boundary_value(p));
}

}  // namespace squeeze
