#pragma once

#include <algorithm>
#include <cmath>

#include "squeeze/errors.hpp"
#include "squeeze/grid.hpp"
#include "squeeze/norms.hpp"
#include "squeeze/random_fields.hpp"
#include "squeeze/transform.hpp"

namespace squeeze {

/// H2 ball of radius r around the lifted initial displacement.
struct BallSpec {
    SpectralCoeffs w0_tilde;
    double theta_2 = 1.0;
    double kappa = 1.0;
    double r = 0.0;
    double C_embed = 1.0;

    /// Validates 0 < r < kappa / (2 C_embed).
    void validate() const {
        if (!(kappa > 0.0)) throw DomainError("kappa must be positive (initial gap touches down)");
        if (!(r > 0.0) || !(r < kappa / (2.0 * C_embed)))
            throw ConfigError("ball radius r must satisfy 0 < r < kappa/(2*C_embed) (r = " + std::to_string(r) +
                              ", bound = " + std::to_string(kappa / (2.0 * C_embed)) + ")");
    }
};

/// Smallest gap w = w_tilde + theta_2 over the nodes and the boundary.
inline double min_gap(const GridField& w_tilde, double theta_2) {
    double m = theta_2;
    for (double x : w_tilde.values) m = std::min(m, x + theta_2);
    return m;
}

inline double min_gap(const SpectralCoeffs& w_tilde, double theta_2) { return min_gap(dst_inverse(w_tilde), theta_2); }

/// kappa = inf of the initial gap.
inline double initial_kappa(const SpectralCoeffs& w0_tilde, double theta_2) { return min_gap(w0_tilde, theta_2); }

struct BallCheck {
    bool inside = false;
    bool lower_bound_ok = false;
    double min_gap = 0.0;
    double distance = 0.0;
};

inline BallCheck ball_check(const BallSpec& spec, const SpectralCoeffs& w_tilde) {
    detail::require_same_grid(spec.w0_tilde.grid, w_tilde.grid, "ball_check");
    BallCheck out;
    out.distance = norm_H2(w_tilde - spec.w0_tilde);
    out.inside = out.distance <= spec.r;
    out.min_gap = min_gap(w_tilde, spec.theta_2);
    out.lower_bound_ok = out.min_gap >= spec.kappa / 2.0;
    return out;
}

inline BallCheck ball_check(const BallSpec& spec, const GridField& w_tilde) {
    return ball_check(spec, dst_forward(w_tilde));
}

/// Random member of the ball: w0 plus a decaying random field of H2 norm r * U(0, 1].
inline SpectralCoeffs sample_ball_member(const BallSpec& spec, Rng& rng) {
    const double rho = spec.r * (1.0 - uniform(rng, 0.0, 1.0));
    return spec.w0_tilde + random_coeffs_h2(spec.w0_tilde.grid, rng, rho);
}

}  // namespace squeeze
