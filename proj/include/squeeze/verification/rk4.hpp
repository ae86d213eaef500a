#pragma once

// Independent reference integrator. Deliberately built only on the spatial
// primitives: it must not include the semigroup or evolution headers.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "squeeze/errors.hpp"
#include "squeeze/grid.hpp"
#include "squeeze/model.hpp"
#include "squeeze/norms.hpp"
#include "squeeze/state.hpp"

namespace squeeze {

/// The reference integrator cannot be trusted for this configuration.
class OracleFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Rk4Options {
    int substeps = 10;             // RK4 steps per main-solver step
    double max_stiffness = 2.5;    // omega_max * step
    std::size_t record_every = 1;  // in main-solver steps
};

/// Classical RK4 on the Galerkin system w_k' = v_k, v_k' = -nu_k w_k + <F(state), phi_k>,
/// sampled on the main solver's time grid.
inline Trajectory rk4_reference(const SimConfig& cfg, const Rk4Options& opt = {}) {
    cfg.validate();
    const PhysParams& p = cfg.params;
    const Grid& g = cfg.grid;
    const auto mu = g.eigenvalues();
    std::vector<double> nu(mu.size());
    double nu_max = 0.0;
    for (std::size_t k = 0; k < mu.size(); ++k) {
        nu[k] = mu[k] + mu[k] * mu[k];
        nu_max = std::max(nu_max, nu[k]);
    }

    const double q = cfg.horizon / cfg.dt;
    const std::size_t N = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(q - 1e-9 * q)));
    const double H = cfg.horizon / static_cast<double>(N);
    const double h = H / opt.substeps;
    if (std::sqrt(nu_max) * h > opt.max_stiffness)
        throw OracleFailure("rk4_reference: step too large for the stiffest mode (omega_max * h = " +
                            std::to_string(std::sqrt(nu_max) * h) + "); reduce dt");

    const StateX s0 = cfg.initial_state();
    const double kappa = min_gap(s0.w, p.theta_2);
    const double threshold = quench_threshold(kappa, cfg.quench_margin, cfg.quench_floor);

    auto rhs = [&](const StateX& s, double t) {
        check_gap(s, p.theta_2, threshold, t);
        const SpectralCoeffs f = source_coeffs(p, s);
        StateX d(g);
        for (std::size_t k = 0; k < nu.size(); ++k) {
            d.w.coeffs[k] = s.v.coeffs[k];
            d.v.coeffs[k] = -nu[k] * s.w.coeffs[k] + f.coeffs[k];
        }
        return d;
    };

    Trajectory tr;
    StateX s = s0;
    const std::size_t stride = std::max<std::size_t>(1, opt.record_every);
    for (std::size_t n = 0; n <= N; ++n) {
        const double t = H * static_cast<double>(n);
        try {
            check_gap(s, p.theta_2, threshold, t);
            if (n % stride == 0 || n == N) {
                GridField u(g);
                (void)source_coeffs(p, s, &u);
                record_sample(tr, p, s0.w, t, s, std::move(u));
            }
            if (n == N) break;
            for (int m = 0; m < opt.substeps; ++m) {
                const double tm = t + h * m;
                const StateX k1 = rhs(s, tm);
                const StateX k2 = rhs(s + (0.5 * h) * k1, tm + 0.5 * h);
                const StateX k3 = rhs(s + (0.5 * h) * k2, tm + 0.5 * h);
                const StateX k4 = rhs(s + h * k3, tm + h);
                s = s + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            }
        } catch (const QuenchError& e) {
            tr.quench = QuenchEvent{e.time(), e.location(), e.min_gap()};
            break;
        }
    }
    return tr;
}

}  // namespace squeeze
