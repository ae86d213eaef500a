#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "squeeze/ball.hpp"
#include "squeeze/elliptic.hpp"
#include "squeeze/errors.hpp"
#include "squeeze/grid.hpp"
#include "squeeze/nonlinearity.hpp"
#include "squeeze/norms.hpp"
#include "squeeze/state.hpp"
#include "squeeze/transform.hpp"

namespace squeeze {

/// One term of a sine series given by wave numbers ({k, 0} on the interval).
struct ModeAmp {
    std::size_t kx = 1;
    std::size_t ky = 0;
    double amp = 0.0;

    friend bool operator==(const ModeAmp&, const ModeAmp&) = default;
};

inline SpectralCoeffs coeffs_from_modes(const Grid& g, const std::vector<ModeAmp>& modes) {
    SpectralCoeffs c(g);
    for (const auto& m : modes) {
        std::size_t idx = 0;
        try {
            idx = g.mode_index(m.kx, m.ky);
        } catch (const std::out_of_range&) {
            throw ConfigError("initial mode (" + std::to_string(m.kx) + "," + std::to_string(m.ky) +
                              ") is outside the spectral truncation");
        }
        c.coeffs[idx] += m.amp;
    }
    return c;
}

/// Everything needed to run, verify, or sweep one configuration.
struct SimConfig {
    PhysParams params;
    Grid grid = Grid::interval(1.0, 128, 128);
    std::vector<ModeAmp> w0_modes;  // lifted initial displacement
    std::vector<ModeAmp> v0_modes;  // lifted initial velocity
    double horizon = 1e-6;
    double dt = 5e-9;
    double window = 0.0;  // Picard window length; 0 marches with single steps
    double picard_tol = 1e-10;
    int picard_max_iters = 40;
    std::optional<double> ball_radius;  // empty: auto
    double quench_margin = 0.0;
    double quench_floor = 1e-8;
    std::size_t snapshot_every = 0;  // 0: no snapshots
    std::size_t verify_trials = 100;
    std::uint64_t seed = 20240101;
    std::string tolerance_manifest;
    std::map<std::string, double> tolerances;

    SpectralCoeffs w0_tilde() const { return coeffs_from_modes(grid, w0_modes); }
    SpectralCoeffs v0() const { return coeffs_from_modes(grid, v0_modes); }
    StateX initial_state() const { return StateX(v0(), w0_tilde()); }

    void validate() const {
        params.validate();
        if (!(horizon > 0.0) || !std::isfinite(horizon)) throw ConfigError("[time] horizon must be positive");
        if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("[time] dt must be positive");
        if (dt > horizon) throw ConfigError("[time] dt must not exceed horizon");
        if (!(window >= 0.0)) throw ConfigError("[time] window must be non-negative");
        if (!(picard_tol > 0.0)) throw ConfigError("[solver] picard_tol must be positive");
        if (picard_max_iters < 1) throw ConfigError("[solver] picard_max_iters must be at least 1");
        if (!(quench_margin >= 0.0 && quench_margin < 1.0)) throw ConfigError("[solver] quench_margin must lie in [0, 1)");
        if (!(quench_floor >= 0.0)) throw ConfigError("[solver] quench_floor must be non-negative");
        (void)w0_tilde();
        (void)v0();
    }

    friend bool operator==(const SimConfig&, const SimConfig&) = default;
};

struct QuenchEvent {
    double time = 0.0;
    std::array<double, 2> location{0.0, 0.0};
    double min_gap = 0.0;
};

/// Sampled solution with per-sample diagnostics.
struct Trajectory {
    std::vector<double> times;
    std::vector<StateX> states;
    std::vector<GridField> pressures;  // u_tilde at each sample
    std::vector<double> min_gap;
    std::vector<double> X_norm;
    std::vector<double> ball_distance;  // ||w_tilde - w0_tilde||_{H2}
    std::optional<QuenchEvent> quench;
    bool outside_guarantee = false;  // run beyond the guaranteed existence time
    bool inside_ball = true;         // every stored state inside B_r
    double max_contraction = std::numeric_limits<double>::quiet_NaN();  // Picard runs only

    std::size_t size() const { return times.size(); }
};

/// Gap threshold below which a run is stopped as a quench.
inline double quench_threshold(double kappa, double margin, double floor) {
    return std::max(0.5 * kappa * (1.0 - margin), floor);
}

/// Nodal (v, w_tilde + theta_2) of a state.
struct NodalState {
    GridField v;
    GridField w_tilde;
};

inline NodalState to_nodal(const StateX& s) { return {dst_inverse(s.v), dst_inverse(s.w)}; }

/// Pressure u_tilde = S_o(v_tilde, w_tilde + theta_2).
inline GridField pressure(const PhysParams& p, const NodalState& n, const EllipticOptions& opt = {}) {
    GridField w = n.w_tilde;
    for (auto& x : w.values) x += p.theta_2;
    return solve_S_o(EllipticProblem(std::move(w), n.v, p.theta_2), opt).u_tilde;
}

/// Sine coefficients of G(w_tilde) + beta_p u_tilde; fills `u_out` if given.
inline SpectralCoeffs source_coeffs(const PhysParams& p, const StateX& s, GridField* u_out = nullptr,
                                    const EllipticOptions& opt = {}) {
    const NodalState n = to_nodal(s);
    GridField g = eval_G(p, n.w_tilde);
    if (p.beta_p != 0.0 || u_out) {
        GridField u = pressure(p, n, opt);
        for (std::size_t i = 0; i < g.values.size(); ++i) g.values[i] += p.beta_p * u.values[i];
        if (u_out) *u_out = std::move(u);
    }
    return dst_forward(g);
}

/// Throws QuenchError if the gap of `s` dropped below `threshold`.
inline void check_gap(const StateX& s, double theta_2, double threshold, double time) {
    const GridField w = dst_inverse(s.w);
    double m = theta_2;
    std::size_t at = 0;
    for (std::size_t i = 0; i < w.values.size(); ++i)
        if (w.values[i] + theta_2 < m) {
            m = w.values[i] + theta_2;
            at = i;
        }
    if (!(m >= threshold) || !std::isfinite(m))
        throw QuenchError("gap fell below the quench threshold", time, w.grid.node(at), m);
}

/// Appends a sample with its diagnostics.
inline void record_sample(Trajectory& traj, const PhysParams& p, const SpectralCoeffs& w0_tilde, double t,
                          const StateX& s, GridField u) {
    traj.times.push_back(t);
    traj.min_gap.push_back(min_gap(s.w, p.theta_2));
    traj.X_norm.push_back(norm_X(s));
    traj.ball_distance.push_back(norm_H2(s.w - w0_tilde));
    traj.states.push_back(s);
    traj.pressures.push_back(std::move(u));
}

}  // namespace squeeze
