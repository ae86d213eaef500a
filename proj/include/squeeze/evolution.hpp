#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "squeeze/constants.hpp"
#include "squeeze/elliptic.hpp"
#include "squeeze/errors.hpp"
#include "squeeze/model.hpp"
#include "squeeze/nonlinearity.hpp"
#include "squeeze/semigroup.hpp"
#include "squeeze/state.hpp"

namespace squeeze {

namespace detail {

/// T(dt) together with the Duhamel weights of one step.
class Propagator {
public:
    Propagator(const PinnedOperator& op, double dt) : op_(op), w_(duhamel_weights(op, dt)) {
        const auto om = op.omega();
        c_.resize(om.size());
        s_.resize(om.size());
        for (std::size_t k = 0; k < om.size(); ++k) {
            c_[k] = std::cos(om[k] * dt);
            s_[k] = std::sin(om[k] * dt);
        }
    }

    double dt() const { return w_.dt; }

    /// T(dt) y + int_0^dt T(dt - s) (g(s), 0) ds for g linear between g0 and g1.
    StateX advance(const StateX& y, const SpectralCoeffs& g0, const SpectralCoeffs& g1) const {
        StateX out(y.grid());
        const auto om = op_.omega();
        const double inv_dt = 1.0 / w_.dt;
        for (std::size_t k = 0; k < om.size(); ++k) {
            const double v = y.v.coeffs[k], w = y.w.coeffs[k];
            const double a = g0.coeffs[k], b = (g1.coeffs[k] - g0.coeffs[k]) * inv_dt;
            out.w.coeffs[k] = w * c_[k] + v / om[k] * s_[k] + w_.alpha_w[k] * a + w_.beta_w[k] * b;
            out.v.coeffs[k] = -om[k] * w * s_[k] + v * c_[k] + w_.alpha_v[k] * a + w_.beta_v[k] * b;
        }
        return out;
    }

    /// Same with a source constant over the step.
    StateX advance(const StateX& y, const SpectralCoeffs& g) const { return advance(y, g, g); }

private:
    const PinnedOperator& op_;
    DuhamelWeights w_;
    std::vector<double> c_, s_;
};

inline QuenchError stamp(const QuenchError& e, double t) {
    return QuenchError(e.what(), std::isnan(e.time()) ? t : e.time(), e.location(), e.min_gap());
}

}  // namespace detail

/// One exponential-midpoint step driven by an arbitrary source F(state) -> v-slot coefficients.
///
/// s_half = T(dt/2) s + int_0^{dt/2} T(.) (F(s), 0); s_next = T(dt) s + int_0^dt T(.) (F(s_half), 0),
/// with the integrals of the frozen sources taken exactly per mode.
template <class Source>
StateX duhamel_step_with(const PinnedOperator& op, const StateX& s, double dt, Source&& F) {
    const detail::Propagator half(op, 0.5 * dt), full(op, dt);
    const StateX s_half = half.advance(s, F(s));
    return full.advance(s, F(s_half));
}

/// One step of the mild-solution recursion with F = G(w_tilde) + beta_p S_o(v_tilde, w_tilde + theta_2).
inline StateX duhamel_step(const PinnedOperator& op, const PhysParams& params, const StateX& s, double t, double dt) {
    try {
        return duhamel_step_with(op, s, dt, [&](const StateX& x) { return source_coeffs(params, x); });
    } catch (const QuenchError& e) {
        throw detail::stamp(e, t);
    }
}

struct PicardOptions {
    enum class Start { constant, linear_flow };
    Start start = Start::constant;
    std::optional<double> quench_kappa;  // kappa setting the quench threshold; default: ledger kappa
    EllipticOptions elliptic;
};

struct PicardResult {
    Trajectory trajectory;
    int iterations = 0;
    std::vector<double> contraction_estimates;  // d_m / d_{m-1}
    std::vector<double> differences;            // d_m = sup_t ||z_{m+1} - z_m||_X
    ConstantsLedger ledger;
    double dt = 0.0;
};

namespace detail {

inline std::size_t step_count(double T, double dt) {
    const double q = T / dt;
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(q - 1e-9 * q)));
}

}  // namespace detail

/// Picard iteration of the discrete Duhamel map on [0, T] from `s0`, with `t0` the absolute start time.
inline PicardResult picard_solve_from(const SimConfig& cfg, const StateX& s0, double T, const ConstantsLedger& ledger,
                                      const PicardOptions& opt = {}, double t0 = 0.0) {
    if (!(T > 0.0)) throw ConfigError("picard_solve: horizon must be positive");
    const PhysParams& p = cfg.params;
    const PinnedOperator op(cfg.grid);
    const std::size_t N = detail::step_count(T, cfg.dt);
    const double h = T / static_cast<double>(N);
    const detail::Propagator prop(op, h);
    const double threshold =
        quench_threshold(opt.quench_kappa.value_or(ledger.kappa), cfg.quench_margin, cfg.quench_floor);

    std::vector<double> times(N + 1);
    for (std::size_t n = 0; n <= N; ++n) times[n] = h * static_cast<double>(n);

    std::vector<StateX> z;
    z.reserve(N + 1);
    for (std::size_t n = 0; n <= N; ++n)
        z.push_back(opt.start == PicardOptions::Start::constant ? s0 : semigroup_apply(op, s0, times[n]));

    auto sources = [&](const std::vector<StateX>& iter, std::vector<GridField>* u) {
        std::vector<SpectralCoeffs> g;
        g.reserve(iter.size());
        for (std::size_t n = 0; n < iter.size(); ++n) {
            try {
                check_gap(iter[n], p.theta_2, threshold, t0 + times[n]);
                GridField un(cfg.grid);
                g.push_back(source_coeffs(p, iter[n], u ? &un : nullptr, opt.elliptic));
                if (u) u->push_back(std::move(un));
            } catch (const QuenchError& e) {
                throw detail::stamp(e, t0 + times[n]);
            }
        }
        return g;
    };

    PicardResult res;
    res.ledger = ledger;
    res.dt = h;
    bool converged = false;
    for (int m = 0; m < cfg.picard_max_iters; ++m) {
        const auto g = sources(z, nullptr);
        std::vector<StateX> y;
        y.reserve(N + 1);
        y.push_back(s0);
        for (std::size_t n = 0; n < N; ++n) y.push_back(prop.advance(y[n], g[n], g[n + 1]));
        double d = 0.0;
        for (std::size_t n = 0; n <= N; ++n) d = std::max(d, distance_X(y[n], z[n]));
        if (!res.differences.empty())
            res.contraction_estimates.push_back(res.differences.back() > 0.0 ? d / res.differences.back() : 0.0);
        res.differences.push_back(d);
        z = std::move(y);
        if (d < cfg.picard_tol) {
            converged = true;
            break;
        }
        ++res.iterations;
    }
    if (!converged) {
        const double last = res.contraction_estimates.empty() ? std::numeric_limits<double>::quiet_NaN()
                                                              : res.contraction_estimates.back();
        throw IterationError("Picard iteration did not converge within " + std::to_string(cfg.picard_max_iters) +
                                 " iterations (last contraction ratio " + std::to_string(last) + ")",
                             res.iterations, last);
    }

    std::vector<GridField> u;
    u.reserve(N + 1);
    (void)sources(z, &u);
    Trajectory& tr = res.trajectory;
    for (std::size_t n = 0; n <= N; ++n) record_sample(tr, p, s0.w, t0 + times[n], z[n], u[n]);
    tr.outside_guarantee = T > ledger.T0;
    for (double dist : tr.ball_distance) tr.inside_ball = tr.inside_ball && dist <= ledger.r;
    tr.max_contraction = 0.0;
    for (double c : res.contraction_estimates) tr.max_contraction = std::max(tr.max_contraction, c);
    return res;
}

/// Picard iteration on [0, T] from the configuration's initial state.
///
/// Runs past the guaranteed existence time are allowed and flagged on the trajectory.
inline PicardResult picard_solve(const SimConfig& cfg, double T, const PicardOptions& opt = {}) {
    cfg.validate();
    const StateX s0 = cfg.initial_state();
    return picard_solve_from(cfg, s0, T, compute_constants(cfg, s0), opt);
}

struct EvolveOptions {
    std::size_t record_every = 1;
    std::optional<double> window;  // overrides cfg.window
    EllipticOptions elliptic;
};

/// March over [0, horizon]; stops early with a quench record if the gap collapses.
inline Trajectory evolve(const SimConfig& cfg, const EvolveOptions& eo = {}) {
    cfg.validate();
    const PhysParams& p = cfg.params;
    const StateX s0 = cfg.initial_state();
    const ConstantsLedger ledger = compute_constants(cfg, s0);
    const double threshold = quench_threshold(ledger.kappa, cfg.quench_margin, cfg.quench_floor);
    const double window = eo.window.value_or(cfg.window);
    const std::size_t stride = std::max<std::size_t>(1, eo.record_every);

    Trajectory tr;
    tr.outside_guarantee = cfg.horizon > ledger.T0;

    auto quenched = [&](const QuenchError& e) {
        tr.quench = QuenchEvent{e.time(), e.location(), e.min_gap()};
    };

    if (window > 0.0) {
        StateX s = s0;
        double t = 0.0;
        PicardOptions po;
        po.quench_kappa = ledger.kappa;
        po.elliptic = eo.elliptic;
        std::size_t sample = 0;
        while (t < cfg.horizon * (1.0 - 1e-12)) {
            try {
                const ConstantsLedger seg = compute_constants(cfg, s);
                const double len = std::min({window, seg.T0, cfg.horizon - t});
                PicardResult r = picard_solve_from(cfg, s, len, seg, po, t);
                const Trajectory& part = r.trajectory;
                tr.max_contraction = std::isnan(tr.max_contraction) ? part.max_contraction
                                                                    : std::max(tr.max_contraction, part.max_contraction);
                for (std::size_t i = (sample == 0 ? 0 : 1); i < part.size(); ++i, ++sample) {
                    if (sample % stride != 0 && i + 1 != part.size()) continue;
                    tr.times.push_back(part.times[i]);
                    tr.states.push_back(part.states[i]);
                    tr.pressures.push_back(part.pressures[i]);
                    tr.min_gap.push_back(part.min_gap[i]);
                    tr.X_norm.push_back(part.X_norm[i]);
                    tr.ball_distance.push_back(norm_H2(part.states[i].w - s0.w));
                }
                s = part.states.back();
                t = part.times.back();
            } catch (const QuenchError& e) {
                quenched(e);
                break;
            } catch (const DomainError& e) {
                quenched(QuenchError(e.what(), t, {0.0, 0.0}, min_gap(s.w, p.theta_2)));
                break;
            }
        }
    } else {
        const PinnedOperator op(cfg.grid);
        const std::size_t N = detail::step_count(cfg.horizon, cfg.dt);
        const double h = cfg.horizon / static_cast<double>(N);
        const detail::Propagator half(op, 0.5 * h), full(op, h);
        StateX s = s0;
        for (std::size_t n = 0; n <= N; ++n) {
            const double t = h * static_cast<double>(n);
            try {
                check_gap(s, p.theta_2, threshold, t);
                GridField u(cfg.grid);
                const SpectralCoeffs g = source_coeffs(p, s, &u, eo.elliptic);
                if (n % stride == 0 || n == N) record_sample(tr, p, s0.w, t, s, std::move(u));
                if (n == N) break;
                const StateX s_half = half.advance(s, g);
                check_gap(s_half, p.theta_2, threshold, t + 0.5 * h);
                s = full.advance(s, source_coeffs(p, s_half, nullptr, eo.elliptic));
            } catch (const QuenchError& e) {
                quenched(detail::stamp(e, t));
                break;
            }
        }
    }
    for (double dist : tr.ball_distance) tr.inside_ball = tr.inside_ball && dist <= ledger.r;
    return tr;
}

struct TangentResult {
    std::vector<double> times;
    std::vector<StateX> states;  // (p_tilde, q_tilde)
    int iterations = 0;
    std::vector<double> contraction_estimates;
};

/// Time derivative of a mild solution as the fixed point of the linearized Duhamel map.
///
/// Initial datum (G_0, 0) + A s_0 with G_0 = G(w_0) + beta_p u_0; the v-slot source is
/// G'(w) q + beta_p (D_v S_o p + D_w S_o q) along the stored trajectory, whose samples
/// must be uniformly spaced.
inline TangentResult tangent_solve(const SimConfig& cfg, const Trajectory& traj, const EllipticOptions& eopt = {}) {
    if (traj.size() < 2) throw ConfigError("tangent_solve: trajectory needs at least two samples");
    const PhysParams& p = cfg.params;
    const PinnedOperator op(traj.states[0].grid());
    const std::size_t N = traj.size() - 1;
    const double h = (traj.times.back() - traj.times.front()) / static_cast<double>(N);
    for (std::size_t n = 1; n <= N; ++n)
        if (std::abs(traj.times[n] - traj.times[n - 1] - h) > 1e-9 * h)
            throw ConfigError("tangent_solve: trajectory samples must be uniformly spaced");
    const detail::Propagator prop(op, h);

    // per-sample frozen coefficients
    std::vector<EllipticProblem> problems;
    std::vector<GridField> gprime_w;  // w_tilde nodal for G'
    problems.reserve(N + 1);
    for (std::size_t n = 0; n <= N; ++n) {
        const NodalState ns = to_nodal(traj.states[n]);
        GridField w = ns.w_tilde;
        for (auto& x : w.values) x += p.theta_2;
        problems.emplace_back(std::move(w), ns.v, p.theta_2);
        gprime_w.push_back(ns.w_tilde);
    }

    const StateX& s0 = traj.states[0];
    const SpectralCoeffs G0 = source_coeffs(p, s0, nullptr, eopt);
    StateX y0 = apply_generator(op, s0);
    y0.v = std::move(y0.v) + G0;

    auto source = [&](std::size_t n, const StateX& pq) {
        const GridField pn = dst_inverse(pq.v), qn = dst_inverse(pq.w);
        GridField g = eval_Gprime(p, gprime_w[n], qn);
        if (p.beta_p != 0.0) {
            const GridField a = dv_S_o(problems[n], pn, eopt);
            const GridField b = dw_S_o(problems[n], qn, eopt);
            for (std::size_t i = 0; i < g.values.size(); ++i) g.values[i] += p.beta_p * (a.values[i] + b.values[i]);
        }
        return dst_forward(g);
    };

    TangentResult res;
    res.times = traj.times;
    std::vector<StateX> z(N + 1, y0);
    double prev = 0.0;
    bool converged = false;
    for (int m = 0; m < cfg.picard_max_iters; ++m) {
        std::vector<SpectralCoeffs> g;
        g.reserve(N + 1);
        for (std::size_t n = 0; n <= N; ++n) g.push_back(source(n, z[n]));
        std::vector<StateX> y;
        y.reserve(N + 1);
        y.push_back(y0);
        for (std::size_t n = 0; n < N; ++n) y.push_back(prop.advance(y[n], g[n], g[n + 1]));
        double d = 0.0;
        for (std::size_t n = 0; n <= N; ++n) d = std::max(d, distance_X(y[n], z[n]));
        if (m > 0) res.contraction_estimates.push_back(prev > 0.0 ? d / prev : 0.0);
        prev = d;
        z = std::move(y);
        // relative to the size of the derivative, which can be large
        if (d < cfg.picard_tol * std::max(1.0, norm_X(y0))) {
            converged = true;
            break;
        }
        ++res.iterations;
    }
    if (!converged)
        throw IterationError("tangent iteration did not converge", res.iterations,
                             res.contraction_estimates.empty() ? 0.0 : res.contraction_estimates.back());
    res.states = std::move(z);
    return res;
}

struct TimeLipschitzReport {
    double max_ratio = 0.0;
    double L_V_ledger = 0.0;
};

/// max ||s(t_j) - s(t_i)||_X / (t_j - t_i) over sample pairs (all pairs up to 512 samples,
/// dyadic lags beyond that).
inline TimeLipschitzReport lipschitz_in_time_report(const Trajectory& traj, const ConstantsLedger& ledger) {
    if (traj.size() < 3) throw ConfigError("lipschitz_in_time_report: need at least three samples");
    TimeLipschitzReport r;
    r.L_V_ledger = ledger.L_V;
    const std::size_t N = traj.size();
    auto visit = [&](std::size_t i, std::size_t j) {
        const double dt = traj.times[j] - traj.times[i];
        if (dt > 0.0) r.max_ratio = std::max(r.max_ratio, distance_X(traj.states[j], traj.states[i]) / dt);
    };
    if (N <= 512) {
        for (std::size_t i = 0; i < N; ++i)
            for (std::size_t j = i + 1; j < N; ++j) visit(i, j);
    } else {
        for (std::size_t lag = 1; lag < N; lag *= 2)
            for (std::size_t i = 0; i + lag < N; ++i) visit(i, i + lag);
    }
    return r;
}

}  // namespace squeeze
