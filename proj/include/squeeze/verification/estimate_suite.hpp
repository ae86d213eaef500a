#pragma once

#include <algorithm>
#include <chrono>
#include <memory>
#include <cmath>
#include <cstdint>
#include <functional>
#include <future>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "squeeze/ball.hpp"
#include "squeeze/constants.hpp"
#include "squeeze/elliptic.hpp"
#include "squeeze/evolution.hpp"
#include "squeeze/model.hpp"
#include "squeeze/nonlinearity.hpp"
#include "squeeze/norms.hpp"
#include "squeeze/random_fields.hpp"
#include "squeeze/semigroup.hpp"
#include "squeeze/verification/oracle_report.hpp"
#include "squeeze/verification/rk4.hpp"

namespace squeeze {

/// Shipped per-item tolerances; a manifest file or the [tolerances] section overrides them.
inline const std::map<std::string, double>& default_tolerances() {
    static const std::map<std::string, double> t = {
        {"ball_lower_bound", 1.0},       {"inverse_power_bound", 1.0},   {"inverse_power_lipschitz", 1.0},
        {"g_lipschitz", 1.0},            {"g_ball_offset", 1.0},         {"g_time_holder", 1.0},
        {"g_derivative_bound", 1.0},     {"g_derivative_fd", 0.2},       {"g_derivative_continuity", 1e-3},
        {"elliptic_h1_bound", 1.0},      {"elliptic_linearity", 1e-12},  {"elliptic_lipschitz_w", 1.0},
        {"dv_lipschitz", 1.0},           {"dw_lipschitz", 1.0},          {"elliptic_derivative_fd", 0.2},
        {"frechet_moduli", 1e-3},        {"unitarity", 1e-12},           {"skew_adjointness", 1e-12},
        {"picard_contraction", 0.55},    {"rk4_agreement", 1.0},         {"time_lipschitz", 1.0},
        {"tangent_fd", 0.2},
    };
    return t;
}

namespace detail {

inline GridField plus_constant(GridField f, double c) {
    for (auto& x : f.values) x += c;
    return f;
}

/// Largest singular value of out_w * M * in_w^{-1}, with diagonal norm weights.
inline double weighted_operator_norm(const Eigen::MatrixXd& M, const std::vector<double>& in_w,
                                     const std::vector<double>& out_w) {
    Eigen::MatrixXd B = M;
    for (Eigen::Index i = 0; i < B.rows(); ++i) B.row(i) *= out_w[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < B.cols(); ++j) B.col(j) /= in_w[static_cast<std::size_t>(j)];
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(B);
    return svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
}

// sqrt(mass * weight(mu_k)) per mode
template <class W>
std::vector<double> norm_weights(const Grid& g, W&& weight) {
    const auto mu = g.eigenvalues();
    std::vector<double> w(mu.size());
    for (std::size_t k = 0; k < mu.size(); ++k) w[k] = std::sqrt(g.mode_mass() * weight(mu[k]));
    return w;
}

inline Eigen::VectorXd to_eigen(const SpectralCoeffs& c) {
    return Eigen::Map<const Eigen::VectorXd>(c.coeffs.data(), static_cast<Eigen::Index>(c.coeffs.size()));
}

inline GridField unit_mode(const Grid& g, std::size_t m) {
    SpectralCoeffs c(g);
    c.coeffs[m] = 1.0;
    return dst_inverse(c);
}

}  // namespace detail

/// A small-resolution copy of `cfg` with a trajectory that actually moves:
/// used where a quantity is a limit along a solution rather than a bound.
inline SimConfig moving_config(const SimConfig& cfg, std::size_t n, double horizon, double dt) {
    SimConfig m = cfg;
    if (cfg.grid.dim() == 1) {
        const std::size_t nn = std::min(n, cfg.grid.axis(0).n_interior);
        m.grid = Grid::interval(cfg.grid.axis(0).length, nn, nn);
    } else {
        const std::size_t nx = std::min(n / 2, cfg.grid.axis(0).n_interior);
        const std::size_t ny = std::min(n / 2, cfg.grid.axis(1).n_interior);
        m.grid = Grid::rectangle({cfg.grid.axis(0).length, cfg.grid.axis(1).length}, {nx, ny}, {nx, ny});
    }
    auto keep = [&](std::vector<ModeAmp> v) {
        std::erase_if(v, [&](const ModeAmp& a) {
            try {
                (void)m.grid.mode_index(a.kx, a.ky);
                return false;
            } catch (const std::out_of_range&) {
                return true;
            }
        });
        return v;
    };
    m.w0_modes = keep(cfg.w0_modes);
    m.v0_modes = keep(cfg.v0_modes);
    m.horizon = horizon;
    m.dt = dt;
    m.window = 0.0;
    m.ball_radius.reset();
    return m;
}

/// Moduli of continuity of D_v S_o and D_w S_o (operator norms H-1 -> H1 and H2 -> H1)
/// and of G' (operator norm on H2), along a trajectory, per step h.
struct ModuliStudy {
    std::vector<double> h;
    std::vector<double> alpha1;
    std::vector<double> alpha2;
    std::vector<double> gprime;
};

inline ModuliStudy frechet_moduli(const SimConfig& cfg, const Trajectory& traj, std::size_t levels = 9,
                                  std::size_t time_samples = 8) {
    const PhysParams& p = cfg.params;
    const Grid& g = traj.states.front().grid();
    const std::size_t K = g.mode_count();
    const auto w_hm1 = detail::norm_weights(g, [](double mu) { return 1.0 / mu; });
    const auto w_h1 = detail::norm_weights(full_rank(g), [](double mu) { return 1.0 + mu; });
    const auto w_h2 = detail::norm_weights(g, [](double mu) { return 1.0 + mu + mu * mu; });
    const auto w_h2_full = detail::norm_weights(full_rank(g), [](double mu) { return 1.0 + mu + mu * mu; });
    std::vector<GridField> basis;
    for (std::size_t m = 0; m < K; ++m) basis.push_back(detail::unit_mode(g, m));

    auto problem = [&](const StateX& s) {
        const NodalState n = to_nodal(s);
        return EllipticProblem(detail::plus_constant(n.w_tilde, p.theta_2), n.v, p.theta_2);
    };
    auto dv_matrix = [&](const EllipticProblem& e) {
        Eigen::MatrixXd M(static_cast<Eigen::Index>(full_rank(g).mode_count()), static_cast<Eigen::Index>(K));
        for (std::size_t j = 0; j < K; ++j) M.col(static_cast<Eigen::Index>(j)) = detail::to_eigen(nodal_coeffs(dv_S_o(e, basis[j])));
        return M;
    };
    auto dw_matrix = [&](const EllipticProblem& e) {
        Eigen::MatrixXd M(static_cast<Eigen::Index>(full_rank(g).mode_count()), static_cast<Eigen::Index>(K));
        for (std::size_t j = 0; j < K; ++j) M.col(static_cast<Eigen::Index>(j)) = detail::to_eigen(nodal_coeffs(dw_S_o(e, basis[j])));
        return M;
    };
    auto gp_matrix = [&](const StateX& s) {
        const GridField wt = dst_inverse(s.w);
        Eigen::MatrixXd M(static_cast<Eigen::Index>(full_rank(g).mode_count()), static_cast<Eigen::Index>(K));
        for (std::size_t j = 0; j < K; ++j) M.col(static_cast<Eigen::Index>(j)) = detail::to_eigen(nodal_coeffs(eval_Gprime(p, wt, basis[j])));
        return M;
    };

    ModuliStudy out;
    const std::size_t N = traj.size() - 1;
    const double dt = (traj.times.back() - traj.times.front()) / static_cast<double>(N);
    for (std::size_t lvl = levels; lvl-- > 0;) {
        const std::size_t lag = std::size_t{1} << lvl;
        if (lag > N) continue;
        double a1 = 0.0, a2 = 0.0, gp = 0.0;
        const std::size_t last = N - lag;
        const std::size_t stride = std::max<std::size_t>(1, last / std::max<std::size_t>(1, time_samples - 1));
        for (std::size_t i = 0; i <= last; i += stride) {
            const StateX& s = traj.states[i];
            const StateX ds = traj.states[i + lag] - s;
            const EllipticProblem e0 = problem(s);
            const Eigen::MatrixXd V0 = dv_matrix(e0), W0 = dw_matrix(e0), G0 = gp_matrix(s);
            for (double tau : {0.5, 1.0}) {
                const StateX st = s + tau * ds;
                const EllipticProblem e1 = problem(st);
                a1 = std::max(a1, detail::weighted_operator_norm(dv_matrix(e1) - V0, w_hm1, w_h1));
                a2 = std::max(a2, detail::weighted_operator_norm(dw_matrix(e1) - W0, w_h2, w_h1));
                gp = std::max(gp, detail::weighted_operator_norm(gp_matrix(st) - G0, w_h2, w_h2_full));
            }
        }
        out.h.push_back(dt * static_cast<double>(lag));
        out.alpha1.push_back(a1);
        out.alpha2.push_back(a2);
        out.gprime.push_back(gp);
    }
    return out;
}

/// Central differences of an evolve() trajectory against tangent_solve().
struct TangentStudy {
    std::vector<double> h;
    std::vector<double> errors;
    double order = 0.0;
    double identity_error = 0.0;  // |(p, q)(0) - (G_0 + A w_0, v_0)|_X
    int iterations = 0;
};

inline TangentStudy tangent_study(const SimConfig& cfg) {
    SimConfig t = moving_config(cfg, 16, 2.4e-4, 1.25e-6);
    const Trajectory tr = evolve(t);
    if (tr.quench) throw QuenchError("tangent study quenched", tr.quench->time, tr.quench->location, tr.quench->min_gap);
    const TangentResult tan = tangent_solve(t, tr);

    TangentStudy st;
    st.iterations = tan.iterations;
    const PinnedOperator op(t.grid);
    const StateX& s0 = tr.states.front();
    StateX expect = apply_generator(op, s0);
    expect.v = std::move(expect.v) + source_coeffs(t.params, s0);
    st.identity_error = distance_X(tan.states.front(), expect);

    const double dt = tr.times[1] - tr.times[0];
    for (std::size_t lag : {32u, 16u, 8u}) {
        double e = 0.0;
        for (std::size_t i : {64u, 96u, 128u}) {
            const StateX fd = (1.0 / (2.0 * dt * static_cast<double>(lag))) * (tr.states[i + lag] - tr.states[i - lag]);
            e = std::max(e, distance_X(fd, tan.states[i]));
        }
        st.h.push_back(dt * static_cast<double>(lag));
        st.errors.push_back(e);
    }
    st.order = convergence_order(st.h, st.errors);
    return st;
}

/// Picard fixed point at T = T0/2 with dt = T/200, compared against the RK4 oracle.
struct ContractionStudy {
    PicardResult picard;
    double T = 0.0;
    double max_ratio = 0.0;
    double rk4_distance = 0.0;
    double rk4_bound = 0.0;
    double seconds = 0.0;
};

inline ContractionStudy contraction_study(const SimConfig& cfg, bool with_rk4 = true) {
    const ConstantsLedger L = compute_constants(cfg);
    ContractionStudy st;
    st.T = 0.5 * L.T0;
    SimConfig c = cfg;
    c.horizon = st.T;
    c.dt = st.T / 200.0;
    c.window = 0.0;
    const auto start = std::chrono::steady_clock::now();
    st.picard = picard_solve_from(c, c.initial_state(), st.T, L);
    st.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    for (double r : st.picard.contraction_estimates) st.max_ratio = std::max(st.max_ratio, r);
    if (with_rk4) {
        const Trajectory ref = rk4_reference(c);
        const auto& a = st.picard.trajectory.states;
        for (std::size_t n = 0; n < std::min(a.size(), ref.states.size()); ++n)
            st.rk4_distance = std::max(st.rk4_distance, distance_X(a[n], ref.states[n]));
        st.rk4_bound = 10.0 * std::max(st.picard.dt * st.picard.dt, c.picard_tol);
    }
    return st;
}

/// Runs every verification item over randomized ensembles; reports sorted by name.
inline std::vector<OracleReport> run_estimate_suite(const SimConfig& cfg, std::size_t trials,
                                                    const std::map<std::string, double>& tolerances = {}) {
    std::vector<OracleReport> out;
    if (trials == 0) return out;
    auto tol = [&](const std::string& name) {
        if (auto it = tolerances.find(name); it != tolerances.end()) return it->second;
        return default_tolerances().at(name);
    };

    const PhysParams& p = cfg.params;
    const Grid& g = cfg.grid;
    const ConstantsLedger L = compute_constants(cfg);
    const BallSpec ball = L.ball(cfg.w0_tilde(), p.theta_2);
    const std::uint64_t seed = cfg.seed;
    const std::string seed_note = "seed " + std::to_string(seed);
    const double inf = std::numeric_limits<double>::infinity();

    using Item = std::function<OracleReport(Rng&)>;
    std::vector<std::pair<std::string, Item>> items;

    auto member_nodal = [&](Rng& rng) { return dst_inverse(sample_ball_member(ball, rng)); };

    items.emplace_back("ball_lower_bound", [&](Rng& rng) {
        double worst = 0.0;
        bool all_inside = true;
        const std::size_t n = 10 * trials;
        for (std::size_t i = 0; i < n; ++i) {
            const BallCheck b = ball_check(ball, sample_ball_member(ball, rng));
            all_inside = all_inside && b.inside;
            worst = std::max(worst, (L.kappa / 2.0) / b.min_gap);
        }
        return OracleReport::make("ball_lower_bound", all_inside ? worst : inf, tol("ball_lower_bound"), n,
                                  "max of (kappa/2)/min_gap over ball members", seed);
    });

    items.emplace_back("inverse_power_bound", [&](Rng& rng) {
        double worst = 0.0;
        for (std::size_t i = 0; i < trials; ++i) {
            const GridField w = member_nodal(rng);
            for (int k = 1; k <= 3; ++k)
                worst = std::max(worst, inverse_power_norm_H2(w, p.theta_2, k) / std::pow(L.C1, k));
        }
        return OracleReport::make("inverse_power_bound", worst, tol("inverse_power_bound"), 3 * trials,
                                  "max ||w^-k||_H2 / C1^k, k = 1..3", seed);
    });

    items.emplace_back("inverse_power_lipschitz", [&](Rng& rng) {
        double worst = 0.0;
        for (std::size_t i = 0; i < trials; ++i) {
            const SpectralCoeffs a = sample_ball_member(ball, rng), b = sample_ball_member(ball, rng);
            const GridField wa = dst_inverse(a), wb = dst_inverse(b);
            const double dw = norm_H2(a - b);
            if (dw == 0.0) continue;
            worst = std::max(worst, norm_H2(inverse_power(wa, p.theta_2, 2) - inverse_power(wb, p.theta_2, 2)) / (L.C2 * dw));
            worst = std::max(worst, norm_H2(inverse_power(wa, p.theta_2, 3) - inverse_power(wb, p.theta_2, 3)) / (L.C3 * dw));
        }
        return OracleReport::make("inverse_power_lipschitz", worst, tol("inverse_power_lipschitz"), 2 * trials,
                                  "max ||w1^-k - w2^-k||_H2 / (C_k ||w1 - w2||_H2), k = 2, 3", seed);
    });

    items.emplace_back("g_lipschitz", [&](Rng& rng) {
        double worst = 0.0;
        for (std::size_t i = 0; i < trials; ++i) {
            const SpectralCoeffs a = sample_ball_member(ball, rng), b = sample_ball_member(ball, rng);
            const double dw = norm_H2(a - b);
            if (dw == 0.0 || L.L_G == 0.0) continue;
            worst = std::max(worst, norm_H2(eval_G(p, dst_inverse(a)) - eval_G(p, dst_inverse(b))) / (L.L_G * dw));
        }
        return OracleReport::make("g_lipschitz", worst, tol("g_lipschitz"), trials,
                                  "max ||G(w1) - G(w2)||_H2 / (L_G ||w1 - w2||_H2)", seed);
    });

    items.emplace_back("g_ball_offset", [&](Rng& rng) {
        double worst = 0.0;
        const GridField g0 = eval_G(p, dst_inverse(ball.w0_tilde));
        for (std::size_t i = 0; i < trials; ++i) {
            const double d = norm_H2(eval_G(p, member_nodal(rng)) - g0);
            worst = std::max(worst, L.L_G > 0.0 ? d / (L.L_G * L.r) : (d > 0.0 ? inf : 0.0));
        }
        return OracleReport::make("g_ball_offset", worst, tol("g_ball_offset"), trials,
                                  "max ||G(w) - G(w0)||_H2 / (L_G r)", seed);
    });

    items.emplace_back("g_derivative_bound", [&](Rng& rng) {
        double worst = 0.0;
        for (std::size_t i = 0; i < trials; ++i) {
            const GridField w = member_nodal(rng);
            const SpectralCoeffs q = random_coeffs(g, rng);
            if (L.L_G == 0.0) continue;
            worst = std::max(worst, norm_H2(eval_Gprime(p, w, dst_inverse(q))) / (L.L_G * norm_H2(q)));
        }
        return OracleReport::make("g_derivative_bound", worst, tol("g_derivative_bound"), trials,
                                  "max ||G'(w) q||_H2 / (L_G ||q||_H2)", seed);
    });

    items.emplace_back("g_derivative_fd", [&](Rng& rng) {
        double worst = 0.0;
        const std::vector<double> lam = {1e-2, 5e-3, 2.5e-3};
        const std::size_t n = std::min<std::size_t>(trials, 20);
        for (std::size_t i = 0; i < n; ++i) {
            const GridField w = member_nodal(rng);
            const GridField q = dst_inverse(random_coeffs_h2(g, rng, 1.0));
            const GridField exact = eval_Gprime(p, w, q);
            std::vector<double> err;
            for (double l : lam)
                err.push_back(norm_H2((1.0 / (2.0 * l)) * (eval_G(p, w + l * q) - eval_G(p, w - l * q)) - exact));
            const double order = convergence_order(lam, err);
            worst = std::max(worst, std::isnan(order) ? inf : std::abs(order - 2.0));
        }
        return OracleReport::make("g_derivative_fd", worst, tol("g_derivative_fd"), n,
                                  "max |order - 2| of central differences over lambda = 1e-2, 5e-3, 2.5e-3", seed);
    });

    items.emplace_back("elliptic_h1_bound", [&](Rng& rng) {
        const Measurement m = measure_C_o(ball, 2 * trials, rng);
        return OracleReport::make("elliptic_h1_bound", m.value / L.C_o, tol("elliptic_h1_bound"), 2 * trials,
                                  "max ||u||_H1 / ||v||_H-1 relative to ledger C_o = " + fmt_g(L.C_o), seed);
    });

    items.emplace_back("elliptic_linearity", [&](Rng& rng) {
        double worst = 0.0;
        for (std::size_t i = 0; i < trials; ++i) {
            const GridField w = detail::plus_constant(member_nodal(rng), p.theta_2);
            const GridField v1 = dst_inverse(random_coeffs(g, rng)), v2 = dst_inverse(random_coeffs(g, rng));
            const double a = uniform(rng, -2.0, 2.0), b = uniform(rng, -2.0, 2.0);
            const GridField lhs = solve_S_o(EllipticProblem(w, a * v1 + b * v2, p.theta_2)).u_tilde;
            const GridField rhs = a * solve_S_o(EllipticProblem(w, v1, p.theta_2)).u_tilde +
                                  b * solve_S_o(EllipticProblem(w, v2, p.theta_2)).u_tilde;
            const double scale = std::max(norm_H1(lhs), 1e-300);
            worst = std::max(worst, norm_H1(lhs - rhs) / scale);
        }
        return OracleReport::make("elliptic_linearity", worst, tol("elliptic_linearity"), trials,
                                  "relative H1 defect of S_o(a v1 + b v2) - a S_o(v1) - b S_o(v2)", seed);
    });

    items.emplace_back("elliptic_lipschitz_w", [&](Rng& rng) {
        const Measurement m = measure_C_o_star(ball, trials, rng);
        return OracleReport::make("elliptic_lipschitz_w", m.value / L.C_o_star, tol("elliptic_lipschitz_w"), trials,
                                  "max Lipschitz ratio in w relative to ledger C_o_star = " + fmt_g(L.C_o_star),
                                  seed);
    });

    items.emplace_back("dv_lipschitz", [&](Rng& rng) {
        double worst = 0.0;
        for (std::size_t i = 0; i < trials; ++i) {
            const EllipticProblem e(detail::plus_constant(member_nodal(rng), p.theta_2), dst_inverse(random_coeffs(g, rng)),
                                    p.theta_2);
            const GridField f1 = dst_inverse(random_coeffs(g, rng)), f2 = dst_inverse(random_coeffs(g, rng));
            const double d = norm_H1(dv_S_o(e, f1) - dv_S_o(e, f2));
            worst = std::max(worst, d / (L.C_o * norm_Hneg1(f1 - f2)));
        }
        return OracleReport::make("dv_lipschitz", worst, tol("dv_lipschitz"), trials,
                                  "max ||D_v S_o (f1 - f2)||_H1 / (C_o ||f1 - f2||_H-1)", seed);
    });

    items.emplace_back("dw_lipschitz", [&](Rng& rng) {
        double worst = 0.0;
        for (std::size_t i = 0; i < trials; ++i) {
            const GridField v = dst_inverse(random_coeffs(g, rng));
            const EllipticProblem e(detail::plus_constant(member_nodal(rng), p.theta_2), v, p.theta_2);
            const SpectralCoeffs a = random_coeffs(g, rng), b = random_coeffs(g, rng);
            const double d = norm_H1(dw_S_o(e, dst_inverse(a)) - dw_S_o(e, dst_inverse(b)));
            worst = std::max(worst, d / (L.C_o_star * norm_Hneg1(v) * norm_H2(a - b)));
        }
        return OracleReport::make("dw_lipschitz", worst, tol("dw_lipschitz"), trials,
                                  "max ||D_w S_o (p1 - p2)||_H1 / (C_o_star ||v||_H-1 ||p1 - p2||_H2)", seed);
    });

    items.emplace_back("elliptic_derivative_fd", [&](Rng& rng) {
        double worst = 0.0, dv_err = 0.0;
        const std::vector<double> lam = {1e-2, 5e-3, 2.5e-3};
        const std::size_t n = std::min<std::size_t>(trials, 20);
        for (std::size_t i = 0; i < n; ++i) {
            const GridField w = detail::plus_constant(member_nodal(rng), p.theta_2);
            const GridField v = dst_inverse(random_coeffs(g, rng));
            const GridField phi = dst_inverse(random_coeffs(g, rng));
            const GridField psi = dst_inverse(random_coeffs_h2(g, rng, 1.0));
            const EllipticProblem e(w, v, p.theta_2);
            const GridField dv = dv_S_o(e, phi), dw = dw_S_o(e, psi);
            std::vector<double> err;
            for (double l : lam) {
                const GridField cv = (1.0 / (2.0 * l)) * (solve_S_o(EllipticProblem(w, v + l * phi, p.theta_2)).u_tilde -
                                                          solve_S_o(EllipticProblem(w, v - l * phi, p.theta_2)).u_tilde);
                dv_err = std::max(dv_err, norm_H1(cv - dv) / std::max(norm_H1(dv), 1e-300));
                const GridField cw = (1.0 / (2.0 * l)) * (solve_S_o(EllipticProblem(w + l * psi, v, p.theta_2)).u_tilde -
                                                          solve_S_o(EllipticProblem(w - l * psi, v, p.theta_2)).u_tilde);
                err.push_back(norm_H1(cw - dw));
            }
            const double order = convergence_order(lam, err);
            worst = std::max(worst, std::isnan(order) ? inf : std::abs(order - 2.0));
        }
        const double reported = dv_err <= 1e-10 ? worst : inf;
        return OracleReport::make("elliptic_derivative_fd", reported, tol("elliptic_derivative_fd"), n,
                                  "max |order - 2| for D_w S_o; D_v S_o exact to " + fmt_g(dv_err), seed);
    });

    // A moving low-resolution trajectory for the limits along solutions.
    const SimConfig mcfg = moving_config(cfg, 32, 5.12e-3, 1e-5);
    auto moving = std::make_shared<std::shared_future<Trajectory>>(std::async(std::launch::deferred, [mcfg] { return evolve(mcfg); }).share());

    items.emplace_back("g_time_holder", [&, moving](Rng&) {
        const Trajectory& tr = moving->get();
        const ConstantsLedger Lm = compute_constants(mcfg);
        double worst = 0.0;
        std::size_t n = 0;
        for (std::size_t lag = 1; lag < tr.size(); lag *= 4)
            for (std::size_t i = 0; i + lag < tr.size(); i += 16) {
                const double dw = norm_H2(tr.states[i + lag].w - tr.states[i].w);
                if (dw == 0.0 || Lm.L_G == 0.0) continue;
                const double dg = norm_H2(eval_G(p, dst_inverse(tr.states[i + lag].w)) - eval_G(p, dst_inverse(tr.states[i].w)));
                worst = std::max(worst, dg / (Lm.L_G * dw));
                ++n;
            }
        return OracleReport::make("g_time_holder", worst, tol("g_time_holder"), n,
                                  "max ||G(w(t+h)) - G(w(t))||_H2 / (L_G ||w(t+h) - w(t)||_H2) along a trajectory");
    });

    auto moduli = std::make_shared<std::shared_future<ModuliStudy>>(
        std::async(std::launch::deferred, [mcfg, moving] { return frechet_moduli(mcfg, moving->get()); }).share());

    items.emplace_back("g_derivative_continuity", [&, moduli](Rng&) {
        const ModuliStudy& m = moduli->get();
        const bool mono = non_increasing(m.gprime, 1e-14);
        return OracleReport::make("g_derivative_continuity", mono ? m.gprime.back() : inf, tol("g_derivative_continuity"),
                                  m.h.size(),
                                  std::string(mono ? "" : "not monotone; ") + "modulus at h = " + fmt_g(m.h.back()));
    });

    items.emplace_back("frechet_moduli", [&, moduli](Rng&) {
        const ModuliStudy& m = moduli->get();
        const bool mono = non_increasing(m.alpha1, 1e-14) && non_increasing(m.alpha2, 1e-14);
        const double v = std::max(m.alpha1.back(), m.alpha2.back());
        return OracleReport::make("frechet_moduli", mono ? v : inf, tol("frechet_moduli"), m.h.size(),
                                  std::string(mono ? "" : "not monotone; ") + "alpha1 = " + fmt_g(m.alpha1.back()) +
                                      ", alpha2 = " + fmt_g(m.alpha2.back()) + " at h = " + fmt_g(m.h.back()));
    });

    items.emplace_back("unitarity", [&](Rng& rng) {
        const PinnedOperator op(g);
        double worst = 0.0;
        for (std::size_t i = 0; i < trials; ++i) {
            const StateX s(random_coeffs(g, rng), random_coeffs(g, rng));
            const double t = uniform(rng, 0.0, 100.0);
            const double n0 = norm_X(s);
            worst = std::max(worst, std::abs(norm_X(semigroup_apply(op, s, t)) - n0) / n0);
        }
        return OracleReport::make("unitarity", worst, tol("unitarity"), trials, "relative X-norm drift, t in [0, 100]", seed);
    });

    items.emplace_back("skew_adjointness", [&](Rng& rng) {
        const PinnedOperator op(g);
        double worst = 0.0;
        for (std::size_t i = 0; i < trials; ++i) {
            // decaying coefficients so both states lie in the generator's domain
            const StateX a(random_coeffs(g, rng), random_coeffs(g, rng)), b(random_coeffs(g, rng), random_coeffs(g, rng));
            const StateX Aa = apply_generator(op, a), Ab = apply_generator(op, b);
            const double scale = norm_X(Aa) * norm_X(b) + norm_X(a) * norm_X(Ab);
            worst = std::max(worst, std::abs(inner_X(Aa, b) + inner_X(a, Ab)) / scale);
        }
        return OracleReport::make("skew_adjointness", worst, tol("skew_adjointness"), trials,
                                  "|<Aa, b>_X + <a, Ab>_X| relative to its terms", seed);
    });

    auto contraction = std::make_shared<std::shared_future<ContractionStudy>>(
        std::async(std::launch::deferred, [cfg] { return contraction_study(cfg); }).share());

    items.emplace_back("picard_contraction", [&, contraction](Rng&) {
        const ContractionStudy& c = contraction->get();
        const bool ok = c.picard.iterations <= 40 && c.picard.trajectory.inside_ball;
        return OracleReport::make("picard_contraction", ok ? c.max_ratio : inf, tol("picard_contraction"),
                                  c.picard.contraction_estimates.size(),
                                  "T = T0/2 = " + fmt_g(c.T) + ", iterations " + std::to_string(c.picard.iterations) +
                                      (c.picard.trajectory.inside_ball ? ", inside ball" : ", LEFT BALL"));
    });

    items.emplace_back("rk4_agreement", [&, contraction](Rng&) {
        const ContractionStudy& c = contraction->get();
        return OracleReport::make("rk4_agreement", c.rk4_distance / c.rk4_bound, tol("rk4_agreement"),
                                  c.picard.trajectory.size(),
                                  "sup-t X distance " + fmt_g(c.rk4_distance) + " relative to 10 max(dt^2, tol)");
    });

    items.emplace_back("time_lipschitz", [&, contraction](Rng&) {
        const ContractionStudy& c = contraction->get();
        const TimeLipschitzReport r = lipschitz_in_time_report(c.picard.trajectory, c.picard.ledger);
        return OracleReport::make("time_lipschitz", r.max_ratio / r.L_V_ledger, tol("time_lipschitz"),
                                  c.picard.trajectory.size(), "max difference quotient relative to ledger L_V");
    });

    items.emplace_back("tangent_fd", [&](Rng&) {
        const TangentStudy t = tangent_study(cfg);
        const bool ok = t.identity_error <= 1e-10;
        return OracleReport::make("tangent_fd", ok ? std::abs(t.order - 2.0) : inf, tol("tangent_fd"), t.h.size(),
                                  "order " + fmt_g(t.order) + ", t = 0 identity error " +
                                      fmt_g(t.identity_error));
    });

    // Items are independent; each draws from its own stream derived from the seed.
    std::vector<std::future<OracleReport>> futures;
    for (std::size_t i = 0; i < items.size(); ++i) {
        futures.push_back(std::async(std::launch::deferred, [&, i] {
            Rng rng(seed + 0x9E3779B97F4A7C15ULL * (i + 1));
            try {
                return items[i].second(rng);
            } catch (const std::exception& e) {
                return OracleReport::make(items[i].first, inf, tol(items[i].first), 0, std::string("error: ") + e.what(),
                                          seed);
            }
        }));
    }
    for (auto& f : futures) out.push_back(f.get());
    std::sort(out.begin(), out.end(), [](const OracleReport& a, const OracleReport& b) { return a.name < b.name; });
    return out;
}

}  // namespace squeeze
