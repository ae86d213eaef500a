#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "squeeze/ball.hpp"
#include "squeeze/elliptic.hpp"
#include "squeeze/model.hpp"
#include "squeeze/nonlinearity.hpp"
#include "squeeze/norms.hpp"
#include "squeeze/semigroup.hpp"

namespace squeeze {

struct LedgerEntry {
    std::string name;
    double value = 0.0;
    std::string provenance;  // analytic-formula | measured | measured (bisection) | assumed
    std::string note;
};

/// Every named constant of the existence argument for one configuration.
struct ConstantsLedger {
    double C_embed = 0, C_P = 0, kappa = 0, r = 0, M0 = 1, C_o = 0, C_o_star = 0, C1 = 0, C2 = 0, C3 = 0;
    double L_G = 0, L_G_star = 0, delta_o = 0, T0 = 0, L_V = 0, C_theta = 0, C_alpha = 0, C_beta = 0;

    // ingredients
    double w0_H2 = 0;      // ||w_tilde_0 + theta_2||_{H2}
    double v0_L2 = 0;      // ||v_tilde_0||_{L2}
    double G0_H2 = 0;      // ||G(w_tilde_0)||_{H2}
    double s0_DA = 0;      // ||v_tilde_0||_{H2} + ||w_tilde_0||_{H4}
    double C_tilde = 0;    // kappa/(2 C_embed) + ||w_0||_{H2}
    double T0_terms[3] = {0, 0, 0};
    bool r_auto = true;
    std::string T0_provenance = "analytic-formula";

    // empirical counterparts (NaN until measured)
    double C_o_measured = std::numeric_limits<double>::quiet_NaN();
    double C_o_star_measured = std::numeric_limits<double>::quiet_NaN();

    BallSpec ball(const SpectralCoeffs& w0_tilde, double theta_2) const {
        return BallSpec{w0_tilde, theta_2, kappa, r, C_embed};
    }

    std::vector<LedgerEntry> entries() const {
        const std::string A = "analytic-formula", M = "measured";
        std::vector<LedgerEntry> e = {
            {"C_embed", C_embed, M, "discrete sup of |f(x_j)|/||f||_H2 via the reproducing kernel"},
            {"C_P", C_P, A, "1/sqrt(mu_1)"},
            {"kappa", kappa, M, "min of w_tilde_0 + theta_2 over nodes and boundary"},
            {"r", r, r_auto ? "assumed" : "assumed (explicit)", r_auto ? "auto policy kappa/(4 C_embed)" : "from config"},
            {"M0", M0, A, "unitary semigroup in the discrete X norm"},
            {"C_o", C_o, A, "16 sqrt(C_P^2+1) / (kappa^3 min(1, C_P^-2))"},
            {"C_o_star", C_o_star, A, "(24 C C_o / kappa^3)(||w0||_H2 + kappa/(2C))^2 sqrt(C^2+1)"},
            {"C1", C1, A, "C1^2 = 4|Omega|/kappa^2 + 16 Ct^2/kappa^4 + (4/kappa^2 + 16 C Ct/kappa^3)^2 Ct^2"},
            {"C2", C2, A, "2 C1^3"},
            {"C3", C3, A, "3 C1^4"},
            {"L_G", L_G, A, "beta_F C2"},
            {"L_G_star", L_G_star, A, "L_G + beta_p C_o + beta_p C_o_star (||v0||_L2 + kappa/(2C))"},
            {"delta_o", delta_o, "measured (bisection)", "first t with ||T(t)s0 - s0||_X = r/2"},
            {"T0", T0, T0_provenance, "min of the three existence-time terms"},
            {"L_V", L_V, A, "M0 (||s0||_D(A) + C_theta) exp(M0 L_G T0)"},
            {"C_theta", C_theta, A, "kappa L_G/(2C) + ||G(w0)||_H2 + beta_p C_o (||v0|| + kappa/(2C))"},
            {"C_alpha", C_alpha, A, "C_o_star (||v0|| + kappa/(2C)) + C_o"},
            {"C_beta", C_beta, A, "beta_p C_alpha + M0 L_G"},
            {"w0_H2", w0_H2, M, "full H2 norm of w_tilde_0 + theta_2 (constant trace split off)"},
            {"v0_L2", v0_L2, M, "L2 norm of v_tilde_0"},
            {"G0_H2", G0_H2, M, "full H2 norm of G(w_tilde_0) (constant trace split off)"},
            {"s0_DA", s0_DA, M, "||v0||_H2 + ||w0||_H4 with weights (1+nu), (1+nu+nu^2)"},
            {"T0_delta_o", T0_terms[0], "measured (bisection)", "first term"},
            {"T0_contraction", T0_terms[1], A, "1/(2 M0 L_G_star)"},
            {"T0_ball", T0_terms[2], A, "kappa/(2M0) [(L_G + beta_p C_o) kappa + 2C(||G0|| + beta_p C_o ||v0||)]^-1"},
        };
        if (!std::isnan(C_o_measured)) e.push_back({"C_o_measured", C_o_measured, M, "empirical max over the ball ensemble"});
        if (!std::isnan(C_o_star_measured))
            e.push_back({"C_o_star_measured", C_o_star_measured, M, "empirical max over the ball ensemble"});
        return e;
    }
};

/// Largest t such that ||T(tau) s0 - s0||_X <= target on [0, t]; +inf if never exceeded.
///
/// Per mode the flow is a rotation of (v, omega w), so
/// ||T(t)s0 - s0||^2 = sum_k 2 E_k (1 - cos omega_k t) with E_k the modal X energy.
inline double delta_o(const PinnedOperator& op, const StateX& s0, double target) {
    const double inf = std::numeric_limits<double>::infinity();
    const auto nu = op.nu();
    const auto om = op.omega();
    const double mass = op.grid().mode_mass();
    std::vector<double> E(nu.size());
    double total = 0.0;
    for (std::size_t k = 0; k < nu.size(); ++k) {
        E[k] = mass * (s0.v.coeffs[k] * s0.v.coeffs[k] + nu[k] * s0.w.coeffs[k] * s0.w.coeffs[k]);
        total += E[k];
    }
    const double t2 = target * target;
    if (4.0 * total <= t2) return inf;

    auto f = [&](double t) {
        double acc = 0.0;
        for (std::size_t k = 0; k < E.size(); ++k) {
            const double s = std::sin(0.5 * om[k] * t);
            acc += 4.0 * E[k] * s * s;  // 2E(1 - cos) without cancellation
        }
        return acc;
    };
    double om_eff = 0.0;
    for (std::size_t k = 0; k < E.size(); ++k)
        if (E[k] > 1e-12 * t2) om_eff = std::max(om_eff, om[k]);
    const double step = 0.1 / om_eff;
    // The sum is quasi-periodic and may avoid the level for a long time; past the
    // scan budget the scanned length is returned, which is still a valid delta.
    double lo = 0.0, hi = 0.0;
    bool crossed = false;
    for (std::size_t i = 1; i <= 1000000; ++i) {
        hi = step * static_cast<double>(i);
        if (f(hi) > t2) {
            crossed = true;
            break;
        }
        lo = hi;
    }
    if (!crossed) return lo;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (f(mid) > t2 ? hi : lo) = mid;
    }
    return lo;
}

/// Validates an explicit radius against the ball hypothesis; returns the policy radius otherwise.
inline double ball_radius(const SimConfig& cfg, double kappa, double C_embed) {
    if (!cfg.ball_radius) return kappa / (4.0 * C_embed);
    const double r = *cfg.ball_radius;
    if (!(r > 0.0) || !(r < kappa / (2.0 * C_embed)))
        throw ConfigError("ball radius r must satisfy 0 < r < kappa/(2*C_embed) (r = " + std::to_string(r) +
                          ", kappa/(2*C_embed) = " + std::to_string(kappa / (2.0 * C_embed)) + ")");
    return r;
}

namespace detail {

inline double safe_inverse(double x) { return x > 0.0 ? 1.0 / x : std::numeric_limits<double>::infinity(); }

}  // namespace detail

/// Assembles the ledger for initial data `s0` under the settings of `cfg`.
inline ConstantsLedger compute_constants(const SimConfig& cfg, const StateX& s0) {
    cfg.params.validate();
    detail::require_same_grid(cfg.grid, s0.grid(), "compute_constants");
    const PhysParams& p = cfg.params;
    const Grid& g = cfg.grid;
    const SpectralCoeffs& w0 = s0.w;
    const SpectralCoeffs& v0 = s0.v;

    ConstantsLedger L;
    L.C_embed = embedding_constant_estimate(g);
    L.C_P = poincare_constant(g);
    L.kappa = initial_kappa(w0, p.theta_2);
    if (!(L.kappa > 0.0)) throw DomainError("invalid initial data: kappa = min(w_tilde_0 + theta_2) must be positive");
    L.r_auto = !cfg.ball_radius.has_value();
    L.r = ball_radius(cfg, L.kappa, L.C_embed);
    L.M0 = 1.0;

    const double C = L.C_embed, k = L.kappa, k3 = k * k * k;
    const double half_ball = k / (2.0 * C);

    L.C_o = 16.0 * std::sqrt(L.C_P * L.C_P + 1.0) / (k3 * std::min(1.0, 1.0 / (L.C_P * L.C_P)));

    const GridField w0_nodal = dst_inverse(w0);
    GridField w_full = w0_nodal;
    for (auto& x : w_full.values) x += p.theta_2;
    L.w0_H2 = norm_H2_lifted(w_full, p.theta_2);
    L.v0_L2 = norm_L2(v0);
    L.G0_H2 = G_norm_H2(p, w0_nodal);

    L.C_o_star = (24.0 * C * L.C_o / k3) * std::pow(L.w0_H2 + half_ball, 2) * std::sqrt(C * C + 1.0);
    L.C_tilde = half_ball + L.w0_H2;
    const double Ct = L.C_tilde;
    const double bracket = 4.0 / (k * k) + 16.0 * C * Ct / k3;
    L.C1 = std::sqrt(4.0 * g.volume() / (k * k) + 16.0 / (k3 * k) * Ct * Ct + bracket * bracket * Ct * Ct);
    L.C2 = 2.0 * std::pow(L.C1, 3);
    L.C3 = 3.0 * std::pow(L.C1, 4);
    L.L_G = p.beta_F * L.C2;
    L.L_G_star = L.L_G + p.beta_p * L.C_o + p.beta_p * L.C_o_star * (L.v0_L2 + half_ball);

    const PinnedOperator op(g);
    L.delta_o = delta_o(op, s0, L.r / 2.0);
    L.T0_terms[0] = L.delta_o;
    L.T0_terms[1] = detail::safe_inverse(2.0 * L.M0 * L.L_G_star);
    const double third = (L.L_G + p.beta_p * L.C_o) * k + 2.0 * C * (L.G0_H2 + p.beta_p * L.C_o * L.v0_L2);
    L.T0_terms[2] = k / (2.0 * L.M0) * detail::safe_inverse(third);
    L.T0 = std::min({L.T0_terms[0], L.T0_terms[1], L.T0_terms[2]});
    L.T0_provenance = (L.T0 == L.T0_terms[0]) ? "measured (bisection)" : "analytic-formula";

    L.C_theta = k * L.L_G / (2.0 * C) + L.G0_H2 + p.beta_p * L.C_o * (L.v0_L2 + half_ball);
    L.C_alpha = L.C_o_star * (L.v0_L2 + half_ball) + L.C_o;
    L.C_beta = p.beta_p * L.C_alpha + L.M0 * L.L_G;

    const auto nu = op.nu();
    double v2 = 0.0, w4 = 0.0;
    for (std::size_t m = 0; m < nu.size(); ++m) {
        v2 += (1.0 + nu[m]) * v0.coeffs[m] * v0.coeffs[m];
        w4 += (1.0 + nu[m] + nu[m] * nu[m]) * w0.coeffs[m] * w0.coeffs[m];
    }
    L.s0_DA = std::sqrt(g.mode_mass() * v2) + std::sqrt(g.mode_mass() * w4);
    const double growth = std::isfinite(L.T0) ? std::exp(L.M0 * L.L_G * L.T0) : (L.L_G == 0.0 ? 1.0 : std::numeric_limits<double>::infinity());
    L.L_V = L.M0 * (L.s0_DA + L.C_theta) * growth;
    return L;
}

/// Ledger of the configuration's own initial data.
inline ConstantsLedger compute_constants(const SimConfig& cfg) { return compute_constants(cfg, cfg.initial_state()); }

/// Adds empirical C_o and C_o_star over `trials` ball members.
inline void measure_into(ConstantsLedger& L, const SimConfig& cfg, std::size_t trials, std::uint64_t seed) {
    if (trials == 0) return;
    const BallSpec ball = L.ball(cfg.w0_tilde(), cfg.params.theta_2);
    Rng rng(seed);
    L.C_o_measured = measure_C_o(ball, trials, rng).value;
    L.C_o_star_measured = measure_C_o_star(ball, trials, rng).value;
}

}  // namespace squeeze
