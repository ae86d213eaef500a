#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "squeeze/ball.hpp"
#include "squeeze/errors.hpp"
#include "squeeze/grid.hpp"
#include "squeeze/norms.hpp"
#include "squeeze/random_fields.hpp"

namespace squeeze {

/// div(w^3 grad u) = v in Omega, u = 0 on the boundary.
///
/// `w` is the full gap (not lifted); its boundary value is `w_boundary`.
struct EllipticProblem {
    GridField w;
    GridField v;
    double w_boundary = 1.0;

    EllipticProblem(GridField w_, GridField v_, double w_boundary_)
        : w(std::move(w_)), v(std::move(v_)), w_boundary(w_boundary_) {
        detail::require_same_grid(w.grid, v.grid, "EllipticProblem");
        if (!all_finite(w.values) || !all_finite(v.values)) throw DomainError("elliptic problem has non-finite data");
        double m = w_boundary;
        for (double x : w.values) m = std::min(m, x);
        if (!(m > 0.0)) throw DomainError("elliptic coefficient requires w > 0 (min w = " + std::to_string(m) + ")");
    }
};

struct EllipticSolution {
    GridField u_tilde;
    double h1_norm = 0.0;
    double ratio_vs_bound = 0.0;  // ||u||_{H1} / ||v||_{H-1}
};

struct EllipticOptions {
    double cg_tolerance = 1e-10;
    std::size_t cg_max_iterations = 0;  // 0: 10 * unknowns
};

namespace detail {

/// Face coefficients of the flux stencil.
///
/// Interval: `x` has n+1 faces, face j sits between nodes j-1 and j.
/// Rectangle: `x` is (nx+1) x ny, `y` is nx x (ny+1), both row-major.
struct FaceCoeffs {
    std::vector<double> x;
    std::vector<double> y;
};

// Arithmetic face averages of a nodal field g with constant boundary value gb.
inline FaceCoeffs face_average(const Grid& grid, const std::vector<double>& g, double gb) {
    FaceCoeffs f;
    if (grid.dim() == 1) {
        const std::size_t n = grid.axis(0).n_interior;
        f.x.resize(n + 1);
        for (std::size_t j = 0; j <= n; ++j) {
            const double l = j == 0 ? gb : g[j - 1];
            const double r = j == n ? gb : g[j];
            f.x[j] = 0.5 * (l + r);
        }
        return f;
    }
    const std::size_t nx = grid.axis(0).n_interior, ny = grid.axis(1).n_interior;
    auto at = [&](std::ptrdiff_t i, std::ptrdiff_t j) {
        if (i < 0 || j < 0 || i >= static_cast<std::ptrdiff_t>(nx) || j >= static_cast<std::ptrdiff_t>(ny)) return gb;
        return g[static_cast<std::size_t>(i) * ny + static_cast<std::size_t>(j)];
    };
    f.x.resize((nx + 1) * ny);
    for (std::size_t i = 0; i <= nx; ++i)
        for (std::size_t j = 0; j < ny; ++j) {
            const auto ii = static_cast<std::ptrdiff_t>(i), jj = static_cast<std::ptrdiff_t>(j);
            f.x[i * ny + j] = 0.5 * (at(ii - 1, jj) + at(ii, jj));
        }
    f.y.resize(nx * (ny + 1));
    for (std::size_t i = 0; i < nx; ++i)
        for (std::size_t j = 0; j <= ny; ++j) {
            const auto ii = static_cast<std::ptrdiff_t>(i), jj = static_cast<std::ptrdiff_t>(j);
            f.y[i * (ny + 1) + j] = 0.5 * (at(ii, jj - 1) + at(ii, jj));
        }
    return f;
}

// (A u)_j: flux-form divergence with zero Dirichlet data.
inline std::vector<double> apply_flux(const Grid& grid, const FaceCoeffs& a, const std::vector<double>& u) {
    std::vector<double> out(u.size());
    if (grid.dim() == 1) {
        const std::size_t n = u.size();
        const double h2 = grid.axis(0).spacing() * grid.axis(0).spacing();
        for (std::size_t j = 0; j < n; ++j) {
            const double ul = j == 0 ? 0.0 : u[j - 1];
            const double ur = j + 1 == n ? 0.0 : u[j + 1];
            out[j] = (a.x[j + 1] * (ur - u[j]) - a.x[j] * (u[j] - ul)) / h2;
        }
        return out;
    }
    const std::size_t nx = grid.axis(0).n_interior, ny = grid.axis(1).n_interior;
    const double hx2 = grid.axis(0).spacing() * grid.axis(0).spacing();
    const double hy2 = grid.axis(1).spacing() * grid.axis(1).spacing();
    for (std::size_t i = 0; i < nx; ++i)
        for (std::size_t j = 0; j < ny; ++j) {
            const double c = u[i * ny + j];
            const double w = i == 0 ? 0.0 : u[(i - 1) * ny + j];
            const double e = i + 1 == nx ? 0.0 : u[(i + 1) * ny + j];
            const double s = j == 0 ? 0.0 : u[i * ny + j - 1];
            const double nn = j + 1 == ny ? 0.0 : u[i * ny + j + 1];
            out[i * ny + j] = (a.x[(i + 1) * ny + j] * (e - c) - a.x[i * ny + j] * (c - w)) / hx2 +
                              (a.y[i * (ny + 1) + j + 1] * (nn - c) - a.y[i * (ny + 1) + j] * (c - s)) / hy2;
        }
    return out;
}

// Solves A u = rhs. Interval: Thomas algorithm on -A. Rectangle: Jacobi-preconditioned CG on -A.
inline std::vector<double> solve_flux(const Grid& grid, const FaceCoeffs& a, const std::vector<double>& rhs,
                                      const EllipticOptions& opt) {
    const std::size_t n = rhs.size();
    if (grid.dim() == 1) {
        const double h2 = grid.axis(0).spacing() * grid.axis(0).spacing();
        std::vector<double> c(n), d(n);
        double prev_c = 0.0, prev_d = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double diag = (a.x[j] + a.x[j + 1]) / h2;
            const double lower = j == 0 ? 0.0 : -a.x[j] / h2;
            const double upper = -a.x[j + 1] / h2;
            const double denom = diag - lower * prev_c;
            if (!(std::abs(denom) > 0.0) || !std::isfinite(denom)) throw InternalError("singular elliptic matrix");
            c[j] = upper / denom;
            d[j] = (-rhs[j] - lower * prev_d) / denom;
            prev_c = c[j];
            prev_d = d[j];
        }
        std::vector<double> u(n);
        u[n - 1] = d[n - 1];
        for (std::size_t j = n - 1; j-- > 0;) u[j] = d[j] - c[j] * u[j + 1];
        return u;
    }

    const std::size_t nx = grid.axis(0).n_interior, ny = grid.axis(1).n_interior;
    const double hx2 = grid.axis(0).spacing() * grid.axis(0).spacing();
    const double hy2 = grid.axis(1).spacing() * grid.axis(1).spacing();
    std::vector<double> diag(n);
    for (std::size_t i = 0; i < nx; ++i)
        for (std::size_t j = 0; j < ny; ++j)
            diag[i * ny + j] = (a.x[(i + 1) * ny + j] + a.x[i * ny + j]) / hx2 +
                               (a.y[i * (ny + 1) + j + 1] + a.y[i * (ny + 1) + j]) / hy2;

    auto dot = [](const std::vector<double>& p, const std::vector<double>& q) {
        double s = 0.0;
        for (std::size_t i = 0; i < p.size(); ++i) s += p[i] * q[i];
        return s;
    };
    std::vector<double> b(n);
    for (std::size_t i = 0; i < n; ++i) b[i] = -rhs[i];
    const double bnorm = std::sqrt(dot(b, b));
    std::vector<double> x(n, 0.0);
    if (bnorm == 0.0) return x;

    std::vector<double> r = b, z(n), p(n);
    for (std::size_t i = 0; i < n; ++i) z[i] = r[i] / diag[i];
    p = z;
    double rz = dot(r, z);
    const std::size_t max_it = opt.cg_max_iterations ? opt.cg_max_iterations : 10 * n;
    for (std::size_t it = 0; it < max_it; ++it) {
        std::vector<double> ap = apply_flux(grid, a, p);
        for (auto& q : ap) q = -q;
        const double alpha = rz / dot(p, ap);
        for (std::size_t i = 0; i < n; ++i) {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        const double rn = std::sqrt(dot(r, r));
        if (rn <= opt.cg_tolerance * bnorm) return x;
        for (std::size_t i = 0; i < n; ++i) z[i] = r[i] / diag[i];
        const double rz_new = dot(r, z);
        const double beta = rz_new / rz;
        rz = rz_new;
        for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    }
    throw IterationError("conjugate gradient did not reach the elliptic tolerance", static_cast<int>(max_it),
                         std::sqrt(dot(r, r)) / bnorm);
}

inline FaceCoeffs cubed_faces(const EllipticProblem& p) {
    std::vector<double> g(p.w.values.size());
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = p.w.values[i] * p.w.values[i] * p.w.values[i];
    return face_average(p.w.grid, g, p.w_boundary * p.w_boundary * p.w_boundary);
}

}  // namespace detail

/// Second-order flux-form finite differences with face coefficients (w_l^3 + w_r^3)/2.
inline EllipticSolution solve_S_o(const EllipticProblem& p, const EllipticOptions& opt = {}) {
    const auto faces = detail::cubed_faces(p);
    EllipticSolution s{GridField(p.w.grid, detail::solve_flux(p.w.grid, faces, p.v.values, opt)), 0.0, 0.0};
    s.h1_norm = norm_H1(s.u_tilde);
    const double vn = norm_Hneg1(p.v);
    s.ratio_vs_bound = vn > 0.0 ? s.h1_norm / vn : 0.0;
    return s;
}

/// D_v S_o (v, w) phi = S_o(phi, w), since S_o is linear in v.
inline GridField dv_S_o(const EllipticProblem& p, const GridField& phi, const EllipticOptions& opt = {}) {
    return solve_S_o(EllipticProblem(p.w, phi, p.w_boundary), opt).u_tilde;
}

/// D_w S_o (v, w) psi: A(w) eta = -A'(w)[psi] u with u = S_o(v, w).
///
/// A'(w)[psi] has face coefficients (3 w_l^2 psi_l + 3 w_r^2 psi_r)/2 with psi = 0
/// on the boundary; this is the exact derivative of the discrete solution map.
inline GridField dw_S_o(const EllipticProblem& p, const GridField& psi, const EllipticOptions& opt = {}) {
    detail::require_same_grid(p.w.grid, psi.grid, "dw_S_o");
    const auto faces = detail::cubed_faces(p);
    const auto u = detail::solve_flux(p.w.grid, faces, p.v.values, opt);
    std::vector<double> g(psi.values.size());
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = 3.0 * p.w.values[i] * p.w.values[i] * psi.values[i];
    const auto dfaces = detail::face_average(p.w.grid, g, 0.0);
    auto rhs = detail::apply_flux(p.w.grid, dfaces, u);
    for (auto& x : rhs) x = -x;
    return GridField(p.w.grid, detail::solve_flux(p.w.grid, faces, rhs, opt));
}

/// Running maximum of an empirical ratio.
struct Measurement {
    double value = 0.0;
    std::vector<double> running_max;
};

/// Empirical sup of ||S_o(v, w)||_{H1} / ||v||_{H-1} over w in the ball and random v.
inline Measurement measure_C_o(const BallSpec& ball, std::size_t trials, Rng& rng) {
    if (trials == 0) throw ConfigError("measure_C_o: empty ensemble");
    const Grid& g = ball.w0_tilde.grid;
    Measurement m;
    for (std::size_t t = 0; t < trials; ++t) {
        GridField w = dst_inverse(sample_ball_member(ball, rng));
        for (auto& x : w.values) x += ball.theta_2;
        const GridField v = dst_inverse(random_coeffs(g, rng));
        m.value = std::max(m.value, solve_S_o(EllipticProblem(w, v, ball.theta_2)).ratio_vs_bound);
        m.running_max.push_back(m.value);
    }
    return m;
}

/// Empirical sup of ||S_o(v,w1) - S_o(v,w2)||_{H1} / (||v||_{H-1} ||w1 - w2||_{H2}).
inline Measurement measure_C_o_star(const BallSpec& ball, std::size_t trials, Rng& rng) {
    if (trials == 0) throw ConfigError("measure_C_o_star: empty ensemble");
    const Grid& g = ball.w0_tilde.grid;
    Measurement m;
    for (std::size_t t = 0; t < trials; ++t) {
        const SpectralCoeffs a = sample_ball_member(ball, rng);
        const SpectralCoeffs b = sample_ball_member(ball, rng);
        GridField w1 = dst_inverse(a), w2 = dst_inverse(b);
        for (auto& x : w1.values) x += ball.theta_2;
        for (auto& x : w2.values) x += ball.theta_2;
        const GridField v = dst_inverse(random_coeffs(g, rng));
        const double dw = norm_H2(a - b);
        const double vn = norm_Hneg1(v);
        double ratio = 0.0;
        if (dw > 0.0 && vn > 0.0) {
            const GridField du = solve_S_o(EllipticProblem(w1, v, ball.theta_2)).u_tilde -
                                 solve_S_o(EllipticProblem(w2, v, ball.theta_2)).u_tilde;
            ratio = norm_H1(du) / (vn * dw);
        }
        m.value = std::max(m.value, ratio);
        m.running_max.push_back(m.value);
    }
    return m;
}

}  // namespace squeeze
