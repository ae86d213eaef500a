#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "squeeze/grid.hpp"
#include "squeeze/transform.hpp"

namespace squeeze {

namespace detail {

// mass * sum_k weight(mu_k) * c_k^2
template <class W>
double weighted_square(const SpectralCoeffs& c, W&& weight) {
    const auto mu = c.grid.eigenvalues();
    double acc = 0.0;
    for (std::size_t k = 0; k < c.coeffs.size(); ++k) acc += weight(mu[k]) * c.coeffs[k] * c.coeffs[k];
    return c.grid.mode_mass() * acc;
}

}  // namespace detail

inline double norm_L2(const SpectralCoeffs& c) {
    return std::sqrt(detail::weighted_square(c, [](double) { return 1.0; }));
}

/// ||grad f||^2 + ||f||^2.
inline double norm_H1(const SpectralCoeffs& c) {
    return std::sqrt(detail::weighted_square(c, [](double mu) { return 1.0 + mu; }));
}

/// Seminorm ||grad f||^2 + ||lap f||^2, the second component of the X product.
inline double norm_H2o(const SpectralCoeffs& c) {
    return std::sqrt(detail::weighted_square(c, [](double mu) { return mu + mu * mu; }));
}

/// Full norm ||f||^2 + ||grad f||^2 + ||lap f||^2.
inline double norm_H2(const SpectralCoeffs& c) {
    return std::sqrt(detail::weighted_square(c, [](double mu) { return 1.0 + mu + mu * mu; }));
}

/// ||grad (-lap_D)^{-1} f||.
inline double norm_Hneg1(const SpectralCoeffs& c) {
    return std::sqrt(detail::weighted_square(c, [](double mu) { return 1.0 / mu; }));
}

/// The same nodes with every resolvable mode kept (K = n on each axis).
inline Grid full_rank(const Grid& g) {
    return g.dim() == 1 ? g.with_modes(g.axis(0).n_interior) : g.with_modes(g.axis(0).n_interior, g.axis(1).n_interior);
}

/// Lossless coefficients of a nodal field (all n modes, independent of the grid's truncation).
inline SpectralCoeffs nodal_coeffs(const GridField& f) {
    const Grid full = full_rank(f.grid);
    if (full == f.grid) return dst_forward(f);
    return dst_forward(GridField(full, f.values));
}

// Nodal fields are measured through their lossless coefficients.
inline double norm_L2(const GridField& f) { return norm_L2(nodal_coeffs(f)); }
inline double norm_H1(const GridField& f) { return norm_H1(nodal_coeffs(f)); }
inline double norm_H2o(const GridField& f) { return norm_H2o(nodal_coeffs(f)); }
inline double norm_H2(const GridField& f) { return norm_H2(nodal_coeffs(f)); }
inline double norm_Hneg1(const GridField& f) { return norm_Hneg1(nodal_coeffs(f)); }

/// Full H2 norm of a field whose boundary trace is the constant `trace`.
///
/// The nodal values are split as f = trace + g with g pinned; g is expanded in
/// sines and the constant is integrated exactly, so no boundary jump is fed
/// into the sine expansion.
inline double norm_H2_lifted(const GridField& f, double trace) {
    GridField g = f;
    for (auto& x : g.values) x -= trace;
    const SpectralCoeffs c = nodal_coeffs(g);
    const auto integrals = c.grid.mode_integrals();
    double mean_part = 0.0;
    for (std::size_t k = 0; k < c.coeffs.size(); ++k) mean_part += c.coeffs[k] * integrals[k];
    const double sq = trace * trace * c.grid.volume() + 2.0 * trace * mean_part +
                      detail::weighted_square(c, [](double mu) { return 1.0 + mu + mu * mu; });
    return std::sqrt(std::max(sq, 0.0));
}

/// Poincare constant 1/sqrt(mu_1) of the Dirichlet Laplacian.
inline double poincare_constant(const Grid& grid) {
    const auto mu = grid.eigenvalues();
    return 1.0 / std::sqrt(*std::min_element(mu.begin(), mu.end()));
}

/// sup |f(x_j)| / ||f||_{H2} over the truncated sine space.
///
/// For each node the supremum is attained by the reproducing kernel, giving
/// sqrt(sum_k phi_k(x_j)^2 / (mass (1 + mu_k + mu_k^2))); the estimate is the
/// maximum over nodes.
inline double embedding_constant_estimate(const Grid& grid) {
    const auto mu = grid.eigenvalues();
    const double mass = grid.mode_mass();
    std::vector<double> inv_w(grid.mode_count());
    for (std::size_t k = 0; k < inv_w.size(); ++k) inv_w[k] = 1.0 / (mass * (1.0 + mu[k] + mu[k] * mu[k]));

    double best = 0.0;
    if (grid.dim() == 1) {
        const auto& t = grid.table(0);
        for (std::size_t j = 0; j < t.n_interior(); ++j) {
            double acc = 0.0;
            for (std::size_t k = 0; k < t.n_modes(); ++k) acc += t.row(k)[j] * t.row(k)[j] * inv_w[k];
            best = std::max(best, acc);
        }
        return std::sqrt(best);
    }
    const auto& tx = grid.table(0);
    const auto& ty = grid.table(1);
    for (std::size_t ix = 0; ix < tx.n_interior(); ++ix) {
        for (std::size_t iy = 0; iy < ty.n_interior(); ++iy) {
            double acc = 0.0;
            for (std::size_t a = 0; a < tx.n_modes(); ++a) {
                const double sx = tx.row(a)[ix];
                for (std::size_t b = 0; b < ty.n_modes(); ++b) {
                    const double s = sx * ty.row(b)[iy];
                    acc += s * s * inv_w[a * ty.n_modes() + b];
                }
            }
            best = std::max(best, acc);
        }
    }
    return std::sqrt(best);
}

/// Nodal sup norm.
inline double norm_max(const GridField& f) {
    double m = 0.0;
    for (double x : f.values) m = std::max(m, std::abs(x));
    return m;
}

}  // namespace squeeze
