#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "squeeze/elliptic.hpp"
#include "squeeze/errors.hpp"
#include "squeeze/grid.hpp"
#include "squeeze/norms.hpp"

namespace squeeze {

/// Reference solve of div(w^3 grad u) = v on the interval at four times the resolution.
///
/// w (minus its boundary value) and v are trigonometrically interpolated to the fine
/// grid; the face coefficients are w^3 evaluated at the exact face midpoints; the dense
/// system is factorized with partial-pivoting LU and the solution is read back at the
/// coarse nodes.
inline GridField dense_elliptic_oracle(const EllipticProblem& p) {
    const Grid& g = p.w.grid;
    if (g.dim() != 1) throw ConfigError("dense_elliptic_oracle: only the interval is supported");
    const double L = g.axis(0).length;
    const std::size_t n = g.axis(0).n_interior;
    const std::size_t nf = 4 * (n + 1) - 1;
    const double hf = L / static_cast<double>(nf + 1);

    GridField wl = p.w;
    for (auto& x : wl.values) x -= p.w_boundary;
    const SpectralCoeffs cw = nodal_coeffs(wl);
    const SpectralCoeffs cv = nodal_coeffs(p.v);

    auto series = [&](const SpectralCoeffs& c, double x) {
        double s = 0.0;
        for (std::size_t k = 0; k < c.coeffs.size(); ++k)
            s += c.coeffs[k] * std::sin(static_cast<double>(k + 1) * std::numbers::pi * x / L);
        return s;
    };

    std::vector<double> face(nf + 1);
    for (std::size_t j = 0; j <= nf; ++j) {
        const double w = p.w_boundary + series(cw, (static_cast<double>(j) + 0.5) * hf);
        if (!(w > 0.0)) throw DomainError("dense_elliptic_oracle: interpolated coefficient is non-positive");
        face[j] = w * w * w;
    }

    const auto nfi = static_cast<Eigen::Index>(nf);
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(nfi, nfi);
    Eigen::VectorXd b(nfi);
    for (Eigen::Index i = 0; i < nfi; ++i) {
        const auto iu = static_cast<std::size_t>(i);
        A(i, i) = -(face[iu] + face[iu + 1]) / (hf * hf);
        if (i > 0) A(i, i - 1) = face[iu] / (hf * hf);
        if (i + 1 < nfi) A(i, i + 1) = face[iu + 1] / (hf * hf);
        b(i) = series(cv, static_cast<double>(iu + 1) * hf);
    }
    const Eigen::VectorXd u = A.partialPivLu().solve(b);

    GridField out(g);
    for (std::size_t j = 0; j < n; ++j) out.values[j] = u(static_cast<Eigen::Index>(4 * (j + 1) - 1));
    return out;
}

}  // namespace squeeze
