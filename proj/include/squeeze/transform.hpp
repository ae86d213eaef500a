#pragma once

#include <cstddef>
#include <vector>

#include "squeeze/grid.hpp"

namespace squeeze {

namespace detail {

// out[k] = scale * sum_j in[j] * table(k, j), strided over a second axis.
inline void sine_analysis(const SineTable& t, const double* in, std::size_t in_stride, double* out,
                          std::size_t out_stride, double scale) {
    const std::size_t n = t.n_interior();
    for (std::size_t k = 0; k < t.n_modes(); ++k) {
        const auto row = t.row(k);
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) acc += in[j * in_stride] * row[j];
        out[k * out_stride] = scale * acc;
    }
}

// out[j] = sum_k in[k] * table(k, j)
inline void sine_synthesis(const SineTable& t, const double* in, std::size_t in_stride, double* out,
                           std::size_t out_stride) {
    const std::size_t n = t.n_interior();
    for (std::size_t j = 0; j < n; ++j) out[j * out_stride] = 0.0;
    for (std::size_t k = 0; k < t.n_modes(); ++k) {
        const double c = in[k * in_stride];
        if (c == 0.0) continue;
        const auto row = t.row(k);
        for (std::size_t j = 0; j < n; ++j) out[j * out_stride] += c * row[j];
    }
}

}  // namespace detail

/// Discrete sine coefficients of a nodal field.
///
/// With K = n this is the DST-I and inverts `dst_inverse` exactly; with K < n
/// it is the orthogonal projection onto the first K modes (the discrete sine
/// vectors are orthogonal on the nodes).
inline SpectralCoeffs dst_forward(const GridField& f) {
    if (f.values.size() != f.grid.node_count()) throw ConfigError("dst_forward: dimension mismatch");
    if (!all_finite(f.values)) throw DomainError("dst_forward: non-finite nodal value");
    const Grid& g = f.grid;
    SpectralCoeffs out(g);
    if (g.dim() == 1) {
        const auto& t = g.table(0);
        detail::sine_analysis(t, f.values.data(), 1, out.coeffs.data(), 1,
                              2.0 / static_cast<double>(t.n_interior() + 1));
        return out;
    }
    const auto& tx = g.table(0);
    const auto& ty = g.table(1);
    const std::size_t nx = tx.n_interior(), ny = ty.n_interior(), kx = tx.n_modes(), ky = ty.n_modes();
    std::vector<double> tmp(kx * ny);
    for (std::size_t iy = 0; iy < ny; ++iy)
        detail::sine_analysis(tx, f.values.data() + iy, ny, tmp.data() + iy, ny, 2.0 / static_cast<double>(nx + 1));
    for (std::size_t a = 0; a < kx; ++a)
        detail::sine_analysis(ty, tmp.data() + a * ny, 1, out.coeffs.data() + a * ky, 1,
                              2.0 / static_cast<double>(ny + 1));
    return out;
}

/// Nodal samples of the truncated sine series.
inline GridField dst_inverse(const SpectralCoeffs& c) {
    if (c.coeffs.size() != c.grid.mode_count()) throw ConfigError("dst_inverse: dimension mismatch");
    const Grid& g = c.grid;
    GridField out(g);
    if (g.dim() == 1) {
        detail::sine_synthesis(g.table(0), c.coeffs.data(), 1, out.values.data(), 1);
        return out;
    }
    const auto& tx = g.table(0);
    const auto& ty = g.table(1);
    const std::size_t ny = ty.n_interior(), kx = tx.n_modes(), ky = ty.n_modes();
    std::vector<double> tmp(kx * ny);
    for (std::size_t a = 0; a < kx; ++a)
        detail::sine_synthesis(ty, c.coeffs.data() + a * ky, 1, tmp.data() + a * ny, 1);
    for (std::size_t iy = 0; iy < ny; ++iy)
        detail::sine_synthesis(tx, tmp.data() + iy, ny, out.values.data() + iy, ny);
    return out;
}

}  // namespace squeeze
