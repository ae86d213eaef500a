#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "squeeze/grid.hpp"
#include "squeeze/norms.hpp"

namespace squeeze {

using Rng = std::mt19937_64;

/// Coefficients c_k ~ U(-1, 1) * k^{-3}; on the rectangle the decay is (kx ky)^{-3}.
inline SpectralCoeffs random_coeffs(const Grid& grid, Rng& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    SpectralCoeffs c(grid);
    for (std::size_t m = 0; m < c.coeffs.size(); ++m) {
        const auto k = grid.wave_numbers(m);
        const double kk = grid.dim() == 1 ? static_cast<double>(k[0]) : static_cast<double>(k[0] * k[1]);
        c.coeffs[m] = u(rng) / (kk * kk * kk);
    }
    return c;
}

/// Random field rescaled to a prescribed full H2 norm.
inline SpectralCoeffs random_coeffs_h2(const Grid& grid, Rng& rng, double h2_norm) {
    SpectralCoeffs c = random_coeffs(grid, rng);
    const double n = norm_H2(c);
    if (n > 0.0) c = (h2_norm / n) * c;
    return c;
}

/// Uniform draw in [lo, hi).
inline double uniform(Rng& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

}  // namespace squeeze
