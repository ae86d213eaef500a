#pragma once

#include <cmath>
#include <utility>

#include "squeeze/grid.hpp"
#include "squeeze/norms.hpp"

namespace squeeze {

/// (v, w) in L2 x H2_o, both in sine coefficients.
struct StateX {
    SpectralCoeffs v;
    SpectralCoeffs w;

    explicit StateX(const Grid& g) : v(g), w(g) {}
    StateX(SpectralCoeffs v_, SpectralCoeffs w_) : v(std::move(v_)), w(std::move(w_)) {
        detail::require_same_grid(v.grid, w.grid, "StateX");
    }

    const Grid& grid() const { return v.grid; }

    friend StateX operator+(StateX a, const StateX& b) {
        a.v = std::move(a.v) + b.v;
        a.w = std::move(a.w) + b.w;
        return a;
    }
    friend StateX operator-(StateX a, const StateX& b) {
        a.v = std::move(a.v) - b.v;
        a.w = std::move(a.w) - b.w;
        return a;
    }
    friend StateX operator*(double s, StateX a) {
        a.v = s * std::move(a.v);
        a.w = s * std::move(a.w);
        return a;
    }
};

/// X inner product: int v1 v2 + grad w1 . grad w2 + lap w1 lap w2.
inline double inner_X(const StateX& a, const StateX& b) {
    detail::require_same_grid(a.grid(), b.grid(), "inner_X");
    const auto mu = a.grid().eigenvalues();
    double acc = 0.0;
    for (std::size_t k = 0; k < mu.size(); ++k)
        acc += a.v.coeffs[k] * b.v.coeffs[k] + (mu[k] + mu[k] * mu[k]) * a.w.coeffs[k] * b.w.coeffs[k];
    return a.grid().mode_mass() * acc;
}

inline double norm_X(const StateX& s) { return std::sqrt(norm_L2(s.v) * norm_L2(s.v) + norm_H2o(s.w) * norm_H2o(s.w)); }

inline double distance_X(const StateX& a, const StateX& b) { return norm_X(a - b); }

}  // namespace squeeze
