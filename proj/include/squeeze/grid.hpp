#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <memory>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

#include "squeeze/errors.hpp"

namespace squeeze {

/// One Cartesian direction of the domain: (0, length) with `n_interior`
/// uniformly spaced interior nodes and a sine truncation of `n_modes`.
struct Axis {
    double length = 1.0;
    std::size_t n_interior = 1;
    std::size_t n_modes = 1;

    double spacing() const { return length / static_cast<double>(n_interior + 1); }
    double node(std::size_t j) const { return static_cast<double>(j + 1) * spacing(); }

    friend bool operator==(const Axis&, const Axis&) = default;
};

/// Values sin(k pi j / (n+1)) for k = 1..K (rows) and j = 1..n (columns).
class SineTable {
public:
    SineTable(std::size_t n_interior, std::size_t n_modes)
        : n_(n_interior), k_(n_modes), data_(n_interior * n_modes) {
        const std::size_t period = 2 * (n_ + 1);
        for (std::size_t k = 1; k <= k_; ++k) {
            for (std::size_t j = 1; j <= n_; ++j) {
                // reduce k*j modulo the period before scaling, keeps the argument small
                const std::size_t m = (k * j) % period;
                data_[(k - 1) * n_ + (j - 1)] =
                    std::sin(std::numbers::pi * static_cast<double>(m) / static_cast<double>(n_ + 1));
            }
        }
    }

    std::size_t n_interior() const { return n_; }
    std::size_t n_modes() const { return k_; }
    std::span<const double> row(std::size_t k_index) const { return {data_.data() + k_index * n_, n_}; }

private:
    std::size_t n_;
    std::size_t k_;
    std::vector<double> data_;
};

/// The interval (0, L) or the rectangle (0, Lx) x (0, Ly), discretized by
/// interior nodes and a truncated Dirichlet sine basis.
///
/// Node and mode storage is row-major in (x, y): flat = ix * ny + iy.
class Grid {
public:
    static Grid interval(double length, std::size_t n_interior, std::size_t n_modes) {
        return Grid({Axis{length, n_interior, n_modes}}, 1);
    }

    static Grid rectangle(std::array<double, 2> lengths, std::array<std::size_t, 2> n_interior,
                          std::array<std::size_t, 2> n_modes) {
        return Grid({Axis{lengths[0], n_interior[0], n_modes[0]}, Axis{lengths[1], n_interior[1], n_modes[1]}}, 2);
    }

    int dim() const { return dim_; }
    const Axis& axis(int a) const { return axes_[static_cast<std::size_t>(a)]; }

    std::size_t node_count() const {
        return dim_ == 1 ? axes_[0].n_interior : axes_[0].n_interior * axes_[1].n_interior;
    }
    std::size_t mode_count() const {
        return dim_ == 1 ? axes_[0].n_modes : axes_[0].n_modes * axes_[1].n_modes;
    }

    /// |Omega|.
    double volume() const { return dim_ == 1 ? axes_[0].length : axes_[0].length * axes_[1].length; }

    /// Squared L2 norm of a single sine mode: L/2 (interval) or Lx*Ly/4 (rectangle).
    double mode_mass() const { return dim_ == 1 ? axes_[0].length / 2 : axes_[0].length * axes_[1].length / 4; }

    /// Dirichlet-Laplacian eigenvalues mu, indexed like the mode storage.
    std::span<const double> eigenvalues() const { return *mu_; }
    double eigenvalue(std::size_t flat_mode) const { return (*mu_)[flat_mode]; }

    /// Integral over Omega of each sine mode.
    std::span<const double> mode_integrals() const { return *integrals_; }

    /// 1-based wave numbers of a flat mode index ({k, 0} on the interval).
    std::array<std::size_t, 2> wave_numbers(std::size_t flat_mode) const {
        if (dim_ == 1) return {flat_mode + 1, 0};
        return {flat_mode / axes_[1].n_modes + 1, flat_mode % axes_[1].n_modes + 1};
    }

    /// Flat index of 1-based wave numbers.
    std::size_t mode_index(std::size_t kx, std::size_t ky = 0) const {
        if (dim_ == 1) {
            if (kx < 1 || kx > axes_[0].n_modes || ky != 0) throw std::out_of_range("mode index out of range");
            return kx - 1;
        }
        if (kx < 1 || kx > axes_[0].n_modes || ky < 1 || ky > axes_[1].n_modes)
            throw std::out_of_range("mode index out of range");
        return (kx - 1) * axes_[1].n_modes + (ky - 1);
    }

    /// Coordinates of a flat node index ({x, 0} on the interval).
    std::array<double, 2> node(std::size_t flat_node) const {
        if (dim_ == 1) return {axes_[0].node(flat_node), 0.0};
        const std::size_t ny = axes_[1].n_interior;
        return {axes_[0].node(flat_node / ny), axes_[1].node(flat_node % ny)};
    }

    /// Node closest to the centre of the domain.
    std::size_t center_node() const {
        if (dim_ == 1) return axes_[0].n_interior / 2;
        return (axes_[0].n_interior / 2) * axes_[1].n_interior + axes_[1].n_interior / 2;
    }

    const SineTable& table(int a) const { return *tables_[static_cast<std::size_t>(a)]; }

    /// Same nodes, different truncation.
    Grid with_modes(std::size_t kx, std::size_t ky = 0) const {
        if (dim_ == 1) return interval(axes_[0].length, axes_[0].n_interior, kx);
        return rectangle({axes_[0].length, axes_[1].length}, {axes_[0].n_interior, axes_[1].n_interior}, {kx, ky});
    }

    std::string describe() const {
        auto ax = [](const Axis& a) {
            return "L=" + std::to_string(a.length) + " n=" + std::to_string(a.n_interior) +
                   " K=" + std::to_string(a.n_modes);
        };
        return dim_ == 1 ? "interval(" + ax(axes_[0]) + ")"
                         : "rectangle(" + ax(axes_[0]) + "; " + ax(axes_[1]) + ")";
    }

    friend bool operator==(const Grid& a, const Grid& b) {
        if (a.dim_ != b.dim_) return false;
        for (int i = 0; i < a.dim_; ++i)
            if (!(a.axes_[static_cast<std::size_t>(i)] == b.axes_[static_cast<std::size_t>(i)])) return false;
        return true;
    }

private:
    Grid(std::array<Axis, 2> axes, int dim) : axes_(axes), dim_(dim) {
        for (int a = 0; a < dim_; ++a) {
            const Axis& ax = axes_[static_cast<std::size_t>(a)];
            if (!(ax.length > 0.0) || !std::isfinite(ax.length))
                throw ConfigError("domain length must be positive and finite");
            if (ax.n_interior < 1) throw ConfigError("need at least one interior node");
            if (ax.n_modes < 1 || ax.n_modes > ax.n_interior)
                throw ConfigError("n_modes must satisfy 1 <= n_modes <= n_interior (got " +
                                  std::to_string(ax.n_modes) + " for n_interior " +
                                  std::to_string(ax.n_interior) + ")");
            tables_[static_cast<std::size_t>(a)] = std::make_shared<const SineTable>(ax.n_interior, ax.n_modes);
        }
        build_mode_data();
    }

    static double axis_mu(const Axis& ax, std::size_t k) {
        const double q = static_cast<double>(k) * std::numbers::pi / ax.length;
        return q * q;
    }

    static double axis_integral(const Axis& ax, std::size_t k) {
        // int_0^L sin(k pi x / L) dx
        return (k % 2 == 1) ? 2.0 * ax.length / (static_cast<double>(k) * std::numbers::pi) : 0.0;
    }

    void build_mode_data() {
        std::vector<double> mu(mode_count());
        std::vector<double> integ(mode_count());
        for (std::size_t m = 0; m < mu.size(); ++m) {
            const auto k = wave_numbers(m);
            if (dim_ == 1) {
                mu[m] = axis_mu(axes_[0], k[0]);
                integ[m] = axis_integral(axes_[0], k[0]);
            } else {
                mu[m] = axis_mu(axes_[0], k[0]) + axis_mu(axes_[1], k[1]);
                integ[m] = axis_integral(axes_[0], k[0]) * axis_integral(axes_[1], k[1]);
            }
        }
        mu_ = std::make_shared<const std::vector<double>>(std::move(mu));
        integrals_ = std::make_shared<const std::vector<double>>(std::move(integ));
    }

    std::array<Axis, 2> axes_{};
    int dim_ = 1;
    std::array<std::shared_ptr<const SineTable>, 2> tables_{};
    std::shared_ptr<const std::vector<double>> mu_;
    std::shared_ptr<const std::vector<double>> integrals_;
};

namespace detail {

inline void require_same_grid(const Grid& a, const Grid& b, const char* where) {
    if (!(a == b)) throw ConfigError(std::string(where) + ": grid mismatch (" + a.describe() + " vs " + b.describe() + ")");
}

template <class Derived>
struct VectorOps {
    friend Derived operator+(Derived a, const Derived& b) {
        require_same_grid(a.grid, b.grid, "operator+");
        for (std::size_t i = 0; i < a.data().size(); ++i) a.data()[i] += b.data()[i];
        return a;
    }
    friend Derived operator-(Derived a, const Derived& b) {
        require_same_grid(a.grid, b.grid, "operator-");
        for (std::size_t i = 0; i < a.data().size(); ++i) a.data()[i] -= b.data()[i];
        return a;
    }
    friend Derived operator*(double s, Derived a) {
        for (auto& x : a.data()) x *= s;
        return a;
    }
    friend Derived operator*(Derived a, double s) { return s * std::move(a); }
};

}  // namespace detail

/// Nodal samples at the interior nodes; homogeneous Dirichlet data implied.
struct GridField : detail::VectorOps<GridField> {
    Grid grid;
    std::vector<double> values;

    explicit GridField(Grid g) : grid(std::move(g)), values(grid.node_count(), 0.0) {}
    GridField(Grid g, std::vector<double> v) : grid(std::move(g)), values(std::move(v)) {
        if (values.size() != grid.node_count())
            throw ConfigError("GridField: expected " + std::to_string(grid.node_count()) + " values, got " +
                              std::to_string(values.size()));
    }

    /// Samples f(x) (or f(x, y)) at the interior nodes.
    template <class F>
    static GridField sample(const Grid& g, F&& f) {
        GridField out(g);
        for (std::size_t i = 0; i < out.values.size(); ++i) {
            const auto p = g.node(i);
            if constexpr (std::is_invocable_v<F, double, double>)
                out.values[i] = f(p[0], p[1]);
            else
                out.values[i] = f(p[0]);
        }
        return out;
    }

    std::vector<double>& data() { return values; }
    const std::vector<double>& data() const { return values; }
};

/// Coefficients in the truncated sine basis.
struct SpectralCoeffs : detail::VectorOps<SpectralCoeffs> {
    Grid grid;
    std::vector<double> coeffs;

    explicit SpectralCoeffs(Grid g) : grid(std::move(g)), coeffs(grid.mode_count(), 0.0) {}
    SpectralCoeffs(Grid g, std::vector<double> c) : grid(std::move(g)), coeffs(std::move(c)) {
        if (coeffs.size() != grid.mode_count())
            throw ConfigError("SpectralCoeffs: expected " + std::to_string(grid.mode_count()) + " coefficients, got " +
                              std::to_string(coeffs.size()));
    }

    std::vector<double>& data() { return coeffs; }
    const std::vector<double>& data() const { return coeffs; }
};

inline bool all_finite(std::span<const double> xs) {
    for (double x : xs)
        if (!std::isfinite(x)) return false;
    return true;
}

/// mu_k for 1-based wave numbers; `ky` is ignored on the interval.
inline double laplace_eigenvalue(const Grid& grid, std::size_t kx, std::size_t ky = 0) {
    return grid.eigenvalue(grid.mode_index(kx, ky));
}

}  // namespace squeeze
