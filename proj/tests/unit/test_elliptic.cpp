#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "squeeze/constants.hpp"
#include "squeeze/elliptic.hpp"
#include "squeeze/random_fields.hpp"
#include "squeeze/transform.hpp"
#include "squeeze/verification/dense_elliptic.hpp"

using namespace squeeze;
using std::numbers::pi;

namespace {

GridField constant(const Grid& g, double c) {
    GridField f(g);
    for (auto& x : f.values) x = c;
    return f;
}

double l2_error_sin(std::size_t n) {
    const Grid g = Grid::interval(1.0, n, n);
    const GridField v = GridField::sample(g, [](double x) { return std::sin(pi * x); });
    const GridField u = solve_S_o(EllipticProblem(constant(g, 1.0), v, 1.0)).u_tilde;
    const GridField exact = GridField::sample(g, [](double x) { return -std::sin(pi * x) / (pi * pi); });
    return norm_L2(u - exact);
}

// Smooth positive coefficient and a random right-hand side on (0, 1).
EllipticProblem random_problem(const Grid& g, Rng& rng) {
    const SpectralCoeffs cw = random_coeffs(g, rng);
    GridField w = dst_inverse((0.3 / std::max(norm_max(dst_inverse(cw)), 1e-12)) * cw);
    for (auto& x : w.values) x += 1.0;
    return EllipticProblem(w, dst_inverse(random_coeffs(g, rng)), 1.0);
}

SimConfig reference_config() {
    SimConfig c;
    c.w0_modes = {{1, 0, 0.2}};
    c.horizon = 1e-3;
    c.dt = 1e-5;
    return c;
}

}  // namespace

TEST(SolveSo, ManufacturedUnitCoefficientIsSecondOrder) {
    const double e64 = l2_error_sin(64), e128 = l2_error_sin(128), e256 = l2_error_sin(256);
    EXPECT_LE(e64, 2.0 / (65.0 * 65.0));
    EXPECT_LE(e128, 2.0 / (129.0 * 129.0));
    EXPECT_LE(e256, 2.0 / (257.0 * 257.0));
    EXPECT_NEAR(e64 / e128, 4.0, 0.5);
    EXPECT_NEAR(e128 / e256, 4.0, 0.5);
}

TEST(SolveSo, ConstantCoefficientScalesByCube) {
    const Grid g = Grid::interval(1.0, 40, 40);
    const GridField v = GridField::sample(g, [](double x) { return std::sin(2 * pi * x) + x * (1 - x); });
    const GridField u1 = solve_S_o(EllipticProblem(constant(g, 1.0), v, 1.0)).u_tilde;
    const GridField u2 = solve_S_o(EllipticProblem(constant(g, 2.0), v, 2.0)).u_tilde;
    for (std::size_t i = 0; i < u1.values.size(); ++i) EXPECT_NEAR(u2.values[i], u1.values[i] / 8.0, 1e-14);
}

// Frozen from tests/oracles/derived_values.py (elliptic_reference, banded solve in numpy).
TEST(SolveSo, MatchesIndependentBandedSolve) {
    const Grid g = Grid::interval(1.0, 31, 31);
    const GridField w = GridField::sample(g, [](double x) { return 1.0 + 0.3 * std::sin(pi * x); });
    const GridField v = GridField::sample(g, [](double x) { return std::sin(2 * pi * x); });
    const GridField psi = GridField::sample(g, [](double x) { return std::sin(3 * pi * x); });
    const EllipticProblem p(w, v, 1.0);
    const GridField u = solve_S_o(p).u_tilde;
    const GridField dw = dw_S_o(p, psi);
    const struct {
        std::size_t j;
        double u, dw;
    } ref[] = {{5, -0.01515059455942581, 0.003630324468974529},
               {11, -0.00986298241875968, -0.010398891088336226},
               {20, 0.011808202756340624, 0.009491897520554187}};
    for (const auto& r : ref) {
        EXPECT_NEAR(u.values[r.j], r.u, 1e-13);
        EXPECT_NEAR(dw.values[r.j], r.dw, 1e-9);  // oracle is a Richardson quotient
    }
}

TEST(SolveSo, AgreesWithDenseOracleAtSecondOrder) {
    auto err = [](std::size_t n) {
        const Grid g = Grid::interval(1.0, n, n);
        const GridField w = GridField::sample(g, [](double x) { return 1.0 + 0.4 * std::sin(pi * x) * x; });
        const GridField v = GridField::sample(g, [](double x) { return std::cos(3 * x) * x * (1 - x); });
        const EllipticProblem p(w, v, 1.0);
        return norm_L2(solve_S_o(p).u_tilde - dense_elliptic_oracle(p));
    };
    const double e1 = err(31), e2 = err(63), e3 = err(127);
    EXPECT_LT(e3, e2);
    EXPECT_NEAR(e1 / e2, 4.0, 0.8);
    EXPECT_NEAR(e2 / e3, 4.0, 0.8);
}

TEST(SolveSo, LinearInRightHandSide) {
    Rng rng(11);
    const Grid g = Grid::interval(1.0, 64, 64);
    for (int i = 0; i < 10; ++i) {
        const EllipticProblem p = random_problem(g, rng);
        const GridField v2 = dst_inverse(random_coeffs(g, rng));
        const double a = uniform(rng, -2, 2), b = uniform(rng, -2, 2);
        const GridField lhs = solve_S_o(EllipticProblem(p.w, a * p.v + b * v2, 1.0)).u_tilde;
        const GridField rhs = a * solve_S_o(p).u_tilde + b * solve_S_o(EllipticProblem(p.w, v2, 1.0)).u_tilde;
        EXPECT_LE(norm_H1(lhs - rhs), 1e-12 * std::max(norm_H1(lhs), 1e-300));
    }
}

TEST(SolveSo, MaximumPrinciple) {
    Rng rng(12);
    const Grid g = Grid::interval(1.0, 50, 50);
    for (int i = 0; i < 10; ++i) {
        EllipticProblem p = random_problem(g, rng);
        for (auto& x : p.v.values) x = std::abs(x) + 0.01;
        for (double x : solve_S_o(p).u_tilde.values) EXPECT_LT(x, 0.0);
    }
}

TEST(SolveSo, RejectsNonPositiveCoefficient) {
    const Grid g = Grid::interval(1.0, 8, 8);
    GridField w = constant(g, 1.0);
    w.values[3] = 0.0;
    EXPECT_THROW(EllipticProblem(w, GridField(g), 1.0), DomainError);
    EXPECT_THROW(EllipticProblem(constant(g, 1.0), GridField(g), -1.0), DomainError);
    GridField bad = constant(g, 1.0);
    bad.values[0] = std::nan("");
    EXPECT_THROW(EllipticProblem(bad, GridField(g), 1.0), DomainError);
}

TEST(SolveSo, RectangleManufacturedSolution) {
    const Grid g = Grid::rectangle({1.0, 1.0}, {31, 31}, {31, 31});
    const GridField v = GridField::sample(g, [](double x, double y) { return std::sin(pi * x) * std::sin(pi * y); });
    const GridField u = solve_S_o(EllipticProblem(constant(g, 1.0), v, 1.0)).u_tilde;
    const GridField exact = (-1.0 / (2 * pi * pi)) * v;
    EXPECT_LE(norm_max(u - exact), 2.0 / (32.0 * 32.0) * norm_max(exact) * 5.0);
}

TEST(SolveSo, RectangleVariableCoefficientSymmetry) {
    // swapping the axes of a square problem swaps the solution
    const Grid g = Grid::rectangle({1.0, 1.0}, {15, 15}, {15, 15});
    const GridField w = GridField::sample(g, [](double x, double y) { return 1.0 + 0.3 * x * y; });
    const GridField v = GridField::sample(g, [](double x, double y) { return std::sin(pi * x) * y; });
    const GridField vt = GridField::sample(g, [](double x, double y) { return std::sin(pi * y) * x; });
    const GridField u = solve_S_o(EllipticProblem(w, v, 1.0)).u_tilde;
    const GridField ut = solve_S_o(EllipticProblem(w, vt, 1.0)).u_tilde;
    for (std::size_t ix = 0; ix < 15; ++ix)
        for (std::size_t iy = 0; iy < 15; ++iy) EXPECT_NEAR(u.values[ix * 15 + iy], ut.values[iy * 15 + ix], 1e-9);
}

TEST(DvSo, EqualsSolveOnDirection) {
    Rng rng(13);
    const Grid g = Grid::interval(1.0, 32, 32);
    const EllipticProblem p = random_problem(g, rng);
    const GridField d = dv_S_o(p, p.v);
    const GridField u = solve_S_o(p).u_tilde;
    for (std::size_t i = 0; i < d.values.size(); ++i) EXPECT_EQ(d.values[i], u.values[i]);
    for (double x : dv_S_o(p, GridField(g)).values) EXPECT_EQ(x, 0.0);
}

TEST(DvSo, MatchesCentralDifference) {
    Rng rng(14);
    const Grid g = Grid::interval(1.0, 48, 48);
    for (int i = 0; i < 10; ++i) {
        const EllipticProblem p = random_problem(g, rng);
        const GridField phi = dst_inverse(random_coeffs(g, rng));
        const double lam = 1e-3;
        const GridField fd = (1.0 / (2 * lam)) * (solve_S_o(EllipticProblem(p.w, p.v + lam * phi, 1.0)).u_tilde -
                                                  solve_S_o(EllipticProblem(p.w, p.v - lam * phi, 1.0)).u_tilde);
        EXPECT_LT(norm_max(fd - dv_S_o(p, phi)), 1e-10);
    }
}

TEST(DwSo, VanishesForZeroDirectionOrZeroSource) {
    Rng rng(15);
    const Grid g = Grid::interval(1.0, 32, 32);
    const EllipticProblem p = random_problem(g, rng);
    EXPECT_EQ(norm_max(dw_S_o(p, GridField(g))), 0.0);
    const EllipticProblem q(p.w, GridField(g), 1.0);
    EXPECT_EQ(norm_max(dw_S_o(q, dst_inverse(random_coeffs(g, rng)))), 0.0);
}

TEST(DwSo, CentralDifferenceConvergesAtSecondOrder) {
    Rng rng(16);
    const Grid g = Grid::interval(1.0, 48, 48);
    for (int i = 0; i < 5; ++i) {
        const EllipticProblem p = random_problem(g, rng);
        const GridField psi = dst_inverse(random_coeffs(g, rng));
        const GridField d = dw_S_o(p, psi);
        auto err = [&](double lam) {
            const GridField fd = (1.0 / (2 * lam)) * (solve_S_o(EllipticProblem(p.w + lam * psi, p.v, 1.0)).u_tilde -
                                                      solve_S_o(EllipticProblem(p.w - lam * psi, p.v, 1.0)).u_tilde);
            return norm_H1(fd - d);
        };
        const double e1 = err(1e-2), e2 = err(1e-3);
        EXPECT_NEAR(std::log10(e1 / e2), 2.0, 0.2);
    }
}

TEST(DwSo, RectangleCentralDifference) {
    const Grid g = Grid::rectangle({1.0, 0.8}, {11, 9}, {11, 9});
    const GridField w = GridField::sample(g, [](double x, double y) { return 1.0 + 0.2 * std::sin(pi * x) * y; });
    const GridField v = GridField::sample(g, [](double x, double y) { return x - y; });
    const GridField psi = GridField::sample(g, [](double x, double y) { return std::sin(pi * x) * std::sin(1.25 * pi * y); });
    const EllipticProblem p(w, v, 1.0);
    const EllipticOptions tight{1e-14, 0};
    const double lam = 1e-4;
    const GridField fd = (1.0 / (2 * lam)) * (solve_S_o(EllipticProblem(w + lam * psi, v, 1.0), tight).u_tilde -
                                              solve_S_o(EllipticProblem(w - lam * psi, v, 1.0), tight).u_tilde);
    const GridField d = dw_S_o(p, psi, tight);
    EXPECT_LT(norm_max(fd - d), 1e-6 * norm_max(d));
}

TEST(MeasureCo, ConstantCoefficientPerModeRatio) {
    const std::size_t n = 128;
    const Grid g = Grid::interval(1.0, n, n);
    for (double c : {0.8, 1.0, 1.5}) {
        for (std::size_t k : {1, 2, 5}) {
            SpectralCoeffs vc(g);
            vc.coeffs[k - 1] = 1.0;
            const auto sol = solve_S_o(EllipticProblem(constant(g, c), dst_inverse(vc), c));
            const double mu = g.eigenvalue(k - 1);
            // the difference Laplacian shifts the eigenvalue by a factor mu / mu_h
            const double h = 1.0 / (n + 1);
            const double mu_h = 4.0 / (h * h) * std::pow(std::sin(0.5 * static_cast<double>(k) * pi * h), 2);
            const double expected = std::sqrt(1.0 + 1.0 / mu) / (c * c * c) * mu / mu_h;
            EXPECT_NEAR(sol.ratio_vs_bound, expected, 1e-10 * expected);
            EXPECT_NEAR(sol.ratio_vs_bound, std::sqrt(1.0 + 1.0 / mu) / (c * c * c), 2e-3 * expected);
        }
    }
}

TEST(MeasureCo, StaysBelowAnalyticConstantWithMonotoneRunningMax) {
    const SimConfig cfg = reference_config();
    const ConstantsLedger L = compute_constants(cfg);
    const BallSpec ball = L.ball(cfg.w0_tilde(), cfg.params.theta_2);
    Rng rng(17);
    const Measurement m = measure_C_o(ball, 50, rng);
    EXPECT_GT(m.value, 0.0);
    EXPECT_LE(m.value, L.C_o);
    ASSERT_EQ(m.running_max.size(), 50u);
    for (std::size_t i = 1; i < m.running_max.size(); ++i) EXPECT_GE(m.running_max[i], m.running_max[i - 1]);
    EXPECT_EQ(m.running_max.back(), m.value);
    EXPECT_THROW(measure_C_o(ball, 0, rng), ConfigError);
}

TEST(MeasureCoStar, StaysBelowAnalyticConstant) {
    const SimConfig cfg = reference_config();
    const ConstantsLedger L = compute_constants(cfg);
    const BallSpec ball = L.ball(cfg.w0_tilde(), cfg.params.theta_2);
    Rng rng(18);
    const Measurement m = measure_C_o_star(ball, 30, rng);
    EXPECT_GT(m.value, 0.0);
    EXPECT_LE(m.value, L.C_o_star);
    for (std::size_t i = 1; i < m.running_max.size(); ++i) EXPECT_GE(m.running_max[i], m.running_max[i - 1]);
}

TEST(MeasureCoStar, IdenticalCoefficientsGiveZeroDifference) {
    Rng rng(19);
    const Grid g = Grid::interval(1.0, 32, 32);
    const EllipticProblem p = random_problem(g, rng);
    const GridField du = solve_S_o(p).u_tilde - solve_S_o(EllipticProblem(p.w, p.v, 1.0)).u_tilde;
    EXPECT_EQ(norm_H1(du), 0.0);
}
