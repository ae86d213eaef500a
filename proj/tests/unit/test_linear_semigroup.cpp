#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "squeeze/random_fields.hpp"
#include "squeeze/semigroup.hpp"
#include "squeeze/state.hpp"

using namespace squeeze;
using std::numbers::pi;

namespace {

StateX random_state(const Grid& g, Rng& rng) { return StateX(random_coeffs(g, rng), random_coeffs(g, rng)); }

StateX mode_state(const Grid& g, std::size_t k, double v, double w) {
    StateX s(g);
    s.v.coeffs[k - 1] = v;
    s.w.coeffs[k - 1] = w;
    return s;
}

}  // namespace

TEST(PinnedOperator, EigenvaluesArePositiveAndIncreasing) {
    const Grid g = Grid::interval(1.3, 40, 40);
    const PinnedOperator op(g);
    const auto nu = op.nu();
    for (std::size_t k = 0; k < nu.size(); ++k) {
        const double mu = g.eigenvalue(k);
        EXPECT_GT(nu[k], 0.0);
        EXPECT_NEAR(nu[k], mu + mu * mu, 1e-14 * nu[k]);
        EXPECT_NEAR(op.omega()[k], std::sqrt(nu[k]), 1e-14 * op.omega()[k]);
        if (k > 0) {
            EXPECT_GT(nu[k], nu[k - 1]);
        }
    }
}

TEST(ApplyAop, FirstModeOnPiInterval) {
    const Grid g = Grid::interval(pi, 8, 8);
    const PinnedOperator op(g);
    SpectralCoeffs w(g);
    w.coeffs[0] = 1.0;
    const SpectralCoeffs a = apply_Aop(op, w);
    EXPECT_NEAR(a.coeffs[0], -2.0, 1e-14);
    for (std::size_t k = 1; k < 8; ++k) EXPECT_EQ(a.coeffs[k], 0.0);
    for (double x : apply_Aop(op, SpectralCoeffs(g)).coeffs) EXPECT_EQ(x, 0.0);
}

TEST(ApplyAop, WeakFormIdentity) {
    Rng rng(2);
    const Grid g = Grid::interval(1.0, 64, 64);
    const PinnedOperator op(g);
    for (int i = 0; i < 20; ++i) {
        const SpectralCoeffs w = random_coeffs(g, rng);
        const SpectralCoeffs a = apply_Aop(op, w);
        double pairing = 0.0;
        for (std::size_t k = 0; k < w.coeffs.size(); ++k) pairing += -a.coeffs[k] * w.coeffs[k];
        pairing *= g.mode_mass();
        const double h2o = norm_H2o(w) * norm_H2o(w);
        EXPECT_NEAR(pairing, h2o, 1e-12 * h2o);
    }
}

TEST(ApplyAop, GridMismatchThrows) {
    const PinnedOperator op(Grid::interval(1.0, 8, 8));
    EXPECT_THROW(apply_Aop(op, SpectralCoeffs(Grid::interval(1.0, 9, 9))), ConfigError);
}

TEST(Semigroup, IdentityAtZero) {
    Rng rng(1);
    const Grid g = Grid::interval(1.0, 32, 32);
    const PinnedOperator op(g);
    const StateX s = random_state(g, rng);
    EXPECT_EQ(distance_X(semigroup_apply(op, s, 0.0), s), 0.0);
}

TEST(Semigroup, HalfPeriodOfFirstMode) {
    const Grid g = Grid::interval(pi, 8, 8);
    const PinnedOperator op(g);
    const StateX out = semigroup_apply(op, mode_state(g, 1, 0.0, 1.0), pi / std::sqrt(2.0));
    EXPECT_NEAR(out.w.coeffs[0], -1.0, 1e-15);
    EXPECT_NEAR(out.v.coeffs[0], 0.0, 1e-15);
}

TEST(Semigroup, GroupLaw) {
    Rng rng(3);
    const Grid g = Grid::interval(1.0, 48, 48);
    const PinnedOperator op(g);
    for (int i = 0; i < 20; ++i) {
        const StateX s = random_state(g, rng);
        const double t1 = uniform(rng, 0.0, 2.0), t2 = uniform(rng, 0.0, 2.0);
        const StateX a = semigroup_apply(op, s, t1 + t2);
        const StateX b = semigroup_apply(op, semigroup_apply(op, s, t1), t2);
        EXPECT_LE(distance_X(a, b), 1e-12 * norm_X(s));
    }
}

TEST(Semigroup, TimeReversalReturnsToStart) {
    Rng rng(4);
    const Grid g = Grid::interval(1.0, 48, 48);
    const PinnedOperator op(g);
    for (int i = 0; i < 20; ++i) {
        const StateX s = random_state(g, rng);
        const double t = uniform(rng, 0.0, 5.0);
        EXPECT_LE(distance_X(semigroup_apply(op, semigroup_apply(op, s, t), -t), s), 1e-11 * norm_X(s));
    }
}

TEST(Semigroup, UnitaryOverLongTimes) {
    Rng rng(5);
    const Grid g = Grid::interval(1.0, 128, 128);
    const PinnedOperator op(g);
    for (int i = 0; i < 100; ++i) {
        const StateX s = random_state(g, rng);
        const double t = uniform(rng, 0.0, 100.0);
        const double n0 = norm_X(s);
        EXPECT_LE(std::abs(norm_X(semigroup_apply(op, s, t)) - n0), 1e-12 * n0);
    }
}

TEST(Semigroup, UnitaryOnRectangle) {
    Rng rng(6);
    const Grid g = Grid::rectangle({1.0, 0.7}, {12, 10}, {12, 10});
    const PinnedOperator op(g);
    for (int i = 0; i < 20; ++i) {
        const StateX s = random_state(g, rng);
        const double n0 = norm_X(s);
        EXPECT_LE(std::abs(norm_X(semigroup_apply(op, s, uniform(rng, 0.0, 100.0))) - n0), 1e-12 * n0);
    }
}

TEST(Semigroup, ModalEnergyIsConserved) {
    Rng rng(7);
    const Grid g = Grid::interval(1.0, 32, 32);
    const PinnedOperator op(g);
    const StateX s = random_state(g, rng);
    const StateX out = semigroup_apply(op, s, 3.7);
    const auto nu = op.nu();
    for (std::size_t k = 0; k < nu.size(); ++k) {
        const double e0 = s.v.coeffs[k] * s.v.coeffs[k] + nu[k] * s.w.coeffs[k] * s.w.coeffs[k];
        const double e1 = out.v.coeffs[k] * out.v.coeffs[k] + nu[k] * out.w.coeffs[k] * out.w.coeffs[k];
        EXPECT_NEAR(e1, e0, 1e-13 * e0);
    }
}

TEST(Semigroup, SkewAdjointGenerator) {
    Rng rng(8);
    const Grid g = Grid::interval(1.0, 64, 64);
    const PinnedOperator op(g);
    for (int i = 0; i < 50; ++i) {
        const StateX a = random_state(g, rng), b = random_state(g, rng);
        const StateX Aa = apply_generator(op, a), Ab = apply_generator(op, b);
        const double scale = norm_X(Aa) * norm_X(b) + norm_X(a) * norm_X(Ab);
        EXPECT_LE(std::abs(inner_X(Aa, b) + inner_X(a, Ab)), 1e-12 * scale);
        EXPECT_LE(std::abs(inner_X(Aa, a)), 1e-12 * norm_X(Aa) * norm_X(a));
    }
}

TEST(Semigroup, StrongContinuityOverDyadicSteps) {
    const Grid g = Grid::interval(1.0, 32, 32);
    const PinnedOperator op(g);
    StateX s(g);
    s.w.coeffs[0] = 0.2;
    s.w.coeffs[2] = -0.05;
    s.v.coeffs[1] = 0.3;
    double prev = std::numeric_limits<double>::infinity();
    for (int j = 8; j <= 30; ++j) {
        const double d = distance_X(semigroup_apply(op, s, std::ldexp(1.0, -j)), s);
        EXPECT_LT(d, prev);
        prev = d;
    }
    EXPECT_LT(prev, 1e-6);
}

TEST(GeneratorCheck, ZeroState) {
    const PinnedOperator op(Grid::interval(1.0, 16, 16));
    EXPECT_EQ(generator_check(op, StateX(op.grid())), 0.0);
}

TEST(GeneratorCheck, LowModeResidual) {
    const Grid g = Grid::interval(1.0, 16, 16);
    const PinnedOperator op(g);
    const StateX s = mode_state(g, 1, 0.3, 0.2);
    const double As = norm_X(apply_generator(op, s));
    const double r = generator_check(op, s, 1e-4);
    // leading term h |A^2 s| / 2, and |A^2 s| = omega_1 |A s| on a single mode
    EXPECT_LE(r, 0.5 * 1e-4 * op.omega()[0] * As * 1.01);
    EXPECT_GE(r, 0.5 * 1e-4 * op.omega()[0] * As * 0.99);
}

TEST(GeneratorCheck, ResidualIsFirstOrder) {
    const Grid g = Grid::interval(1.0, 16, 16);
    const PinnedOperator op(g);
    const StateX s = mode_state(g, 2, -0.1, 0.05);
    for (double h : {1e-3, 5e-4, 2.5e-4}) {
        const double ratio = generator_check(op, s, h) / generator_check(op, s, 0.5 * h);
        EXPECT_NEAR(ratio, 2.0, 0.2);
    }
}

// Frozen from tests/oracles/derived_values.py (duhamel_weights, quadrature in 40 digits).
TEST(DuhamelWeights, MatchQuadratureOracle) {
    const PinnedOperator op(Grid::interval(1.0, 4, 4));
    ASSERT_NEAR(op.omega()[0], 10.357542924607737, 1e-13);
    struct Case {
        double dt, av, aw, bv, bw;
    };
    const Case cases[] = {
        {1e-3, 0.0009999821203133333, 4.999955300703412e-07, 4.999955300703412e-07, 1.6666577267982153e-10},
        {1e-5, 9.999999982120218e-06, 4.999999995530055e-11, 4.999999995530055e-11, 1.6666666657726778e-16},
        {0.3, 0.0033138200558343006, 0.018637538264182026, 0.018637538264182026, 0.0027655647632634905},
    };
    for (const Case& c : cases) {
        const DuhamelWeights w = duhamel_weights(op, c.dt);
        EXPECT_NEAR(w.alpha_v[0], c.av, 1e-13 * std::abs(c.av));
        EXPECT_NEAR(w.alpha_w[0], c.aw, 1e-12 * std::abs(c.aw));
        EXPECT_NEAR(w.beta_v[0], c.bv, 1e-12 * std::abs(c.bv));
        EXPECT_NEAR(w.beta_w[0], c.bw, 1e-12 * std::abs(c.bw));
    }
}

TEST(DuhamelWeights, SeriesBranchMatchesClosedForm) {
    // x = omega dt on both sides of the switch to the series, where the closed form is still accurate
    const PinnedOperator op(Grid::interval(1.0, 4, 4));
    const double om = op.omega()[0];
    for (double x : {0.9, 0.999999, 1.000001, 1.1}) {
        const double dt = x / om;
        const long double xl = static_cast<long double>(om) * dt;
        const long double exact = (xl - std::sin(xl)) / (xl * xl * xl) * dt * dt * dt;
        const double got = duhamel_weights(op, dt).beta_w[0];
        EXPECT_NEAR(got, static_cast<double>(exact), 1e-13 * got);
    }
}
