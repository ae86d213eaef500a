#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "squeeze/semigroup.hpp"
#include "squeeze/verification/dense_elliptic.hpp"
#include "squeeze/verification/estimate_suite.hpp"
#include "squeeze/verification/oracle_report.hpp"
#include "squeeze/verification/rk4.hpp"

using namespace squeeze;
using std::numbers::pi;

namespace {

SimConfig reference_config() {
    SimConfig c;
    c.w0_modes = {{1, 0, 0.2}};
    c.horizon = 1e-3;
    c.dt = 1e-5;
    return c;
}

SimConfig small_config(double beta, double horizon, double dt) {
    SimConfig c;
    c.grid = Grid::interval(1.0, 16, 16);
    c.params = PhysParams{beta, beta, 1.0, 1.0};
    c.w0_modes = {{1, 0, 0.2}, {2, 0, -0.05}};
    c.v0_modes = {{1, 0, 0.1}};
    c.horizon = horizon;
    c.dt = dt;
    return c;
}

}  // namespace

TEST(Rk4Reference, UncoupledFlowIsTheRotation) {
    const SimConfig c = small_config(0.0, 1.0, 1e-3);
    const PinnedOperator op(c.grid);
    Rk4Options o;
    o.record_every = 100;
    const Trajectory t = rk4_reference(c, o);
    ASSERT_EQ(t.size(), 11u);
    for (std::size_t i = 0; i < t.size(); ++i)
        EXPECT_LE(distance_X(t.states[i], semigroup_apply(op, c.initial_state(), t.times[i])), 1e-8);
}

TEST(Rk4Reference, EquilibriumStaysAtRest) {
    SimConfig c = small_config(0.1, 0.05, 1e-3);
    c.params.theta_1 = 2.0;
    c.w0_modes.clear();
    c.v0_modes.clear();
    for (const auto& s : rk4_reference(c).states) EXPECT_LE(norm_X(s), 1e-15);
}

TEST(Rk4Reference, FourthOrderInStep) {
    SimConfig c = small_config(1.0, 0.02, 1e-3);
    Rk4Options fine;
    fine.substeps = 80;
    const StateX ref = rk4_reference(c, fine).states.back();
    std::vector<double> steps, errs;
    for (int sub : {2, 4, 8}) {
        Rk4Options o;
        o.substeps = sub;
        steps.push_back(c.dt / sub);
        errs.push_back(distance_X(rk4_reference(c, o).states.back(), ref));
    }
    EXPECT_NEAR(convergence_order(steps, errs), 4.0, 0.3);
}

TEST(Rk4Reference, RefusesStiffSteps) {
    const SimConfig c = small_config(0.1, 1.0, 0.1);
    EXPECT_THROW(rk4_reference(c), OracleFailure);
}

TEST(Rk4Reference, DetectsQuench) {
    SimConfig c = small_config(100.0, 0.5, 1e-4);
    c.params.beta_p = 0.1;
    c.w0_modes = {{1, 0, 0.2}};
    c.v0_modes.clear();
    const Trajectory t = rk4_reference(c);
    ASSERT_TRUE(t.quench);
    EXPECT_NEAR(t.quench->time, 0.10641881520494935, 2e-3);
}

TEST(DenseEllipticOracle, ConstantCoefficientMatchesClosedForm) {
    const Grid g = Grid::interval(1.0, 63, 63);
    GridField w(g);
    for (auto& x : w.values) x = 1.0;
    const GridField v = GridField::sample(g, [](double x) { return std::sin(pi * x); });
    const GridField u = dense_elliptic_oracle(EllipticProblem(w, v, 1.0));
    const GridField exact = GridField::sample(g, [](double x) { return -std::sin(pi * x) / (pi * pi); });
    EXPECT_LT(norm_max(u - exact), 1e-5);
}

TEST(DenseEllipticOracle, RejectsRectangle) {
    const Grid g = Grid::rectangle({1.0, 1.0}, {4, 4}, {4, 4});
    GridField w(g);
    for (auto& x : w.values) x = 1.0;
    EXPECT_THROW(dense_elliptic_oracle(EllipticProblem(w, GridField(g), 1.0)), ConfigError);
}

TEST(OracleReport, PassSemantics) {
    EXPECT_TRUE(OracleReport::make("a", 1.0, 1.0, 1).pass);
    EXPECT_FALSE(OracleReport::make("a", 1.0 + 1e-15, 1.0, 1).pass);
    EXPECT_FALSE(OracleReport::make("a", std::nan(""), 1.0, 1).pass);
    EXPECT_FALSE(OracleReport::make("a", INFINITY, 1e300, 1).pass);
    EXPECT_TRUE(OracleReport::make("a", 0.0, 0.0, 1).pass);
}

TEST(OracleReport, ConvergenceOrderOfPowerLaw) {
    EXPECT_NEAR(convergence_order({1e-2, 5e-3, 2.5e-3}, {3e-4, 7.5e-5, 1.875e-5}), 2.0, 1e-12);
    EXPECT_TRUE(std::isnan(convergence_order({1.0}, {1.0})));
    EXPECT_TRUE(std::isnan(convergence_order({1.0, 2.0}, {0.0, 1.0})));
}

TEST(OracleReport, NonIncreasingWithFloor) {
    EXPECT_TRUE(non_increasing({3.0, 2.0, 2.0, 1.0}));
    EXPECT_FALSE(non_increasing({3.0, 2.0, 2.5}));
    EXPECT_TRUE(non_increasing({1e-3, 1e-15, 2e-15}, 1e-14));
}

TEST(MovingConfig, ShrinksGridAndDropsUnresolvedModes) {
    SimConfig c = reference_config();
    c.w0_modes.push_back({40, 0, 0.01});
    c.ball_radius = 0.5;
    c.window = 1e-4;
    const SimConfig m = moving_config(c, 16, 2e-4, 1e-6);
    EXPECT_EQ(m.grid.axis(0).n_interior, 16u);
    EXPECT_EQ(m.w0_modes.size(), 1u);
    EXPECT_FALSE(m.ball_radius);
    EXPECT_EQ(m.window, 0.0);
    EXPECT_EQ(m.horizon, 2e-4);
}

TEST(EstimateSuite, EmptyEnsembleGivesNoReports) {
    EXPECT_TRUE(run_estimate_suite(reference_config(), 0).empty());
}

TEST(EstimateSuite, AllItemsPassOnReference) {
    const auto reports = run_estimate_suite(reference_config(), 10);
    std::set<std::string> names;
    for (const auto& r : reports) {
        names.insert(r.name);
        EXPECT_TRUE(r.pass) << r.name << " " << r.max_error << " > " << r.tolerance << " " << r.notes;
        EXPECT_GT(r.samples, 0u) << r.name;
    }
    EXPECT_EQ(names.size(), default_tolerances().size());
    for (const auto& [name, tol] : default_tolerances()) EXPECT_TRUE(names.count(name)) << name;
    for (std::size_t i = 1; i < reports.size(); ++i) EXPECT_LT(reports[i - 1].name, reports[i].name);
}

TEST(EstimateSuite, DeterministicForFixedSeed) {
    const auto a = run_estimate_suite(reference_config(), 5), b = run_estimate_suite(reference_config(), 5);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].max_error, b[i].max_error) << a[i].name;
}

TEST(EstimateSuite, ZeroToleranceFailsMeasuredItem) {
    const auto reports = run_estimate_suite(reference_config(), 5, {{"elliptic_h1_bound", 0.0}});
    for (const auto& r : reports)
        if (r.name == "elliptic_h1_bound") {
            EXPECT_FALSE(r.pass);
        }
}

TEST(EstimateSuite, UncoupledSystemIsUnitary) {
    SimConfig c = reference_config();
    c.params.beta_F = 0.0;
    c.params.beta_p = 0.0;
    for (const auto& r : run_estimate_suite(c, 5))
        if (r.name == "unitarity" || r.name == "skew_adjointness") {
            EXPECT_TRUE(r.pass) << r.name;
        }
}

TEST(TangentStudy, SecondOrderWithExactInitialValue) {
    const TangentStudy s = tangent_study(reference_config());
    EXPECT_NEAR(s.order, 2.0, 0.2);
    EXPECT_LT(s.identity_error, 1e-10);
    for (std::size_t i = 1; i < s.errors.size(); ++i) EXPECT_LT(s.errors[i], s.errors[i - 1]);
}

TEST(ContractionStudy, ReferenceConvergesAndMatchesRk4) {
    const ContractionStudy s = contraction_study(reference_config());
    EXPECT_LE(s.picard.iterations, 40);
    EXPECT_LE(s.max_ratio, 0.5);
    EXPECT_LE(s.rk4_distance, s.rk4_bound);
    EXPECT_LT(s.seconds, 30.0);
}

TEST(FrechetModuli, DecreaseAlongMovingTrajectory) {
    const SimConfig m = moving_config(reference_config(), 16, 2.4e-4, 1.25e-6);
    const Trajectory t = evolve(m);
    const ModuliStudy s = frechet_moduli(m, t, 6, 4);
    ASSERT_GE(s.h.size(), 4u);
    EXPECT_TRUE(non_increasing(s.alpha1, 1e-14));
    EXPECT_TRUE(non_increasing(s.alpha2, 1e-14));
    EXPECT_TRUE(non_increasing(s.gprime, 1e-14));
    EXPECT_LT(s.alpha1.back(), 1e-3);
    EXPECT_LT(s.alpha2.back(), 1e-3);
    EXPECT_LT(s.gprime.back(), 1e-3);
    EXPECT_GT(s.alpha2.front(), 0.0);
}
