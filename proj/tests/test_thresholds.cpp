#include <gtest/gtest.h>

#include "dnls/thresholds.hpp"
#include "support.hpp"

using namespace dnls;

using Status = AlphaEstimate::Status;

TEST(EstimateAlpha, SyntheticCurves)
{
    const std::vector<double> grid{1.0, 2.0, 3.0};
    const AlphaEstimate b = estimate_alpha(grid, {0.0, 0.0, -1.0}, 1e-7);
    EXPECT_EQ(b.status, Status::bracketed);
    EXPECT_EQ(b.lower, 2.0);
    EXPECT_EQ(b.upper, 3.0);
    EXPECT_EQ(b.width(), 1.0);

    const AlphaEstimate z = estimate_alpha(grid, {-1e-3, -1.0, -2.0}, 1e-7);
    EXPECT_EQ(z.status, Status::consistent_with_zero);
    EXPECT_EQ(z.lower, 0.0);
    EXPECT_EQ(z.upper, 1.0);

    const AlphaEstimate above = estimate_alpha(grid, {0.0, -1e-8, -5e-8}, 1e-7);
    EXPECT_EQ(above.status, Status::above_grid);
    EXPECT_EQ(above.lower, 3.0);
    EXPECT_TRUE(std::isinf(above.upper));
    EXPECT_EQ(to_string(above.status), "above_grid");
}

TEST(EstimateAlpha, RejectsBadGrids)
{
    EXPECT_THROW(estimate_alpha({}, {}, 1e-7), std::invalid_argument);
    EXPECT_THROW(estimate_alpha({1.0, 1.0}, {0.0, 0.0}, 1e-7), std::invalid_argument);
    EXPECT_THROW(estimate_alpha({0.0, 1.0}, {0.0, 0.0}, 1e-7), std::invalid_argument);
    EXPECT_THROW(estimate_alpha({1.0, 2.0}, {0.0}, 1e-7), std::invalid_argument);
}

TEST(Bounds, UpperBoundExamples)
{
    EXPECT_DOUBLE_EQ(alpha_upper_bound(Nonlinearity::power(4.0), 1.0, 1), 5.0);
    EXPECT_DOUBLE_EQ(alpha_upper_bound(Nonlinearity::power(8.0), 1.0, 1), 9.0);
    EXPECT_DOUBLE_EQ(alpha_upper_bound(Nonlinearity::power(4.0), 1.0, 2), 81.0);
    EXPECT_THROW(alpha_upper_bound(Nonlinearity::zero(), 1.0, 1), std::invalid_argument);
}

TEST(Bounds, UpperBoundIsWitnessedByABlockField)
{
    // xi on floor(xi^2 / F~(xi)) + 1 consecutive sites already has negative energy
    for (double p : {4.0, 6.0, 8.0}) {
        for (double xi : {0.5, 1.0, 2.0}) {
            const Nonlinearity f = Nonlinearity::power(p);
            const int side = static_cast<int>(std::floor(xi * xi / f.limit_F(xi))) + 1;
            const BoxDomain dom(1, side);
            LatticeField u(dom);
            for (int k = 0; k < side; ++k)
                u[static_cast<std::size_t>(k)] = xi;
            const EnergyContext ctx(dom, Potential::zero(), f, mass(u));
            EXPECT_LT(energy(ctx, u), 0.0) << "p=" << p << " xi=" << xi;
            EXPECT_NEAR(mass(u), alpha_upper_bound(f, xi, 1), 1e-12 * mass(u));
        }
    }
}

TEST(Bounds, LowerBoundExamples)
{
    EXPECT_DOUBLE_EQ(alpha_lower_bound(1.0, 1.0, 0.5, 2.0, 2), 0.125);
    EXPECT_DOUBLE_EQ(alpha_lower_bound(1.0, 0.1, 0.5, 1e-3, 1), 0.01);
    EXPECT_DOUBLE_EQ(alpha_lower_bound(1.0, 0.5, 0.5, 1.0, 1), 0.25);
    EXPECT_THROW(alpha_lower_bound(1.0, 1.0, 1.0, 1.0, 1), std::invalid_argument);
    EXPECT_THROW(alpha_lower_bound(0.0, 1.0, 0.5, 1.0, 1), std::invalid_argument);
}

TEST(Bounds, CriticalGrowthConstant)
{
    for (double delta : {0.25, 0.5, 1.0}) {
        const auto c = critical_growth_constant(Nonlinearity::power(8.0), 1, delta);
        ASSERT_TRUE(c);
        EXPECT_DOUBLE_EQ(*c, delta * delta / 8.0);
        // the bound holds on [0, delta]
        for (int k = 1; k <= 100; ++k) {
            const double s = delta * k / 100.0;
            EXPECT_LE(Nonlinearity::power(8.0).limit_F(s), *c * std::pow(s, 6.0) * (1 + 1e-12));
        }
    }
    const auto modulated = critical_growth_constant(Nonlinearity::modulated(Nonlinearity::power(6.0), 1.0), 1, 0.5);
    ASSERT_TRUE(modulated);
    EXPECT_DOUBLE_EQ(*modulated, 2.0 / 6.0);
    EXPECT_FALSE(critical_growth_constant(Nonlinearity::power(4.0), 1, 0.5));
    EXPECT_TRUE(is_mass_subcritical_at_zero(Nonlinearity::power(4.0), 1));
    EXPECT_FALSE(is_mass_subcritical_at_zero(Nonlinearity::power(6.0), 1));
    EXPECT_TRUE(is_mass_subcritical_at_zero(Nonlinearity::power(2.5), 2));
    EXPECT_FALSE(is_mass_subcritical_at_zero(Nonlinearity::zero(), 1));
}

TEST(CurveChecks, FlagTheCorruptedPoint)
{
    const std::vector<double> grid{1.0, 2.0, 3.0, 4.0};
    const std::vector<double> values{-1.0, -2.0, -1.5, -3.0};
    const CurveReport r = verify_curve_properties(grid, values, {}, 1e-9, 10.0);
    const CurveCheck* c = r.find("nonincreasing");
    ASSERT_NE(c, nullptr);
    EXPECT_FALSE(c->passed);
    ASSERT_TRUE(c->index);
    EXPECT_EQ(*c->index, 2u);
    EXPECT_DOUBLE_EQ(c->worst_violation, 0.5);
    EXPECT_FALSE(c->diagnosis.empty());
    EXPECT_TRUE(r.find("nonpositive")->passed);
    EXPECT_FALSE(r.all_passed());
}

TEST(CurveChecks, ScalingSubadditivityAndContinuity)
{
    const std::vector<double> grid{1.0, 2.0};
    CurveSamples samples;
    samples.scaling.push_back({1.0, 2.0, -1.0, -2.5});
    samples.scaling.push_back({1.0, 3.0, -1.0, -2.0});   // violates by 1
    samples.sums.push_back({1.0, 1.0, -1.0, -1.0, -1.9});   // violates by 0.1
    const CurveReport r = verify_curve_properties(grid, {-1.0, -2.5}, samples, 1e-9, 1.0);
    EXPECT_FALSE(r.find("scaling")->passed);
    EXPECT_EQ(*r.find("scaling")->index, 1u);
    EXPECT_NEAR(r.find("scaling")->worst_violation, 1.0, 1e-15);
    EXPECT_FALSE(r.find("subadditive")->passed);
    EXPECT_NEAR(r.find("subadditive")->worst_violation, 0.1, 1e-15);
    EXPECT_FALSE(r.find("continuity")->passed);
    EXPECT_NEAR(r.find("continuity")->worst_violation, 0.5, 1e-15);
    EXPECT_TRUE(verify_curve_properties(grid, {-1.0, -2.5}, {}, 1e-9, 2.0).find("continuity")->passed);
}

TEST(Scan, LinearProblemIsAffineAndNeverNegative)
{
    const BoxDomain dom(1, 4);
    const EnergyContext tmpl(dom, Potential::zero(), Nonlinearity::zero(), 1.0);
    const double mu1 = test::ground_eigenvalue(dom);
    const std::vector<double> grid{0.5, 1.0, 2.0, 4.0};
    const ThresholdScan scan = scan_energy_curve(tmpl, grid, {});
    for (std::size_t i = 0; i < grid.size(); ++i) {
        EXPECT_NEAR(scan.E_values[i], 0.5 * grid[i] * mu1, 1e-9);
        EXPECT_GT(scan.upper_values[i], 0.0);
        EXPECT_LE(scan.upper_values[i], scan.E_values[i]);
        EXPECT_TRUE(scan.converged[i]);
    }
    EXPECT_EQ(scan.alpha.status, Status::above_grid);
}

TEST(Scan, TrappingSkipsTheSpreadingBound)
{
    const EnergyContext tmpl(BoxDomain(1, 8), Potential::trapping(2.0), Nonlinearity::power(4.0), 1.0);
    const ThresholdScan scan = scan_energy_curve(tmpl, {1.0, 2.0}, {});
    for (std::size_t i = 0; i < 2; ++i) {
        EXPECT_EQ(scan.upper_values[i], scan.E_values[i]);
        EXPECT_EQ(scan.spreading_radius[i], 0);
    }
}

TEST(Scan, RefinementShrinksTheBracket)
{
    const EnergyContext tmpl(BoxDomain(1, 10), Potential::zero(), Nonlinearity::power(8.0), 1.0);
    ScanConfig config;
    const ThresholdScan scan = scan_energy_curve(tmpl, {0.25, 0.5, 1.0, 2.0, 4.0, 8.0}, config);
    ASSERT_EQ(scan.alpha.status, Status::bracketed);
    for (std::size_t i = 1; i < scan.a_grid.size(); ++i)
        EXPECT_LE(scan.upper_values[i], scan.upper_values[i - 1] + 1e-6);

    AlphaEstimate est = scan.alpha;
    for (int k = 0; k < 4; ++k) {
        const AlphaEstimate next = refine_alpha(tmpl, config, est, 1);
        EXPECT_GE(next.lower, est.lower);
        EXPECT_LE(next.upper, est.upper);
        EXPECT_NEAR(next.width(), 0.5 * est.width(), 1e-15);
        est = next;
    }
    EXPECT_LT(evaluate_curve_point(tmpl, est.upper, config).upper, -config.eps_neg);
    EXPECT_GE(evaluate_curve_point(tmpl, est.lower, config).upper, -config.eps_neg);
    const AlphaEstimate untouched = refine_alpha(tmpl, config, estimate_alpha({1.0}, {0.0}, 1e-7), 3);
    EXPECT_EQ(untouched.status, Status::above_grid);
}

TEST(ContinuityConstant, BoundsTheMultiplier)
{
    const EnergyContext tmpl(BoxDomain(1, 20), Potential::well(1.0), Nonlinearity::power(4.0), 1.0);
    const double C = continuity_constant(tmpl, 4.0);
    for (double a : {0.5, 1.0, 2.0, 4.0}) {
        const SolveResult r = minimize_on_sphere(tmpl.with_mass(a), {}).best();
        EXPECT_LE(0.5 * std::abs(r.lambda), C);
    }
}
