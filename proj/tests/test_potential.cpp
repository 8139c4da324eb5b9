#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numbers>

#include "ellprod/limitlaw.hpp"
#include "ellprod/potential.hpp"

using namespace ellprod;

namespace {

EnsembleSpec gaussian_spec(std::size_t n, int m, double rho, std::uint64_t seed) {
    EnsembleSpec s;
    s.n = n;
    s.m = m;
    s.rho = rho;
    s.master_seed = seed;
    return s;
}

double mean_potential(const EnsembleSpec& s, cdouble z, int trials) {
    double acc = 0.0;
    for (int t = 0; t < trials; ++t) acc += empirical_potential(eigenvalues(product(sample_factors(s, t))), z).value;
    return acc / trials;
}

}  // namespace

TEST(EmpiricalPotential, SimpleCases) {
    const auto p = empirical_potential(DMatrix(4, 4), 1.0);
    EXPECT_FALSE(p.infinite);
    EXPECT_NEAR(p.value, 0.0, 1e-14);

    DMatrix d(2, 2);
    d(0, 0) = 2.0;
    EXPECT_TRUE(empirical_potential(d, 0.0).infinite);
    EXPECT_TRUE(empirical_potential(eigenvalues(d), 0.0).infinite);
}

TEST(EmpiricalPotential, MatchesLogDeterminant) {
    const EnsembleSpec s = gaussian_spec(16, 2, 0.3, 4);
    const DMatrix w = product(sample_factors(s, 0));
    const cdouble z(0.2, -0.1);
    Eigen::MatrixXcd a(16, 16);
    for (int i = 0; i < 16; ++i)
        for (int j = 0; j < 16; ++j) a(i, j) = w(i, j) - (i == j ? z : 0.0);
    const double oracle = -std::log(std::abs(a.determinant())) / 16.0;
    EXPECT_NEAR(empirical_potential(w, z).value, oracle, 1e-6);
    EXPECT_NEAR(empirical_potential(eigenvalues(w), z).value, oracle, 1e-6);
}

TEST(EmpiricalPotential, MonteCarloAgainstLimit) {
    const EnsembleSpec s = gaussian_spec(256, 2, 0.5, 5);
    const LimitLaw law(2);
    EXPECT_NEAR(mean_potential(s, 2.0, 10), limit_potential(law, 2.0), 0.05);
    EXPECT_NEAR(mean_potential(s, 0.0, 10), 1.0, 0.05);
}

TEST(PotentialGridTest, DeterministicAndThreadIndependent) {
    const EnsembleSpec s = gaussian_spec(24, 2, 0.5, 6);
    const GridSpec g{-1.0, 1.0, -1.0, 1.0, 0.25};
    const PotentialGrid a = mean_potential_grid(s, g, 1, 1);
    const PotentialGrid b = mean_potential_grid(s, g, 1, 1);
    EXPECT_EQ(potential_to_csv(a), potential_to_csv(b));
    const PotentialGrid c = mean_potential_grid(s, g, 5, 1);
    const PotentialGrid d = mean_potential_grid(s, g, 5, 3);
    EXPECT_EQ(potential_to_csv(c), potential_to_csv(d));
    EXPECT_EQ(a.nx, 9u);
    EXPECT_EQ(a.ny, 9u);
}

TEST(PotentialGridTest, GridPointsAgreeWithDirectEvaluation) {
    const EnsembleSpec s = gaussian_spec(20, 2, 0.0, 7);
    const GridSpec g{-0.5, 0.5, -0.5, 0.5, 0.5};
    const PotentialGrid pg = mean_potential_grid(s, g, 2, 1);
    for (std::size_t iy = 0; iy < pg.ny; ++iy)
        for (std::size_t ix = 0; ix < pg.nx; ++ix) {
            const cdouble z = g.point(ix, iy);
            double ref = 0.0;
            for (int t = 0; t < 2; ++t) ref += empirical_potential(product(sample_factors(s, t)), z).value / 2;
            EXPECT_NEAR(pg.at(ix, iy), ref, 1e-9);
        }
}

TEST(Laplacian, AnalyticRoundTripUniformDisc) {
    const LimitLaw law(1);
    const GridSpec g{-1.0, 1.0, -1.0, 1.0, 1e-2};
    const DensityField f = laplacian_density(potential_grid_from_function(g, [&](cdouble z) {
        return limit_potential(law, z);
    }));
    for (std::size_t k = 0; k < f.values.size(); ++k) {
        if (std::abs(f.points[k]) < 0.95) EXPECT_NEAR(f.values[k], 1 / std::numbers::pi, 0.01 / std::numbers::pi);
    }
}

TEST(Laplacian, HarmonicOutsideDisc) {
    const LimitLaw law(2);
    const GridSpec g{-2.5, 2.5, -2.5, 2.5, 0.05};
    const DensityField f = laplacian_density(potential_grid_from_function(g, [&](cdouble z) {
        return limit_potential(law, z);
    }));
    for (std::size_t k = 0; k < f.values.size(); ++k)
        if (std::abs(f.points[k]) > 1.2) EXPECT_NEAR(f.values[k], 0.0, 1e-3);
}

TEST(Laplacian, QuadraticHasExactLaplacian) {
    // a|z|^2 has Laplacian 4a exactly under the 5-point stencil.
    const GridSpec g{-1.0, 1.0, -0.5, 0.5, 0.1};
    const DensityField f = laplacian_density(potential_grid_from_function(g, [](cdouble z) { return 3.0 * std::norm(z); }));
    EXPECT_EQ(f.nx, 19u);
    EXPECT_EQ(f.ny, 9u);
    for (double v : f.values) EXPECT_NEAR(v, -12.0 / (2 * std::numbers::pi), 1e-9);
}

TEST(TailIndicatorTest, IdentityAndSingular) {
    const auto id = tail_indicator(DMatrix::identity(8), 2.0);
    EXPECT_FALSE(id.exceeded);
    EXPECT_NEAR(id.s_min, 1.0, 1e-14);
    DMatrix a(4, 4);
    for (std::size_t j = 0; j < 4; ++j) {
        a(0, j) = j + 1.0;
        a(1, j) = j + 1.0;
        a(2, j) = (j + 2.0) * (j + 2.0);
        a(3, j) = std::sqrt(j + 5.0);
    }
    EXPECT_TRUE(tail_indicator(a, 2.0).exceeded);
}

TEST(Profile, IdentityAndRankOne) {
    const ProfileFit id = sv_profile_check(DMatrix::identity(16), 0.7);
    EXPECT_NEAR(id.c, 16.0 / 15.0, 1e-12);
    EXPECT_EQ(id.argmin_j, 1u);

    DMatrix r(16, 16);
    for (std::size_t i = 0; i < 16; ++i)
        for (std::size_t j = 0; j < 16; ++j) r(i, j) = (i + 1.0) * (j % 3 + 1.0);
    const ProfileFit f = sv_profile_check(r, 0.9);
    EXPECT_EQ(f.checked, 3u);
    EXPECT_NEAR(f.c, 0.0, 1e-12);
}

TEST(Profile, GaussianCalibration) {
    const EnsembleSpec s = gaussian_spec(256, 2, 0.0, 8);
    double worst = 1e9;
    for (int t = 0; t < 100; ++t) {
        RealMatrix x = sample_elliptic_matrix(s, 1, t);
        DMatrix a = x.entries;
        for (double& v : a.data()) v /= 16.0;
        worst = std::min(worst, sv_profile_check(a, 0.7).c);
    }
    EXPECT_GE(worst, 0.05);
}

TEST(QuantileFloorTest, ConstructedCases) {
    std::vector<double> ones(20, 1.0);
    EXPECT_TRUE(quantile_floor_check(ones, 0.5, 2).passed);
    // delta = 0.125, m = 2: k = floor(20 (1 - 0.5)) = 10, so s_10 must exceed delta.
    std::vector<double> low(20, 1.0);
    for (std::size_t i = 9; i < 20; ++i) low[i] = 0.01;
    const QuantileFloor q = quantile_floor_check(low, 0.125, 2);
    EXPECT_EQ(q.k, 10u);
    EXPECT_FALSE(q.passed);
}

TEST(LogTailTest, HandComputed) {
    const LogTail a = log_integrability_tail(std::vector<double>(5, 1.0), 0.1);
    EXPECT_EQ(a.integral, 0.0);
    EXPECT_FALSE(a.exceeds);
    EXPECT_NEAR(log_integrability_tail(std::vector<double>{std::numbers::e}, 1.0).integral, 2.0, 1e-15);
    EXPECT_TRUE(log_integrability_tail(std::vector<double>{0.0, 1.0}, 1.0).infinite);
}

TEST(Frequencies, MonteCarloBounds) {
    const EnsembleSpec s = gaussian_spec(256, 2, 0.0, 9);
    const FrequencyReport q = quantile_floor_frequency(s, 0.5, 0.05, 1.0, 200);
    EXPECT_LE(q.frequency, std::pow(0.05, 1.0 / 3.0));
    EXPECT_NEAR(q.bound, std::pow(0.05, 1.0 / 3.0), 1e-15);
    const FrequencyReport l = log_tail_frequency(s, 0.3, 10.0, 100);
    EXPECT_LE(l.frequency, 0.05);
}

TEST(SmallestSv, TailReportShapeAndThreads) {
    const EnsembleSpec s = gaussian_spec(16, 2, 0.5, 10);
    TailDiagnostics d;
    const TailReport a = smallest_sv_tail(s, d, 40, {16, 32}, 1);
    const TailReport b = smallest_sv_tail(s, d, 40, {16, 32}, 2);
    ASSERT_EQ(a.levels.size(), 2u);
    for (int i = 0; i < 2; ++i) {
        EXPECT_EQ(a.levels[i].exceed, b.levels[i].exceed);
        EXPECT_EQ(a.levels[i].median_log_smin, b.levels[i].median_log_smin);
        EXPECT_LE(a.levels[i].ci_low, a.levels[i].frequency);
        EXPECT_GE(a.levels[i].ci_high, a.levels[i].frequency);
    }
    TailDiagnostics bad;
    bad.gamma = 0.5;
    EXPECT_THROW(bad.validate(), DomainError);
}
