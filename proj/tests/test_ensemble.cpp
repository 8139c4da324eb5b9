#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "ellprod/ensemble.hpp"
#include "ellprod/errors.hpp"

using namespace ellprod;

namespace {

struct Moments {
    double corr = 0.0, var_x = 0.0, var_y = 0.0;
};

Moments pair_moments(const std::vector<std::pair<double, double>>& s) {
    double mx = 0, my = 0;
    for (auto [x, y] : s) mx += x, my += y;
    mx /= s.size();
    my /= s.size();
    double sxx = 0, syy = 0, sxy = 0;
    for (auto [x, y] : s) {
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
        sxy += (x - mx) * (y - my);
    }
    return {sxy / std::sqrt(sxx * syy), sxx / (s.size() - 1), syy / (s.size() - 1)};
}

std::vector<std::pair<double, double>> draw_pairs(double rho, EntryDist d, std::size_t count, std::uint64_t seed) {
    Rng rng = make_rng(seed, 0, kAuxStream);
    std::vector<std::pair<double, double>> out(count);
    for (auto& p : out) p = sample_correlated_pair(rho, d, rng);
    return out;
}

EnsembleSpec spec_of(std::size_t n, double rho, EntryDist d = EntryDist::gaussian(), std::uint64_t seed = 1) {
    EnsembleSpec s;
    s.n = n;
    s.rho = rho;
    s.entry_dist = d;
    s.master_seed = seed;
    return s;
}

}  // namespace

TEST(Ensemble, PerfectCorrelationGivesEqualPair) {
    Rng rng = make_rng(3, 0, 0);
    for (int i = 0; i < 100; ++i) {
        const auto [x, y] = sample_correlated_pair(1.0, EntryDist::gaussian(), rng);
        EXPECT_EQ(x, y);
    }
}

TEST(Ensemble, RademacherUncorrelatedAtRhoZero) {
    const auto m = pair_moments(draw_pairs(0.0, EntryDist::rademacher(), 100000, 5));
    EXPECT_NEAR(m.corr, 0.0, 0.02);
}

TEST(Ensemble, GaussianPairMoments) {
    const auto m = pair_moments(draw_pairs(0.5, EntryDist::gaussian(), 100000, 6));
    EXPECT_NEAR(m.corr, 0.5, 0.02);
    EXPECT_NEAR(m.var_x, 1.0, 0.02);
    EXPECT_NEAR(m.var_y, 1.0, 0.02);
}

TEST(Ensemble, PairMomentsForEveryEntryLaw) {
    for (EntryDist d : {EntryDist::rademacher(), EntryDist::heavy_tail(4.5)}) {
        for (double rho : {-0.6, 0.3}) {
            const auto m = pair_moments(draw_pairs(rho, d, 100000, 7));
            EXPECT_NEAR(m.corr, rho, 0.03) << entry_dist_name(d);
            EXPECT_NEAR(m.var_x, 1.0, 0.05) << entry_dist_name(d);
        }
    }
}

TEST(Ensemble, SymmetricAtRhoOne) {
    EnsembleSpec s = spec_of(2, 1.0);
    const RealMatrix x = sample_elliptic_matrix(s, 1);
    EXPECT_EQ(x(0, 1), x(1, 0));
    EXPECT_TRUE(x.is_raw());
}

TEST(Ensemble, PooledOffDiagonalCorrelation) {
    EnsembleSpec s = spec_of(64, 0.3);
    std::vector<std::pair<double, double>> pairs;
    for (std::uint64_t t = 0; t < 50; ++t) {
        const RealMatrix x = sample_elliptic_matrix(s, 1, t);
        for (std::size_t j = 0; j < 64; ++j)
            for (std::size_t k = j + 1; k < 64; ++k) pairs.emplace_back(x(j, k), x(k, j));
    }
    EXPECT_NEAR(pair_moments(pairs).corr, 0.3, 0.03);
}

TEST(Ensemble, SameSeedIsBitIdentical) {
    EnsembleSpec s = spec_of(16, 0.4, EntryDist::heavy_tail(3.0), 99);
    EXPECT_EQ(sample_elliptic_matrix(s, 2, 5).entries, sample_elliptic_matrix(s, 2, 5).entries);
    EXPECT_NE(sample_elliptic_matrix(s, 1, 5).entries, sample_elliptic_matrix(s, 2, 5).entries);
    EXPECT_NE(sample_elliptic_matrix(s, 1, 5).entries, sample_elliptic_matrix(s, 1, 6).entries);
}

TEST(Ensemble, FactorsAreIndependentStreams) {
    EnsembleSpec s = spec_of(32, 0.0);
    s.m = 3;
    const auto f = sample_factors(s, 0);
    ASSERT_EQ(f.size(), 3u);
    for (int q = 0; q < 3; ++q) EXPECT_EQ(f[q].entries, sample_elliptic_matrix(s, q + 1, 0).entries);
}

TEST(Ensemble, WithSizeChangesStream) {
    EnsembleSpec s = spec_of(16, 0.0);
    const EnsembleSpec t = with_size(s, 32);
    EXPECT_EQ(t.n, 32u);
    EXPECT_NE(t.master_seed, s.master_seed);
    EXPECT_EQ(with_size(s, 32), t);
}

TEST(Ensemble, ValidationNamesInvariant) {
    EnsembleSpec s = spec_of(16, 1.5);
    try {
        s.validate();
        FAIL() << "expected DomainError";
    } catch (const DomainError& e) {
        EXPECT_NE(std::string(e.what()).find("rho"), std::string::npos);
    }
    EXPECT_NO_THROW(spec_of(16, 1.0).validate());
    EXPECT_THROW(spec_of(16, 1.0).validate(true), DomainError);
    EXPECT_THROW(spec_of(0, 0.0).validate(), DomainError);
    EXPECT_THROW(spec_of(8, 0.0, EntryDist::heavy_tail(2.0)).validate(), DomainError);
    EnsembleSpec m0 = spec_of(8, 0.0);
    m0.m = 0;
    EXPECT_THROW(m0.validate(), DomainError);
}

TEST(Ensemble, JsonRoundTripAndUnknownKeys) {
    EnsembleSpec s = spec_of(12, -0.25, EntryDist::heavy_tail(3.5), 42);
    s.m = 3;
    s.truncation = Truncation{2.0, 0.1};
    EXPECT_EQ(ensemble_from_json(to_json(s)), s);
    nlohmann::json j = to_json(s);
    j["bogus"] = 1;
    EXPECT_THROW(ensemble_from_json(j), DomainError);
    EXPECT_THROW(ensemble_from_json(nlohmann::json{{"n", "eight"}}), DomainError);
}

TEST(Truncation, BoundedEntriesUnchangedUpToCentering) {
    Rng rng = make_rng(1, 0, 0);
    RealMatrix x{DMatrix(8, 8), 1.0};
    for (double& v : x.entries.data()) v = sample_marginal(EntryDist::rademacher(), rng);
    double mean = 0.0;
    for (double v : x.entries.data()) mean += v;
    mean /= 64.0;
    const RealMatrix y = truncate_and_center(x, 1.0, 1.0);  // threshold sqrt(8) > 1
    for (std::size_t k = 0; k < 64; ++k) EXPECT_NEAR(y.entries.data()[k], x.entries.data()[k] - mean, 1e-15);
}

TEST(Truncation, LargeEntryRemovedThenCentered) {
    // n = 2, c = 1, tau = 0.5: threshold c tau sqrt(n) = 0.7071.
    RealMatrix x{DMatrix(2, 2), 1.0};
    x.entries(0, 1) = 10.0 * 0.5 * std::sqrt(2.0);
    x.entries(1, 0) = 0.4;
    x.entries(1, 1) = -0.2;
    const RealMatrix y = truncate_and_center(x, 1.0, 0.5);
    const double mean = (0.0 + 0.0 + 0.4 - 0.2) / 4.0;
    EXPECT_DOUBLE_EQ(y.entries(0, 1), -mean);
    EXPECT_DOUBLE_EQ(y.entries(0, 0), -mean);
    EXPECT_DOUBLE_EQ(y.entries(1, 0), 0.4 - mean);
    EXPECT_DOUBLE_EQ(y.entries(1, 1), -0.2 - mean);
}

TEST(Truncation, LindebergRatio) {
    // Everything inside the threshold.
    RealMatrix small{DMatrix(4, 4), 1.0};
    for (double& v : small.entries.data()) v = 0.5;
    EXPECT_EQ(lindeberg_ratio({small}, 0.5), 0.0);  // bound tau sqrt(n) = 1

    // One entry of size 6 tau at n = 4: contributes its square over n^2.
    const double tau = 0.5;
    RealMatrix one{DMatrix(4, 4), 1.0};
    one.entries(2, 3) = 6.0 * tau;
    EXPECT_DOUBLE_EQ(lindeberg_ratio({one}, tau), 9.0 / 16.0);
}

TEST(Truncation, GaussianLindebergNearZeroAndTruncatedOutputZero) {
    EnsembleSpec s = spec_of(256, 0.0, EntryDist::gaussian(), 4);
    const RealMatrix x = sample_elliptic_matrix(s, 1);
    // E xi^2 1(|xi| >= 8) is about 1e-13; 3 SE of the average is far below 1e-6.
    EXPECT_LT(lindeberg_ratio({x}, 0.5), 1e-6);
    const double tau = std::pow(256.0, -0.125);
    const RealMatrix t = truncate_and_center(x, 1.0, tau);
    EXPECT_EQ(lindeberg_ratio({t}, tau), 0.0);
}

TEST(Interpolate, EndpointsAndLinearity) {
    const std::size_t n = 4;
    RealMatrix x{DMatrix::identity(n), 1.0}, y{DMatrix(n, n), 1.0};
    for (double& v : y.entries.data()) v = 0.25;
    EXPECT_EQ(interpolate(x, y, 0.0).entries, x.entries);
    EXPECT_EQ(interpolate(x, y, std::numbers::pi / 2).entries, y.entries);
    const RealMatrix z = interpolate(x, x, std::numbers::pi / 4);
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(z(i, i), std::sqrt(2.0), 1e-15);
    EXPECT_THROW(interpolate(x, y, -0.1), DomainError);
    EXPECT_THROW(interpolate(x, y, 2.0), DomainError);
}

TEST(Ensemble, CsvFormat) {
    RealMatrix x{DMatrix(2, 2), 1.0};
    x.entries(0, 1) = 0.5;
    const std::string csv = matrix_to_csv(x);
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "i,j,value");
    EXPECT_NE(csv.find("0,1,0.5"), std::string::npos);
}
