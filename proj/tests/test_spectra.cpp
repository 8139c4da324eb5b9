#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "ellprod/ensemble.hpp"
#include "ellprod/spectra.hpp"

using namespace ellprod;

namespace {

RealMatrix raw(std::size_t n, std::initializer_list<double> v) {
    RealMatrix r{DMatrix(n, n), 1.0};
    std::copy(v.begin(), v.end(), r.entries.data().begin());
    return r;
}

RealMatrix scaled_identity(std::size_t n) {
    RealMatrix r{DMatrix::identity(n), 1.0};
    for (std::size_t i = 0; i < n; ++i) r.entries(i, i) = std::sqrt(double(n));
    return r;
}

EnsembleSpec gaussian_spec(std::size_t n, int m, double rho, std::uint64_t seed) {
    EnsembleSpec s;
    s.n = n;
    s.m = m;
    s.rho = rho;
    s.master_seed = seed;
    return s;
}

std::vector<double> eigen_svd(const DMatrix& w, cdouble z) {
    Eigen::MatrixXcd a(w.rows(), w.cols());
    for (std::size_t i = 0; i < w.rows(); ++i)
        for (std::size_t j = 0; j < w.cols(); ++j) a(i, j) = w(i, j) - (i == j ? z : 0.0);
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(a);
    const auto s = svd.singularValues();
    return {s.data(), s.data() + s.size()};
}

}  // namespace

TEST(Product, ScalingCancelsForScaledIdentity) {
    const DMatrix w = product({scaled_identity(3), scaled_identity(3)});
    EXPECT_EQ(w, DMatrix::identity(3));
}

TEST(Product, HandMultipliedTwoByTwo) {
    // [[1,2],[3,4]] [[0,1],[1,0]] = [[2,1],[4,3]], times (1/sqrt 2)^2.
    const DMatrix w = product({raw(2, {1, 2, 3, 4}), raw(2, {0, 1, 1, 0})});
    EXPECT_DOUBLE_EQ(w(0, 0), 1.0);
    EXPECT_DOUBLE_EQ(w(0, 1), 0.5);
    EXPECT_DOUBLE_EQ(w(1, 0), 2.0);
    EXPECT_DOUBLE_EQ(w(1, 1), 1.5);
}

TEST(Product, SingleFactorIsScaledInput) {
    const RealMatrix x = raw(4, {1, -2, 3, 0.5, 0, 0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10});
    const DMatrix w = product({x});
    for (std::size_t k = 0; k < 16; ++k) EXPECT_DOUBLE_EQ(w.data()[k], x.entries.data()[k] / 2.0);
}

TEST(Eigenvalues, Examples) {
    auto ev = eigenvalues(DMatrix::identity(2));
    for (auto v : ev.values) EXPECT_NEAR(std::abs(v - 1.0), 0.0, 1e-14);
    DMatrix nil(2, 2);
    nil(0, 1) = 1.0;
    for (auto v : eigenvalues(nil).values) EXPECT_EQ(v, cdouble(0.0));
}

TEST(Eigenvalues, CheckOnRandomProduct) {
    const EnsembleSpec s = gaussian_spec(96, 2, 0.5, 17);
    const DMatrix w = product(sample_factors(s, 0));
    const ComplexSpectrum ev = eigenvalues(w);
    const EigenCheck chk = check_eigenvalues(w, ev);
    EXPECT_TRUE(chk.passed) << chk.trace_error << " " << chk.log_det_error;
    EXPECT_LT(ev.conjugate_pair_defect(), 1e-10);
    EXPECT_EQ(ev.values.size(), 96u);
}

TEST(Linearization, IdentityFactorsAtZeroGiveJ) {
    const std::size_t n = 3;
    const auto lin = build_linearization({scaled_identity(n), scaled_identity(n)}, 0.0);
    const SymmetrizedSpectrum s = symmetrized_spectrum(lin);
    ASSERT_EQ(s.values.size(), 2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        EXPECT_NEAR(s.values[i], -1.0, 1e-12);
        EXPECT_NEAR(s.values[n + i], 1.0, 1e-12);
    }
}

TEST(Linearization, OneByOneClosedForm) {
    const double a = 1.5, b = -0.7;
    const cdouble z(0.2, 0.4);
    const auto lin = build_linearization({raw(1, {a}), raw(1, {b})}, z);
    const SymmetrizedSpectrum s = symmetrized_spectrum(lin);
    const double expected = std::abs(a * b - z);
    EXPECT_NEAR(s.values[0], -expected, 1e-14);
    EXPECT_NEAR(s.values[1], expected, 1e-14);
}

TEST(Linearization, HermitianAndMatchesProductRoute) {
    for (int m : {2, 3, 4}) {
        const EnsembleSpec s = gaussian_spec(10, m, -0.3, 100 + m);
        const auto f = sample_factors(s, 0);
        const cdouble z(0.4, -1.1);
        const auto lin = build_linearization(f, z);
        EXPECT_LE(lin.hermitian_defect(), 1e-12);
        const auto a = symmetrized_spectrum(lin).values;
        const auto b = symmetrized_spectrum(linearization_from_product(product(f), z)).values;
        for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-10);
    }
}

TEST(Symmetrized, PositiveHalfMatchesIndependentSvd) {
    const EnsembleSpec s = gaussian_spec(8, 2, 0.5, 3);
    const DMatrix w = product(sample_factors(s, 0));
    const cdouble z(0.3, 0.1);
    const SymmetrizedSpectrum sym = symmetrized_spectrum(linearization_from_product(w, z));
    const auto ours = sym.singular_values();
    const auto ref = eigen_svd(w, z);
    for (std::size_t i = 0; i < 8; ++i) EXPECT_NEAR(ours[i], ref[i], 1e-8);
    EXPECT_LE(sym.pairing_defect(), 1e-8);
}

TEST(Symmetrized, PairingHoldsAcrossRandomInstances) {
    Rng rng = make_rng(77, 0, 0);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int trial = 0; trial < 20; ++trial) {
        const EnsembleSpec s = gaussian_spec(5 + 3 * trial, 2 + trial % 2, 0.2, 500 + trial);
        const cdouble z(u(rng), u(rng));
        const SymmetrizedSpectrum sym = symmetrized_spectrum(build_linearization(sample_factors(s, 0), z));
        const double radius = sym.values.back();
        EXPECT_LE(sym.pairing_defect(), 1e-8 * radius);
        const auto sq = sym.squared_view();
        EXPECT_TRUE(std::is_sorted(sq.begin(), sq.end()));
    }
}

TEST(SingularValues, Examples) {
    for (double s : shifted_singular_values(DMatrix(3, 3), 1.0)) EXPECT_NEAR(s, 1.0, 1e-14);
    DMatrix d(2, 2);
    d(0, 0) = 2.0;
    const auto s = shifted_singular_values(d, 0.0);
    EXPECT_NEAR(s[0], 2.0, 1e-14);
    EXPECT_NEAR(s[1], 0.0, 1e-14);
}

TEST(SingularValues, ProductEqualsDeterminant) {
    const EnsembleSpec sp = gaussian_spec(6, 2, 0.0, 9);
    const DMatrix w = product(sample_factors(sp, 0));
    const cdouble z(0.25, 0.5);
    Eigen::MatrixXcd a(6, 6);
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j) a(i, j) = w(i, j) - (i == j ? z : 0.0);
    double prod = 1.0;
    for (double s : shifted_singular_values(w, z)) prod *= s;
    const double det = std::abs(a.determinant());
    EXPECT_NEAR(prod / det, 1.0, 1e-6);
}

TEST(SingularValues, JacobiAgreesWithEigen) {
    Rng rng = make_rng(5, 0, 0);
    std::normal_distribution<double> g;
    CMatrix a(12, 12);
    for (cdouble& x : a.data()) x = cdouble(g(rng), g(rng));
    Eigen::MatrixXcd e(12, 12);
    for (int i = 0; i < 12; ++i)
        for (int j = 0; j < 12; ++j) e(i, j) = a(i, j);
    const auto ref = Eigen::JacobiSVD<Eigen::MatrixXcd>(e).singularValues();
    const auto jac = jacobi_singular_values(a);
    const auto lin = singular_values(a);
    for (int i = 0; i < 12; ++i) {
        EXPECT_NEAR(jac[i], ref[i], 1e-10);
        EXPECT_NEAR(lin[i], ref[i], 1e-10);
    }
}

TEST(SingularValues, ProductInequalitySlackNonNegative) {
    Rng rng = make_rng(6, 0, 0);
    std::normal_distribution<double> g;
    for (int t = 0; t < 50; ++t) {
        DMatrix a(8, 8), b(8, 8);
        for (double& x : a.data()) x = g(rng);
        for (double& x : b.data()) x = g(rng);
        EXPECT_GE(product_inequality_slack(a, b), -1e-9);
    }
}

TEST(EmpiricalCdfTest, RightContinuous) {
    const EmpiricalCdf f = empirical_cdf({3.0, 1.0, 2.0});
    EXPECT_DOUBLE_EQ(f(2.0), 2.0 / 3.0);
    EXPECT_DOUBLE_EQ(f(0.5), 0.0);
    EXPECT_DOUBLE_EQ(f(3.0), 1.0);
}

TEST(RadialAngular, UnitImaginaryPair) {
    ComplexSpectrum s{{cdouble(0, 1), cdouble(0, -1)}, 2};
    const auto [r, a] = radial_angular_split(s);
    EXPECT_DOUBLE_EQ(r[0], 1.0);
    EXPECT_DOUBLE_EQ(r[1], 1.0);
    EXPECT_NEAR(a[0], std::numbers::pi / 2, 1e-15);
    EXPECT_NEAR(a[1], 3 * std::numbers::pi / 2, 1e-15);
}

TEST(SpectrumCsv, Deterministic) {
    const EnsembleSpec s = gaussian_spec(8, 2, 0.5, 1234);
    const auto a = spectrum_to_csv(eigenvalues(product(sample_factors(s, 0))));
    const auto b = spectrum_to_csv(eigenvalues(product(sample_factors(s, 0))));
    EXPECT_EQ(a, b);
    EXPECT_EQ(a.substr(0, 6), "re,im\n");
}
