#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "ellprod/eigen_solvers.hpp"
#include "ellprod/linalg.hpp"

using namespace ellprod;

namespace {

DMatrix random_matrix(std::size_t n, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    DMatrix a(n, n);
    for (double& x : a.data()) x = g(rng);
    return a;
}

Eigen::MatrixXd to_eigen(const DMatrix& a) {
    Eigen::MatrixXd e(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) e(i, j) = a(i, j);
    return e;
}

Eigen::MatrixXcd to_eigen(const CMatrix& a) {
    Eigen::MatrixXcd e(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) e(i, j) = a(i, j);
    return e;
}

// Greedy matching distance between two multisets of complex numbers.
double multiset_distance(std::vector<cdouble> a, std::vector<cdouble> b) {
    double worst = 0.0;
    for (const cdouble& x : a) {
        auto it = std::min_element(b.begin(), b.end(),
                                   [&](const cdouble& p, const cdouble& q) { return std::abs(p - x) < std::abs(q - x); });
        worst = std::max(worst, std::abs(*it - x));
        b.erase(it);
    }
    return worst;
}

}  // namespace

TEST(Linalg, MatmulAndTranspose) {
    DMatrix a(2, 3), b(3, 2);
    double v = 1.0;
    for (double& x : a.data()) x = v++;
    for (double& x : b.data()) x = v++;
    const DMatrix c = matmul(a, b);
    EXPECT_DOUBLE_EQ(c(0, 0), 1 * 7 + 2 * 9 + 3 * 11);
    EXPECT_DOUBLE_EQ(c(1, 1), 4 * 8 + 5 * 10 + 6 * 12);
    EXPECT_EQ(transpose(transpose(a)), a);
    EXPECT_THROW(matmul(a, a), DomainError);
}

TEST(Linalg, LuLogDetMatchesEigen) {
    std::mt19937_64 rng(3);
    for (std::size_t n : {1u, 2u, 5u, 17u, 40u}) {
        const DMatrix a = random_matrix(n, rng);
        const LuResult lu = lu_log_det(a);
        const double det = to_eigen(a).determinant();
        EXPECT_NEAR(lu.log_abs_det, std::log(std::abs(det)), 1e-10);
        EXPECT_EQ(lu.sign, det < 0 ? -1 : 1);
    }
    DMatrix s(3, 3, 1.0);
    EXPECT_TRUE(lu_log_det(s).singular);
}

TEST(Linalg, InverseRoundTrip) {
    std::mt19937_64 rng(5);
    const DMatrix a = random_matrix(12, rng);
    const DMatrix p = matmul(a, inverse(a));
    for (std::size_t i = 0; i < 12; ++i)
        for (std::size_t j = 0; j < 12; ++j) EXPECT_NEAR(p(i, j), i == j ? 1.0 : 0.0, 1e-10);
    EXPECT_THROW(inverse(DMatrix(3, 3, 2.0)), ContractError);
}

TEST(NonsymmetricEigen, IdentityTwoByTwo) {
    const auto ev = nonsymmetric_eigenvalues(DMatrix::identity(2));
    ASSERT_EQ(ev.size(), 2u);
    for (const cdouble& v : ev) EXPECT_EQ(v, cdouble(1.0, 0.0));
}

TEST(NonsymmetricEigen, Nilpotent) {
    DMatrix a(2, 2);
    a(0, 1) = 1.0;
    for (const cdouble& v : nonsymmetric_eigenvalues(a)) EXPECT_EQ(std::abs(v), 0.0);
}

TEST(NonsymmetricEigen, CompanionOfCubeRootsOfUnity) {
    // x^3 - 1
    DMatrix c(3, 3);
    c(0, 2) = 1.0;
    c(1, 0) = 1.0;
    c(2, 1) = 1.0;
    std::vector<cdouble> expect;
    for (int k = 0; k < 3; ++k) expect.push_back(std::polar(1.0, 2.0 * std::numbers::pi * k / 3.0));
    EXPECT_LT(multiset_distance(nonsymmetric_eigenvalues(c), expect), 1e-8);
}

TEST(NonsymmetricEigen, RandomMatchesEigen) {
    std::mt19937_64 rng(11);
    for (std::size_t n : {3u, 8u, 31u, 64u, 150u}) {
        const DMatrix a = random_matrix(n, rng);
        const auto ours = nonsymmetric_eigenvalues(a);
        Eigen::EigenSolver<Eigen::MatrixXd> es(to_eigen(a), false);
        std::vector<cdouble> ref(es.eigenvalues().data(), es.eigenvalues().data() + n);
        EXPECT_LT(multiset_distance(ours, ref), 1e-9 * std::sqrt(static_cast<double>(n))) << "n=" << n;
    }
}

TEST(NonsymmetricEigen, BadlyScaledMatrix) {
    // D A D^-1 has the spectrum of A; balancing must undo the grading.
    std::mt19937_64 rng(12);
    const DMatrix a = random_matrix(20, rng);
    DMatrix graded = a;
    for (std::size_t i = 0; i < 20; ++i)
        for (std::size_t j = 0; j < 20; ++j)
            graded(i, j) *= std::pow(10.0, (static_cast<double>(i) - static_cast<double>(j)) / 2.0);
    Eigen::EigenSolver<Eigen::MatrixXd> es(to_eigen(a), false);
    std::vector<cdouble> ref(es.eigenvalues().data(), es.eigenvalues().data() + 20);
    EXPECT_LT(multiset_distance(nonsymmetric_eigenvalues(graded), ref), 1e-8);
}

TEST(NonsymmetricEigen, ComplexMatchesEigen) {
    std::mt19937_64 rng(13);
    std::normal_distribution<double> g;
    for (std::size_t n : {1u, 2u, 7u, 40u}) {
        CMatrix a(n, n);
        for (cdouble& x : a.data()) x = {g(rng), g(rng)};
        const auto ours = nonsymmetric_eigenvalues(a);
        Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(to_eigen(a), false);
        std::vector<cdouble> ref(es.eigenvalues().data(), es.eigenvalues().data() + n);
        EXPECT_LT(multiset_distance(ours, ref), 1e-9 * std::sqrt(static_cast<double>(n)));
    }
}

TEST(NonsymmetricEigen, RejectsNonSquareAndNonFinite) {
    EXPECT_THROW(nonsymmetric_eigenvalues(DMatrix(2, 3)), DomainError);
    DMatrix a(2, 2);
    a(0, 0) = std::nan("");
    EXPECT_THROW(nonsymmetric_eigenvalues(a), DomainError);
}

TEST(HermitianEigen, RealSymmetricMatchesEigen) {
    std::mt19937_64 rng(17);
    for (std::size_t n : {1u, 2u, 3u, 10u, 77u, 200u}) {
        DMatrix a = random_matrix(n, rng);
        DMatrix s = a;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) s(i, j) = a(i, j) + a(j, i);
        const auto ours = hermitian_eigenvalues(s);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(to_eigen(s), Eigen::EigenvaluesOnly);
        for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(ours[i], es.eigenvalues()[i], 1e-10 * n);
    }
}

TEST(HermitianEigen, ComplexHermitianMatchesEigen) {
    std::mt19937_64 rng(19);
    std::normal_distribution<double> g;
    for (std::size_t n : {2u, 5u, 64u, 128u}) {
        CMatrix h(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j <= i; ++j) {
                const cdouble v = i == j ? cdouble(g(rng), 0.0) : cdouble(g(rng), g(rng));
                h(i, j) = v;
                h(j, i) = std::conj(v);
            }
        const auto ours = hermitian_eigenvalues(h);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(to_eigen(h), Eigen::EigenvaluesOnly);
        for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(ours[i], es.eigenvalues()[i], 1e-10 * n);
    }
}

TEST(HermitianEigen, DiagonalAndDegenerate) {
    DMatrix d(4, 4);
    d(0, 0) = 3.0;
    d(1, 1) = -1.0;
    d(2, 2) = 3.0;
    d(3, 3) = 0.0;
    const auto ev = hermitian_eigenvalues(d);
    EXPECT_EQ(ev, (std::vector<double>{-1.0, 0.0, 3.0, 3.0}));
}

TEST(TridiagonalEigen, ToeplitzClosedForm) {
    // tridiag(-1, 2, -1) has eigenvalues 2 - 2 cos(k pi / (n + 1))
    const std::size_t n = 50;
    const auto ev = tridiagonal_eigenvalues(std::vector<double>(n, 2.0), std::vector<double>(n - 1, -1.0));
    for (std::size_t k = 1; k <= n; ++k)
        EXPECT_NEAR(ev[k - 1], 2.0 - 2.0 * std::cos(k * std::numbers::pi / (n + 1)), 1e-12);
}
