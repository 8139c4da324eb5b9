#pragma once

#include <complex>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ellprod/ensemble.hpp"
#include "ellprod/linalg.hpp"

namespace ellprod {

struct ComplexSpectrum {
    std::vector<cdouble> values;
    std::size_t n = 0;

    double max_modulus() const;
    // Largest |Im(sum)| over matched conjugate pairs, relative to the
    // spectral radius. Zero for an exactly closed spectrum.
    double conjugate_pair_defect() const;
};

struct SymmetrizedSpectrum {
    std::vector<double> values;  // ascending, 2n entries
    cdouble z{};
    std::size_t n = 0;

    // Singular values of W - zI, descending.
    std::vector<double> singular_values() const;
    // Squared singular values, ascending (the measure nu_n).
    std::vector<double> squared_view() const;
    // max_i |values[i] + values[2n-1-i]|
    double pairing_defect() const;
};

struct HermitianLinearization {
    CMatrix matrix;  // 2n x 2n, equals V J - J(z)
    std::size_t n = 0;
    cdouble z{};
    int m = 0;

    double hermitian_defect() const;
};

// Scaled product prod_q n^-1/2 X^(q); the result has scale 1 with the
// normalisation folded in.
DMatrix product(const std::vector<RealMatrix>& factors);

ComplexSpectrum eigenvalues(const DMatrix& matrix);
ComplexSpectrum eigenvalues(const CMatrix& matrix);

struct EigenCheck {
    double trace_error = 0.0;      // |sum lambda - tr W|
    double trace_tolerance = 0.0;  // 1e-8 * n * ||W||_F
    double log_det_error = 0.0;    // |log|prod lambda| - log|det W||
    bool singular = false;
    bool passed = false;
};
EigenCheck check_eigenvalues(const DMatrix& matrix, const ComplexSpectrum& spectrum);

HermitianLinearization build_linearization(const std::vector<RealMatrix>& factors, cdouble z);
// Same matrix built directly from W = prod of scaled factors.
HermitianLinearization linearization_from_product(const DMatrix& w, cdouble z);

SymmetrizedSpectrum symmetrized_spectrum(const HermitianLinearization& lin);

// Descending. Computed through the 2n x 2n Hermitian linearization.
std::vector<double> shifted_singular_values(const DMatrix& w, cdouble z);

// Singular values of a general square matrix, descending, by the same route.
std::vector<double> singular_values(const DMatrix& a);
std::vector<double> singular_values(const CMatrix& a);

// One-sided Jacobi on the columns of a; descending. Slower, but shares no
// code with the tridiagonal route, so it serves as a cross-check.
std::vector<double> jacobi_singular_values(const CMatrix& a);

// min over k of ln prod_{j>=k} s_j(AB) - ln prod_{j>=k} s_j(A) s_j(B).
// Nonnegative up to rounding; k = 1 is the determinant identity.
double product_inequality_slack(const DMatrix& a, const DMatrix& b);

class EmpiricalCdf {
public:
    explicit EmpiricalCdf(std::vector<double> values);
    // Right-continuous: fraction of values <= x.
    double operator()(double x) const;
    const std::vector<double>& sorted() const noexcept { return sorted_; }

private:
    std::vector<double> sorted_;
};

EmpiricalCdf empirical_cdf(std::vector<double> values);

// Radii and angles in [0, 2pi).
std::pair<std::vector<double>, std::vector<double>> radial_angular_split(const ComplexSpectrum& spectrum);

std::string spectrum_to_csv(const ComplexSpectrum& s);
std::string spectrum_to_csv(const SymmetrizedSpectrum& s);
nlohmann::json spectrum_metadata(const EnsembleSpec& spec, cdouble z);

}  // namespace ellprod
