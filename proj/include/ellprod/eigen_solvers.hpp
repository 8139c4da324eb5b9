#pragma once

#include <vector>

#include "ellprod/linalg.hpp"

namespace ellprod {

// Balancing, Householder reduction to Hessenberg form and the Francis
// double-shift QR iteration. Throws ConvergenceError once the total number
// of QR sweeps exceeds 60 n. Conjugate pairs are returned adjacent, with
// the positive imaginary part first.
std::vector<cdouble> nonsymmetric_eigenvalues(const DMatrix& a);

// Single-shift complex QR on the Hessenberg form.
std::vector<cdouble> nonsymmetric_eigenvalues(const CMatrix& a);

// Householder tridiagonalization followed by implicit QL. Result ascending.
// The complex overload drops to the real path when every entry is real.
std::vector<double> hermitian_eigenvalues(const DMatrix& a);
std::vector<double> hermitian_eigenvalues(const CMatrix& a);

// Eigenvalues of the symmetric tridiagonal matrix with diagonal d and
// off-diagonal e (e[i] couples i and i+1; e.size() == d.size() - 1).
std::vector<double> tridiagonal_eigenvalues(std::vector<double> d, const std::vector<double>& e);

}  // namespace ellprod
