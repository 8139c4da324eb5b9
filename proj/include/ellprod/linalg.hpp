#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "ellprod/errors.hpp"

namespace ellprod {

using cdouble = std::complex<double>;

// Dense row-major matrix. Only what the spectral code needs.
template <typename T>
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, T fill = T{})
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix identity(std::size_t n) {
        Matrix a(n, n);
        for (std::size_t i = 0; i < n; ++i) a(i, i) = T{1};
        return a;
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool square() const noexcept { return rows_ == cols_; }

    T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const T& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    T* row(std::size_t i) { return data_.data() + i * cols_; }
    const T* row(std::size_t i) const { return data_.data() + i * cols_; }

    std::vector<T>& data() noexcept { return data_; }
    const std::vector<T>& data() const noexcept { return data_; }

    bool operator==(const Matrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<T> data_;
};

using DMatrix = Matrix<double>;
using CMatrix = Matrix<cdouble>;

DMatrix matmul(const DMatrix& a, const DMatrix& b);
CMatrix matmul(const CMatrix& a, const CMatrix& b);
DMatrix transpose(const DMatrix& a);
CMatrix adjoint(const CMatrix& a);
CMatrix to_complex(const DMatrix& a);

double frobenius_norm(const DMatrix& a);
double frobenius_norm(const CMatrix& a);
double max_abs(const DMatrix& a);
double trace(const DMatrix& a);

// LU with partial pivoting. `singular` is set when a pivot falls below
// n * eps * max|a|, in which case log_abs_det is -inf.
struct LuResult {
    double log_abs_det = 0.0;
    int sign = 1;
    bool singular = false;
    double min_pivot = 0.0;
};
LuResult lu_log_det(const DMatrix& a);

struct ComplexLuResult {
    double log_abs_det = 0.0;
    cdouble phase{1.0, 0.0};
    bool singular = false;
};
ComplexLuResult lu_log_det(const CMatrix& a);

// Throws ContractError on a singular matrix.
DMatrix inverse(const DMatrix& a);

}  // namespace ellprod
