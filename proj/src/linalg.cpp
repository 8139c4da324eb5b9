#include "ellprod/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace ellprod {

namespace {

template <typename T>
Matrix<T> matmul_impl(const Matrix<T>& a, const Matrix<T>& b) {
    if (a.cols() != b.rows()) throw DomainError("matmul: inner dimensions differ");
    Matrix<T> c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        T* ci = c.row(i);
        const T* ai = a.row(i);
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const T aik = ai[k];
            if (aik == T{}) continue;
            const T* bk = b.row(k);
            for (std::size_t j = 0; j < b.cols(); ++j) ci[j] += aik * bk[j];
        }
    }
    return c;
}

}  // namespace

DMatrix matmul(const DMatrix& a, const DMatrix& b) { return matmul_impl(a, b); }
CMatrix matmul(const CMatrix& a, const CMatrix& b) { return matmul_impl(a, b); }

DMatrix transpose(const DMatrix& a) {
    DMatrix t(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
    return t;
}

CMatrix adjoint(const CMatrix& a) {
    CMatrix t(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = std::conj(a(i, j));
    return t;
}

CMatrix to_complex(const DMatrix& a) {
    CMatrix c(a.rows(), a.cols());
    std::copy(a.data().begin(), a.data().end(), c.data().begin());
    return c;
}

double frobenius_norm(const DMatrix& a) {
    double s = 0.0;
    for (double x : a.data()) s += x * x;
    return std::sqrt(s);
}

double frobenius_norm(const CMatrix& a) {
    double s = 0.0;
    for (const cdouble& x : a.data()) s += std::norm(x);
    return std::sqrt(s);
}

double max_abs(const DMatrix& a) {
    double m = 0.0;
    for (double x : a.data()) m = std::max(m, std::abs(x));
    return m;
}

double trace(const DMatrix& a) {
    if (!a.square()) throw DomainError("trace: matrix not square");
    double t = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) t += a(i, i);
    return t;
}

LuResult lu_log_det(const DMatrix& a_in) {
    if (!a_in.square()) throw DomainError("lu_log_det: matrix not square");
    DMatrix a = a_in;
    const std::size_t n = a.rows();
    const double tol = static_cast<double>(n) * std::numeric_limits<double>::epsilon() *
                       std::max(max_abs(a), std::numeric_limits<double>::min());
    LuResult r;
    r.min_pivot = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(a(i, k)) > std::abs(a(p, k))) p = i;
        if (p != k) {
            std::swap_ranges(a.row(k), a.row(k) + n, a.row(p));
            r.sign = -r.sign;
        }
        const double piv = a(k, k);
        r.min_pivot = std::min(r.min_pivot, std::abs(piv));
        if (std::abs(piv) <= tol) {
            r.singular = true;
            r.log_abs_det = -std::numeric_limits<double>::infinity();
            return r;
        }
        if (piv < 0) r.sign = -r.sign;
        r.log_abs_det += std::log(std::abs(piv));
        for (std::size_t i = k + 1; i < n; ++i) {
            const double f = a(i, k) / piv;
            if (f == 0.0) continue;
            double* ai = a.row(i);
            const double* ak = a.row(k);
            for (std::size_t j = k + 1; j < n; ++j) ai[j] -= f * ak[j];
        }
    }
    return r;
}

ComplexLuResult lu_log_det(const CMatrix& a_in) {
    if (!a_in.square()) throw DomainError("lu_log_det: matrix not square");
    CMatrix a = a_in;
    const std::size_t n = a.rows();
    double scale = 0.0;
    for (const cdouble& x : a.data()) scale = std::max(scale, std::abs(x));
    const double tol = static_cast<double>(n) * std::numeric_limits<double>::epsilon() *
                       std::max(scale, std::numeric_limits<double>::min());
    ComplexLuResult r;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(a(i, k)) > std::abs(a(p, k))) p = i;
        if (p != k) {
            std::swap_ranges(a.row(k), a.row(k) + n, a.row(p));
            r.phase = -r.phase;
        }
        const cdouble piv = a(k, k);
        if (std::abs(piv) <= tol) {
            r.singular = true;
            r.log_abs_det = -std::numeric_limits<double>::infinity();
            return r;
        }
        r.phase *= piv / std::abs(piv);
        r.log_abs_det += std::log(std::abs(piv));
        for (std::size_t i = k + 1; i < n; ++i) {
            const cdouble f = a(i, k) / piv;
            cdouble* ai = a.row(i);
            const cdouble* ak = a.row(k);
            for (std::size_t j = k + 1; j < n; ++j) ai[j] -= f * ak[j];
        }
    }
    return r;
}

DMatrix inverse(const DMatrix& a_in) {
    if (!a_in.square()) throw DomainError("inverse: matrix not square");
    const std::size_t n = a_in.rows();
    DMatrix a = a_in;
    DMatrix inv = DMatrix::identity(n);
    const double tol = static_cast<double>(n) * std::numeric_limits<double>::epsilon() * max_abs(a);
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(a(i, k)) > std::abs(a(p, k))) p = i;
        if (std::abs(a(p, k)) <= tol) throw ContractError("inverse: matrix is numerically singular");
        if (p != k) {
            std::swap_ranges(a.row(k), a.row(k) + n, a.row(p));
            std::swap_ranges(inv.row(k), inv.row(k) + n, inv.row(p));
        }
        const double piv = a(k, k);
        for (std::size_t i = 0; i < n; ++i) {
            if (i == k) continue;
            const double f = a(i, k) / piv;
            if (f == 0.0) continue;
            double* ai = a.row(i);
            const double* ak = a.row(k);
            for (std::size_t j = k; j < n; ++j) ai[j] -= f * ak[j];
            double* vi = inv.row(i);
            const double* vk = inv.row(k);
            for (std::size_t j = 0; j < n; ++j) vi[j] -= f * vk[j];
        }
        double* ak = a.row(k);
        for (std::size_t j = k; j < n; ++j) ak[j] /= piv;
        double* vk = inv.row(k);
        for (std::size_t j = 0; j < n; ++j) vk[j] /= piv;
    }
    return inv;
}

}  // namespace ellprod
