#include <algorithm>
#include <cmath>
#include <limits>
#include <type_traits>

#include "ellprod/eigen_solvers.hpp"

namespace ellprod {

namespace {

template <typename T>
T conj_of(const T& x) {
    if constexpr (std::is_same_v<T, double>) {
        return x;
    } else {
        return std::conj(x);
    }
}

template <typename T>
double real_of(const T& x) {
    if constexpr (std::is_same_v<T, double>) {
        return x;
    } else {
        return x.real();
    }
}

// Two-sided Householder reduction of a Hermitian matrix. Off-diagonals are
// returned as moduli: a diagonal unitary similarity makes them real without
// touching the spectrum.
template <typename T>
void tridiagonalize(Matrix<T> a, std::vector<double>& d, std::vector<double>& e) {
    const std::size_t n = a.rows();
    d.assign(n, 0.0);
    e.assign(n > 0 ? n - 1 : 0, 0.0);
    std::vector<T> v(n), p(n);
    for (std::size_t k = 0; k + 2 < n; ++k) {
        double norm2 = 0.0;
        for (std::size_t i = k + 1; i < n; ++i) norm2 += std::norm(cdouble(a(i, k)));
        const double head2 = std::norm(cdouble(a(k + 1, k)));
        if (norm2 - head2 <= 0.0) {
            e[k] = std::sqrt(head2);
            continue;
        }
        const double norm = std::sqrt(norm2);
        const double head = std::sqrt(head2);
        T phase;
        if constexpr (std::is_same_v<T, double>) {
            phase = a(k + 1, k) < 0 ? -1.0 : 1.0;
        } else {
            phase = head == 0.0 ? T{1.0} : a(k + 1, k) / head;
        }
        const T alpha = -phase * norm;
        for (std::size_t i = k + 1; i < n; ++i) v[i] = a(i, k);
        v[k + 1] -= alpha;
        double vnorm2 = 0.0;
        for (std::size_t i = k + 1; i < n; ++i) vnorm2 += std::norm(cdouble(v[i]));
        const double tau = 2.0 / vnorm2;

        for (std::size_t i = k + 1; i < n; ++i) {
            const T* ai = a.row(i);
            T s{};
            for (std::size_t j = k + 1; j < n; ++j) s += ai[j] * v[j];
            p[i] = tau * s;
        }
        T vp{};
        for (std::size_t i = k + 1; i < n; ++i) vp += conj_of(v[i]) * p[i];
        const double kk = 0.5 * tau * real_of(vp);
        for (std::size_t i = k + 1; i < n; ++i) p[i] -= kk * v[i];
        for (std::size_t i = k + 1; i < n; ++i) {
            T* ai = a.row(i);
            const T vi = v[i], wi = p[i];
            for (std::size_t j = k + 1; j < n; ++j) ai[j] -= vi * conj_of(p[j]) + wi * conj_of(v[j]);
        }
        e[k] = norm;
    }
    if (n >= 2) e[n - 2] = std::abs(a(n - 1, n - 2));
    for (std::size_t i = 0; i < n; ++i) d[i] = real_of(a(i, i));
}

template <typename T>
void check_hermitian(const Matrix<T>& a) {
    if (!a.square()) throw DomainError("hermitian_eigenvalues: matrix not square");
    for (const T& x : a.data())
        if (!std::isfinite(std::abs(x))) throw DomainError("hermitian_eigenvalues: non-finite entry");
}

}  // namespace

std::vector<double> tridiagonal_eigenvalues(std::vector<double> d, const std::vector<double>& e_in) {
    const std::size_t n = d.size();
    if (n == 0) return d;
    if (e_in.size() + 1 != n) throw DomainError("tridiagonal_eigenvalues: off-diagonal length must be n-1");
    std::vector<double> e(n, 0.0);
    std::copy(e_in.begin(), e_in.end(), e.begin());

    const double eps = std::numeric_limits<double>::epsilon();
    double f = 0.0;
    double tst1 = 0.0;
    for (std::size_t l = 0; l < n; ++l) {
        tst1 = std::max(tst1, std::abs(d[l]) + std::abs(e[l]));
        std::size_t m = l;
        while (m < n - 1) {
            if (std::abs(e[m]) <= eps * tst1) break;
            ++m;
        }
        if (m > l) {
            int iter = 0;
            do {
                if (++iter > 30)
                    throw ConvergenceError("tridiagonal_eigenvalues: QL iteration did not converge",
                                           std::abs(e[l]), iter);
                double g = d[l];
                double p = (d[l + 1] - g) / (2.0 * e[l]);
                double r = std::hypot(p, 1.0);
                if (p < 0) r = -r;
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                const double dl1 = d[l + 1];
                double h = g - d[l];
                for (std::size_t i = l + 2; i < n; ++i) d[i] -= h;
                f += h;

                p = d[m];
                double c = 1.0, c2 = 1.0, c3 = 1.0;
                const double el1 = e[l + 1];
                double s = 0.0, s2 = 0.0;
                for (std::size_t ii = m; ii-- > l;) {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[ii];
                    h = c * p;
                    r = std::hypot(p, e[ii]);
                    e[ii + 1] = s * r;
                    s = e[ii] / r;
                    c = p / r;
                    p = c * d[ii] - s * g;
                    d[ii + 1] = h + s * (c * g + s * d[ii]);
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
            } while (std::abs(e[l]) > eps * tst1);
        }
        d[l] += f;
        e[l] = 0.0;
    }
    std::sort(d.begin(), d.end());
    return d;
}

std::vector<double> hermitian_eigenvalues(const DMatrix& a) {
    check_hermitian(a);
    std::vector<double> d, e;
    tridiagonalize(a, d, e);
    return tridiagonal_eigenvalues(std::move(d), e);
}

std::vector<double> hermitian_eigenvalues(const CMatrix& a) {
    check_hermitian(a);
    bool real = true;
    for (const cdouble& x : a.data())
        if (x.imag() != 0.0) {
            real = false;
            break;
        }
    std::vector<double> d, e;
    if (real) {
        DMatrix r(a.rows(), a.cols());
        for (std::size_t i = 0; i < r.data().size(); ++i) r.data()[i] = a.data()[i].real();
        tridiagonalize(r, d, e);
    } else {
        tridiagonalize(a, d, e);
    }
    return tridiagonal_eigenvalues(std::move(d), e);
}

}  // namespace ellprod
