#include <algorithm>
#include <cmath>
#include <limits>

#include "ellprod/eigen_solvers.hpp"

namespace ellprod {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// Diagonal similarity by powers of two so that row and column norms are
// comparable. Permutations are not attempted.
template <typename T>
void balance(Matrix<T>& a) {
    const std::size_t n = a.rows();
    constexpr double radix = 2.0;
    constexpr double sqrdx = radix * radix;
    bool done = false;
    while (!done) {
        done = true;
        for (std::size_t i = 0; i < n; ++i) {
            double c = 0.0;
            double r = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                if (j == i) continue;
                c += std::abs(a(j, i));
                r += std::abs(a(i, j));
            }
            if (c == 0.0 || r == 0.0) continue;
            double g = r / radix;
            double f = 1.0;
            const double s = c + r;
            while (c < g) {
                f *= radix;
                c *= sqrdx;
            }
            g = r * radix;
            while (c >= g) {
                f /= radix;
                c /= sqrdx;
            }
            if ((c + r) / f < 0.95 * s) {
                done = false;
                const double ginv = 1.0 / f;
                for (std::size_t j = 0; j < n; ++j) a(i, j) *= ginv;
                for (std::size_t j = 0; j < n; ++j) a(j, i) *= f;
            }
        }
    }
}

template <typename T>
T unit_phase(const T& x) {
    if constexpr (std::is_same_v<T, double>) {
        return x < 0 ? -1.0 : 1.0;
    } else {
        const double r = std::abs(x);
        return r == 0.0 ? T{1.0} : x / r;
    }
}

template <typename T>
T conj_of(const T& x) {
    if constexpr (std::is_same_v<T, double>) {
        return x;
    } else {
        return std::conj(x);
    }
}

// Householder reduction to upper Hessenberg form, no accumulation.
template <typename T>
void hessenberg_reduce(Matrix<T>& a) {
    const std::size_t n = a.rows();
    if (n < 3) return;
    std::vector<T> v(n);
    for (std::size_t k = 0; k + 2 < n; ++k) {
        double norm2 = 0.0;
        for (std::size_t i = k + 1; i < n; ++i) norm2 += std::norm(cdouble(a(i, k)));
        const double tail = norm2 - std::norm(cdouble(a(k + 1, k)));
        if (tail == 0.0) continue;
        const double norm = std::sqrt(norm2);
        const T alpha = -unit_phase(a(k + 1, k)) * norm;
        for (std::size_t i = k + 1; i < n; ++i) v[i] = a(i, k);
        v[k + 1] -= alpha;
        double vnorm2 = 0.0;
        for (std::size_t i = k + 1; i < n; ++i) vnorm2 += std::norm(cdouble(v[i]));
        const double tau = 2.0 / vnorm2;

        // a <- (I - tau v v*) a on rows k+1.., columns k..
        for (std::size_t j = k; j < n; ++j) {
            T s{};
            for (std::size_t i = k + 1; i < n; ++i) s += conj_of(v[i]) * a(i, j);
            s *= tau;
            for (std::size_t i = k + 1; i < n; ++i) a(i, j) -= v[i] * s;
        }
        // a <- a (I - tau v v*) on all rows, columns k+1..
        for (std::size_t i = 0; i < n; ++i) {
            T* ai = a.row(i);
            T s{};
            for (std::size_t j = k + 1; j < n; ++j) s += ai[j] * v[j];
            s *= tau;
            for (std::size_t j = k + 1; j < n; ++j) ai[j] -= s * conj_of(v[j]);
        }
        a(k + 1, k) = alpha;
        for (std::size_t i = k + 2; i < n; ++i) a(i, k) = T{};
    }
}

std::vector<cdouble> real_hqr(DMatrix& h) {
    const int nn = static_cast<int>(h.rows());
    std::vector<double> wr(nn, 0.0), wi(nn, 0.0);
    const int low = 0;
    int n = nn - 1;
    double exshift = 0.0;
    double p = 0, q = 0, r = 0, s = 0, z = 0, w, x, y;

    double norm = 0.0;
    for (int i = 0; i < nn; ++i)
        for (int j = std::max(i - 1, 0); j < nn; ++j) norm += std::abs(h(i, j));

    int iter = 0;
    long total = 0;
    const long cap = 60L * nn;
    while (n >= low) {
        int l = n;
        while (l > low) {
            s = std::abs(h(l - 1, l - 1)) + std::abs(h(l, l));
            if (s == 0.0) s = norm;
            if (std::abs(h(l, l - 1)) < kEps * s) break;
            --l;
        }

        if (l == n) {
            wr[n] = h(n, n) + exshift;
            wi[n] = 0.0;
            --n;
            iter = 0;
        } else if (l == n - 1) {
            w = h(n, n - 1) * h(n - 1, n);
            p = (h(n - 1, n - 1) - h(n, n)) / 2.0;
            q = p * p + w;
            z = std::sqrt(std::abs(q));
            x = h(n, n) + exshift;
            if (q >= 0) {
                z = (p >= 0) ? p + z : p - z;
                wr[n - 1] = x + z;
                wr[n] = wr[n - 1];
                if (z != 0.0) wr[n] = x - w / z;
                wi[n - 1] = 0.0;
                wi[n] = 0.0;
            } else {
                wr[n - 1] = x + p;
                wr[n] = x + p;
                wi[n - 1] = z;
                wi[n] = -z;
            }
            n -= 2;
            iter = 0;
        } else {
            if (++total > cap)
                throw ConvergenceError("nonsymmetric_eigenvalues: QR iteration cap 60n exceeded",
                                       std::abs(h(n, n - 1)), static_cast<int>(total));
            x = h(n, n);
            y = h(n - 1, n - 1);
            w = h(n, n - 1) * h(n - 1, n);

            if (iter == 10) {
                exshift += x;
                for (int i = low; i <= n; ++i) h(i, i) -= x;
                s = std::abs(h(n, n - 1)) + std::abs(h(n - 1, n - 2));
                x = y = 0.75 * s;
                w = -0.4375 * s * s;
            }
            if (iter == 30) {
                s = (y - x) / 2.0;
                s = s * s + w;
                if (s > 0) {
                    s = std::sqrt(s);
                    if (y < x) s = -s;
                    s = x - w / ((y - x) / 2.0 + s);
                    for (int i = low; i <= n; ++i) h(i, i) -= s;
                    exshift += s;
                    x = y = w = 0.964;
                }
            }
            ++iter;

            int m = n - 2;
            while (m >= l) {
                z = h(m, m);
                r = x - z;
                s = y - z;
                p = (r * s - w) / h(m + 1, m) + h(m, m + 1);
                q = h(m + 1, m + 1) - z - r - s;
                r = h(m + 2, m + 1);
                s = std::abs(p) + std::abs(q) + std::abs(r);
                p /= s;
                q /= s;
                r /= s;
                if (m == l) break;
                if (std::abs(h(m, m - 1)) * (std::abs(q) + std::abs(r)) <
                    kEps * (std::abs(p) * (std::abs(h(m - 1, m - 1)) + std::abs(z) + std::abs(h(m + 1, m + 1)))))
                    break;
                --m;
            }
            for (int i = m + 2; i <= n; ++i) {
                h(i, i - 2) = 0.0;
                if (i > m + 2) h(i, i - 3) = 0.0;
            }

            for (int k = m; k <= n - 1; ++k) {
                const bool notlast = (k != n - 1);
                if (k != m) {
                    p = h(k, k - 1);
                    q = h(k + 1, k - 1);
                    r = notlast ? h(k + 2, k - 1) : 0.0;
                    x = std::abs(p) + std::abs(q) + std::abs(r);
                    if (x == 0.0) continue;
                    p /= x;
                    q /= x;
                    r /= x;
                }
                s = std::sqrt(p * p + q * q + r * r);
                if (p < 0) s = -s;
                if (s == 0.0) continue;
                if (k != m)
                    h(k, k - 1) = -s * x;
                else if (l != m)
                    h(k, k - 1) = -h(k, k - 1);
                p += s;
                x = p / s;
                y = q / s;
                z = r / s;
                q /= p;
                r /= p;

                for (int j = k; j <= n; ++j) {
                    p = h(k, j) + q * h(k + 1, j);
                    if (notlast) {
                        p += r * h(k + 2, j);
                        h(k + 2, j) -= p * z;
                    }
                    h(k, j) -= p * x;
                    h(k + 1, j) -= p * y;
                }
                const int imax = std::min(n, k + 3);
                for (int i = l; i <= imax; ++i) {
                    p = x * h(i, k) + y * h(i, k + 1);
                    if (notlast) {
                        p += z * h(i, k + 2);
                        h(i, k + 2) -= p * r;
                    }
                    h(i, k) -= p;
                    h(i, k + 1) -= p * q;
                }
            }
        }
    }

    std::vector<cdouble> out(nn);
    for (int i = 0; i < nn; ++i) out[i] = {wr[i], wi[i]};
    return out;
}

// Givens rotation [c s; -conj(s) c] mapping (a, b) to (r, 0).
void givens(cdouble a, cdouble b, double& c, cdouble& s) {
    const double aa = std::abs(a);
    const double bb = std::abs(b);
    if (bb == 0.0) {
        c = 1.0;
        s = 0.0;
        return;
    }
    if (aa == 0.0) {
        c = 0.0;
        s = std::conj(b) / bb;
        return;
    }
    const double rr = std::hypot(aa, bb);
    c = aa / rr;
    s = (a / aa) * std::conj(b) / rr;
}

std::vector<cdouble> complex_hqr(CMatrix& h) {
    const int nn = static_cast<int>(h.rows());
    std::vector<cdouble> out(nn);
    double norm = 0.0;
    for (const cdouble& v : h.data()) norm += std::abs(v);
    int hi = nn - 1;
    int iter = 0;
    long total = 0;
    const long cap = 60L * nn;
    while (hi >= 0) {
        int l = hi;
        while (l > 0) {
            double s = std::abs(h(l - 1, l - 1)) + std::abs(h(l, l));
            if (s == 0.0) s = norm;
            if (std::abs(h(l, l - 1)) < kEps * s) {
                h(l, l - 1) = 0.0;
                break;
            }
            --l;
        }
        if (l == hi) {
            out[hi] = h(hi, hi);
            --hi;
            iter = 0;
            continue;
        }
        if (++total > cap)
            throw ConvergenceError("nonsymmetric_eigenvalues: QR iteration cap 60n exceeded",
                                   std::abs(h(hi, hi - 1)), static_cast<int>(total));
        ++iter;

        cdouble mu;
        if (iter % 10 == 0) {
            mu = h(hi, hi) + std::abs(h(hi, hi - 1)) + (hi >= 2 ? std::abs(h(hi - 1, hi - 2)) : 0.0);
        } else {
            // Wilkinson shift from the trailing 2x2 block.
            const cdouble a = h(hi - 1, hi - 1), b = h(hi - 1, hi), c = h(hi, hi - 1), d = h(hi, hi);
            const cdouble tr2 = (a + d) / 2.0;
            const cdouble disc = std::sqrt((a - d) * (a - d) / 4.0 + b * c);
            const cdouble m1 = tr2 + disc, m2 = tr2 - disc;
            mu = std::abs(m1 - d) < std::abs(m2 - d) ? m1 : m2;
        }

        cdouble x = h(l, l) - mu;
        cdouble y = h(l + 1, l);
        for (int k = l; k < hi; ++k) {
            if (k > l) {
                x = h(k, k - 1);
                y = h(k + 1, k - 1);
            }
            double c;
            cdouble s;
            givens(x, y, c, s);
            const int jstart = k > l ? k - 1 : l;
            for (int j = jstart; j <= hi; ++j) {
                const cdouble u = h(k, j), v = h(k + 1, j);
                h(k, j) = c * u + s * v;
                h(k + 1, j) = -std::conj(s) * u + c * v;
            }
            if (k > l) h(k + 1, k - 1) = 0.0;
            const int imax = std::min(hi, k + 2);
            for (int i = l; i <= imax; ++i) {
                const cdouble u = h(i, k), v = h(i, k + 1);
                h(i, k) = c * u + std::conj(s) * v;
                h(i, k + 1) = -s * u + c * v;
            }
        }
    }
    return out;
}

template <typename T>
void check_input(const Matrix<T>& a) {
    if (!a.square()) throw DomainError("nonsymmetric_eigenvalues: matrix not square");
    for (const T& v : a.data())
        if (!std::isfinite(std::abs(v))) throw DomainError("nonsymmetric_eigenvalues: non-finite entry");
}

}  // namespace

std::vector<cdouble> nonsymmetric_eigenvalues(const DMatrix& a) {
    check_input(a);
    if (a.rows() == 0) return {};
    DMatrix h = a;
    balance(h);
    hessenberg_reduce(h);
    return real_hqr(h);
}

std::vector<cdouble> nonsymmetric_eigenvalues(const CMatrix& a) {
    check_input(a);
    if (a.rows() == 0) return {};
    CMatrix h = a;
    balance(h);
    hessenberg_reduce(h);
    return complex_hqr(h);
}

}  // namespace ellprod
