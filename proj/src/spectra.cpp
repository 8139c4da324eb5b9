#include "ellprod/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

#include <fmt/format.h>

#include "ellprod/eigen_solvers.hpp"

namespace ellprod {

double ComplexSpectrum::max_modulus() const {
    double r = 0.0;
    for (const cdouble& v : values) r = std::max(r, std::abs(v));
    return r;
}

double ComplexSpectrum::conjugate_pair_defect() const {
    const double scale = std::max(max_modulus(), 1e-300);
    std::vector<cdouble> upper, lower;
    for (const cdouble& v : values) {
        if (v.imag() > 0) upper.push_back(v);
        if (v.imag() < 0) lower.push_back(std::conj(v));
    }
    if (upper.size() != lower.size()) return std::numeric_limits<double>::infinity();
    auto cmp = [](const cdouble& a, const cdouble& b) {
        return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    };
    std::sort(upper.begin(), upper.end(), cmp);
    std::sort(lower.begin(), lower.end(), cmp);
    double defect = 0.0;
    for (std::size_t i = 0; i < upper.size(); ++i) defect = std::max(defect, std::abs(upper[i] - lower[i]));
    return defect / scale;
}

std::vector<double> SymmetrizedSpectrum::singular_values() const {
    std::vector<double> s(n);
    const std::size_t two_n = values.size();
    for (std::size_t i = 0; i < n; ++i) s[i] = std::max(0.0, 0.5 * (values[two_n - 1 - i] - values[i]));
    return s;
}

std::vector<double> SymmetrizedSpectrum::squared_view() const {
    std::vector<double> s = singular_values();
    std::vector<double> out(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) out[i] = s[s.size() - 1 - i] * s[s.size() - 1 - i];
    return out;
}

double SymmetrizedSpectrum::pairing_defect() const {
    double d = 0.0;
    const std::size_t two_n = values.size();
    for (std::size_t i = 0; i < two_n; ++i) d = std::max(d, std::abs(values[i] + values[two_n - 1 - i]));
    return d;
}

double HermitianLinearization::hermitian_defect() const {
    double d = 0.0;
    double scale = 0.0;
    for (std::size_t i = 0; i < matrix.rows(); ++i)
        for (std::size_t j = 0; j < matrix.cols(); ++j) {
            d = std::max(d, std::abs(matrix(i, j) - std::conj(matrix(j, i))));
            scale = std::max(scale, std::abs(matrix(i, j)));
        }
    return scale == 0.0 ? d : d / scale;
}

namespace {

void check_factors(const std::vector<RealMatrix>& factors) {
    if (factors.empty()) throw DomainError("product: at least one factor required");
    const std::size_t n = factors.front().rows();
    for (const RealMatrix& f : factors) {
        if (f.rows() != n || f.cols() != n) throw DomainError("product: factors must be square and of equal size");
        if (!f.is_raw()) throw ContractError("product: factors must carry raw entries (scale 1)");
    }
}

DMatrix scaled(const RealMatrix& f) {
    DMatrix out = f.entries;
    const double s = 1.0 / std::sqrt(static_cast<double>(f.rows()));
    for (double& x : out.data()) x *= s;
    return out;
}

}  // namespace

DMatrix product(const std::vector<RealMatrix>& factors) {
    check_factors(factors);
    DMatrix w = scaled(factors.front());
    for (std::size_t q = 1; q < factors.size(); ++q) w = matmul(w, scaled(factors[q]));
    return w;
}

ComplexSpectrum eigenvalues(const DMatrix& matrix) {
    return {nonsymmetric_eigenvalues(matrix), matrix.rows()};
}

ComplexSpectrum eigenvalues(const CMatrix& matrix) {
    return {nonsymmetric_eigenvalues(matrix), matrix.rows()};
}

EigenCheck check_eigenvalues(const DMatrix& matrix, const ComplexSpectrum& spectrum) {
    EigenCheck c;
    cdouble sum = 0.0;
    double log_prod = 0.0;
    for (const cdouble& v : spectrum.values) {
        sum += v;
        log_prod += std::log(std::abs(v));
    }
    const double n = static_cast<double>(matrix.rows());
    c.trace_error = std::abs(sum - trace(matrix));
    c.trace_tolerance = 1e-8 * n * std::max(frobenius_norm(matrix), 1.0);
    const LuResult lu = lu_log_det(matrix);
    c.singular = lu.singular;
    if (lu.singular) {
        c.log_det_error = 0.0;
        c.passed = c.trace_error <= c.trace_tolerance;
        return c;
    }
    // relative 1e-6 on the determinant is 1e-6 on its logarithm
    c.log_det_error = std::abs(log_prod - lu.log_abs_det);
    c.passed = c.trace_error <= c.trace_tolerance && c.log_det_error <= 1e-6;
    return c;
}

HermitianLinearization linearization_from_product(const DMatrix& w, cdouble z) {
    if (!w.square()) throw DomainError("linearization: matrix not square");
    const std::size_t n = w.rows();
    HermitianLinearization lin;
    lin.n = n;
    lin.z = z;
    lin.matrix = CMatrix(2 * n, 2 * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            cdouble v = w(i, j);
            if (i == j) v -= z;
            lin.matrix(i, n + j) = v;
            lin.matrix(n + j, i) = std::conj(v);
        }
    return lin;
}

HermitianLinearization build_linearization(const std::vector<RealMatrix>& factors, cdouble z) {
    check_factors(factors);
    const std::size_t n = factors.front().rows();
    const std::size_t m = factors.size();
    // H^(nu) = blockdiag(X^(nu), X^(m-nu+1)^T); V is their product, so V
    // carries W in the upper block and W^T in the lower one.
    DMatrix top = scaled(factors[0]);
    DMatrix bottom = transpose(scaled(factors[m - 1]));
    for (std::size_t nu = 1; nu < m; ++nu) {
        top = matmul(top, scaled(factors[nu]));
        bottom = matmul(bottom, transpose(scaled(factors[m - 1 - nu])));
    }
    HermitianLinearization lin;
    lin.n = n;
    lin.z = z;
    lin.m = static_cast<int>(m);
    lin.matrix = CMatrix(2 * n, 2 * n);
    // V J places W in the upper-right block and W^T in the lower-left one.
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            lin.matrix(i, n + j) = top(i, j);
            lin.matrix(n + i, j) = bottom(i, j);
        }
    for (std::size_t i = 0; i < n; ++i) {
        lin.matrix(i, n + i) -= z;
        lin.matrix(n + i, i) -= std::conj(z);
    }
    return lin;
}

SymmetrizedSpectrum symmetrized_spectrum(const HermitianLinearization& lin) {
    if (lin.hermitian_defect() > 1e-12) throw ContractError("symmetrized_spectrum: matrix is not Hermitian");
    SymmetrizedSpectrum s;
    s.values = hermitian_eigenvalues(lin.matrix);
    s.z = lin.z;
    s.n = lin.n;
    return s;
}

std::vector<double> shifted_singular_values(const DMatrix& w, cdouble z) {
    return symmetrized_spectrum(linearization_from_product(w, z)).singular_values();
}

namespace {

template <typename T>
std::vector<double> singular_values_impl(const Matrix<T>& a) {
    if (!a.square()) throw DomainError("singular_values: matrix not square");
    const std::size_t n = a.rows();
    Matrix<T> h(2 * n, 2 * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            h(i, n + j) = a(i, j);
            if constexpr (std::is_same_v<T, double>)
                h(n + j, i) = a(i, j);
            else
                h(n + j, i) = std::conj(a(i, j));
        }
    const std::vector<double> ev = hermitian_eigenvalues(h);
    std::vector<double> s(n);
    for (std::size_t i = 0; i < n; ++i) s[i] = std::max(0.0, 0.5 * (ev[2 * n - 1 - i] - ev[i]));
    return s;
}

}  // namespace

std::vector<double> singular_values(const DMatrix& a) { return singular_values_impl(a); }
std::vector<double> singular_values(const CMatrix& a) { return singular_values_impl(a); }

std::vector<double> jacobi_singular_values(const CMatrix& a) {
    if (!a.square()) throw DomainError("jacobi_singular_values: matrix not square");
    const std::size_t n = a.rows();
    // columns stored contiguously
    std::vector<std::vector<cdouble>> u(n, std::vector<cdouble>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) u[j][i] = a(i, j);
    const double tol = 1e-15;
    bool rotated = true;
    for (int sweep = 0; sweep < 80 && rotated; ++sweep) {
        rotated = false;
        for (std::size_t p = 0; p + 1 < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) {
                double alpha = 0.0, beta = 0.0;
                cdouble gamma = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    alpha += std::norm(u[p][i]);
                    beta += std::norm(u[q][i]);
                    gamma += std::conj(u[p][i]) * u[q][i];
                }
                const double g = std::abs(gamma);
                if (g == 0.0 || g <= tol * std::sqrt(alpha * beta)) continue;
                rotated = true;
                const cdouble phase = std::conj(gamma) / g;
                const double zeta = (beta - alpha) / (2.0 * g);
                const double t = (zeta >= 0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                for (std::size_t i = 0; i < n; ++i) {
                    const cdouble up = u[p][i];
                    const cdouble uq = u[q][i] * phase;
                    u[p][i] = c * up - s * uq;
                    u[q][i] = s * up + c * uq;
                }
            }
        if (sweep == 79 && rotated) throw ConvergenceError("jacobi_singular_values: no convergence in 80 sweeps");
    }
    std::vector<double> sv(n);
    for (std::size_t j = 0; j < n; ++j) {
        double s = 0.0;
        for (const cdouble& x : u[j]) s += std::norm(x);
        sv[j] = std::sqrt(s);
    }
    std::sort(sv.begin(), sv.end(), std::greater<>());
    return sv;
}

double product_inequality_slack(const DMatrix& a, const DMatrix& b) {
    const std::vector<double> sab = singular_values(matmul(a, b));
    const std::vector<double> sa = singular_values(a);
    const std::vector<double> sb = singular_values(b);
    const std::size_t n = sab.size();
    double lhs = 0.0, rhs = 0.0;
    double slack = std::numeric_limits<double>::infinity();
    for (std::size_t k = n; k-- > 0;) {
        lhs += std::log(sab[k]);
        rhs += std::log(sa[k]) + std::log(sb[k]);
        slack = std::min(slack, lhs - rhs);
    }
    return slack;
}

EmpiricalCdf::EmpiricalCdf(std::vector<double> values) : sorted_(std::move(values)) {
    if (sorted_.empty()) throw DomainError("empirical_cdf: empty input");
    std::sort(sorted_.begin(), sorted_.end());
}

double EmpiricalCdf::operator()(double x) const {
    const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), x);
    return static_cast<double>(it - sorted_.begin()) / static_cast<double>(sorted_.size());
}

EmpiricalCdf empirical_cdf(std::vector<double> values) { return EmpiricalCdf(std::move(values)); }

std::pair<std::vector<double>, std::vector<double>> radial_angular_split(const ComplexSpectrum& spectrum) {
    if (spectrum.values.empty()) throw DomainError("radial_angular_split: empty spectrum");
    std::vector<double> radii, angles;
    radii.reserve(spectrum.values.size());
    angles.reserve(spectrum.values.size());
    constexpr double two_pi = 2.0 * std::numbers::pi;
    for (const cdouble& v : spectrum.values) {
        radii.push_back(std::abs(v));
        double a = std::arg(v);
        if (a < 0) a += two_pi;
        if (a >= two_pi) a = 0.0;
        angles.push_back(a);
    }
    return {radii, angles};
}

std::string spectrum_to_csv(const ComplexSpectrum& s) {
    std::string out = "re,im\n";
    for (const cdouble& v : s.values) out += fmt::format("{:.17g},{:.17g}\n", v.real(), v.imag());
    return out;
}

std::string spectrum_to_csv(const SymmetrizedSpectrum& s) {
    std::string out = "value\n";
    for (double v : s.values) out += fmt::format("{:.17g}\n", v);
    return out;
}

nlohmann::json spectrum_metadata(const EnsembleSpec& spec, cdouble z) {
    return {{"n", spec.n},       {"m", spec.m},           {"rho", spec.rho},
            {"z_re", z.real()}, {"z_im", z.imag()}, {"seed", spec.master_seed}};
}

}  // namespace ellprod
