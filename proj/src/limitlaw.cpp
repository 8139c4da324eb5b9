#include "ellprod/limitlaw.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include <fmt/format.h>

#include "ellprod/errors.hpp"

namespace ellprod {

LimitLaw::LimitLaw(int m_) : m(m_) {
    if (m < 1) throw DomainError(fmt::format("LimitLaw: m must be >= 1 (got {})", m));
}

double density(const LimitLaw& law, double x, double y) {
    const double r2 = x * x + y * y;
    if (r2 > 1.0) return 0.0;
    if (law.m == 1) return 1.0 / std::numbers::pi;
    if (r2 == 0.0) return std::numeric_limits<double>::infinity();
    const double expo = static_cast<double>(law.m - 1) / law.m;
    return 1.0 / (std::numbers::pi * law.m * std::pow(r2, expo));
}

double radial_cdf(const LimitLaw& law, double r) {
    if (!(r >= 0.0)) throw DomainError("radial_cdf: radius must be nonnegative");
    if (r >= 1.0) return 1.0;
    return std::pow(r, 2.0 / law.m);
}

std::complex<double> sample(const LimitLaw& law, Rng& rng) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const double u = unif(rng);
    const double theta = 2.0 * std::numbers::pi * unif(rng);
    const double radius = std::pow(u, law.m / 2.0);
    return std::polar(radius, theta);
}

double limit_potential(const LimitLaw& law, std::complex<double> z) {
    const double r = std::abs(z);
    if (r > 1.0) return -std::log(r);
    return 0.5 * law.m * (1.0 - std::pow(r, 2.0 / law.m));
}

double Rational::to_double() const {
    return num.convert_to<double>() / den.convert_to<double>();
}

std::string Rational::str() const {
    if (den == 1) return num.str();
    return num.str() + "/" + den.str();
}

Rational fuss_catalan_moment(int m, int p) {
    if (m < 1) throw DomainError("fuss_catalan_moment: m must be >= 1");
    if (p < 0) throw DomainError("fuss_catalan_moment: p must be >= 0");
    using boost::multiprecision::cpp_int;
    const int top = (m + 1) * p;
    cpp_int binom = 1;
    for (int i = 1; i <= p; ++i) {
        binom *= (top - p + i);
        binom /= i;
    }
    cpp_int den = m * p + 1;
    const cpp_int g = boost::multiprecision::gcd(binom, den);
    return {binom / g, den / g};
}

double fuss_catalan_edge(int m) {
    return std::pow(m + 1.0, m + 1.0) / std::pow(static_cast<double>(m), m);
}

}  // namespace ellprod
