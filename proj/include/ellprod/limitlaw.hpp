#pragma once

#include <complex>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

#include "ellprod/rng.hpp"

namespace ellprod {

// Law of u^m for u uniform on the unit disc.
struct LimitLaw {
    int m = 1;
    explicit LimitLaw(int m_);
};

// 1 / (pi m r^(2(m-1)/m)) on the closed unit disc, 0 outside. Returns
// +infinity at the origin when m >= 2.
double density(const LimitLaw& law, double x, double y);

// Mass of the disc of radius r: min(r^(2/m), 1).
double radial_cdf(const LimitLaw& law, double r);

std::complex<double> sample(const LimitLaw& law, Rng& rng);

// -int ln|w - z| mu(dw): (m/2)(1 - |z|^(2/m)) inside the disc, -ln|z| outside.
double limit_potential(const LimitLaw& law, std::complex<double> z);

struct Rational {
    boost::multiprecision::cpp_int num;
    boost::multiprecision::cpp_int den;
    double to_double() const;
    std::string str() const;
};

// binom((m+1)p, p) / (mp + 1), reduced.
Rational fuss_catalan_moment(int m, int p);

// Largest squared singular value in the support of the Fuss-Catalan law
// of order m: (m+1)^(m+1) / m^m.
double fuss_catalan_edge(int m);

}  // namespace ellprod
