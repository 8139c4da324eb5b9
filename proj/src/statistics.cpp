#include "ellprod/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ellprod/errors.hpp"

namespace ellprod {

double ks_distance(std::vector<double> sample, const std::function<double(double)>& cdf) {
    if (sample.empty()) throw DomainError("ks_distance: empty sample");
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double f = cdf(sample[i]);
        d = std::max({d, (i + 1) / n - f, f - i / n});
    }
    return d;
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw DomainError("ks_two_sample: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::abs(i / na - j / nb));
    }
    return d;
}

double kuiper_statistic(std::vector<double> angles) {
    if (angles.empty()) throw DomainError("kuiper_statistic: empty sample");
    const double two_pi = 2.0 * std::numbers::pi;
    std::vector<double> u(angles.size());
    for (std::size_t i = 0; i < angles.size(); ++i) u[i] = angles[i] / two_pi;
    std::sort(u.begin(), u.end());
    const double n = static_cast<double>(u.size());
    double dplus = 0.0, dminus = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        dplus = std::max(dplus, (i + 1) / n - u[i]);
        dminus = std::max(dminus, u[i] - i / n);
    }
    return dplus + dminus;
}

Interval wilson_interval(std::size_t successes, std::size_t trials, double zcrit) {
    if (trials == 0) throw DomainError("wilson_interval: zero trials");
    const double n = static_cast<double>(trials);
    const double p = successes / n;
    const double z2 = zcrit * zcrit;
    const double denom = 1.0 + z2 / n;
    const double centre = (p + z2 / (2.0 * n)) / denom;
    const double half = zcrit * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw DomainError("linear_fit: need at least two paired points");
    const double n = static_cast<double>(x.size());
    const double mx = mean(x), my = mean(y);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0) throw DomainError("linear_fit: abscissae are all equal");
    LinearFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    if (x.size() > 2) {
        double rss = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double r = y[i] - f.intercept - f.slope * x[i];
            rss += r * r;
        }
        f.slope_stderr = std::sqrt(rss / (n - 2.0) / sxx);
    }
    return f;
}

LinearFit loglog_fit(const std::vector<double>& x, const std::vector<double>& y) {
    std::vector<double> lx(x.size()), ly(y.size());
    for (std::size_t i = 0; i < x.size(); ++i) lx[i] = std::log(x[i]);
    for (std::size_t i = 0; i < y.size(); ++i) ly[i] = std::log(y[i]);
    return linear_fit(lx, ly);
}

double mean(const std::vector<double>& v) {
    if (v.empty()) throw DomainError("mean: empty input");
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double sample_variance(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double m = mean(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return s / static_cast<double>(v.size() - 1);
}

double standard_error(const std::vector<double>& v) {
    if (v.empty()) throw DomainError("standard_error: empty input");
    return std::sqrt(sample_variance(v) / static_cast<double>(v.size()));
}

}  // namespace ellprod
