#pragma once

#include <functional>
#include <utility>
#include <vector>

namespace ellprod {

// sup_x |F_N(x) - F(x)| for a sample (sorted or not) against cdf F.
double ks_distance(std::vector<double> sample, const std::function<double(double)>& cdf);

double ks_two_sample(std::vector<double> a, std::vector<double> b);

// Kuiper V = D+ + D- of angles in [0, 2pi) against the uniform law.
double kuiper_statistic(std::vector<double> angles);

struct Interval {
    double low = 0.0;
    double high = 0.0;
};

// Wilson score interval for a binomial proportion.
Interval wilson_interval(std::size_t successes, std::size_t trials, double zcrit = 1.959963984540054);

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
};
LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y);
// Fit of log y against log x.
LinearFit loglog_fit(const std::vector<double>& x, const std::vector<double>& y);

double mean(const std::vector<double>& v);
// Unbiased sample variance; 0 for fewer than two values.
double sample_variance(const std::vector<double>& v);
// Standard error of the mean.
double standard_error(const std::vector<double>& v);

}  // namespace ellprod
