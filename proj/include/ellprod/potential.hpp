#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ellprod/ensemble.hpp"
#include "ellprod/spectra.hpp"

namespace ellprod {

struct PotentialValue {
    double value = 0.0;
    bool infinite = false;  // some s_i vanished: z is an eigenvalue
};

// -(1/n) sum ln s_i(W - zI), from shifted_singular_values.
PotentialValue empirical_potential(const DMatrix& w, cdouble z);
// Same functional from the eigenvalues of W: -(1/n) sum ln|lambda_i - z|.
PotentialValue empirical_potential(const ComplexSpectrum& spectrum, cdouble z);

struct GridSpec {
    double x_min = -1.0;
    double x_max = 1.0;
    double y_min = -1.0;
    double y_max = 1.0;
    double step = 0.05;

    std::size_t nx() const;
    std::size_t ny() const;
    cdouble point(std::size_t ix, std::size_t iy) const;
    void validate() const;
};

struct PotentialGrid {
    GridSpec grid;
    std::size_t nx = 0;
    std::size_t ny = 0;
    std::vector<double> values;    // row-major in y, then x: index iy * nx + ix
    std::vector<double> variance;  // across trials
    std::vector<std::size_t> masked;
    std::size_t trials = 0;
    std::uint64_t master_seed = 0;

    double at(std::size_t ix, std::size_t iy) const { return values[iy * nx + ix]; }
    std::size_t masked_total() const;
    double masked_fraction() const;
};

PotentialGrid mean_potential_grid(const EnsembleSpec& spec, const GridSpec& grid, std::size_t trials,
                                  unsigned threads = 1);
PotentialGrid potential_grid_from_function(const GridSpec& grid, const std::function<double(cdouble)>& u);

// -(1/2pi) times the 5-point Laplacian on interior points.
struct DensityField {
    std::size_t nx = 0;  // interior counts
    std::size_t ny = 0;
    std::vector<cdouble> points;
    std::vector<double> values;
};
DensityField laplacian_density(const PotentialGrid& grid);

std::string potential_to_csv(const PotentialGrid& g);
std::string density_to_csv(const DensityField& f);

struct TailDiagnostics {
    double B = 2.0;
    double gamma = 0.7;
    double delta_n = 0.05;
    double K = 1.0;
    double Q = 2.0;
    cdouble z{0.5, 0.0};

    void validate() const;
};

struct TailIndicator {
    double s_min = 0.0;
    bool exceeded = false;  // s_min <= n^-B
};
TailIndicator tail_indicator(const DMatrix& a, double B);
TailIndicator tail_indicator(const CMatrix& a, double B);

struct TailLevel {
    std::size_t n = 0;
    std::size_t trials = 0;
    std::size_t exceed = 0;
    double frequency = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    std::size_t resampled = 0;
    std::size_t norm_violations = 0;  // ||M_n|| > K n^Q
    double median_log_smin = 0.0;
    double min_profile_c = 0.0;       // smallest fitted sv_profile constant
};

struct TailReport {
    std::vector<TailLevel> levels;
    // An increase counts only when the next frequency exceeds the upper
    // Wilson bound of the previous one.
    bool non_increasing = true;
};

// X^(m) + M_n with M_n = -z (prod_{q<m} X^(q))^-1, all factors scaled.
TailReport smallest_sv_tail(const EnsembleSpec& spec, const TailDiagnostics& diag, std::size_t trials,
                            const std::vector<std::size_t>& ladder, unsigned threads = 1);

struct ProfileFit {
    double c = 0.0;
    std::size_t argmin_j = 0;  // 1-based
    std::size_t checked = 0;   // number of indices j tested
};
// Largest c with s_j >= c (n - j)/n for every j <= n - n^gamma.
ProfileFit sv_profile_check(const std::vector<double>& singular_values_desc, double gamma);
ProfileFit sv_profile_check(const DMatrix& matrix, double gamma);

struct QuantileFloor {
    bool skipped = false;
    std::string reason;
    std::size_t k = 0;
    bool passed = false;  // s_k > delta
};
// k = floor(n (1 - C delta^(1/(m+1)))), s_k counted from the largest.
QuantileFloor quantile_floor_check(const SymmetrizedSpectrum& spectrum, double delta, int m, double C = 1.0);
QuantileFloor quantile_floor_check(const std::vector<double>& singular_values_desc, double delta, int m,
                                   double C = 1.0);

struct LogTail {
    double integral = 0.0;  // (1/n) sum |ln s_i^2|
    bool exceeds = false;
    bool infinite = false;
};
LogTail log_integrability_tail(const SymmetrizedSpectrum& spectrum, double t);
LogTail log_integrability_tail(const std::vector<double>& singular_values, double t);

struct FrequencyReport {
    std::size_t trials = 0;
    std::size_t events = 0;
    std::size_t skipped = 0;
    double frequency = 0.0;
    double bound = 0.0;
};
// Failure frequency of quantile_floor_check at shift z, with the bound C delta^(1/(m+1)).
FrequencyReport quantile_floor_frequency(const EnsembleSpec& spec, cdouble z, double delta, double C,
                                         std::size_t trials, unsigned threads = 1);
// Exceedance frequency of log_integrability_tail at level t.
FrequencyReport log_tail_frequency(const EnsembleSpec& spec, cdouble z, double t, std::size_t trials,
                                   unsigned threads = 1);

}  // namespace ellprod
