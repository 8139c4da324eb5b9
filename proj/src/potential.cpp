#include "ellprod/potential.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <fmt/format.h>

#include "ellprod/parallel.hpp"
#include "ellprod/statistics.hpp"

namespace ellprod {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace

PotentialValue empirical_potential(const DMatrix& w, cdouble z) {
    const std::vector<double> s = shifted_singular_values(w, z);
    const double n = static_cast<double>(s.size());
    const double floor = n * kEps * std::max(s.front(), std::numeric_limits<double>::min());
    double acc = 0.0;
    for (double x : s) {
        if (x <= floor) return {std::numeric_limits<double>::infinity(), true};
        acc += std::log(x);
    }
    return {-acc / n, false};
}

PotentialValue empirical_potential(const ComplexSpectrum& spectrum, cdouble z) {
    const double n = static_cast<double>(spectrum.values.size());
    const double scale = std::max({spectrum.max_modulus(), std::abs(z), 1.0});
    double acc = 0.0;
    for (const cdouble& l : spectrum.values) {
        const double d = std::abs(l - z);
        if (d <= n * kEps * scale) return {std::numeric_limits<double>::infinity(), true};
        acc += std::log(d);
    }
    return {-acc / n, false};
}

std::size_t GridSpec::nx() const {
    return static_cast<std::size_t>(std::llround((x_max - x_min) / step)) + 1;
}

std::size_t GridSpec::ny() const {
    return static_cast<std::size_t>(std::llround((y_max - y_min) / step)) + 1;
}

cdouble GridSpec::point(std::size_t ix, std::size_t iy) const {
    return {x_min + static_cast<double>(ix) * step, y_min + static_cast<double>(iy) * step};
}

void GridSpec::validate() const {
    if (!(step > 0.0)) throw DomainError(fmt::format("grid.step must be positive (got {})", step));
    if (!(x_max >= x_min) || !(y_max >= y_min)) throw DomainError("grid: extents must satisfy min <= max");
}

std::size_t PotentialGrid::masked_total() const {
    std::size_t t = 0;
    for (std::size_t m : masked) t += m;
    return t;
}

double PotentialGrid::masked_fraction() const {
    const double denom = static_cast<double>(values.size()) * static_cast<double>(std::max<std::size_t>(trials, 1));
    return denom == 0.0 ? 0.0 : static_cast<double>(masked_total()) / denom;
}

PotentialGrid mean_potential_grid(const EnsembleSpec& spec, const GridSpec& grid, std::size_t trials,
                                  unsigned threads) {
    if (trials < 1) throw DomainError("mean_potential_grid: trials must be >= 1");
    spec.validate(false);
    grid.validate();
    PotentialGrid out;
    out.grid = grid;
    out.nx = grid.nx();
    out.ny = grid.ny();
    out.trials = trials;
    out.master_seed = spec.master_seed;
    const std::size_t points = out.nx * out.ny;

    std::vector<std::vector<double>> per_trial(trials);
    parallel_for(trials, threads, [&](std::size_t t) {
        const ComplexSpectrum ev = eigenvalues(product(sample_factors(spec, t)));
        std::vector<double> u(points);
        for (std::size_t iy = 0; iy < out.ny; ++iy)
            for (std::size_t ix = 0; ix < out.nx; ++ix) {
                const PotentialValue p = empirical_potential(ev, grid.point(ix, iy));
                u[iy * out.nx + ix] = p.infinite ? kNaN : p.value;
            }
        per_trial[t] = std::move(u);
    });

    out.values.assign(points, 0.0);
    out.variance.assign(points, 0.0);
    out.masked.assign(points, 0);
    for (std::size_t k = 0; k < points; ++k) {
        std::vector<double> vals;
        vals.reserve(trials);
        for (std::size_t t = 0; t < trials; ++t) {
            const double v = per_trial[t][k];
            if (std::isnan(v))
                ++out.masked[k];
            else
                vals.push_back(v);
        }
        if (vals.empty()) {
            out.values[k] = kNaN;
            out.variance[k] = kNaN;
        } else {
            out.values[k] = mean(vals);
            out.variance[k] = sample_variance(vals);
        }
    }
    return out;
}

PotentialGrid potential_grid_from_function(const GridSpec& grid, const std::function<double(cdouble)>& u) {
    grid.validate();
    PotentialGrid out;
    out.grid = grid;
    out.nx = grid.nx();
    out.ny = grid.ny();
    out.trials = 1;
    out.values.resize(out.nx * out.ny);
    out.variance.assign(out.nx * out.ny, 0.0);
    out.masked.assign(out.nx * out.ny, 0);
    for (std::size_t iy = 0; iy < out.ny; ++iy)
        for (std::size_t ix = 0; ix < out.nx; ++ix) out.values[iy * out.nx + ix] = u(grid.point(ix, iy));
    return out;
}

DensityField laplacian_density(const PotentialGrid& g) {
    if (g.nx < 3 || g.ny < 3) throw DomainError("laplacian_density: grid must be at least 3 x 3");
    DensityField f;
    f.nx = g.nx - 2;
    f.ny = g.ny - 2;
    const double h2 = g.grid.step * g.grid.step;
    for (std::size_t iy = 1; iy + 1 < g.ny; ++iy)
        for (std::size_t ix = 1; ix + 1 < g.nx; ++ix) {
            const double lap =
                (g.at(ix + 1, iy) + g.at(ix - 1, iy) + g.at(ix, iy + 1) + g.at(ix, iy - 1) - 4.0 * g.at(ix, iy)) / h2;
            f.points.push_back(g.grid.point(ix, iy));
            f.values.push_back(-lap / (2.0 * std::numbers::pi));
        }
    return f;
}

std::string potential_to_csv(const PotentialGrid& g) {
    std::string out = "z_re,z_im,U,variance,masked\n";
    for (std::size_t iy = 0; iy < g.ny; ++iy)
        for (std::size_t ix = 0; ix < g.nx; ++ix) {
            const std::size_t k = iy * g.nx + ix;
            const cdouble z = g.grid.point(ix, iy);
            out += fmt::format("{:.10g},{:.10g},{:.17g},{:.17g},{}\n", z.real(), z.imag(), g.values[k], g.variance[k],
                               g.masked[k]);
        }
    return out;
}

std::string density_to_csv(const DensityField& f) {
    std::string out = "z_re,z_im,density\n";
    for (std::size_t k = 0; k < f.values.size(); ++k)
        out += fmt::format("{:.10g},{:.10g},{:.17g}\n", f.points[k].real(), f.points[k].imag(), f.values[k]);
    return out;
}

void TailDiagnostics::validate() const {
    if (!(B > 0.0)) throw DomainError(fmt::format("tail.B must be positive (got {})", B));
    if (!(gamma > 8.0 / 15.0 && gamma < 1.0))
        throw DomainError(fmt::format("tail.gamma must lie in (8/15, 1) (got {})", gamma));
    if (!(delta_n > 0.0)) throw DomainError("tail.delta_n must be positive");
    if (!(K > 0.0)) throw DomainError("tail.K must be positive");
}

TailIndicator tail_indicator(const DMatrix& a, double B) {
    const std::vector<double> s = singular_values(a);
    const double smin = s.back();
    return {smin, smin <= std::pow(static_cast<double>(a.rows()), -B)};
}

TailIndicator tail_indicator(const CMatrix& a, double B) {
    const std::vector<double> s = singular_values(a);
    const double smin = s.back();
    return {smin, smin <= std::pow(static_cast<double>(a.rows()), -B)};
}

ProfileFit sv_profile_check(const std::vector<double>& s, double gamma) {
    if (!(gamma > 8.0 / 15.0 && gamma < 1.0))
        throw DomainError(fmt::format("sv_profile_check: gamma must lie in (8/15, 1) (got {})", gamma));
    const double n = static_cast<double>(s.size());
    const double jmax = std::floor(n - std::pow(n, gamma));
    ProfileFit fit;
    fit.c = std::numeric_limits<double>::infinity();
    for (std::size_t j = 1; static_cast<double>(j) <= jmax && j < s.size(); ++j) {
        const double c = s[j - 1] * n / (n - static_cast<double>(j));
        ++fit.checked;
        if (c < fit.c) {
            fit.c = c;
            fit.argmin_j = j;
        }
    }
    if (fit.checked == 0) fit.c = 0.0;
    return fit;
}

ProfileFit sv_profile_check(const DMatrix& matrix, double gamma) {
    return sv_profile_check(singular_values(matrix), gamma);
}

TailReport smallest_sv_tail(const EnsembleSpec& spec, const TailDiagnostics& diag, std::size_t trials,
                            const std::vector<std::size_t>& ladder, unsigned threads) {
    spec.validate(false);
    diag.validate();
    if (trials < 1) throw DomainError("smallest_sv_tail: trials must be >= 1");
    if (ladder.empty()) throw DomainError("smallest_sv_tail: empty ladder");

    struct Trial {
        TailIndicator ind;
        std::size_t resampled = 0;
        bool norm_violation = false;
        double profile_c = 0.0;
    };

    TailReport report;
    for (std::size_t n : ladder) {
        const EnsembleSpec level = with_size(spec, n);
        const double scale = 1.0 / std::sqrt(static_cast<double>(n));
        std::vector<Trial> results(trials);
        parallel_for(trials, threads, [&](std::size_t t) {
            Trial r;
            for (std::uint64_t attempt = 0;; ++attempt) {
                if (attempt > 100) throw ConvergenceError("smallest_sv_tail: prefix product singular 100 times");
                EnsembleSpec draw = level;
                if (attempt > 0) draw.master_seed = derive_seed(level.master_seed, t, kResampleStream + attempt);
                std::vector<RealMatrix> f = sample_factors(draw, t);
                const RealMatrix last = f.back();
                f.pop_back();
                const DMatrix prefix = product(f);
                if (lu_log_det(prefix).singular) {
                    ++r.resampled;
                    continue;
                }
                const DMatrix inv = inverse(prefix);
                // ||M_n|| is bounded through the Frobenius norm.
                r.norm_violation = std::abs(diag.z) * frobenius_norm(inv) > diag.K * std::pow(double(n), diag.Q);
                std::vector<double> s;
                if (diag.z.imag() == 0.0) {
                    DMatrix a(n, n);
                    for (std::size_t i = 0; i < n * n; ++i)
                        a.data()[i] = last.entries.data()[i] * scale - diag.z.real() * inv.data()[i];
                    s = singular_values(a);
                } else {
                    CMatrix a(n, n);
                    for (std::size_t i = 0; i < n * n; ++i)
                        a.data()[i] = last.entries.data()[i] * scale - diag.z * inv.data()[i];
                    s = singular_values(a);
                }
                r.ind.s_min = s.back();
                r.ind.exceeded = r.ind.s_min <= std::pow(static_cast<double>(n), -diag.B);
                r.profile_c = sv_profile_check(s, diag.gamma).c;
                break;
            }
            results[t] = r;
        });

        TailLevel lv;
        lv.n = n;
        lv.trials = trials;
        std::vector<double> logs;
        lv.min_profile_c = std::numeric_limits<double>::infinity();
        for (const Trial& r : results) {
            lv.exceed += r.ind.exceeded ? 1 : 0;
            lv.resampled += r.resampled;
            lv.norm_violations += r.norm_violation ? 1 : 0;
            logs.push_back(std::log(std::max(r.ind.s_min, std::numeric_limits<double>::min())));
            lv.min_profile_c = std::min(lv.min_profile_c, r.profile_c);
        }
        std::sort(logs.begin(), logs.end());
        lv.median_log_smin = logs[logs.size() / 2];
        lv.frequency = static_cast<double>(lv.exceed) / static_cast<double>(trials);
        const Interval ci = wilson_interval(lv.exceed, trials);
        lv.ci_low = ci.low;
        lv.ci_high = ci.high;
        report.levels.push_back(lv);
    }
    for (std::size_t k = 1; k < report.levels.size(); ++k)
        if (report.levels[k].frequency > report.levels[k - 1].ci_high) report.non_increasing = false;
    return report;
}

QuantileFloor quantile_floor_check(const std::vector<double>& s, double delta, int m, double C) {
    if (!(delta > 0.0)) throw DomainError("quantile_floor_check: delta must be positive");
    QuantileFloor q;
    const double n = static_cast<double>(s.size());
    const double kk = std::floor(n * (1.0 - C * std::pow(delta, 1.0 / (m + 1))));
    if (kk < 1.0 || kk > n) {
        q.skipped = true;
        q.reason = fmt::format("k = {} outside 1..{}", kk, s.size());
        return q;
    }
    q.k = static_cast<std::size_t>(kk);
    q.passed = s[q.k - 1] > delta;
    return q;
}

QuantileFloor quantile_floor_check(const SymmetrizedSpectrum& spectrum, double delta, int m, double C) {
    return quantile_floor_check(spectrum.singular_values(), delta, m, C);
}

LogTail log_integrability_tail(const std::vector<double>& s, double t) {
    if (!(t > 0.0)) throw DomainError("log_integrability_tail: t must be positive");
    if (s.empty()) throw DomainError("log_integrability_tail: empty spectrum");
    LogTail out;
    double acc = 0.0;
    for (double x : s) {
        if (x <= 0.0) {
            out.infinite = true;
            out.integral = std::numeric_limits<double>::infinity();
            out.exceeds = true;
            return out;
        }
        acc += std::abs(std::log(x * x));
    }
    out.integral = acc / static_cast<double>(s.size());
    out.exceeds = out.integral > t;
    return out;
}

LogTail log_integrability_tail(const SymmetrizedSpectrum& spectrum, double t) {
    return log_integrability_tail(spectrum.singular_values(), t);
}

FrequencyReport quantile_floor_frequency(const EnsembleSpec& spec, cdouble z, double delta, double C,
                                         std::size_t trials, unsigned threads) {
    spec.validate(false);
    std::vector<QuantileFloor> r(trials);
    parallel_for(trials, threads, [&](std::size_t t) {
        r[t] = quantile_floor_check(shifted_singular_values(product(sample_factors(spec, t)), z), delta, spec.m, C);
    });
    FrequencyReport out;
    out.trials = trials;
    for (const auto& q : r) {
        if (q.skipped)
            ++out.skipped;
        else if (!q.passed)
            ++out.events;
    }
    const std::size_t used = trials - out.skipped;
    out.frequency = used == 0 ? 0.0 : static_cast<double>(out.events) / static_cast<double>(used);
    out.bound = C * std::pow(delta, 1.0 / (spec.m + 1));
    return out;
}

FrequencyReport log_tail_frequency(const EnsembleSpec& spec, cdouble z, double t_level, std::size_t trials,
                                   unsigned threads) {
    spec.validate(false);
    std::vector<LogTail> r(trials);
    parallel_for(trials, threads, [&](std::size_t t) {
        r[t] = log_integrability_tail(shifted_singular_values(product(sample_factors(spec, t)), z), t_level);
    });
    FrequencyReport out;
    out.trials = trials;
    for (const auto& x : r) out.events += x.exceeds ? 1 : 0;
    out.frequency = static_cast<double>(out.events) / static_cast<double>(trials);
    return out;
}

}  // namespace ellprod
