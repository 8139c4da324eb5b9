#include "ellprod/stieltjes.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "ellprod/parallel.hpp"
#include "ellprod/statistics.hpp"

namespace ellprod {

std::string form_name(SystemForm f) { return f == SystemForm::theorem ? "theorem" : "statement"; }

SystemForm form_from_name(const std::string& name) {
    if (name == "theorem") return SystemForm::theorem;
    if (name == "statement") return SystemForm::statement;
    throw DomainError(fmt::format("unknown system form '{}' (expected 'theorem' or 'statement')", name));
}

void StieltjesQuery::validate() const {
    if (!(alpha.imag() > 0.0)) throw DomainError("stieltjes: Im alpha must be positive");
    if (m < 2) throw DomainError(fmt::format("stieltjes: m must be >= 2 (got {})", m));
}

namespace {

cdouble ipow(cdouble x, int k) {
    cdouble r = 1.0;
    for (int i = 0; i < k; ++i) r *= x;
    return r;
}

struct System {
    cdouble alpha;
    double zz;  // |z|^2
    int m;
    SystemForm form;
    double sigma;

    System(const StieltjesQuery& q, double v)
        : alpha(q.alpha.real(), v), zz(std::norm(q.z)), m(q.m), form(q.form), sigma(q.m % 2 == 1 ? 1.0 : -1.0) {}

    bool zero_z() const { return zz == 0.0; }

    // Power of w in the first equation.
    int wpow() const { return form == SystemForm::statement ? m - 1 : m; }

    cdouble f1(cdouble s, cdouble d) const {
        const cdouble w = alpha + d;
        return 1.0 + w * s + sigma * ipow(w, wpow()) * ipow(s, m + 1);
    }

    cdouble f2(cdouble s, cdouble d) const {
        if (form == SystemForm::statement) return s * d * d + d - s * zz;
        return d * d + d - 4.0 * zz * s;
    }

    double residual(cdouble s, cdouble d) const { return std::max(std::abs(f1(s, d)), std::abs(f2(s, d))); }

    // Both roots of the quadratic in d for fixed s.
    std::array<cdouble, 2> roots(cdouble s) const {
        const cdouble a = form == SystemForm::statement ? s : cdouble(1.0);
        const cdouble b = 1.0;
        const cdouble c = form == SystemForm::statement ? -s * zz : -4.0 * zz * s;
        if (c == 0.0) return {cdouble(0.0), -b / a};
        cdouble sq = std::sqrt(b * b - 4.0 * a * c);
        if ((std::conj(b) * sq).real() < 0.0) sq = -sq;
        const cdouble q = -0.5 * (b + sq);
        return {c / q, q / a};
    }

    // Root with Im d > 0 closest to the previous iterate. At z = 0 the
    // continuous branch is d = 0.
    cdouble pick(cdouble s, cdouble d_prev) const {
        if (zero_z()) return 0.0;
        const auto r = roots(s);
        const bool p0 = r[0].imag() > 0.0, p1 = r[1].imag() > 0.0;
        if (p0 != p1) return p0 ? r[0] : r[1];
        return std::abs(r[0] - d_prev) <= std::abs(r[1] - d_prev) ? r[0] : r[1];
    }

    cdouble small_root_hint(cdouble s) const {
        return form == SystemForm::statement ? s * zz : 4.0 * zz * s;
    }

    cdouble update(cdouble s, cdouble d) const {
        const cdouble w = alpha + d;
        return -1.0 / (w + sigma * ipow(w, wpow()) * ipow(s, m));
    }
};

void fixed_point(const System& sys, cdouble& s, cdouble& d, const SolverOptions& opt, int& iters) {
    double lam = opt.damping;
    d = sys.pick(s, d);
    double r = std::abs(sys.f1(s, d));
    for (int it = 0; it < opt.max_iter; ++it) {
        ++iters;
        const cdouble s_new = sys.update(s, d);
        const cdouble s2 = (1.0 - lam) * s + lam * s_new;
        const cdouble d2 = sys.pick(s2, d);
        const double r2 = std::abs(sys.f1(s2, d2));
        if (!(r2 <= r)) {
            lam *= 0.5;
            if (lam < 1e-4) break;
            continue;
        }
        s = s2;
        d = d2;
        r = r2;
        if (r < opt.handover) break;
    }
}

bool newton(const System& sys, cdouble& s, cdouble& d, double tol, int& iters) {
    const int wp = sys.wpow();
    const int m = sys.m;
    for (int it = 0; it < 60; ++it) {
        const cdouble f1 = sys.f1(s, d), f2 = sys.f2(s, d);
        if (std::max(std::abs(f1), std::abs(f2)) <= tol) return true;
        ++iters;
        const cdouble w = sys.alpha + d;
        const cdouble j11 = w + sys.sigma * double(m + 1) * ipow(w, wp) * ipow(s, m);
        const cdouble j12 = s + sys.sigma * double(wp) * ipow(w, wp - 1) * ipow(s, m + 1);
        cdouble j21, j22;
        if (sys.form == SystemForm::statement) {
            j21 = d * d - sys.zz;
            j22 = 2.0 * s * d + 1.0;
        } else {
            j21 = -4.0 * sys.zz;
            j22 = 2.0 * d + 1.0;
        }
        const cdouble det = j11 * j22 - j12 * j21;
        if (det == 0.0) return false;
        s += (-f1 * j22 + f2 * j12) / det;
        d += (-f2 * j11 + f1 * j21) / det;
        if (!std::isfinite(s.real()) || !std::isfinite(s.imag()) || !std::isfinite(d.real()) ||
            !std::isfinite(d.imag()))
            return false;
    }
    return sys.residual(s, d) <= tol;
}

enum class Failure { none, convergence, nevanlinna, branch };

Failure check(const System& sys, cdouble s, cdouble d) {
    const double v = sys.alpha.imag();
    if (!(s.imag() > 0.0) || std::abs(s) > (1.0 + 1e-9) / v) return Failure::nevanlinna;
    if (sys.zero_z()) return d == 0.0 ? Failure::none : Failure::branch;
    if (!(d.imag() > 0.0)) return Failure::branch;
    return Failure::none;
}

// One rung: damped fixed point then Newton; on failure Newton straight
// from the predictor.
Failure rung(const System& sys, cdouble& s, cdouble& d, const SolverOptions& opt, int& iters) {
    cdouble s1 = s, d1 = d;
    fixed_point(sys, s1, d1, opt, iters);
    Failure f = Failure::convergence;
    if (newton(sys, s1, d1, opt.tol, iters)) {
        f = check(sys, s1, d1);
        if (f == Failure::none) {
            s = s1;
            d = d1;
            return f;
        }
    }
    cdouble s2 = s, d2 = sys.zero_z() ? cdouble(0.0) : d;
    if (newton(sys, s2, d2, opt.tol, iters)) {
        const Failure f2 = check(sys, s2, d2);
        if (f2 == Failure::none) {
            s = s2;
            d = d2;
            return f2;
        }
        if (f == Failure::convergence) f = f2;
    }
    return f;
}

[[noreturn]] void raise(Failure f, const StieltjesQuery& q, const System& sys, cdouble s, cdouble d, int iters) {
    const std::string where = fmt::format("stieltjes[{}]: alpha=({:.6g},{:.6g}) z=({:.6g},{:.6g}) m={}",
                                          form_name(q.form), q.alpha.real(), q.alpha.imag(), q.z.real(),
                                          q.z.imag(), q.m);
    if (f == Failure::branch) throw BranchError(where + ": no quadratic root with Im(w - alpha) > 0");
    const double res = sys.residual(s, d);
    if (f == Failure::nevanlinna)
        throw ConvergenceError(where + ": solution violates Im s > 0, |s| <= 1/v", res, iters);
    throw ConvergenceError(fmt::format("{}: no convergence, residual {:.3g}", where, res), res, iters);
}

StieltjesSolution finish(const StieltjesQuery& q, cdouble s, cdouble d, int iters) {
    StieltjesSolution out;
    out.s = s;
    out.w = q.alpha + d;
    const Residuals r = system_residuals(q, out.s, out.w);
    out.residual_first = r.first;
    out.residual_second = r.second;
    out.iterations = iters;
    out.branch_ok = d.imag() > 0.0 || (q.z == 0.0 && d == 0.0);
    return out;
}

}  // namespace

Residuals system_residuals(const StieltjesQuery& q, cdouble s, cdouble w) {
    const System sys(q, q.alpha.imag());
    const cdouble d = w - q.alpha;
    return {std::abs(sys.f1(s, d)), std::abs(sys.f2(s, d))};
}

StieltjesSolution solve_system(const StieltjesQuery& query, std::optional<cdouble> init, double tol, int max_iter) {
    SolverOptions opt;
    opt.tol = tol;
    opt.max_iter = max_iter;
    return solve_system(query, init, opt);
}

StieltjesSolution solve_system(const StieltjesQuery& query, std::optional<cdouble> init, const SolverOptions& opt) {
    query.validate();
    if (!(opt.tol > 0.0)) throw DomainError("stieltjes: tol must be positive");
    if (opt.max_iter < 1) throw DomainError("stieltjes: max_iter must be positive");
    const double v = query.alpha.imag();
    int iters = 0;
    const System target(query, v);

    if (init) {
        cdouble s = *init;
        cdouble d = target.pick(s, target.small_root_hint(s));
        if (rung(target, s, d, opt, iters) == Failure::none) return finish(query, s, d, iters);
    }

    std::vector<double> ladder;
    for (double vk = opt.v_start; vk > v; vk *= opt.ladder_ratio) ladder.push_back(vk);
    ladder.push_back(v);

    cdouble s = -1.0 / cdouble(query.alpha.real(), ladder.front());
    cdouble d = System(query, ladder.front()).small_root_hint(s);
    for (double vk : ladder) {
        const System sys(query, vk);
        const Failure f = rung(sys, s, d, opt, iters);
        if (f != Failure::none) raise(f, query, sys, s, d, iters);
    }
    return finish(query, s, d, iters);
}

double DensityProfile::mass() const {
    double total = 0.0;
    for (std::size_t i = 1; i < x.size(); ++i) total += 0.5 * (density[i] + density[i - 1]) * (x[i] - x[i - 1]);
    return total;
}

std::vector<double> DensityProfile::cdf() const {
    // Mass missing from the grid (the Cauchy tails of the eps-smoothing)
    // is split evenly between both ends, which keeps a genuine
    // normalisation defect visible at the right end.
    const double missing = 1.0 - mass();
    std::vector<double> out(x.size(), 0.0);
    double acc = 0.5 * missing;
    if (!out.empty()) out[0] = acc;
    for (std::size_t i = 1; i < x.size(); ++i) {
        acc += 0.5 * (density[i] + density[i - 1]) * (x[i] - x[i - 1]);
        out[i] = acc;
    }
    return out;
}

DensityProfile density_from_inversion(cdouble z, int m, SystemForm form, const std::vector<double>& x_grid,
                                      double eps, const SolverOptions& options, unsigned threads) {
    if (!(eps > 0.0)) throw DomainError("density_from_inversion: eps must be positive");
    if (x_grid.empty()) throw DomainError("density_from_inversion: empty grid");
    DensityProfile p;
    p.z = z;
    p.m = m;
    p.form = form;
    p.eps = eps;
    p.x = x_grid;
    const std::size_t n = x_grid.size();
    p.density.assign(n, 0.0);
    p.solutions.assign(n, StieltjesSolution{});
    p.ok.assign(n, false);
    p.errors.assign(n, std::string{});
    constexpr double clip = 1e-14;
    parallel_for(n, threads, [&](std::size_t i) {
        const StieltjesQuery q{cdouble(x_grid[i], eps), z, m, form};
        try {
            const StieltjesSolution sol = solve_system(q, std::nullopt, options);
            p.solutions[i] = sol;
            p.ok[i] = true;
            const double im = sol.s.imag();
            p.density[i] = std::abs(im) < clip ? 0.0 : std::max(0.0, im / std::numbers::pi);
        } catch (const std::runtime_error& e) {
            p.errors[i] = e.what();
        }
    });
    p.failures = static_cast<std::size_t>(std::count(p.ok.begin(), p.ok.end(), false));
    return p;
}

std::vector<double> symmetric_grid(double half_width, std::size_t points) {
    if (points < 2 || !(half_width > 0.0)) throw DomainError("symmetric_grid: need >= 2 points and positive width");
    std::vector<double> x(points);
    for (std::size_t i = 0; i < points; ++i)
        x[i] = -half_width + 2.0 * half_width * static_cast<double>(i) / static_cast<double>(points - 1);
    return x;
}

double default_half_width(int m, cdouble z) {
    return std::sqrt(std::pow(m + 1.0, m + 1.0) / std::pow(static_cast<double>(m), m)) + std::abs(z) + 0.5;
}

double compare_with_empirical(const DensityProfile& profile, const std::vector<double>& values) {
    if (values.empty()) throw DomainError("compare_with_empirical: empty spectrum");
    const std::vector<double> g = profile.cdf();
    const std::vector<double>& x = profile.x;
    auto cdf = [&](double t) {
        if (t <= x.front()) return g.front();
        if (t >= x.back()) return g.back();
        const auto it = std::upper_bound(x.begin(), x.end(), t);
        const std::size_t i = static_cast<std::size_t>(it - x.begin());
        const double f = (t - x[i - 1]) / (x[i] - x[i - 1]);
        return g[i - 1] + f * (g[i] - g[i - 1]);
    };
    return ks_distance(values, cdf);
}

double compare_with_empirical(const DensityProfile& profile, const SymmetrizedSpectrum& spectrum) {
    return compare_with_empirical(profile, spectrum.values);
}

FormDiscrimination form_discrimination(cdouble z, int m, const std::vector<SymmetrizedSpectrum>& spectra,
                                       double eps, std::size_t grid_points, const SolverOptions& options,
                                       unsigned threads) {
    if (spectra.empty()) throw DomainError("form_discrimination: no spectra supplied");
    std::vector<double> pooled;
    double reach = default_half_width(m, z);
    for (const auto& s : spectra) {
        pooled.insert(pooled.end(), s.values.begin(), s.values.end());
        for (double v : s.values) reach = std::max(reach, std::abs(v) + 0.5);
    }
    const std::vector<double> grid = symmetric_grid(reach, grid_points);

    auto score = [&](SystemForm form) {
        FormScore sc;
        sc.form = form;
        const DensityProfile p = density_from_inversion(z, m, form, grid, eps, options, threads);
        sc.failures = p.failures;
        sc.mass = p.mass();
        sc.delta = compare_with_empirical(p, pooled);
        double acc = 0.0;
        for (const auto& s : spectra) acc += compare_with_empirical(p, s);
        sc.mean_trial_delta = acc / static_cast<double>(spectra.size());
        return sc;
    };

    FormDiscrimination r;
    r.theorem = score(SystemForm::theorem);
    r.statement = score(SystemForm::statement);
    r.winner = r.theorem.delta < r.statement.delta ? SystemForm::theorem : SystemForm::statement;
    r.margin = std::abs(r.theorem.delta - r.statement.delta);
    r.insufficient_resolution = r.theorem.delta > 0.2 && r.statement.delta > 0.2;
    return r;
}

std::string profile_to_csv(const DensityProfile& p) {
    std::string out = "x,eps,density,s_re,s_im,w_re,w_im,iters,residual\n";
    for (std::size_t i = 0; i < p.x.size(); ++i) {
        const auto& s = p.solutions[i];
        if (p.ok[i]) {
            out += fmt::format("{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{},{:.3e}\n", p.x[i], p.eps,
                               p.density[i], s.s.real(), s.s.imag(), s.w.real(), s.w.imag(), s.iterations,
                               std::max(s.residual_first, s.residual_second));
        } else {
            out += fmt::format("{:.17g},{:.17g},nan,nan,nan,nan,nan,-1,nan\n", p.x[i], p.eps);
        }
    }
    return out;
}

}  // namespace ellprod
