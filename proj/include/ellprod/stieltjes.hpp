#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "ellprod/spectra.hpp"

namespace ellprod {

// Two variants of the system for the Stieltjes transform s of
// the symmetrized singular-value law, with d = w - alpha and sigma = (-1)^(m+1):
//   theorem:   1 + w s + sigma w^m s^(m+1) = 0,      d^2 + d - 4|z|^2 s = 0
//   statement: 1 + w s + sigma w^(m-1) s^(m+1) = 0,  s d^2 + d - s|z|^2 = 0
enum class SystemForm { theorem, statement };

std::string form_name(SystemForm f);
SystemForm form_from_name(const std::string& name);

struct StieltjesQuery {
    cdouble alpha;
    cdouble z;
    int m = 2;
    SystemForm form = SystemForm::statement;

    void validate() const;
};

struct StieltjesSolution {
    cdouble s;
    cdouble w;
    double residual_first = 0.0;
    double residual_second = 0.0;
    int iterations = 0;
    bool branch_ok = false;
};

struct SolverOptions {
    double tol = 1e-12;
    int max_iter = 500;
    double damping = 0.5;
    double v_start = 10.0;
    double ladder_ratio = 0.85;
    // Residual at which the damped iteration hands over to Newton.
    double handover = 1e-6;
};

struct Residuals {
    double first = 0.0;
    double second = 0.0;
};
Residuals system_residuals(const StieltjesQuery& q, cdouble s, cdouble w);

// Damped fixed point with v-continuation and a Newton polish. With `init`
// the solve starts at the target from s = init and only falls back to the
// ladder when that fails. Throws ConvergenceError or BranchError.
StieltjesSolution solve_system(const StieltjesQuery& query, std::optional<cdouble> init, double tol,
                               int max_iter);
StieltjesSolution solve_system(const StieltjesQuery& query, std::optional<cdouble> init = std::nullopt,
                               const SolverOptions& options = {});

struct DensityProfile {
    cdouble z;
    int m = 2;
    SystemForm form = SystemForm::statement;
    double eps = 0.01;
    std::vector<double> x;
    std::vector<double> density;  // 0 where the solve failed
    std::vector<StieltjesSolution> solutions;
    std::vector<bool> ok;
    std::vector<std::string> errors;
    std::size_t failures = 0;

    // Trapezoid mass over the grid.
    double mass() const;
    // Cumulative trapezoid, normalized to end at 1.
    std::vector<double> cdf() const;
};

DensityProfile density_from_inversion(cdouble z, int m, SystemForm form, const std::vector<double>& x_grid,
                                      double eps, const SolverOptions& options = {}, unsigned threads = 1);

// Evenly spaced grid on [-half_width, half_width].
std::vector<double> symmetric_grid(double half_width, std::size_t points);
// Half width that covers the symmetrized singular values of W - zI.
double default_half_width(int m, cdouble z);

// Kolmogorov distance between the spectrum's empirical CDF and the
// integrated profile (linear interpolation between grid points).
double compare_with_empirical(const DensityProfile& profile, const SymmetrizedSpectrum& spectrum);
double compare_with_empirical(const DensityProfile& profile, const std::vector<double>& values);

struct FormScore {
    SystemForm form = SystemForm::statement;
    double delta = 1.0;       // pooled over all spectra
    double mean_trial_delta = 1.0;
    double mass = 0.0;
    std::size_t failures = 0;
};

struct FormDiscrimination {
    FormScore theorem;
    FormScore statement;
    SystemForm winner = SystemForm::statement;
    double margin = 0.0;
    bool insufficient_resolution = false;

    const FormScore& winning() const { return winner == SystemForm::theorem ? theorem : statement; }
};

FormDiscrimination form_discrimination(cdouble z, int m, const std::vector<SymmetrizedSpectrum>& spectra,
                                       double eps = 0.005, std::size_t grid_points = 2001,
                                       const SolverOptions& options = {}, unsigned threads = 1);

// CSV "x,eps,density,s_re,s_im,w_re,w_im,iters,residual"
std::string profile_to_csv(const DensityProfile& p);

}  // namespace ellprod
