#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "ellprod/ensemble.hpp"
#include "ellprod/linalg.hpp"

namespace ellprod {

struct ExperimentConfig {
    EnsembleSpec ensemble;
    std::size_t trials = 20;
    std::vector<cdouble> z_list{cdouble(0.5, 0.0)};
    std::vector<cdouble> alpha_grid{cdouble(-1.0, 1.0), cdouble(0.0, 1.0), cdouble(1.0, 1.0)};
    std::vector<std::size_t> ladder{64, 128, 256};
    bool radial_ks = true;
    bool kuiper = true;
    std::string output_dir = "out";
    unsigned threads = 1;

    void validate() const;
};

// Complex numbers are written as [re, im]; plain numbers are accepted on input.
nlohmann::json complex_to_json(cdouble z);
cdouble complex_from_json(const nlohmann::json& j, const std::string& where);

nlohmann::json to_json(const ExperimentConfig& c);
ExperimentConfig experiment_from_json(const nlohmann::json& j);

struct LimitLawReport {
    std::size_t trials = 0;
    std::size_t excluded = 0;
    bool exclusion_ok = true;  // excluded <= 1% of trials
    std::vector<double> radial_ks;
    double mean_radial_ks = 0.0;
    double ks_ci_low = 0.0;
    double ks_ci_high = 0.0;
    double kuiper = 0.0;  // pooled angles
    std::size_t pooled_count = 0;
    double real_fraction = 0.0;  // share of exactly real eigenvalues
    std::vector<double> pooled_radii;
    std::vector<double> pooled_angles;

    nlohmann::json summary() const;
};
LimitLawReport limit_law_experiment(const ExperimentConfig& config);

struct UniversalityLevel {
    std::size_t n = 0;
    std::vector<double> max_diff;  // per phi, max over alpha of |mean paired difference|
    std::vector<double> se_at_max;
    std::vector<double> max_z_score;  // max over alpha of |mean| / SE
};

struct UniversalityReport {
    std::vector<double> phi_list;
    std::vector<UniversalityLevel> levels;
    double slope = 0.0;  // log-log slope of max_diff in n for the last phi
    bool decreasing = false;

    nlohmann::json summary() const;
};
// Partner ensemble Y is Gaussian with the same rho. Resolvent traces come
// from the eigenvalues of the linearization.
UniversalityReport universality_sweep(const ExperimentConfig& config, const std::vector<double>& phi_list);

struct TruncationLevel {
    std::size_t n = 0;
    double tau_n = 0.0;
    double lindeberg = 0.0;
    double diff_v = 0.0;
    double diff_2v = 0.0;
    double shape_v = 0.0;  // sqrt(L_n) / v^2
    double shape_2v = 0.0;
};

struct TruncationReport {
    double v = 1.0;
    std::vector<TruncationLevel> levels;
    double fitted_c = 0.0;
    double slope = 0.0;
    bool decreasing = false;
    bool doubled_within_bound = false;

    nlohmann::json summary() const;
};
TruncationReport truncation_stability(const ExperimentConfig& config, double v = 1.0);

struct MeanCheck {
    int a = 1;
    int b = 1;
    double mean = 0.0;
    double std_error = 0.0;
    bool passed = false;  // |mean| <= 4 SE
};

struct AppendixReport {
    std::vector<MeanCheck> means;
    std::vector<std::size_t> frob_ladder;
    std::vector<double> frob_per_n;  // E||V_{1,m}||_F^2 / n
    double frob_slope = 0.0;
    double frob_ratio = 0.0;
    std::vector<std::size_t> var_ladder;
    std::vector<double> trace_variance;
    double var_slope = 0.0;
    double v = 2.0;
    cdouble z{};

    nlohmann::json summary() const;
};

struct AppendixOptions {
    std::size_t mean_trials = 200;
    std::size_t frob_trials = 50;
    std::size_t var_trials = 200;
    std::vector<std::size_t> frob_ladder{32, 64, 128, 256};
    std::vector<std::size_t> var_ladder{32, 64, 128, 256};
    double v = 2.0;
};
AppendixReport appendix_diagnostics(const ExperimentConfig& config, const AppendixOptions& options = {});

// (1/2n) sum_i 1/(lambda_i - alpha) for every alpha.
std::vector<cdouble> resolvent_traces(const std::vector<double>& eigenvalues, const std::vector<cdouble>& alphas);

}  // namespace ellprod
