#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "ellprod/linalg.hpp"

namespace ellprod {

struct LimitLawCriteria {
    std::size_t n = 256;
    int m = 2;
    double rho = 0.5;
    double rho_baseline = 0.0;
    std::size_t trials = 20;
    double ks_threshold = 0.05;
    double kuiper_constant = 1.9;
    double two_sample_threshold = 0.03;
    double rademacher_threshold = 0.06;
    double runtime_limit_s = 300.0;
};

struct LinearizationCriteria {
    std::size_t instances = 100;
    std::size_t max_n = 64;
    double symmetry_tol = 1e-8;
    double svd_tol = 1e-6;
};

struct SolverCriteria {
    std::vector<cdouble> z_list{cdouble(0.0, 0.0), cdouble(0.5, 0.0), cdouble(0.5, 0.5)};
    std::vector<int> m_list{2, 3};
    double u_min = -3.5;
    double u_max = 3.5;
    std::size_t u_points = 50;
    std::vector<double> v_list{0.005, 0.02, 0.1, 0.5};
    double tol = 1e-12;
    double mass_eps = 0.01;
    std::size_t mass_points = 2001;
    double mass_tolerance = 0.03;
    double moment_eps = 0.005;
    std::size_t moment_points = 4001;
    double moment_tolerance = 0.02;
};

struct DeltaCriteria {
    std::size_t n = 512;
    int m = 2;
    double rho = 0.5;
    cdouble z{0.5, 0.2};
    std::size_t trials = 10;
    double threshold = 0.08;
    double eps = 0.005;
    std::size_t grid_points = 2001;
};

struct PotentialCriteria {
    std::size_t n = 256;
    int m = 2;
    double rho = 0.5;
    std::size_t trials = 40;
    double step = 0.05;
    double extent = 1.0;
    double r_min = 0.4;
    double r_max = 0.85;
    double tolerance = 0.15;
    double analytic_step = 1e-3;
    double analytic_r_min = 0.3;
    double analytic_r_max = 0.9;
    double analytic_tolerance = 0.01;
    double runtime_limit_s = 1200.0;
};

struct TailCriteria {
    std::vector<std::size_t> ladder{64, 128, 256};
    std::size_t trials = 500;
    double B = 2.0;
    double gamma = 0.7;
    cdouble z{0.5, 0.0};
    std::size_t prod1_instances = 1000;
    std::size_t prod1_n = 8;
    double prod1_slack = -1e-9;
};

struct AppendixCriteria {
    std::size_t n = 64;
    int m = 2;
    double rho = 0.5;
    std::size_t mean_trials = 200;
    std::vector<std::size_t> frob_ladder{32, 64, 128, 256};
    std::size_t frob_trials = 50;
    double frob_low = 0.9;
    double frob_high = 1.1;
    double frob_ratio_max = 3.0;
    std::vector<std::size_t> var_ladder{32, 64, 128, 256};
    std::size_t var_trials = 200;
    double v = 2.0;
    cdouble z{0.5, 0.0};
    double var_low = -1.35;
    double var_high = -0.65;
};

struct VerifyConfig {
    std::uint64_t master_seed = 20240611;
    std::vector<int> criteria{1, 2, 3, 4, 5, 6, 7, 8, 9};
    LimitLawCriteria limit_law;
    LinearizationCriteria linearization;
    SolverCriteria solver;
    DeltaCriteria delta;
    PotentialCriteria potential;
    TailCriteria tail;
    AppendixCriteria appendix;

    bool enabled(int id) const;
    void validate() const;
};

nlohmann::json to_json(const VerifyConfig& c);
// Strict: unknown keys anywhere raise DomainError.
VerifyConfig verify_from_json(const nlohmann::json& j);

// A reduced configuration exercising every criterion in seconds.
VerifyConfig quick_verify_config();

struct VerificationResult {
    nlohmann::json report;  // deterministic given the config
    bool all_passed = false;
    // Wall-clock per criterion id, kept out of the report so reports stay
    // byte-identical across runs.
    std::map<int, double> seconds;
    // Criteria with a runtime budget, and whether the run met it.
    std::map<int, bool> runtime_ok;
};

VerificationResult run_verification(const VerifyConfig& config, unsigned threads = 1);

// SHA-256 of the canonical JSON dump, hex encoded.
std::string config_hash(const nlohmann::json& config);
std::string sha256_hex(const std::string& bytes);

}  // namespace ellprod
