#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ellprod/linalg.hpp"
#include "ellprod/rng.hpp"

namespace ellprod {

enum class EntryKind { gaussian, rademacher, heavy_tail };

// Heavy tail is a symmetrized Pareto law with P(|x| > t) = t^-exponent for
// t >= 1, rescaled to unit variance; exponent must exceed 2.
struct EntryDist {
    EntryKind kind = EntryKind::gaussian;
    double exponent = 0.0;

    static EntryDist gaussian() { return {}; }
    static EntryDist rademacher() { return {EntryKind::rademacher, 0.0}; }
    static EntryDist heavy_tail(double exponent) { return {EntryKind::heavy_tail, exponent}; }

    bool operator==(const EntryDist&) const = default;
};

struct Truncation {
    double c = 1.0;
    double tau_exponent = 0.125;

    // tau_n = n^-tau_exponent
    double tau(std::size_t n) const;
    bool operator==(const Truncation&) const = default;
};

struct EnsembleSpec {
    std::size_t n = 64;
    int m = 2;
    double rho = 0.0;
    EntryDist entry_dist;
    std::optional<Truncation> truncation;
    std::uint64_t master_seed = 0;

    // Throws DomainError naming the violated invariant. `strict_rho`
    // demands |rho| < 1, as needed whenever the run is compared with the
    // limit law.
    void validate(bool strict_rho = false) const;
    bool operator==(const EnsembleSpec&) const = default;
};

nlohmann::json to_json(const EnsembleSpec& spec);
// Rejects unknown keys and type mismatches with DomainError.
EnsembleSpec ensemble_from_json(const nlohmann::json& j);
std::string entry_dist_name(const EntryDist& d);

struct RealMatrix {
    DMatrix entries;
    // 1 for raw entries X_jk, n^-1/2 once scaled.
    double scale = 1.0;

    std::size_t rows() const { return entries.rows(); }
    std::size_t cols() const { return entries.cols(); }
    bool is_raw() const { return scale == 1.0; }
    double operator()(std::size_t i, std::size_t j) const { return entries(i, j); }
    bool operator==(const RealMatrix&) const = default;
};

double sample_marginal(const EntryDist& dist, Rng& rng);
std::pair<double, double> sample_correlated_pair(double rho, const EntryDist& dist, Rng& rng);

// Factor q (1-based) of trial `trial`; seeded from (master_seed, trial, q).
RealMatrix sample_elliptic_matrix(const EnsembleSpec& spec, int factor_index, std::uint64_t trial = 0);
RealMatrix sample_elliptic_matrix(const EnsembleSpec& spec, Rng& rng);
std::vector<RealMatrix> sample_factors(const EnsembleSpec& spec, std::uint64_t trial);

// Copy of spec at dimension n with a master seed private to that n, so the
// levels of an n ladder draw from unrelated streams.
EnsembleSpec with_size(const EnsembleSpec& spec, std::size_t n);

RealMatrix truncate_and_center(const RealMatrix& matrix, double c, double tau_n);
double lindeberg_ratio(const std::vector<RealMatrix>& matrices, double tau);
RealMatrix interpolate(const RealMatrix& x, const RealMatrix& y, double phi);

// CSV with header "i,j,value", row-major, 0-based indices.
std::string matrix_to_csv(const RealMatrix& m);

}  // namespace ellprod
