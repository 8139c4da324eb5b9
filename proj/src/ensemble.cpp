#include "ellprod/ensemble.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include <fmt/format.h>

namespace ellprod {

double Truncation::tau(std::size_t n) const {
    return std::pow(static_cast<double>(n), -tau_exponent);
}

void EnsembleSpec::validate(bool strict_rho) const {
    if (n < 2) throw DomainError(fmt::format("ensemble.n must be >= 2 (got {})", n));
    if (m < 2) throw DomainError(fmt::format("ensemble.m must be >= 2 (got {})", m));
    if (!std::isfinite(rho) || std::abs(rho) > 1.0)
        throw DomainError(fmt::format("ensemble.rho must satisfy |rho| <= 1 (got {})", rho));
    if (strict_rho && std::abs(rho) >= 1.0)
        throw DomainError(fmt::format("ensemble.rho must satisfy |rho| < 1 for limit-law runs (got {})", rho));
    if (entry_dist.kind == EntryKind::heavy_tail && !(entry_dist.exponent > 2.0))
        throw DomainError(
            fmt::format("ensemble.entry_dist.exponent must exceed 2 (got {})", entry_dist.exponent));
    if (truncation) {
        if (!(truncation->c > 0.0))
            throw DomainError(fmt::format("ensemble.truncation.c must be positive (got {})", truncation->c));
        if (!(truncation->tau_exponent > 0.0 && truncation->tau_exponent < 0.5))
            throw DomainError(fmt::format("ensemble.truncation.tau_exponent must lie in (0, 1/2) (got {})",
                                          truncation->tau_exponent));
    }
}

std::string entry_dist_name(const EntryDist& d) {
    switch (d.kind) {
        case EntryKind::gaussian: return "gaussian";
        case EntryKind::rademacher: return "rademacher";
        case EntryKind::heavy_tail: return "heavy_tail";
    }
    return "unknown";
}

nlohmann::json to_json(const EnsembleSpec& spec) {
    nlohmann::json j;
    j["n"] = spec.n;
    j["m"] = spec.m;
    j["rho"] = spec.rho;
    if (spec.entry_dist.kind == EntryKind::heavy_tail)
        j["entry_dist"] = {{"type", "heavy_tail"}, {"exponent", spec.entry_dist.exponent}};
    else
        j["entry_dist"] = entry_dist_name(spec.entry_dist);
    if (spec.truncation)
        j["truncation"] = {{"c", spec.truncation->c}, {"tau_exponent", spec.truncation->tau_exponent}};
    else
        j["truncation"] = nullptr;
    j["master_seed"] = spec.master_seed;
    return j;
}

namespace {

void reject_unknown(const nlohmann::json& j, std::initializer_list<const char*> allowed, const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* a : allowed)
            if (it.key() == a) ok = true;
        if (!ok) throw DomainError(fmt::format("unknown key '{}' in {}", it.key(), where));
    }
}

EntryDist entry_from_json(const nlohmann::json& j) {
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "gaussian") return EntryDist::gaussian();
        if (s == "rademacher") return EntryDist::rademacher();
        throw DomainError(fmt::format("ensemble.entry_dist: unknown distribution '{}'", s));
    }
    if (j.is_object()) {
        reject_unknown(j, {"type", "exponent"}, "ensemble.entry_dist");
        if (!j.contains("type") || j.at("type") != "heavy_tail" || !j.contains("exponent"))
            throw DomainError("ensemble.entry_dist: object form must be {\"type\": \"heavy_tail\", \"exponent\": a}");
        return EntryDist::heavy_tail(j.at("exponent").get<double>());
    }
    throw DomainError("ensemble.entry_dist must be a string or an object");
}

}  // namespace

EnsembleSpec ensemble_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw DomainError("ensemble must be a JSON object");
    reject_unknown(j, {"n", "m", "rho", "entry_dist", "truncation", "master_seed"}, "ensemble");
    EnsembleSpec s;
    try {
        if (j.contains("n")) {
            const auto n = j.at("n").get<long long>();
            if (n < 2) throw DomainError(fmt::format("ensemble.n must be >= 2 (got {})", n));
            s.n = static_cast<std::size_t>(n);
        }
        if (j.contains("m")) s.m = j.at("m").get<int>();
        if (j.contains("rho")) s.rho = j.at("rho").get<double>();
        if (j.contains("entry_dist")) s.entry_dist = entry_from_json(j.at("entry_dist"));
        if (j.contains("truncation") && !j.at("truncation").is_null()) {
            const auto& t = j.at("truncation");
            reject_unknown(t, {"c", "tau_exponent"}, "ensemble.truncation");
            Truncation tr;
            if (t.contains("c")) tr.c = t.at("c").get<double>();
            if (t.contains("tau_exponent")) tr.tau_exponent = t.at("tau_exponent").get<double>();
            s.truncation = tr;
        }
        if (j.contains("master_seed")) s.master_seed = j.at("master_seed").get<std::uint64_t>();
    } catch (const nlohmann::json::type_error& e) {
        throw DomainError(fmt::format("ensemble: {}", e.what()));
    }
    s.validate(false);
    return s;
}

namespace {

struct EntrySampler {
    explicit EntrySampler(const EntryDist& d) : dist(d) {
        if (d.kind == EntryKind::heavy_tail) heavy_scale = std::sqrt((d.exponent - 2.0) / d.exponent);
    }

    double marginal(Rng& rng) {
        switch (dist.kind) {
            case EntryKind::gaussian: return normal(rng);
            case EntryKind::rademacher: return coin(rng) ? 1.0 : -1.0;
            case EntryKind::heavy_tail: {
                const double u = 1.0 - unif(rng);  // (0, 1]
                const double mag = std::pow(u, -1.0 / dist.exponent);
                return (coin(rng) ? mag : -mag) * heavy_scale;
            }
        }
        return 0.0;
    }

    std::pair<double, double> pair(double rho, Rng& rng) {
        if (dist.kind == EntryKind::gaussian) {
            const double a = std::sqrt((1.0 + rho) / 2.0);
            const double b = std::sqrt((1.0 - rho) / 2.0);
            const double xi = normal(rng);
            const double eta = normal(rng);
            return {a * xi + b * eta, a * xi - b * eta};
        }
        const double x = marginal(rng);
        const bool agree = unif(rng) < (1.0 + rho) / 2.0;
        return {x, agree ? x : -x};
    }

    EntryDist dist;
    double heavy_scale = 1.0;
    std::normal_distribution<double> normal{0.0, 1.0};
    std::uniform_real_distribution<double> unif{0.0, 1.0};
    std::bernoulli_distribution coin{0.5};
};

void check_rho(double rho) {
    if (!std::isfinite(rho) || std::abs(rho) > 1.0)
        throw DomainError(fmt::format("rho must satisfy |rho| <= 1 (got {})", rho));
}

}  // namespace

double sample_marginal(const EntryDist& dist, Rng& rng) {
    EntrySampler s(dist);
    return s.marginal(rng);
}

std::pair<double, double> sample_correlated_pair(double rho, const EntryDist& dist, Rng& rng) {
    check_rho(rho);
    EntrySampler s(dist);
    return s.pair(rho, rng);
}

RealMatrix sample_elliptic_matrix(const EnsembleSpec& spec, Rng& rng) {
    spec.validate(false);
    const std::size_t n = spec.n;
    EntrySampler s(spec.entry_dist);
    RealMatrix out{DMatrix(n, n), 1.0};
    for (std::size_t j = 0; j < n; ++j) out.entries(j, j) = s.marginal(rng);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = j + 1; k < n; ++k) {
            const auto [x, y] = s.pair(spec.rho, rng);
            out.entries(j, k) = x;
            out.entries(k, j) = y;
        }
    return out;
}

RealMatrix sample_elliptic_matrix(const EnsembleSpec& spec, int factor_index, std::uint64_t trial) {
    if (factor_index < 1 || factor_index > spec.m)
        throw DomainError(fmt::format("factor_index must lie in 1..{} (got {})", spec.m, factor_index));
    Rng rng = make_rng(spec.master_seed, trial, kFactorStream + static_cast<std::uint64_t>(factor_index));
    return sample_elliptic_matrix(spec, rng);
}

std::vector<RealMatrix> sample_factors(const EnsembleSpec& spec, std::uint64_t trial) {
    std::vector<RealMatrix> out;
    out.reserve(static_cast<std::size_t>(spec.m));
    for (int q = 1; q <= spec.m; ++q) out.push_back(sample_elliptic_matrix(spec, q, trial));
    return out;
}

EnsembleSpec with_size(const EnsembleSpec& spec, std::size_t n) {
    EnsembleSpec s = spec;
    s.n = n;
    s.master_seed = derive_seed(spec.master_seed, n, kAuxStream);
    return s;
}

RealMatrix truncate_and_center(const RealMatrix& matrix, double c, double tau_n) {
    if (!matrix.is_raw()) throw ContractError("truncate_and_center: matrix must carry raw entries (scale 1)");
    if (!(c > 0.0) || !(tau_n > 0.0)) throw DomainError("truncate_and_center: c and tau_n must be positive");
    const double threshold = c * tau_n * std::sqrt(static_cast<double>(matrix.rows()));
    RealMatrix out = matrix;
    double sum = 0.0;
    for (double& x : out.entries.data()) {
        if (std::abs(x) > threshold) x = 0.0;
        sum += x;
    }
    const double mean = sum / static_cast<double>(out.entries.data().size());
    for (double& x : out.entries.data()) x -= mean;
    return out;
}

double lindeberg_ratio(const std::vector<RealMatrix>& matrices, double tau) {
    if (matrices.empty()) throw DomainError("lindeberg_ratio: empty matrix list");
    const std::size_t n = matrices.front().rows();
    const double threshold = tau * std::sqrt(static_cast<double>(n));
    double best = 0.0;
    for (const RealMatrix& m : matrices) {
        if (m.rows() != n || m.cols() != n) throw DomainError("lindeberg_ratio: matrices differ in size");
        if (!m.is_raw()) throw ContractError("lindeberg_ratio: matrices must carry raw entries");
        double s = 0.0;
        for (double x : m.entries.data())
            if (std::abs(x) >= threshold) s += x * x;
        best = std::max(best, s / static_cast<double>(n * n));
    }
    return best;
}

RealMatrix interpolate(const RealMatrix& x, const RealMatrix& y, double phi) {
    if (x.rows() != y.rows() || x.cols() != y.cols()) throw DomainError("interpolate: dimension mismatch");
    if (x.scale != y.scale) throw DomainError("interpolate: scale mismatch");
    constexpr double half_pi = std::numbers::pi / 2.0;
    if (!(phi >= 0.0 && phi <= half_pi)) throw DomainError("interpolate: phi must lie in [0, pi/2]");
    if (phi == 0.0) return x;
    if (phi == half_pi) return y;
    const double c = std::cos(phi);
    const double s = std::sin(phi);
    RealMatrix out = x;
    auto& d = out.entries.data();
    const auto& yd = y.entries.data();
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = c * d[i] + s * yd[i];
    return out;
}

std::string matrix_to_csv(const RealMatrix& m) {
    std::string out = "i,j,value\n";
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            out += fmt::format("{},{},{:.17g}\n", i, j, m.entries(i, j));
    return out;
}

}  // namespace ellprod
