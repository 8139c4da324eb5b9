#include "ellprod/verification.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numbers>

#include <fmt/format.h>
#include <openssl/evp.h>

#include "ellprod/harness.hpp"
#include "ellprod/limitlaw.hpp"
#include "ellprod/parallel.hpp"
#include "ellprod/potential.hpp"
#include "ellprod/spectra.hpp"
#include "ellprod/statistics.hpp"
#include "ellprod/stieltjes.hpp"

namespace ellprod {

using nlohmann::json;

bool VerifyConfig::enabled(int id) const { return std::find(criteria.begin(), criteria.end(), id) != criteria.end(); }

void VerifyConfig::validate() const {
    for (int id : criteria)
        if (id < 1 || id > 9) throw DomainError(fmt::format("criteria: id {} outside 1..9", id));
    auto positive = [](std::size_t v, const char* what) {
        if (v < 1) throw DomainError(fmt::format("{} must be >= 1", what));
    };
    positive(limit_law.trials, "limit_law.trials");
    positive(linearization.instances, "linearization.instances");
    positive(delta.trials, "delta.trials");
    positive(potential.trials, "potential.trials");
    positive(tail.trials, "tail.trials");
    positive(appendix.mean_trials, "appendix.mean_trials");
    if (!(std::abs(limit_law.rho) < 1.0) || !(std::abs(limit_law.rho_baseline) < 1.0))
        throw DomainError("limit_law.rho must satisfy |rho| < 1");
    if (!(std::abs(delta.rho) < 1.0)) throw DomainError("delta.rho must satisfy |rho| < 1");
    if (!(std::abs(potential.rho) < 1.0)) throw DomainError("potential.rho must satisfy |rho| < 1");
    if (!(std::abs(appendix.rho) < 1.0)) throw DomainError("appendix.rho must satisfy |rho| < 1");
    if (linearization.max_n < 2) throw DomainError("linearization.max_n must be >= 2");
    if (solver.u_points < 1 || solver.v_list.empty()) throw DomainError("solver grid must not be empty");
    for (double v : solver.v_list)
        if (!(v > 0.0)) throw DomainError("solver.v_list entries must be positive");
    if (!(potential.step > 0.0) || !(potential.analytic_step > 0.0)) throw DomainError("potential steps must be positive");
    if (tail.ladder.empty()) throw DomainError("tail.ladder must not be empty");
    if (!(tail.gamma > 8.0 / 15.0 && tail.gamma < 1.0)) throw DomainError("tail.gamma must lie in (8/15, 1)");
}

namespace {

// Strict reader for one JSON object: every key must be consumed.
class Reader {
public:
    Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw DomainError(fmt::format("{} must be a JSON object", label()));
    }

    template <typename T>
    void get(const char* key, T& out) {
        if (!j_.contains(key)) return;
        used_.emplace_back(key);
        try {
            out = j_.at(key).get<T>();
        } catch (const json::exception& e) {
            throw DomainError(fmt::format("{}.{}: {}", label(), key, e.what()));
        }
    }

    void complex(const char* key, cdouble& out) {
        if (!j_.contains(key)) return;
        used_.emplace_back(key);
        out = complex_from_json(j_.at(key), fmt::format("{}.{}", label(), key));
    }

    void complex_list(const char* key, std::vector<cdouble>& out) {
        if (!j_.contains(key)) return;
        used_.emplace_back(key);
        if (!j_.at(key).is_array()) throw DomainError(fmt::format("{}.{} must be an array", label(), key));
        out.clear();
        for (const auto& z : j_.at(key)) out.push_back(complex_from_json(z, fmt::format("{}.{}", label(), key)));
    }

    template <typename F>
    void object(const char* key, F&& fn) {
        if (!j_.contains(key)) return;
        used_.emplace_back(key);
        Reader sub(j_.at(key), path_.empty() ? key : path_ + "." + key);
        fn(sub);
        sub.done();
    }

    void done() const {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (std::find(used_.begin(), used_.end(), it.key()) == used_.end())
                throw DomainError(fmt::format("unknown key '{}' in {}", it.key(), label()));
    }

private:
    std::string label() const { return path_.empty() ? "verify config" : path_; }
    const json& j_;
    std::string path_;
    std::vector<std::string> used_;
};

json complex_list_json(const std::vector<cdouble>& v) {
    json a = json::array();
    for (const cdouble& z : v) a.push_back(complex_to_json(z));
    return a;
}

}  // namespace

json to_json(const VerifyConfig& c) {
    json j;
    j["master_seed"] = c.master_seed;
    j["criteria"] = c.criteria;
    const auto& l = c.limit_law;
    j["limit_law"] = {{"n", l.n},
                      {"m", l.m},
                      {"rho", l.rho},
                      {"rho_baseline", l.rho_baseline},
                      {"trials", l.trials},
                      {"ks_threshold", l.ks_threshold},
                      {"kuiper_constant", l.kuiper_constant},
                      {"two_sample_threshold", l.two_sample_threshold},
                      {"rademacher_threshold", l.rademacher_threshold},
                      {"runtime_limit_s", l.runtime_limit_s}};
    const auto& r = c.linearization;
    j["linearization"] = {
        {"instances", r.instances}, {"max_n", r.max_n}, {"symmetry_tol", r.symmetry_tol}, {"svd_tol", r.svd_tol}};
    const auto& s = c.solver;
    j["solver"] = {{"z_list", complex_list_json(s.z_list)},
                   {"m_list", s.m_list},
                   {"u_min", s.u_min},
                   {"u_max", s.u_max},
                   {"u_points", s.u_points},
                   {"v_list", s.v_list},
                   {"tol", s.tol},
                   {"mass_eps", s.mass_eps},
                   {"mass_points", s.mass_points},
                   {"mass_tolerance", s.mass_tolerance},
                   {"moment_eps", s.moment_eps},
                   {"moment_points", s.moment_points},
                   {"moment_tolerance", s.moment_tolerance}};
    const auto& d = c.delta;
    j["delta"] = {{"n", d.n},
                  {"m", d.m},
                  {"rho", d.rho},
                  {"z", complex_to_json(d.z)},
                  {"trials", d.trials},
                  {"threshold", d.threshold},
                  {"eps", d.eps},
                  {"grid_points", d.grid_points}};
    const auto& p = c.potential;
    j["potential"] = {{"n", p.n},
                      {"m", p.m},
                      {"rho", p.rho},
                      {"trials", p.trials},
                      {"step", p.step},
                      {"extent", p.extent},
                      {"r_min", p.r_min},
                      {"r_max", p.r_max},
                      {"tolerance", p.tolerance},
                      {"analytic_step", p.analytic_step},
                      {"analytic_r_min", p.analytic_r_min},
                      {"analytic_r_max", p.analytic_r_max},
                      {"analytic_tolerance", p.analytic_tolerance},
                      {"runtime_limit_s", p.runtime_limit_s}};
    const auto& t = c.tail;
    j["tail"] = {{"ladder", t.ladder},
                 {"trials", t.trials},
                 {"B", t.B},
                 {"gamma", t.gamma},
                 {"z", complex_to_json(t.z)},
                 {"prod1_instances", t.prod1_instances},
                 {"prod1_n", t.prod1_n},
                 {"prod1_slack", t.prod1_slack}};
    const auto& a = c.appendix;
    j["appendix"] = {{"n", a.n},
                     {"m", a.m},
                     {"rho", a.rho},
                     {"mean_trials", a.mean_trials},
                     {"frob_ladder", a.frob_ladder},
                     {"frob_trials", a.frob_trials},
                     {"frob_low", a.frob_low},
                     {"frob_high", a.frob_high},
                     {"frob_ratio_max", a.frob_ratio_max},
                     {"var_ladder", a.var_ladder},
                     {"var_trials", a.var_trials},
                     {"v", a.v},
                     {"z", complex_to_json(a.z)},
                     {"var_low", a.var_low},
                     {"var_high", a.var_high}};
    return j;
}

VerifyConfig verify_from_json(const json& j) {
    VerifyConfig c;
    Reader top(j, "");
    top.get("master_seed", c.master_seed);
    top.get("criteria", c.criteria);
    top.object("limit_law", [&](Reader& r) {
        auto& l = c.limit_law;
        r.get("n", l.n);
        r.get("m", l.m);
        r.get("rho", l.rho);
        r.get("rho_baseline", l.rho_baseline);
        r.get("trials", l.trials);
        r.get("ks_threshold", l.ks_threshold);
        r.get("kuiper_constant", l.kuiper_constant);
        r.get("two_sample_threshold", l.two_sample_threshold);
        r.get("rademacher_threshold", l.rademacher_threshold);
        r.get("runtime_limit_s", l.runtime_limit_s);
    });
    top.object("linearization", [&](Reader& r) {
        auto& l = c.linearization;
        r.get("instances", l.instances);
        r.get("max_n", l.max_n);
        r.get("symmetry_tol", l.symmetry_tol);
        r.get("svd_tol", l.svd_tol);
    });
    top.object("solver", [&](Reader& r) {
        auto& s = c.solver;
        r.complex_list("z_list", s.z_list);
        r.get("m_list", s.m_list);
        r.get("u_min", s.u_min);
        r.get("u_max", s.u_max);
        r.get("u_points", s.u_points);
        r.get("v_list", s.v_list);
        r.get("tol", s.tol);
        r.get("mass_eps", s.mass_eps);
        r.get("mass_points", s.mass_points);
        r.get("mass_tolerance", s.mass_tolerance);
        r.get("moment_eps", s.moment_eps);
        r.get("moment_points", s.moment_points);
        r.get("moment_tolerance", s.moment_tolerance);
    });
    top.object("delta", [&](Reader& r) {
        auto& d = c.delta;
        r.get("n", d.n);
        r.get("m", d.m);
        r.get("rho", d.rho);
        r.complex("z", d.z);
        r.get("trials", d.trials);
        r.get("threshold", d.threshold);
        r.get("eps", d.eps);
        r.get("grid_points", d.grid_points);
    });
    top.object("potential", [&](Reader& r) {
        auto& p = c.potential;
        r.get("n", p.n);
        r.get("m", p.m);
        r.get("rho", p.rho);
        r.get("trials", p.trials);
        r.get("step", p.step);
        r.get("extent", p.extent);
        r.get("r_min", p.r_min);
        r.get("r_max", p.r_max);
        r.get("tolerance", p.tolerance);
        r.get("analytic_step", p.analytic_step);
        r.get("analytic_r_min", p.analytic_r_min);
        r.get("analytic_r_max", p.analytic_r_max);
        r.get("analytic_tolerance", p.analytic_tolerance);
        r.get("runtime_limit_s", p.runtime_limit_s);
    });
    top.object("tail", [&](Reader& r) {
        auto& t = c.tail;
        r.get("ladder", t.ladder);
        r.get("trials", t.trials);
        r.get("B", t.B);
        r.get("gamma", t.gamma);
        r.complex("z", t.z);
        r.get("prod1_instances", t.prod1_instances);
        r.get("prod1_n", t.prod1_n);
        r.get("prod1_slack", t.prod1_slack);
    });
    top.object("appendix", [&](Reader& r) {
        auto& a = c.appendix;
        r.get("n", a.n);
        r.get("m", a.m);
        r.get("rho", a.rho);
        r.get("mean_trials", a.mean_trials);
        r.get("frob_ladder", a.frob_ladder);
        r.get("frob_trials", a.frob_trials);
        r.get("frob_low", a.frob_low);
        r.get("frob_high", a.frob_high);
        r.get("frob_ratio_max", a.frob_ratio_max);
        r.get("var_ladder", a.var_ladder);
        r.get("var_trials", a.var_trials);
        r.get("v", a.v);
        r.complex("z", a.z);
        r.get("var_low", a.var_low);
        r.get("var_high", a.var_high);
    });
    top.done();
    c.validate();
    return c;
}

VerifyConfig quick_verify_config() {
    VerifyConfig c;
    c.limit_law.n = 48;
    c.limit_law.trials = 4;
    c.linearization.instances = 10;
    c.linearization.max_n = 12;
    c.solver.z_list = {cdouble(0.0, 0.0), cdouble(0.5, 0.2)};
    c.solver.m_list = {2};
    c.solver.u_points = 10;
    c.solver.v_list = {0.05, 0.5};
    c.solver.mass_points = 401;
    c.solver.moment_points = 801;
    c.delta.n = 32;
    c.delta.trials = 3;
    c.delta.grid_points = 401;
    c.potential.n = 32;
    c.potential.trials = 4;
    c.potential.step = 0.25;
    c.potential.analytic_step = 0.02;
    c.tail.ladder = {16, 32};
    c.tail.trials = 20;
    c.tail.prod1_instances = 20;
    c.appendix.n = 16;
    c.appendix.mean_trials = 10;
    c.appendix.frob_ladder = {8, 16};
    c.appendix.frob_trials = 5;
    c.appendix.var_ladder = {8, 16};
    c.appendix.var_trials = 10;
    return c;
}

std::string sha256_hex(const std::string& bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr);
    std::string out;
    for (unsigned int i = 0; i < len; ++i) out += fmt::format("{:02x}", digest[i]);
    return out;
}

std::string config_hash(const json& config) { return sha256_hex(config.dump()); }

namespace {

struct Criterion {
    int id;
    std::string title;
    json checks = json::array();
    json details = json::object();
    bool passed = true;

    void check(const std::string& name, double value, const std::string& cmp, json threshold,
               std::size_t sample_size, bool ok) {
        checks.push_back({{"name", name},
                          {"value", value},
                          {"comparison", cmp},
                          {"threshold", std::move(threshold)},
                          {"sample_size", sample_size},
                          {"passed", ok}});
        passed = passed && ok;
    }

    void at_most(const std::string& name, double value, double threshold, std::size_t n) {
        check(name, value, "<=", threshold, n, value <= threshold);
    }

    void within(const std::string& name, double value, double lo, double hi, std::size_t n) {
        check(name, value, "in", json::array({lo, hi}), n, value >= lo && value <= hi);
    }

    json to_json() const {
        return {{"id", id}, {"title", title}, {"passed", passed}, {"checks", checks}, {"details", details}};
    }
};

EnsembleSpec make_spec(std::size_t n, int m, double rho, EntryDist dist, std::uint64_t seed) {
    EnsembleSpec s;
    s.n = n;
    s.m = m;
    s.rho = rho;
    s.entry_dist = dist;
    s.master_seed = seed;
    return s;
}

class Runner {
public:
    Runner(const VerifyConfig& c, unsigned threads) : cfg_(c), threads_(threads) {}

    std::uint64_t seed(int criterion, std::uint64_t variant = 0) const {
        return derive_seed(cfg_.master_seed, static_cast<std::uint64_t>(criterion), kAuxStream + variant);
    }

    const LimitLawReport& limit_run(int variant) {
        auto it = limit_cache_.find(variant);
        if (it != limit_cache_.end()) return it->second;
        const auto& l = cfg_.limit_law;
        ExperimentConfig ec;
        ec.trials = l.trials;
        ec.threads = threads_;
        if (variant == 0) ec.ensemble = make_spec(l.n, l.m, l.rho, EntryDist::gaussian(), seed(1));
        if (variant == 1) ec.ensemble = make_spec(l.n, l.m, l.rho_baseline, EntryDist::gaussian(), seed(2));
        if (variant == 2) ec.ensemble = make_spec(l.n, l.m, l.rho, EntryDist::rademacher(), seed(3));
        return limit_cache_.emplace(variant, limit_law_experiment(ec)).first->second;
    }

    Criterion limit_law_criterion(int id, int variant, double ks_threshold, const std::string& title) {
        Criterion c{id, title};
        const auto& l = cfg_.limit_law;
        const LimitLawReport& r = limit_run(variant);
        c.at_most("mean radial KS vs r^(2/m)", r.mean_radial_ks, ks_threshold, r.radial_ks.size());
        const double kuiper_thr = l.kuiper_constant / std::sqrt(static_cast<double>(l.trials * l.n));
        c.at_most("Kuiper of pooled angles vs uniform", r.kuiper, kuiper_thr, r.pooled_count);
        c.at_most("excluded trial fraction", static_cast<double>(r.excluded) / r.trials, 0.01, r.trials);
        c.details = r.summary();
        return c;
    }

    Criterion c1() {
        const auto& l = cfg_.limit_law;
        return limit_law_criterion(1, 0, l.ks_threshold,
                                   fmt::format("limit law, n={}, m={}, Gaussian, rho={}", l.n, l.m, l.rho));
    }

    Criterion c2() {
        const auto& l = cfg_.limit_law;
        Criterion c{2, fmt::format("rho-independence, rho={} vs rho={}", l.rho_baseline, l.rho)};
        const LimitLawReport& a = limit_run(0);
        const LimitLawReport& b = limit_run(1);
        const double ks = ks_two_sample(a.pooled_radii, b.pooled_radii);
        c.at_most("two-sample KS of pooled radii", ks, l.two_sample_threshold,
                  std::min(a.pooled_radii.size(), b.pooled_radii.size()));
        c.details = {{"baseline", b.summary()}, {"correlated", a.summary()}};
        return c;
    }

    Criterion c3() {
        const auto& l = cfg_.limit_law;
        return limit_law_criterion(3, 2, l.rademacher_threshold,
                                   fmt::format("entry-law universality, Rademacher, n={}, m={}", l.n, l.m));
    }

    Criterion c4() {
        const auto& lc = cfg_.linearization;
        Criterion c{4, "linearization exactness"};
        struct Instance {
            double pairing = 0.0;  // relative to spectral radius
            double svd = 0.0;      // relative to max(1, s_1)
            double hermitian = 0.0;
        };
        std::vector<Instance> out(lc.instances);
        parallel_for(lc.instances, threads_, [&](std::size_t i) {
            Rng rng = make_rng(seed(4), i, kAuxStream);
            std::uniform_int_distribution<std::size_t> nd(2, lc.max_n);
            std::uniform_int_distribution<int> md(2, 3);
            std::uniform_real_distribution<double> u(0.0, 1.0);
            const std::size_t n = nd(rng);
            const int m = md(rng);
            const double rho = -0.9 + 1.8 * u(rng);
            const cdouble z = std::polar(2.0 * std::sqrt(u(rng)), 2.0 * std::numbers::pi * u(rng));
            const EnsembleSpec spec = make_spec(n, m, rho, EntryDist::gaussian(), rng());
            const std::vector<RealMatrix> f = sample_factors(spec, 0);
            const HermitianLinearization lin = build_linearization(f, z);
            const SymmetrizedSpectrum sym = symmetrized_spectrum(lin);
            const double radius = std::max(std::abs(sym.values.front()), std::abs(sym.values.back()));
            out[i].pairing = sym.pairing_defect() / radius;
            out[i].hermitian = lin.hermitian_defect();
            CMatrix shifted = to_complex(product(f));
            for (std::size_t k = 0; k < n; ++k) shifted(k, k) -= z;
            const std::vector<double> ref = jacobi_singular_values(shifted);
            const std::vector<double> ours = sym.singular_values();
            double d = 0.0;
            for (std::size_t k = 0; k < n; ++k) d = std::max(d, std::abs(ours[k] - ref[k]));
            out[i].svd = d / std::max(1.0, ref.front());
        });
        double pairing = 0.0, svd = 0.0, herm = 0.0;
        for (const auto& r : out) {
            pairing = std::max(pairing, r.pairing);
            svd = std::max(svd, r.svd);
            herm = std::max(herm, r.hermitian);
        }
        c.at_most("max +/- pairing defect / spectral radius", pairing, lc.symmetry_tol, lc.instances);
        c.at_most("max |positive half - Jacobi SVD of W - zI|", svd, lc.svd_tol, lc.instances);
        c.at_most("max Hermitian defect of V(z)", herm, 1e-12, lc.instances);
        return c;
    }

    Criterion c5() {
        const auto& sc = cfg_.solver;
        Criterion c{5, "Stieltjes solver (statement form)"};
        SolverOptions opt;
        opt.tol = sc.tol;
        std::vector<cdouble> alphas;
        for (double v : sc.v_list)
            for (std::size_t k = 0; k < sc.u_points; ++k) {
                const double u = sc.u_points == 1 ? sc.u_min
                                                  : sc.u_min + (sc.u_max - sc.u_min) * k / (sc.u_points - 1.0);
                alphas.emplace_back(u, v);
            }

        double max_res = 0.0;
        std::size_t failures = 0, nevanlinna_bad = 0, branch_bad_nonzero = 0, branch_bad_zero = 0;
        std::size_t zero_points = 0, nonzero_points = 0;
        double min_im_s = std::numeric_limits<double>::infinity();
        json per_case = json::array();
        for (const cdouble& z : sc.z_list)
            for (int m : sc.m_list) {
                std::vector<StieltjesSolution> sol(alphas.size());
                std::vector<char> ok(alphas.size(), 0);
                parallel_for(alphas.size(), threads_, [&](std::size_t k) {
                    try {
                        sol[k] = solve_system({alphas[k], z, m, SystemForm::statement}, std::nullopt, opt);
                        ok[k] = 1;
                    } catch (const std::runtime_error&) {
                    }
                });
                std::size_t case_fail = 0;
                for (std::size_t k = 0; k < alphas.size(); ++k) {
                    if (!ok[k]) {
                        ++case_fail;
                        continue;
                    }
                    const auto& s = sol[k];
                    max_res = std::max({max_res, s.residual_first, s.residual_second});
                    min_im_s = std::min(min_im_s, s.s.imag());
                    if (!(s.s.imag() > 0.0) || std::abs(s.s) > 1.0 / alphas[k].imag()) ++nevanlinna_bad;
                    const bool strict = (s.w - alphas[k]).imag() > 0.0;
                    if (z == 0.0) {
                        ++zero_points;
                        branch_bad_zero += strict ? 0 : 1;
                    } else {
                        ++nonzero_points;
                        branch_bad_nonzero += strict ? 0 : 1;
                    }
                }
                failures += case_fail;

                const std::vector<double> grid = symmetric_grid(default_half_width(m, z), sc.mass_points);
                const DensityProfile p =
                    density_from_inversion(z, m, SystemForm::statement, grid, sc.mass_eps, opt, threads_);
                const double mass = p.mass();
                c.within(fmt::format("mass, z=({},{}), m={}", z.real(), z.imag(), m), mass, 1.0 - sc.mass_tolerance,
                         1.0 + sc.mass_tolerance, grid.size());
                per_case.push_back({{"z", complex_to_json(z)},
                                    {"m", m},
                                    {"solver_failures", case_fail},
                                    {"mass", mass},
                                    {"mass_grid_failures", p.failures}});
                failures += p.failures;
            }
        const std::size_t total = alphas.size() * sc.z_list.size() * sc.m_list.size();
        c.at_most("solver failures on the alpha grid and mass grids", static_cast<double>(failures), 0.0, total);
        c.at_most("max residual of both equations", max_res, sc.tol, total);
        c.at_most("Nevanlinna violations (Im s <= 0 or |s| > 1/v)", static_cast<double>(nevanlinna_bad), 0.0, total);
        if (nonzero_points > 0)
            c.at_most("points with Im(w - alpha) <= 0, z != 0", static_cast<double>(branch_bad_nonzero), 0.0,
                      nonzero_points);
        if (zero_points > 0)
            c.at_most("points with Im(w - alpha) <= 0, z = 0", static_cast<double>(branch_bad_zero), 0.0, zero_points);

        // Even moments at z = 0, m = 2 against the Fuss-Catalan numbers.
        const int mm = 2;
        const double edge = std::sqrt(fuss_catalan_edge(mm));
        const std::vector<double> grid = symmetric_grid(1.05 * edge, sc.moment_points);
        const DensityProfile p = density_from_inversion(0.0, mm, SystemForm::statement, grid, sc.moment_eps, opt, threads_);
        json moments = json::array();
        for (int q = 1; q <= 3; ++q) {
            double mom = 0.0;
            for (std::size_t i = 1; i < grid.size(); ++i) {
                const double a = std::pow(grid[i - 1], 2 * q) * p.density[i - 1];
                const double b = std::pow(grid[i], 2 * q) * p.density[i];
                mom += 0.5 * (a + b) * (grid[i] - grid[i - 1]);
            }
            const double target = fuss_catalan_moment(mm, q).to_double();
            const double rel = std::abs(mom - target) / target;
            c.at_most(fmt::format("relative error of moment {} (target {})", 2 * q, target), rel, sc.moment_tolerance,
                      grid.size());
            moments.push_back({{"order", 2 * q}, {"value", mom}, {"target", target}});
        }
        c.details = {{"alpha_points", alphas.size()},
                     {"min_im_s", min_im_s},
                     {"cases", per_case},
                     {"moments", moments},
                     {"moment_grid_failures", p.failures}};
        return c;
    }

    Criterion c6() {
        const auto& d = cfg_.delta;
        Criterion c{6, fmt::format("Delta_n(z), n={}, m={}, z=({},{})", d.n, d.m, d.z.real(), d.z.imag())};
        const EnsembleSpec spec = make_spec(d.n, d.m, d.rho, EntryDist::gaussian(), seed(6));
        std::vector<SymmetrizedSpectrum> spectra(d.trials);
        parallel_for(d.trials, threads_, [&](std::size_t t) {
            spectra[t] = symmetrized_spectrum(linearization_from_product(product(sample_factors(spec, t)), d.z));
        });
        const FormDiscrimination fd = form_discrimination(d.z, d.m, spectra, d.eps, d.grid_points, {}, threads_);
        const FormScore& win = fd.winning();
        c.at_most(fmt::format("KS of winning form ({})", form_name(fd.winner)), win.delta, d.threshold,
                  d.trials * 2 * d.n);
        auto score = [](const FormScore& s) {
            return json{{"delta", s.delta},
                        {"mean_trial_delta", s.mean_trial_delta},
                        {"mass", s.mass},
                        {"solver_failures", s.failures}};
        };
        c.details = {{"winner", form_name(fd.winner)},
                     {"margin", fd.margin},
                     {"insufficient_resolution", fd.insufficient_resolution},
                     {"theorem", score(fd.theorem)},
                     {"statement", score(fd.statement)}};
        return c;
    }

    Criterion c7() {
        const auto& pc = cfg_.potential;
        Criterion c{7, "potential pipeline"};
        json analytic = json::array();
        for (int m : {1, 2}) {
            const LimitLaw law(m);
            GridSpec g{-1.0, 1.0, -1.0, 1.0, pc.analytic_step};
            const PotentialGrid pg = potential_grid_from_function(g, [&](cdouble z) { return limit_potential(law, z); });
            const DensityField f = laplacian_density(pg);
            double worst = 0.0;
            std::size_t count = 0;
            for (std::size_t k = 0; k < f.values.size(); ++k) {
                const double r = std::abs(f.points[k]);
                if (r < pc.analytic_r_min || r > pc.analytic_r_max) continue;
                const double g_true = density(law, f.points[k].real(), f.points[k].imag());
                worst = std::max(worst, std::abs(f.values[k] - g_true) / g_true);
                ++count;
            }
            c.at_most(fmt::format("analytic round trip, m={}, max relative error", m), worst, pc.analytic_tolerance,
                      count);
            analytic.push_back({{"m", m}, {"max_relative_error", worst}, {"points", count}});
        }

        const EnsembleSpec spec = make_spec(pc.n, pc.m, pc.rho, EntryDist::gaussian(), seed(7));
        GridSpec g{-pc.extent, pc.extent, -pc.extent, pc.extent, pc.step};
        const PotentialGrid pg = mean_potential_grid(spec, g, pc.trials, threads_);
        const DensityField f = laplacian_density(pg);
        const LimitLaw law(pc.m);
        double worst = 0.0, sum = 0.0;
        std::size_t count = 0, above = 0;
        // ring averages over bands of width step
        std::map<long, std::pair<double, double>> rings;
        for (std::size_t k = 0; k < f.values.size(); ++k) {
            const double r = std::abs(f.points[k]);
            if (r < pc.r_min || r > pc.r_max) continue;
            const double g_true = density(law, f.points[k].real(), f.points[k].imag());
            const double rel = std::abs(f.values[k] - g_true) / g_true;
            worst = std::max(worst, rel);
            sum += rel;
            above += rel > pc.tolerance ? 1 : 0;
            ++count;
            auto& ring = rings[std::lround(r / pc.step)];
            ring.first += f.values[k] / g_true;
            ring.second += 1.0;
        }
        c.at_most("Monte Carlo round trip, max relative error on the annulus", worst, pc.tolerance, count);
        c.at_most("masked point fraction", pg.masked_fraction(), 1e-3, pg.values.size() * pg.trials);
        double ring_worst = 0.0;
        for (const auto& [key, v] : rings) ring_worst = std::max(ring_worst, std::abs(v.first / v.second - 1.0));
        c.details = {{"analytic", analytic},
                     {"monte_carlo",
                      {{"points", count},
                       {"mean_relative_error", count ? sum / count : 0.0},
                       {"fraction_above_tolerance", count ? double(above) / count : 0.0},
                       {"ring_averaged_max_relative_error", ring_worst},
                       {"masked_total", pg.masked_total()}}}};
        return c;
    }

    Criterion c8() {
        const auto& tc = cfg_.tail;
        Criterion c{8, "singular-value safeguards"};
        TailDiagnostics diag;
        diag.B = tc.B;
        diag.gamma = tc.gamma;
        diag.z = tc.z;
        const EnsembleSpec spec = make_spec(tc.ladder.front(), 2, cfg_.appendix.rho, EntryDist::gaussian(), seed(8));
        const TailReport r = smallest_sv_tail(spec, diag, tc.trials, tc.ladder, threads_);
        c.check("exceedance frequency of n^-B non-increasing (95% Wilson)", r.non_increasing ? 1.0 : 0.0, "==", 1.0,
                tc.trials * tc.ladder.size(), r.non_increasing);
        double max_freq = 0.0;
        json levels = json::array();
        for (const auto& l : r.levels) {
            max_freq = std::max(max_freq, l.frequency);
            levels.push_back({{"n", l.n},
                              {"trials", l.trials},
                              {"exceed", l.exceed},
                              {"frequency", l.frequency},
                              {"ci", {l.ci_low, l.ci_high}},
                              {"resampled", l.resampled},
                              {"norm_violations", l.norm_violations},
                              {"median_log_smin", l.median_log_smin},
                              {"min_profile_c", l.min_profile_c}});
        }
        c.at_most("largest exceedance frequency", max_freq, 0.02, tc.trials);

        std::vector<double> slack(tc.prod1_instances);
        parallel_for(tc.prod1_instances, threads_, [&](std::size_t i) {
            Rng rng = make_rng(seed(8, 1), i, kAuxStream);
            std::normal_distribution<double> g;
            DMatrix a(tc.prod1_n, tc.prod1_n), b(tc.prod1_n, tc.prod1_n);
            for (double& x : a.data()) x = g(rng);
            for (double& x : b.data()) x = g(rng);
            slack[i] = product_inequality_slack(a, b);
        });
        const double min_slack = *std::min_element(slack.begin(), slack.end());
        c.check("min log-slack of the partial product inequality", min_slack, ">=", tc.prod1_slack,
                tc.prod1_instances, min_slack >= tc.prod1_slack);
        c.details = {{"levels", levels}};
        return c;
    }

    Criterion c9() {
        const auto& ac = cfg_.appendix;
        Criterion c{9, "appendix diagnostics"};
        ExperimentConfig ec;
        ec.ensemble = make_spec(ac.n, ac.m, ac.rho, EntryDist::gaussian(), seed(9));
        ec.z_list = {ac.z};
        ec.threads = threads_;
        AppendixOptions opt;
        opt.mean_trials = ac.mean_trials;
        opt.frob_ladder = ac.frob_ladder;
        opt.frob_trials = ac.frob_trials;
        opt.var_ladder = ac.var_ladder;
        opt.var_trials = ac.var_trials;
        opt.v = ac.v;
        const AppendixReport r = appendix_diagnostics(ec, opt);
        for (const auto& m : r.means)
            c.at_most(fmt::format("|mean entry of V_{{{},{}}}| / SE", m.a, m.b),
                      m.std_error > 0 ? std::abs(m.mean) / m.std_error : 0.0, 4.0, ac.mean_trials);
        c.within("Frobenius scaling slope", r.frob_slope, ac.frob_low, ac.frob_high, ac.frob_trials);
        c.at_most("max/min of E||V||_F^2 / n", r.frob_ratio, ac.frob_ratio_max, ac.frob_trials);
        c.within("trace-variance decay slope", r.var_slope, ac.var_low, ac.var_high, ac.var_trials);
        c.details = r.summary();
        return c;
    }

private:
    const VerifyConfig& cfg_;
    unsigned threads_;
    std::map<int, LimitLawReport> limit_cache_;
};

}  // namespace

VerificationResult run_verification(const VerifyConfig& config, unsigned threads) {
    config.validate();
    Runner runner(config, threads);
    VerificationResult res;
    const json cfg = to_json(config);
    json criteria = json::array();
    bool all = true;
    using Fn = Criterion (Runner::*)();
    const std::vector<std::pair<int, Fn>> table{{1, &Runner::c1}, {2, &Runner::c2}, {3, &Runner::c3},
                                                {4, &Runner::c4}, {5, &Runner::c5}, {6, &Runner::c6},
                                                {7, &Runner::c7}, {8, &Runner::c8}, {9, &Runner::c9}};
    for (const auto& [id, fn] : table) {
        if (!config.enabled(id)) continue;
        const auto start = std::chrono::steady_clock::now();
        const Criterion c = (runner.*fn)();
        res.seconds[id] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        criteria.push_back(c.to_json());
        all = all && c.passed;
    }
    if (config.enabled(1)) res.runtime_ok[1] = res.seconds[1] <= config.limit_law.runtime_limit_s;
    if (config.enabled(7)) res.runtime_ok[7] = res.seconds[7] <= config.potential.runtime_limit_s;
    res.all_passed = all;
    res.report = {{"config_hash", config_hash(cfg)},
                  {"master_seed", config.master_seed},
                  {"config", cfg},
                  {"criteria", criteria},
                  {"all_passed", all}};
    return res;
}

}  // namespace ellprod
