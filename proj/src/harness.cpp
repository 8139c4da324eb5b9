#include "ellprod/harness.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "ellprod/eigen_solvers.hpp"
#include "ellprod/limitlaw.hpp"
#include "ellprod/parallel.hpp"
#include "ellprod/spectra.hpp"
#include "ellprod/statistics.hpp"

namespace ellprod {

nlohmann::json complex_to_json(cdouble z) { return nlohmann::json::array({z.real(), z.imag()}); }

cdouble complex_from_json(const nlohmann::json& j, const std::string& where) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
        return {j[0].get<double>(), j[1].get<double>()};
    throw DomainError(fmt::format("{}: expected a number or [re, im]", where));
}

void ExperimentConfig::validate() const {
    ensemble.validate(true);
    if (trials < 1) throw DomainError("trials must be >= 1");
    if (z_list.empty()) throw DomainError("z_list must not be empty");
    for (const cdouble& a : alpha_grid)
        if (!(a.imag() > 0.0)) throw DomainError("alpha_grid: every alpha needs Im alpha > 0");
    for (std::size_t n : ladder)
        if (n < 2) throw DomainError("ladder: every n must be >= 2");
}

nlohmann::json to_json(const ExperimentConfig& c) {
    nlohmann::json j;
    j["ensemble"] = to_json(c.ensemble);
    j["trials"] = c.trials;
    j["z_list"] = nlohmann::json::array();
    for (const cdouble& z : c.z_list) j["z_list"].push_back(complex_to_json(z));
    j["alpha_grid"] = nlohmann::json::array();
    for (const cdouble& a : c.alpha_grid) j["alpha_grid"].push_back(complex_to_json(a));
    j["ladder"] = c.ladder;
    j["statistics"] = {{"radial_ks", c.radial_ks}, {"kuiper", c.kuiper}};
    j["output"] = {{"dir", c.output_dir}};
    return j;
}

ExperimentConfig experiment_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw DomainError("experiment config must be a JSON object");
    static const std::vector<std::string> allowed{"ensemble", "trials", "z_list", "alpha_grid",
                                                  "ladder",   "statistics", "output"};
    for (auto it = j.begin(); it != j.end(); ++it)
        if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end())
            throw DomainError(fmt::format("unknown key '{}' in experiment config", it.key()));
    ExperimentConfig c;
    try {
        if (j.contains("ensemble")) c.ensemble = ensemble_from_json(j.at("ensemble"));
        if (j.contains("trials")) c.trials = j.at("trials").get<std::size_t>();
        if (j.contains("z_list")) {
            c.z_list.clear();
            for (const auto& z : j.at("z_list")) c.z_list.push_back(complex_from_json(z, "z_list"));
        }
        if (j.contains("alpha_grid")) {
            c.alpha_grid.clear();
            for (const auto& a : j.at("alpha_grid")) c.alpha_grid.push_back(complex_from_json(a, "alpha_grid"));
        }
        if (j.contains("ladder")) c.ladder = j.at("ladder").get<std::vector<std::size_t>>();
        if (j.contains("statistics")) {
            const auto& s = j.at("statistics");
            for (auto it = s.begin(); it != s.end(); ++it)
                if (it.key() != "radial_ks" && it.key() != "kuiper")
                    throw DomainError(fmt::format("unknown key '{}' in statistics", it.key()));
            if (s.contains("radial_ks")) c.radial_ks = s.at("radial_ks").get<bool>();
            if (s.contains("kuiper")) c.kuiper = s.at("kuiper").get<bool>();
        }
        if (j.contains("output")) {
            const auto& o = j.at("output");
            for (auto it = o.begin(); it != o.end(); ++it)
                if (it.key() != "dir") throw DomainError(fmt::format("unknown key '{}' in output", it.key()));
            if (o.contains("dir")) c.output_dir = o.at("dir").get<std::string>();
        }
    } catch (const nlohmann::json::exception& e) {
        throw DomainError(fmt::format("experiment config: {}", e.what()));
    }
    c.validate();
    return c;
}

std::vector<cdouble> resolvent_traces(const std::vector<double>& ev, const std::vector<cdouble>& alphas) {
    std::vector<cdouble> out(alphas.size());
    const double inv = 1.0 / static_cast<double>(ev.size());
    for (std::size_t a = 0; a < alphas.size(); ++a) {
        cdouble s = 0.0;
        for (double l : ev) s += 1.0 / (l - alphas[a]);
        out[a] = s * inv;
    }
    return out;
}

nlohmann::json LimitLawReport::summary() const {
    return {{"trials", trials},
            {"excluded", excluded},
            {"exclusion_ok", exclusion_ok},
            {"radial_ks", radial_ks},
            {"mean_radial_ks", mean_radial_ks},
            {"ks_ci", {ks_ci_low, ks_ci_high}},
            {"kuiper", kuiper},
            {"pooled_count", pooled_count},
            {"real_fraction", real_fraction}};
}

LimitLawReport limit_law_experiment(const ExperimentConfig& config) {
    config.validate();
    const EnsembleSpec& spec = config.ensemble;
    const LimitLaw law(spec.m);

    struct Trial {
        bool ok = false;
        std::vector<double> radii, angles;
        std::size_t real_count = 0;
    };
    std::vector<Trial> trials(config.trials);
    parallel_for(config.trials, config.threads, [&](std::size_t t) {
        try {
            const ComplexSpectrum ev = eigenvalues(product(sample_factors(spec, t)));
            auto [r, a] = radial_angular_split(ev);
            trials[t].radii = std::move(r);
            trials[t].angles = std::move(a);
            for (const cdouble& v : ev.values) trials[t].real_count += v.imag() == 0.0 ? 1 : 0;
            trials[t].ok = true;
        } catch (const ConvergenceError&) {
            trials[t].ok = false;
        }
    });

    LimitLawReport rep;
    rep.trials = config.trials;
    std::size_t real_count = 0;
    for (const Trial& t : trials) {
        if (!t.ok) {
            ++rep.excluded;
            continue;
        }
        rep.radial_ks.push_back(ks_distance(t.radii, [&](double r) { return radial_cdf(law, r); }));
        rep.pooled_radii.insert(rep.pooled_radii.end(), t.radii.begin(), t.radii.end());
        rep.pooled_angles.insert(rep.pooled_angles.end(), t.angles.begin(), t.angles.end());
        real_count += t.real_count;
    }
    rep.exclusion_ok = static_cast<double>(rep.excluded) <= 0.01 * static_cast<double>(rep.trials);
    if (rep.radial_ks.empty()) throw ConvergenceError("limit_law_experiment: every trial failed");
    rep.mean_radial_ks = mean(rep.radial_ks);
    const double se = standard_error(rep.radial_ks);
    rep.ks_ci_low = rep.mean_radial_ks - 1.96 * se;
    rep.ks_ci_high = rep.mean_radial_ks + 1.96 * se;
    rep.pooled_count = rep.pooled_angles.size();
    rep.kuiper = kuiper_statistic(rep.pooled_angles);
    rep.real_fraction = static_cast<double>(real_count) / static_cast<double>(rep.pooled_count);
    return rep;
}

nlohmann::json UniversalityReport::summary() const {
    nlohmann::json lv = nlohmann::json::array();
    for (const auto& l : levels)
        lv.push_back({{"n", l.n}, {"max_diff", l.max_diff}, {"se_at_max", l.se_at_max},
                      {"max_z_score", l.max_z_score}});
    return {{"phi", phi_list}, {"levels", lv}, {"slope", slope}, {"decreasing", decreasing}};
}

namespace {

std::vector<double> linearization_eigenvalues(const DMatrix& w, cdouble z) {
    return hermitian_eigenvalues(linearization_from_product(w, z).matrix);
}

std::vector<RealMatrix> sample_gaussian_partner(const EnsembleSpec& spec, std::uint64_t trial) {
    EnsembleSpec g = spec;
    g.entry_dist = EntryDist::gaussian();
    std::vector<RealMatrix> out;
    for (int q = 1; q <= spec.m; ++q) {
        Rng rng = make_rng(spec.master_seed, trial, kGaussianPartnerStream + static_cast<std::uint64_t>(q));
        out.push_back(sample_elliptic_matrix(g, rng));
    }
    return out;
}

}  // namespace

UniversalityReport universality_sweep(const ExperimentConfig& config, const std::vector<double>& phi_list) {
    config.validate();
    for (double phi : phi_list)
        if (!(phi >= 0.0 && phi <= std::numbers::pi / 2.0)) throw DomainError("universality_sweep: phi outside [0, pi/2]");
    for (const cdouble& a : config.alpha_grid)
        if (a.imag() < 1.0) throw DomainError("universality_sweep: alpha_grid needs Im alpha >= 1");
    if (phi_list.empty()) throw DomainError("universality_sweep: empty phi list");
    const cdouble z = config.z_list.front();
    const std::size_t na = config.alpha_grid.size();
    const std::size_t np = phi_list.size();

    UniversalityReport rep;
    rep.phi_list = phi_list;
    for (std::size_t n : config.ladder) {
        const EnsembleSpec spec = with_size(config.ensemble, n);
        // traces[t][p][a]; index np holds phi = 0
        std::vector<std::vector<std::vector<cdouble>>> traces(config.trials);
        parallel_for(config.trials, config.threads, [&](std::size_t t) {
            const std::vector<RealMatrix> x = sample_factors(spec, t);
            const std::vector<RealMatrix> y = sample_gaussian_partner(spec, t);
            auto trace_at = [&](double phi) {
                std::vector<RealMatrix> zf;
                for (int q = 0; q < spec.m; ++q) zf.push_back(interpolate(x[q], y[q], phi));
                return resolvent_traces(linearization_eigenvalues(product(zf), z), config.alpha_grid);
            };
            std::vector<std::vector<cdouble>> tr(np + 1);
            tr[np] = trace_at(0.0);
            for (std::size_t p = 0; p < np; ++p) tr[p] = phi_list[p] == 0.0 ? tr[np] : trace_at(phi_list[p]);
            traces[t] = std::move(tr);
        });

        UniversalityLevel lv;
        lv.n = n;
        for (std::size_t p = 0; p < np; ++p) {
            double best = 0.0, best_se = 0.0, best_z = 0.0;
            for (std::size_t a = 0; a < na; ++a) {
                std::vector<double> re, im;
                for (std::size_t t = 0; t < config.trials; ++t) {
                    const cdouble d = traces[t][p][a] - traces[t][np][a];
                    re.push_back(d.real());
                    im.push_back(d.imag());
                }
                const double diff = std::abs(cdouble(mean(re), mean(im)));
                const double se = std::hypot(standard_error(re), standard_error(im));
                if (diff >= best) {
                    best = diff;
                    best_se = se;
                }
                if (se > 0.0) best_z = std::max(best_z, diff / se);
            }
            lv.max_diff.push_back(best);
            lv.se_at_max.push_back(best_se);
            lv.max_z_score.push_back(best_z);
        }
        rep.levels.push_back(lv);
    }
    if (rep.levels.size() >= 2) {
        std::vector<double> ns, ds;
        for (const auto& l : rep.levels) {
            ns.push_back(static_cast<double>(l.n));
            ds.push_back(std::max(l.max_diff.back(), 1e-300));
        }
        rep.slope = loglog_fit(ns, ds).slope;
        rep.decreasing = rep.slope < 0.0;
    }
    return rep;
}

nlohmann::json TruncationReport::summary() const {
    nlohmann::json lv = nlohmann::json::array();
    for (const auto& l : levels)
        lv.push_back({{"n", l.n},
                      {"tau_n", l.tau_n},
                      {"lindeberg", l.lindeberg},
                      {"diff_v", l.diff_v},
                      {"diff_2v", l.diff_2v},
                      {"shape_v", l.shape_v},
                      {"shape_2v", l.shape_2v}});
    return {{"v", v},         {"levels", lv},           {"fitted_c", fitted_c},
            {"slope", slope}, {"decreasing", decreasing}, {"doubled_within_bound", doubled_within_bound}};
}

TruncationReport truncation_stability(const ExperimentConfig& config, double v) {
    config.validate();
    if (!(v > 0.0)) throw DomainError("truncation_stability: v must be positive");
    const Truncation trunc = config.ensemble.truncation.value_or(Truncation{});
    const cdouble z = config.z_list.front();
    std::vector<cdouble> alpha_v, alpha_2v;
    for (const cdouble& a : config.alpha_grid) {
        alpha_v.emplace_back(a.real(), v);
        alpha_2v.emplace_back(a.real(), 2.0 * v);
    }
    std::vector<cdouble> both = alpha_v;
    both.insert(both.end(), alpha_2v.begin(), alpha_2v.end());
    const std::size_t na = alpha_v.size();

    TruncationReport rep;
    rep.v = v;
    for (std::size_t n : config.ladder) {
        const EnsembleSpec spec = with_size(config.ensemble, n);
        const double tau_n = trunc.tau(n);
        struct Trial {
            std::vector<double> diff;  // |s - s_trunc| at every alpha in `both`
            double lindeberg = 0.0;
        };
        std::vector<Trial> trials(config.trials);
        parallel_for(config.trials, config.threads, [&](std::size_t t) {
            const std::vector<RealMatrix> raw = sample_factors(spec, t);
            std::vector<RealMatrix> cut;
            for (const RealMatrix& x : raw) cut.push_back(truncate_and_center(x, trunc.c, tau_n));
            const auto s_raw = resolvent_traces(linearization_eigenvalues(product(raw), z), both);
            const auto s_cut = resolvent_traces(linearization_eigenvalues(product(cut), z), both);
            Trial tr;
            for (std::size_t a = 0; a < both.size(); ++a) tr.diff.push_back(std::abs(s_raw[a] - s_cut[a]));
            tr.lindeberg = lindeberg_ratio(raw, trunc.c * tau_n);
            trials[t] = std::move(tr);
        });
        TruncationLevel lv;
        lv.n = n;
        lv.tau_n = tau_n;
        std::vector<double> lind;
        for (const auto& tr : trials) lind.push_back(tr.lindeberg);
        lv.lindeberg = mean(lind);
        for (std::size_t a = 0; a < both.size(); ++a) {
            std::vector<double> d;
            for (const auto& tr : trials) d.push_back(tr.diff[a]);
            const double md = mean(d);
            if (a < na)
                lv.diff_v = std::max(lv.diff_v, md);
            else
                lv.diff_2v = std::max(lv.diff_2v, md);
        }
        lv.shape_v = std::sqrt(lv.lindeberg) / (v * v);
        lv.shape_2v = std::sqrt(lv.lindeberg) / (4.0 * v * v);
        rep.levels.push_back(lv);
    }
    for (const auto& l : rep.levels)
        if (l.shape_v > 0.0) rep.fitted_c = std::max(rep.fitted_c, l.diff_v / l.shape_v);
    rep.doubled_within_bound = true;
    for (const auto& l : rep.levels)
        if (l.diff_2v > rep.fitted_c * l.shape_2v) rep.doubled_within_bound = false;
    if (rep.levels.size() >= 2) {
        std::vector<double> ns, ds;
        for (const auto& l : rep.levels) {
            ns.push_back(static_cast<double>(l.n));
            ds.push_back(std::max(l.diff_v, 1e-300));
        }
        rep.slope = loglog_fit(ns, ds).slope;
        rep.decreasing = rep.slope < 0.0;
    }
    return rep;
}

nlohmann::json AppendixReport::summary() const {
    nlohmann::json mc = nlohmann::json::array();
    for (const auto& m : means)
        mc.push_back({{"a", m.a}, {"b", m.b}, {"mean", m.mean}, {"std_error", m.std_error}, {"passed", m.passed}});
    return {{"means", mc},
            {"frob_ladder", frob_ladder},
            {"frob_per_n", frob_per_n},
            {"frob_slope", frob_slope},
            {"frob_ratio", frob_ratio},
            {"var_ladder", var_ladder},
            {"trace_variance", trace_variance},
            {"var_slope", var_slope},
            {"v", v},
            {"z", complex_to_json(z)}};
}

namespace {

DMatrix scaled_product(const std::vector<RealMatrix>& f, int a, int b) {
    std::vector<RealMatrix> part(f.begin() + (a - 1), f.begin() + b);
    return product(part);
}

// V_{a,b} = prod_{nu=a..b} H^(nu) = blockdiag(X^(a)..X^(b), X^(m-a+1)^T..X^(m-b+1)^T);
// returns the mean of the entries of both diagonal blocks.
double partial_product_mean(const std::vector<RealMatrix>& f, int a, int b) {
    const int m = static_cast<int>(f.size());
    const DMatrix top = scaled_product(f, a, b);
    const std::size_t n = top.rows();
    std::vector<RealMatrix> lower;
    for (int nu = a; nu <= b; ++nu) lower.push_back({transpose(f[m - nu].entries), 1.0});
    const DMatrix bottom = product(lower);
    double s = 0.0;
    for (double x : top.data()) s += x;
    for (double x : bottom.data()) s += x;
    return s / (2.0 * static_cast<double>(n * n));
}

}  // namespace

AppendixReport appendix_diagnostics(const ExperimentConfig& config, const AppendixOptions& opt) {
    config.validate();
    AppendixReport rep;
    rep.v = opt.v;
    rep.z = config.z_list.front();
    const int m = config.ensemble.m;

    std::vector<std::pair<int, int>> ranges{{1, 1}, {1, m}};
    if (m >= 3) ranges.emplace_back(2, m);
    for (auto [a, b] : ranges) {
        std::vector<double> means(opt.mean_trials);
        parallel_for(opt.mean_trials, config.threads, [&](std::size_t t) {
            means[t] = partial_product_mean(sample_factors(config.ensemble, t), a, b);
        });
        MeanCheck mc;
        mc.a = a;
        mc.b = b;
        mc.mean = mean(means);
        mc.std_error = standard_error(means);
        mc.passed = std::abs(mc.mean) <= 4.0 * mc.std_error;
        rep.means.push_back(mc);
    }

    rep.frob_ladder = opt.frob_ladder;
    std::vector<double> frob_mean;
    for (std::size_t n : opt.frob_ladder) {
        const EnsembleSpec spec = with_size(config.ensemble, n);
        std::vector<double> f(opt.frob_trials);
        parallel_for(opt.frob_trials, config.threads, [&](std::size_t t) {
            // ||V_{1,m}||_F^2 = ||W||_F^2 + ||W^T||_F^2
            const double w = frobenius_norm(product(sample_factors(spec, t)));
            f[t] = 2.0 * w * w;
        });
        const double e = mean(f);
        frob_mean.push_back(e);
        rep.frob_per_n.push_back(e / static_cast<double>(n));
    }
    if (frob_mean.size() >= 2) {
        std::vector<double> ns(opt.frob_ladder.begin(), opt.frob_ladder.end());
        rep.frob_slope = loglog_fit(ns, frob_mean).slope;
        const auto [lo, hi] = std::minmax_element(rep.frob_per_n.begin(), rep.frob_per_n.end());
        rep.frob_ratio = *hi / *lo;
    }

    rep.var_ladder = opt.var_ladder;
    const cdouble alpha(0.0, opt.v);
    for (std::size_t n : opt.var_ladder) {
        const EnsembleSpec spec = with_size(config.ensemble, n);
        std::vector<cdouble> tr(opt.var_trials);
        parallel_for(opt.var_trials, config.threads, [&](std::size_t t) {
            const auto ev = linearization_eigenvalues(product(sample_factors(spec, t)), rep.z);
            // (1/n) Tr R is twice the normalized trace over the 2n block
            tr[t] = 2.0 * resolvent_traces(ev, {alpha}).front();
        });
        std::vector<double> re, im;
        for (const cdouble& c : tr) {
            re.push_back(c.real());
            im.push_back(c.imag());
        }
        rep.trace_variance.push_back(sample_variance(re) + sample_variance(im));
    }
    if (rep.trace_variance.size() >= 2) {
        std::vector<double> ns(opt.var_ladder.begin(), opt.var_ladder.end());
        rep.var_slope = loglog_fit(ns, rep.trace_variance).slope;
    }
    return rep;
}

}  // namespace ellprod
