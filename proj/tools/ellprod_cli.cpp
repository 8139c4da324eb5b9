// ellprod: command-line driver. Each subcommand reads one JSON config, writes
// plot-ready files under --out and a manifest.json with their SHA-256 hashes.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "ellprod/errors.hpp"
#include "ellprod/harness.hpp"
#include "ellprod/limitlaw.hpp"
#include "ellprod/potential.hpp"
#include "ellprod/spectra.hpp"
#include "ellprod/stieltjes.hpp"
#include "ellprod/verification.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace ellprod;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;

// Thrown for anything that should end in exit status 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Invocation {
    std::string subcommand;
    std::string config_path;
    std::string out_dir = "out";
    std::optional<std::uint64_t> seed;
    std::vector<std::string> overrides;
    unsigned threads = 1;
    std::string ladder;
};

const std::map<std::string, std::string> kModuleTag{{"sample", "ensemble"}, {"spectrum", "spectra"},
                                                    {"limit", "limitlaw"},  {"solve", "stieltjes"},
                                                    {"potential", "potential"}, {"verify", "harness"}};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(fmt::format("cannot read config file '{}'", path));
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json parse_config(const std::string& text, const std::string& path) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        // e.byte is 1-based and points just past the offending character.
        std::size_t line = 1, column = 1;
        const std::size_t stop = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
        for (std::size_t i = 0; i < stop; ++i) {
            if (text[i] == '\n') {
                ++line;
                column = 1;
            } else {
                ++column;
            }
        }
        throw ConfigError(fmt::format("{}: malformed JSON at line {}, column {}: {}", path, line, column, e.what()));
    }
}

void apply_override(json& cfg, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0)
        throw ConfigError(fmt::format("--set expects key=value (got '{}')", assignment));
    const std::string key = assignment.substr(0, eq);
    const std::string raw = assignment.substr(eq + 1);
    json value;
    try {
        value = json::parse(raw);
    } catch (const json::parse_error&) {
        value = raw;
    }
    json* node = &cfg;
    std::stringstream parts(key);
    std::string part;
    std::vector<std::string> path;
    while (std::getline(parts, part, '.')) path.push_back(part);
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
        if (!node->is_object()) throw ConfigError(fmt::format("--set {}: '{}' is not an object", key, path[i]));
        node = &(*node)[path[i]];
        if (node->is_null()) *node = json::object();
    }
    if (!node->is_object()) throw ConfigError(fmt::format("--set {}: parent is not an object", key));
    (*node)[path.back()] = value;
}

std::vector<std::size_t> parse_ladder(const std::string& text) {
    std::vector<std::size_t> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            const long long v = std::stoll(item, &used);
            if (used != item.size() || v < 1) throw std::invalid_argument(item);
            out.push_back(static_cast<std::size_t>(v));
        } catch (const std::exception&) {
            throw ConfigError(fmt::format("--ladder: '{}' is not a positive integer", item));
        }
    }
    if (out.empty()) throw ConfigError("--ladder must list at least one size");
    return out;
}

void only_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
    if (!j.is_object()) throw ConfigError(fmt::format("{} must be a JSON object", where));
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || it.key() == a;
        if (!ok) throw ConfigError(fmt::format("unknown key '{}' in {}", it.key(), where));
    }
}

template <typename T>
T value_or(const json& j, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(fmt::format("config.{}: {}", key, e.what()));
    }
}

std::vector<cdouble> complex_list(const json& j, const char* key, std::vector<cdouble> fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_array()) throw ConfigError(fmt::format("config.{} must be an array", key));
    std::vector<cdouble> out;
    for (const auto& z : j.at(key)) out.push_back(complex_from_json(z, fmt::format("config.{}", key)));
    return out;
}

GridSpec grid_from_json(const json& j, GridSpec g) {
    only_keys(j, {"x_min", "x_max", "y_min", "y_max", "step"}, "config.grid");
    g.x_min = value_or(j, "x_min", g.x_min);
    g.x_max = value_or(j, "x_max", g.x_max);
    g.y_min = value_or(j, "y_min", g.y_min);
    g.y_max = value_or(j, "y_max", g.y_max);
    g.step = value_or(j, "step", g.step);
    g.validate();
    return g;
}

json grid_to_json(const GridSpec& g) {
    return {{"x_min", g.x_min}, {"x_max", g.x_max}, {"y_min", g.y_min}, {"y_max", g.y_max}, {"step", g.step}};
}

// Collects output files and their hashes; everything lands under one directory.
class OutputDir {
public:
    explicit OutputDir(const std::string& dir) : dir_(dir) {
        std::error_code ec;
        fs::create_directories(dir_, ec);
        if (ec || !fs::is_directory(dir_))
            throw ConfigError(fmt::format("output directory '{}' cannot be created", dir));
        const fs::path probe = dir_ / ".ellprod_probe";
        std::ofstream p(probe);
        if (!p) throw ConfigError(fmt::format("output directory '{}' is not writable", dir));
        p.close();
        fs::remove(probe, ec);
    }

    void write(const std::string& name, const std::string& content) {
        std::ofstream out(dir_ / name, std::ios::binary);
        out << content;
        if (!out) throw std::runtime_error(fmt::format("failed to write {}", (dir_ / name).string()));
        files_.push_back({{"path", name}, {"bytes", content.size()}, {"sha256", sha256_hex(content)}});
    }

    void write_json(const std::string& name, const json& j) { write(name, j.dump(2) + "\n"); }

    void finish(const std::string& subcommand, const json& effective) {
        json manifest{{"subcommand", subcommand},
                      {"config_hash", config_hash(effective)},
                      {"files", files_}};
        std::ofstream out(dir_ / "manifest.json", std::ios::binary);
        out << manifest.dump(2) << "\n";
    }

private:
    fs::path dir_;
    json files_ = json::array();
};

EnsembleSpec ensemble_section(const json& cfg) {
    if (!cfg.contains("ensemble")) throw ConfigError("config.ensemble is required");
    return ensemble_from_json(cfg.at("ensemble"));
}

// ---- subcommands ---------------------------------------------------------

int run_sample(const json& cfg, OutputDir& out, unsigned) {
    only_keys(cfg, {"ensemble", "trials"}, "sample config");
    const EnsembleSpec spec = ensemble_section(cfg);
    const auto trials = value_or<std::size_t>(cfg, "trials", 1);
    for (std::size_t t = 0; t < trials; ++t) {
        const auto factors = sample_factors(spec, t);
        for (std::size_t q = 0; q < factors.size(); ++q)
            out.write(fmt::format("factor_t{}_q{}.csv", t, q + 1), matrix_to_csv(factors[q]));
        out.write(fmt::format("product_t{}.csv", t), matrix_to_csv(RealMatrix{product(factors), 1.0}));
    }
    out.write_json("metadata.json", {{"ensemble", to_json(spec)}, {"trials", trials}});
    return kExitOk;
}

int run_spectrum(const json& cfg, OutputDir& out, unsigned) {
    only_keys(cfg, {"ensemble", "trials", "z_list", "ladder"}, "spectrum config");
    const EnsembleSpec spec = ensemble_section(cfg);
    const auto trials = value_or<std::size_t>(cfg, "trials", 1);
    const auto z_list = complex_list(cfg, "z_list", {});
    const auto ladder = value_or<std::vector<std::size_t>>(cfg, "ladder", {spec.n});
    json meta = json::array();
    int status = kExitOk;
    for (std::size_t n : ladder) {
        const EnsembleSpec s = n == spec.n ? spec : with_size(spec, n);
        s.validate();
        for (std::size_t t = 0; t < trials; ++t) {
            const DMatrix w = product(sample_factors(s, t));
            const ComplexSpectrum ev = eigenvalues(w);
            const EigenCheck chk = check_eigenvalues(w, ev);
            if (!chk.passed) {
                std::cerr << fmt::format("spectra: eigenvalue check failed for n={}, trial {} (trace error {:.3g}, "
                                         "log-det error {:.3g})\n",
                                         n, t, chk.trace_error, chk.log_det_error);
                status = kExitFailure;
            }
            out.write(fmt::format("eigenvalues_n{}_t{}.csv", n, t), spectrum_to_csv(ev));
            for (std::size_t k = 0; k < z_list.size(); ++k) {
                const SymmetrizedSpectrum sym = symmetrized_spectrum(linearization_from_product(w, z_list[k]));
                out.write(fmt::format("symmetrized_n{}_t{}_z{}.csv", n, t, k), spectrum_to_csv(sym));
            }
            meta.push_back(json{{"n", n},
                            {"trial", t},
                            {"max_modulus", ev.max_modulus()},
                            {"trace_error", chk.trace_error},
                            {"log_det_error", chk.log_det_error},
                            {"check_passed", chk.passed}});
        }
    }
    json zs = json::array();
    for (const cdouble& z : z_list) zs.push_back(complex_to_json(z));
    out.write_json("metadata.json", {{"ensemble", to_json(spec)}, {"z_list", zs}, {"runs", meta}});
    return status;
}

int run_limit(const json& cfg, OutputDir& out, unsigned threads) {
    only_keys(cfg, {"m", "grid", "radial_points", "moments", "samples", "seed", "experiment"}, "limit config");
    const int m = value_or(cfg, "m", 2);
    const LimitLaw law(m);
    const GridSpec g = grid_from_json(cfg.value("grid", json::object()), GridSpec{-1.2, 1.2, -1.2, 1.2, 0.02});
    const auto radial_points = value_or<std::size_t>(cfg, "radial_points", 201);
    const int moments = value_or(cfg, "moments", 6);
    const auto samples = value_or<std::size_t>(cfg, "samples", 0);
    const auto seed = value_or<std::uint64_t>(cfg, "seed", 1);
    if (radial_points < 2) throw ConfigError("limit config: radial_points must be >= 2");

    std::string dens = "x,y,density\n";
    for (std::size_t iy = 0; iy < g.ny(); ++iy)
        for (std::size_t ix = 0; ix < g.nx(); ++ix) {
            const cdouble p = g.point(ix, iy);
            dens += fmt::format("{:.17g},{:.17g},{:.17g}\n", p.real(), p.imag(), density(law, p.real(), p.imag()));
        }
    out.write("density_grid.csv", dens);
    out.write("potential_grid.csv",
              potential_to_csv(potential_grid_from_function(g, [&](cdouble z) { return limit_potential(law, z); })));

    std::string radial = "r,cdf\n";
    for (std::size_t i = 0; i < radial_points; ++i) {
        const double r = 1.2 * i / (radial_points - 1.0);
        radial += fmt::format("{:.17g},{:.17g}\n", r, radial_cdf(law, r));
    }
    out.write("radial_cdf.csv", radial);

    std::string mom = "p,numerator,denominator,value\n";
    for (int p = 0; p <= moments; ++p) {
        const Rational r = fuss_catalan_moment(m, p);
        mom += fmt::format("{},{},{},{:.17g}\n", p, r.num.str(), r.den.str(), r.to_double());
    }
    out.write("fuss_catalan_moments.csv", mom);

    if (samples > 0) {
        Rng rng = make_rng(seed, 0, kAuxStream);
        std::string s = "re,im\n";
        for (std::size_t i = 0; i < samples; ++i) {
            const cdouble z = sample(law, rng);
            s += fmt::format("{:.17g},{:.17g}\n", z.real(), z.imag());
        }
        out.write("limit_samples.csv", s);
    }

    json summary{{"m", m}, {"grid", grid_to_json(g)}, {"singular_value_edge_squared", fuss_catalan_edge(m)}};
    int status = kExitOk;
    if (cfg.contains("experiment")) {
        ExperimentConfig ec = experiment_from_json(cfg.at("experiment"));
        ec.threads = threads;
        if (ec.ensemble.m != m) throw ConfigError("limit config: experiment.ensemble.m must equal m");
        const LimitLawReport r = limit_law_experiment(ec);
        summary["experiment"] = r.summary();
        std::string radii = "r\n";
        for (double v : r.pooled_radii) radii += fmt::format("{:.17g}\n", v);
        out.write("pooled_radii.csv", radii);
        if (!r.exclusion_ok) {
            std::cerr << "limitlaw: more than 1% of trials excluded after eigenvalue failures\n";
            status = kExitFailure;
        }
    }
    out.write_json("summary.json", summary);
    return status;
}

int run_solve(const json& cfg, OutputDir& out, unsigned threads) {
    only_keys(cfg, {"z_list", "m_list", "forms", "eps", "grid_points", "half_width", "alpha_grid", "tol"},
              "solve config");
    const auto z_list = complex_list(cfg, "z_list", {cdouble(0.5, 0.2)});
    const auto m_list = value_or<std::vector<int>>(cfg, "m_list", {2});
    const auto forms = value_or<std::vector<std::string>>(cfg, "forms", {"statement"});
    const double eps = value_or(cfg, "eps", 0.01);
    const auto grid_points = value_or<std::size_t>(cfg, "grid_points", 2001);
    const double half_width = value_or(cfg, "half_width", 0.0);  // 0 selects a width from the support edge
    if (half_width < 0.0) throw ConfigError("solve config: half_width must be >= 0");
    SolverOptions opt;
    opt.tol = value_or(cfg, "tol", opt.tol);
    std::vector<SystemForm> fs_;
    for (const auto& f : forms) {
        try {
            fs_.push_back(form_from_name(f));
        } catch (const DomainError& e) {
            throw ConfigError(e.what());
        }
    }
    std::vector<cdouble> alphas;
    if (cfg.contains("alpha_grid")) {
        const json& a = cfg.at("alpha_grid");
        only_keys(a, {"u_min", "u_max", "u_points", "v_list"}, "config.alpha_grid");
        const double u0 = value_or(a, "u_min", -3.5), u1 = value_or(a, "u_max", 3.5);
        const auto nu = value_or<std::size_t>(a, "u_points", 50);
        const auto vs = value_or<std::vector<double>>(a, "v_list", {0.1});
        for (double v : vs)
            for (std::size_t k = 0; k < nu; ++k) alphas.emplace_back(nu == 1 ? u0 : u0 + (u1 - u0) * k / (nu - 1.0), v);
    }
    for (int m : m_list)
        if (m < 1) throw ConfigError(fmt::format("solve config: m must be >= 1 (got {})", m));

    int status = kExitOk;
    json summary = json::array();
    for (SystemForm form : fs_)
        for (int m : m_list)
            for (std::size_t k = 0; k < z_list.size(); ++k) {
                const cdouble z = z_list[k];
                const auto grid = symmetric_grid(half_width > 0.0 ? half_width : default_half_width(m, z), grid_points);
                const DensityProfile p = density_from_inversion(z, m, form, grid, eps, opt, threads);
                const std::string tag = fmt::format("{}_m{}_z{}", form_name(form), m, k);
                out.write(fmt::format("profile_{}.csv", tag), profile_to_csv(p));
                std::size_t alpha_failures = 0;
                if (!alphas.empty()) {
                    std::string csv = "u,v,s_re,s_im,w_re,w_im,residual_first,residual_second,ok\n";
                    for (const cdouble& a : alphas) {
                        try {
                            const auto s = solve_system({a, z, m, form}, std::nullopt, opt);
                            csv += fmt::format("{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.3e},{:.3e},1\n",
                                               a.real(), a.imag(), s.s.real(), s.s.imag(), s.w.real(), s.w.imag(),
                                               s.residual_first, s.residual_second);
                        } catch (const std::runtime_error&) {
                            ++alpha_failures;
                            csv += fmt::format("{:.17g},{:.17g},nan,nan,nan,nan,nan,nan,0\n", a.real(), a.imag());
                        }
                    }
                    out.write(fmt::format("alpha_grid_{}.csv", tag), csv);
                }
                const std::size_t failures = p.failures + alpha_failures;
                if (failures > 0) {
                    std::cerr << fmt::format("stieltjes: {} solver failures for form={}, m={}, z=({}, {})", failures,
                                             form_name(form), m, z.real(), z.imag());
                    if (!p.errors.empty()) std::cerr << ": " << p.errors.front();
                    std::cerr << "\n";
                    status = kExitFailure;
                }
                summary.push_back({{"form", form_name(form)},
                                   {"m", m},
                                   {"z", complex_to_json(z)},
                                   {"mass", p.mass()},
                                   {"profile_failures", p.failures},
                                   {"alpha_failures", alpha_failures}});
            }
    out.write_json("summary.json", summary);
    return status;
}

int run_potential(const json& cfg, OutputDir& out, unsigned threads) {
    only_keys(cfg, {"ensemble", "trials", "grid", "compare_r_min", "compare_r_max"}, "potential config");
    const EnsembleSpec spec = ensemble_section(cfg);
    const auto trials = value_or<std::size_t>(cfg, "trials", 20);
    if (trials < 1) throw ConfigError("potential config: trials must be >= 1");
    const GridSpec g = grid_from_json(cfg.value("grid", json::object()), GridSpec{});
    const double r_min = value_or(cfg, "compare_r_min", 0.4), r_max = value_or(cfg, "compare_r_max", 0.85);

    const PotentialGrid pg = mean_potential_grid(spec, g, trials, threads);
    const DensityField f = laplacian_density(pg);
    out.write("potential.csv", potential_to_csv(pg));
    out.write("density.csv", density_to_csv(f));

    const LimitLaw law(spec.m);
    double worst = 0.0;
    std::size_t count = 0;
    for (std::size_t k = 0; k < f.values.size(); ++k) {
        const double r = std::abs(f.points[k]);
        if (r < r_min || r > r_max) continue;
        const double target = density(law, f.points[k].real(), f.points[k].imag());
        worst = std::max(worst, std::abs(f.values[k] - target) / target);
        ++count;
    }
    out.write_json("summary.json", {{"ensemble", to_json(spec)},
                                    {"trials", trials},
                                    {"grid", grid_to_json(g)},
                                    {"masked_total", pg.masked_total()},
                                    {"masked_fraction", pg.masked_fraction()},
                                    {"compare_points", count},
                                    {"max_relative_error", worst}});
    return kExitOk;
}

int run_verify(const VerifyConfig& cfg, OutputDir& out, unsigned threads) {
    const VerificationResult res = run_verification(cfg, threads);
    out.write("report.json", res.report.dump(2) + "\n");
    json timing = json::object();
    for (const auto& [id, s] : res.seconds) {
        json entry{{"seconds", s}};
        if (res.runtime_ok.count(id)) entry["within_budget"] = res.runtime_ok.at(id);
        timing[std::to_string(id)] = entry;
    }
    out.write_json("timing.json", timing);
    for (const auto& c : res.report.at("criteria"))
        std::cout << fmt::format("criterion {}: {} ({})\n", c.at("id").get<int>(),
                                 c.at("passed").get<bool>() ? "PASS" : "FAIL", c.at("title").get<std::string>());
    std::cout << (res.all_passed ? "all criteria passed\n" : "some criteria failed\n");
    return res.all_passed ? kExitOk : kExitFailure;
}

int dispatch(const Invocation& inv) {
    // Config stage: everything here maps to exit status 2.
    json cfg = json::object();
    if (!inv.config_path.empty()) {
        cfg = parse_config(read_file(inv.config_path), inv.config_path);
    } else if (inv.subcommand != "verify") {
        throw ConfigError(fmt::format("{} requires --config", inv.subcommand));
    }
    if (!cfg.is_object()) throw ConfigError("config root must be a JSON object");
    for (const auto& o : inv.overrides) apply_override(cfg, o);

    if (inv.seed) {
        if (inv.subcommand == "verify") {
            cfg["master_seed"] = *inv.seed;
        } else if (inv.subcommand == "limit") {
            cfg["seed"] = *inv.seed;
        } else if (inv.subcommand == "solve") {
            throw ConfigError("--seed does not apply to solve, which is deterministic");
        } else {
            if (!cfg.contains("ensemble")) throw ConfigError("config.ensemble is required");
            cfg["ensemble"]["master_seed"] = *inv.seed;
        }
    }
    if (!inv.ladder.empty()) {
        const auto ladder = parse_ladder(inv.ladder);
        if (inv.subcommand == "verify") {
            cfg["tail"]["ladder"] = ladder;
        } else if (inv.subcommand == "spectrum") {
            cfg["ladder"] = ladder;
        } else {
            throw ConfigError(fmt::format("--ladder does not apply to {}", inv.subcommand));
        }
    }
    if (inv.threads < 1) throw ConfigError("--threads must be >= 1");

    std::optional<VerifyConfig> verify_cfg;
    if (inv.subcommand == "verify") {
        verify_cfg = verify_from_json(cfg);
        cfg = to_json(*verify_cfg);
    } else if (cfg.contains("ensemble")) {
        // Validate early so invariant violations surface as config errors.
        ensemble_from_json(cfg.at("ensemble")).validate(true);
    }
    OutputDir out(inv.out_dir);
    out.write_json("config.json", cfg);

    // Run stage: failures here map to exit status 1.
    int status = kExitOk;
    try {
        if (inv.subcommand == "sample") status = run_sample(cfg, out, inv.threads);
        if (inv.subcommand == "spectrum") status = run_spectrum(cfg, out, inv.threads);
        if (inv.subcommand == "limit") status = run_limit(cfg, out, inv.threads);
        if (inv.subcommand == "solve") status = run_solve(cfg, out, inv.threads);
        if (inv.subcommand == "potential") status = run_potential(cfg, out, inv.threads);
        if (inv.subcommand == "verify") status = run_verify(*verify_cfg, out, inv.threads);
    } catch (const ConfigError&) {
        throw;
    } catch (const DomainError&) {
        throw;
    } catch (const json::exception&) {
        throw;
    } catch (const std::exception& e) {
        std::cerr << fmt::format("{}: {}\n", kModuleTag.at(inv.subcommand), e.what());
        status = kExitFailure;
    }
    out.finish(inv.subcommand, cfg);
    return status;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Products of elliptic random matrices: sampling, spectra, limit law, Stieltjes solver, potentials"};
    app.require_subcommand(1);
    Invocation inv;
    for (const auto& [name, help] : std::vector<std::pair<std::string, std::string>>{
             {"sample", "write factor and product matrices as CSV"},
             {"spectrum", "write eigenvalues and symmetrized singular spectra"},
             {"limit", "write limit-law density, CDF, potential and moment tables"},
             {"solve", "solve the Stieltjes system and write density profiles"},
             {"potential", "estimate the mean log-potential and its Laplacian density"},
             {"verify", "run the acceptance harness and write report.json"}}) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("--config", inv.config_path, "JSON config file");
        sub->add_option("--out", inv.out_dir, "output directory")->capture_default_str();
        sub->add_option("--seed", inv.seed, "master seed override");
        sub->add_option("--set", inv.overrides, "override a config value, key.path=value (repeatable)");
        sub->add_option("--threads", inv.threads, "worker threads")->capture_default_str();
        sub->add_option("--ladder", inv.ladder, "comma-separated sizes, e.g. 64,128,256");
        sub->callback([&inv, name = name] { inv.subcommand = name; });
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        return dispatch(inv);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
    } catch (const DomainError& e) {
        std::cerr << "config error: " << e.what() << "\n";
    } catch (const json::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
    } catch (const std::exception& e) {
        std::cerr << fmt::format("{}: {}\n", kModuleTag.count(inv.subcommand) ? kModuleTag.at(inv.subcommand) : "ellprod",
                                 e.what());
        return kExitFailure;
    }
    return kExitConfig;
}
