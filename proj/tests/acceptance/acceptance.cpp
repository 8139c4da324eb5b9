// Acceptance run: one PASS/FAIL line per criterion at the stated tolerances.
// Usage: acceptance [report.json]

#include <chrono>
#include <fstream>
#include <iostream>
#include <string>

#include <fmt/format.h>

#include "ellprod/verification.hpp"

using namespace ellprod;
using nlohmann::json;

namespace {

std::string describe(const json& chk) {
    const json& thr = chk.at("threshold");
    std::string t = thr.is_array() ? fmt::format("[{:.4g}, {:.4g}]", thr[0].get<double>(), thr[1].get<double>())
                                   : fmt::format("{:.4g}", thr.get<double>());
    return fmt::format("{} = {:.4g} {} {}{}", chk.at("name").get<std::string>(), chk.at("value").get<double>(),
                       chk.at("comparison").get<std::string>(), t, chk.at("passed").get<bool>() ? "" : " (failed)");
}

}  // namespace

int main(int argc, char** argv) {
    const VerifyConfig cfg;
    const VerificationResult first = run_verification(cfg, 1);
    bool all = true;

    for (const json& c : first.report.at("criteria")) {
        const int id = c.at("id").get<int>();
        bool ok = c.at("passed").get<bool>();
        std::string line;
        for (const json& chk : c.at("checks")) line += (line.empty() ? "" : "; ") + describe(chk);
        if (first.runtime_ok.count(id)) {
            const double limit = id == 1 ? cfg.limit_law.runtime_limit_s : cfg.potential.runtime_limit_s;
            line += fmt::format("; runtime = {:.1f} s <= {:.0f} s", first.seconds.at(id), limit);
            ok = ok && first.runtime_ok.at(id);
        }
        all = all && ok;
        std::cout << fmt::format("criterion {:>2} {} {}: {}\n", id, ok ? "PASS" : "FAIL",
                                 c.at("title").get<std::string>(), line)
                  << std::flush;
    }

    // Determinism: the default report again with two worker threads, and the
    // quick configuration at one, two and three threads.
    const VerificationResult second = run_verification(cfg, 2);
    const std::string quick1 = run_verification(quick_verify_config(), 1).report.dump();
    const std::string quick2 = run_verification(quick_verify_config(), 2).report.dump();
    const std::string quick3 = run_verification(quick_verify_config(), 3).report.dump();
    const bool same_default = first.report.dump() == second.report.dump();
    const bool same_quick = quick1 == quick2 && quick2 == quick3;
    const bool det = same_default && same_quick;
    all = all && det;
    std::cout << fmt::format("criterion 10 {} determinism: default report threads 1 vs 2 {}; quick report threads 1/2/3 {}; "
                             "sha256 {}\n",
                             det ? "PASS" : "FAIL", same_default ? "identical" : "differ",
                             same_quick ? "identical" : "differ", sha256_hex(first.report.dump()).substr(0, 16));

    if (argc > 1) std::ofstream(argv[1]) << first.report.dump(2) << "\n";
    std::cout << (all ? "acceptance: all criteria passed\n" : "acceptance: some criteria failed\n");
    return all ? 0 : 1;
}
