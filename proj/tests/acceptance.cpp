// Acceptance table: one PASS/FAIL line per criterion.
//
// Exit status is 0 when every failing criterion is listed with --known-failure
// and every listed criterion actually failed.

#include <algorithm>
#include <cstdio>
#include <set>
#include <vector>

#include <CLI11.hpp>

#include "egrowth/acceptance.hpp"

int main(int argc, char** argv) {
    CLI::App app{"egrowth acceptance table"};
    int n = 256;
    std::vector<int> only;
    std::vector<int> known;
    bool json = false;
    app.add_option("--grid-n", n, "grid nodes per side")->check(CLI::Range(64, 2048));
    app.add_option("--only", only, "criteria to run (default: all)")->check(CLI::Range(1, egrowth::acceptance_criteria));
    app.add_option("--known-failure", known, "criteria expected to fail")->check(CLI::Range(1, egrowth::acceptance_criteria));
    app.add_flag("--json", json, "print a JSON line after each result");
    CLI11_PARSE(app, argc, argv);

    const std::set<int> expected(known.begin(), known.end());
    int unexpected = 0;
    egrowth::run_acceptance(n, only, [&](const egrowth::CriterionResult& r) {
        const bool listed = expected.count(r.id) > 0;
        std::printf("%s %2d %-36s %7.1fs  %s%s\n", r.pass ? "PASS" : "FAIL", r.id, r.name.c_str(), r.seconds,
                    r.detail.c_str(), listed ? (r.pass ? " [listed as known failure]" : " [known failure]") : "");
        if (json) std::printf("%s\n", r.to_json().c_str());
        std::fflush(stdout);
        if (r.pass == listed) ++unexpected;
    });
    return unexpected == 0 ? 0 : 1;
}
