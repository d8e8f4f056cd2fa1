// Runs every acceptance criterion and prints one PASS/FAIL line per criterion,
// followed by the individual checks. Exits nonzero when any criterion fails.
#include <cstdio>
#include <cstdlib>
#include <string>

#include "occulex/verify.hpp"

using namespace occulex;

int main(int argc, char** argv) {
    VerifyOptions opt;
    std::vector<int> only;
    for (int i = 1; i < argc; ++i) only.push_back(std::atoi(argv[i]));

    const auto suite = run_suite("acceptance", opt, only);
    int failed = 0;
    for (const auto& c : suite.criteria) {
        std::printf("%s criterion %d: %s (%.1fs)\n", c.passed() ? "PASS" : "FAIL", c.id, c.title.c_str(), c.seconds);
        if (!c.error.empty()) std::printf("    error: %s\n", c.error.c_str());
        for (const auto& ch : c.checks) {
            std::printf("    [%s] %s: measured %s, target %s (%s)\n", status_name(ch.status), ch.name.c_str(),
                        ch.measured.c_str(), ch.target.c_str(), ch.tolerance.c_str());
            if (!ch.note.empty()) std::printf("        %s\n", ch.note.c_str());
        }
        failed += !c.passed();
    }
    std::printf("%zu criteria, %d failed\n", suite.criteria.size(), failed);
    std::fflush(stdout);
    return failed == 0 ? 0 : 1;
}
