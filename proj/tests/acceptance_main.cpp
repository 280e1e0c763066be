#include "lrex/verify/acceptance.hpp"

#include <cstdio>
#include <cstdlib>
#include <string>

// One PASS/FAIL line per criterion, check details indented below it.
// LREX_ACCEPT_ONLY=3,6 restricts the run; LREX_ACCEPT_THREADS sets the worker count.
int main() {
    lrex::AcceptanceOptions opt;
    if (const char* only = std::getenv("LREX_ACCEPT_ONLY")) {
        const std::string s = only;
        for (std::size_t p = 0; p < s.size();) {
            const std::size_t q = s.find(',', p);
            opt.only.push_back(std::stoi(s.substr(p, q - p)));
            p = q == std::string::npos ? s.size() : q + 1;
        }
    }
    if (const char* t = std::getenv("LREX_ACCEPT_THREADS")) opt.threads = std::atoi(t);
    opt.on_result = [](const lrex::CriterionResult& r) {
        std::printf("%s\n", lrex::summary_line(r).c_str());
        for (const auto& l : r.lines) std::printf("      %s\n", l.c_str());
        std::fflush(stdout);
    };
    int failed = 0;
    for (const auto& r : lrex::run_acceptance(opt)) failed += r.pass() ? 0 : 1;
    std::printf("%d criteria failed\n", failed);
    return failed == 0 ? 0 : 1;
}
