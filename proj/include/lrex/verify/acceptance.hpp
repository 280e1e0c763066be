#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace lrex {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool checks_pass = false;  // every numeric check within its pinned tolerance
    double seconds = 0.0;
    double budget_seconds = 0.0;
    std::vector<std::string> lines;  // one per check: value, target, tolerance

    bool pass() const { return checks_pass && seconds <= budget_seconds; }
};

struct AcceptanceOptions {
    std::uint64_t seed = 20240611;
    int threads = 0;  // 0: hardware concurrency
    std::vector<int> only;  // empty: criteria 1..8
    std::function<void(const CriterionResult&)> on_result;
};

/// Criterion ids 1..8; throws BadInterval on any other id.
const char* criterion_name(int id);
CriterionResult run_criterion(int id, const AcceptanceOptions& opt);
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt);

/// "PASS  3 tauberian-identity  1.2 s / 120 s"
std::string summary_line(const CriterionResult& r);
std::string acceptance_csv(const std::vector<CriterionResult>& rows);

}  // namespace lrex
