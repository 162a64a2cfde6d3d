#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace egrowth {

inline constexpr int acceptance_criteria = 12;

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    /// Failed sub-checks, or a short summary when everything passed.
    std::string detail;
    double seconds = 0.0;
    std::vector<std::pair<std::string, double>> metrics;

    std::string to_json() const;
};

/// Runs one criterion on an n x n grid over [-2, 2]^2. Solver errors are
/// caught and reported as a failure.
CriterionResult run_criterion(int id, int n = 256);

/// Runs the selected criteria (all when empty) in order; `on_result` sees each
/// result as soon as it is available.
std::vector<CriterionResult> run_acceptance(int n = 256, const std::vector<int>& selection = {},
                                            const std::function<void(const CriterionResult&)>& on_result = {});

std::string criterion_name(int id);

}  // namespace egrowth
