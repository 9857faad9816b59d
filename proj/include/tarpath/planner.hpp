#pragma once

#include <optional>

#include "tarpath/instance.hpp"
#include "tarpath/model.hpp"
#include "tarpath/oracle.hpp"

namespace tarpath {

struct PlanResult {
    PathSeq path;
    double predicted_value = 0.0;
    std::optional<double> true_yield;
    std::optional<double> regret;
    bool truncated = false;
};

/// From the empty sequence, repeatedly appends the action with the largest
/// predicted advantage (first in alphabet order on ties) until the terminal
/// token is emitted or `max_len` actions were taken.
[[nodiscard]] PlanResult greedy_path(const AdvantageModel& model, std::size_t max_len);

/// Longest path the model was built from, plus two.
[[nodiscard]] std::size_t default_max_len(const AdvantageModel& model);

/// Fills in the true yield of the planned path and its regret against J*.
[[nodiscard]] PlanResult evaluate_plan(PlanResult result, const PLInstance& instance, const OptimalValues& oracle);

}  // namespace tarpath
