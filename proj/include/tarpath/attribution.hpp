#pragma once

#include <vector>

#include "tarpath/model.hpp"

namespace tarpath {

/// Predicted yield of a path split into the optimal-yield estimate and one
/// drawdown per action, each tagged with the prefix it was taken from.
struct AttributionReport {
    struct Step {
        PathSeq prefix;
        TokenId action = 0;
        double drawdown = 0.0;
    };

    PathSeq path;
    double base = 0.0;
    std::vector<Step> steps;
    double total = 0.0;
    bool improper = false;
};

/// `total` is accumulated in the same order as predict_value and matches it
/// bit for bit. Improper paths report no steps and total 0 with the improper
/// flag set.
/// Throws InvalidInput on unknown tokens.
[[nodiscard]] AttributionReport attribute(const AdvantageModel& model, const PathSeq& path);

}  // namespace tarpath
