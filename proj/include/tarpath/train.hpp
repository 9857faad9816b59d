#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "tarpath/losses.hpp"
#include "tarpath/model.hpp"

namespace tarpath {

enum class Optimizer {
    GradientDescent,  // steepest descent
    LBFGS,            // limited-memory quasi-Newton direction, same line search
};

struct TrainConfig {
    double lambda = 100.0;
    double kappa = 1000.0;
    double step_size = 0.1;  // initial trial step of the line search
    double max_step = 4.0;   // cap on the max-norm of a trial step
    std::size_t max_iterations = 50000;
    double grad_tol = 1e-8;  // on the max-norm of the gradient
    std::uint64_t seed = 0;
    Optimizer optimizer = Optimizer::LBFGS;
    std::size_t history = 10;
};

/// Objective evaluated at the model's current parameters.
using Objective = std::function<LossValue(const AdvantageModel&)>;

struct TrainResult {
    AdvantageModel model;
    std::vector<double> trace;  // loss at the start and after every accepted step
    std::size_t iterations = 0;
    double grad_norm = 0.0;
    bool converged = false;
    std::string stop_reason;
};

/// Full-batch descent with Armijo backtracking (constant 1e-4, halving).
/// Deterministic: identical inputs give bit-identical parameters. Throws
/// Divergence when the loss or gradient becomes non-finite.
[[nodiscard]] TrainResult train(AdvantageModel model, const Objective& objective, const TrainConfig& config);

[[nodiscard]] Objective tar_objective(StateWeighting p0, RegressionTargets targets, double lambda, double kappa);
[[nodiscard]] Objective vlp_objective(StateWeighting p0, PenaltyMix mix, const PLInstance& instance, double lambda,
                                      double kappa);

}  // namespace tarpath
