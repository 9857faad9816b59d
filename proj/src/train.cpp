#include "tarpath/train.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "tarpath/errors.hpp"

namespace tarpath {

namespace {

constexpr double kArmijo = 1e-4;
constexpr int kMaxHalvings = 60;

double dot(const std::vector<double>& x, const std::vector<double>& y) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
}

double max_norm(const std::vector<double>& x) {
    double m = 0.0;
    for (double v : x) m = std::max(m, std::abs(v));
    return m;
}

bool finite(const LossValue& lv) {
    if (!std::isfinite(lv.loss)) return false;
    return std::all_of(lv.grad.begin(), lv.grad.end(), [](double g) { return std::isfinite(g); });
}

struct Correction {
    std::vector<double> s, y;
    double rho;
};

// Two-loop recursion: returns -H g.
std::vector<double> lbfgs_direction(const std::deque<Correction>& mem, const std::vector<double>& g) {
    std::vector<double> q = g;
    std::vector<double> alpha(mem.size());
    for (std::size_t i = mem.size(); i-- > 0;) {
        alpha[i] = mem[i].rho * dot(mem[i].s, q);
        for (std::size_t k = 0; k < q.size(); ++k) q[k] -= alpha[i] * mem[i].y[k];
    }
    const auto& last = mem.back();
    const double gamma = dot(last.s, last.y) / dot(last.y, last.y);
    for (double& v : q) v *= gamma;
    for (std::size_t i = 0; i < mem.size(); ++i) {
        const double beta = mem[i].rho * dot(mem[i].y, q);
        for (std::size_t k = 0; k < q.size(); ++k) q[k] += mem[i].s[k] * (alpha[i] - beta);
    }
    for (double& v : q) v = -v;
    return q;
}

}  // namespace

TrainResult train(AdvantageModel model, const Objective& objective, const TrainConfig& config) {
    if (!(config.step_size > 0.0) || !(config.grad_tol > 0.0) || !(config.max_step > 0.0))
        fail(ErrorKind::InvalidInput, "step size, step cap and gradient tolerance must be positive");

    std::vector<double> x(model.parameters().begin(), model.parameters().end());
    LossValue cur = objective(model);
    if (!finite(cur)) fail(ErrorKind::Divergence, "non-finite loss or gradient at iteration 0");

    TrainResult result{model, {cur.loss}, 0, max_norm(cur.grad), false, "max iterations"};
    std::deque<Correction> memory;
    std::vector<double> trial(x.size());

    for (std::size_t it = 1; it <= config.max_iterations; ++it) {
        if (result.grad_norm <= config.grad_tol) {
            result.converged = true;
            result.stop_reason = "gradient tolerance";
            break;
        }

        std::vector<double> dir;
        const bool quasi_newton = config.optimizer == Optimizer::LBFGS && !memory.empty();
        if (quasi_newton) dir = lbfgs_direction(memory, cur.grad);
        double slope = quasi_newton ? dot(cur.grad, dir) : 0.0;
        if (!quasi_newton || !(slope < 0.0)) {
            memory.clear();
            dir = cur.grad;
            for (double& d : dir) d = -d;
            slope = -dot(cur.grad, cur.grad);
        }

        double t = quasi_newton ? 1.0 : config.step_size;
        const double reach = t * max_norm(dir);
        if (reach > config.max_step) t *= config.max_step / reach;
        bool accepted = false;
        bool saw_finite = false;
        LossValue next;
        for (int h = 0; h <= kMaxHalvings; ++h, t *= 0.5) {
            for (std::size_t k = 0; k < x.size(); ++k) trial[k] = x[k] + t * dir[k];
            model.set_parameters(trial);
            next = objective(model);
            if (!finite(next)) continue;
            saw_finite = true;
            if (next.loss <= cur.loss + kArmijo * t * slope) {
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            model.set_parameters(x);
            if (!saw_finite)
                fail(ErrorKind::Divergence, "non-finite loss or gradient at iteration " + std::to_string(it));
            result.stop_reason = "line search stalled";
            break;
        }

        if (config.optimizer == Optimizer::LBFGS) {
            Correction c{std::vector<double>(x.size()), std::vector<double>(x.size()), 0.0};
            for (std::size_t k = 0; k < x.size(); ++k) {
                c.s[k] = trial[k] - x[k];
                c.y[k] = next.grad[k] - cur.grad[k];
            }
            const double sy = dot(c.s, c.y);
            if (sy > 1e-12 * std::sqrt(dot(c.s, c.s) * dot(c.y, c.y)) && sy > 0.0) {
                c.rho = 1.0 / sy;
                memory.push_back(std::move(c));
                if (memory.size() > config.history) memory.pop_front();
            }
        }

        x = trial;
        cur = std::move(next);
        result.trace.push_back(cur.loss);
        result.iterations = it;
        result.grad_norm = max_norm(cur.grad);
    }
    if (!result.converged && result.grad_norm <= config.grad_tol) {
        result.converged = true;
        result.stop_reason = "gradient tolerance";
    }
    model.set_parameters(x);
    result.model = std::move(model);
    return result;
}

Objective tar_objective(StateWeighting p0, RegressionTargets targets, double lambda, double kappa) {
    return [p0 = std::move(p0), targets = std::move(targets), lambda, kappa](const AdvantageModel& m) {
        return tar_loss(m, p0, targets, lambda, kappa);
    };
}

Objective vlp_objective(StateWeighting p0, PenaltyMix mix, const PLInstance& instance, double lambda, double kappa) {
    return [p0 = std::move(p0), mix = std::move(mix), &instance, lambda, kappa](const AdvantageModel& m) {
        return vlp_loss(m, p0, mix, instance, lambda, kappa);
    };
}

}  // namespace tarpath
