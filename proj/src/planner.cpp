#include "tarpath/planner.hpp"

#include "tarpath/errors.hpp"

namespace tarpath {

PlanResult greedy_path(const AdvantageModel& model, std::size_t max_len) {
    if (max_len < 1) fail(ErrorKind::InvalidInput, "planning horizon must be at least 1");
    const ActionAlphabet& alphabet = model.alphabet();
    PlanResult result;
    result.truncated = true;
    auto cur = model.start();
    for (std::size_t k = 0; k < max_len; ++k) {
        TokenId best = 0;
        double best_adv = model.step(cur, 0).advantage;
        for (TokenId a = 1; a < alphabet.size(); ++a) {
            const double adv = model.step(cur, a).advantage;
            if (adv > best_adv) {
                best = a;
                best_adv = adv;
            }
        }
        result.path.elems.push_back(best);
        cur = model.advance(cur, best);
        if (alphabet.is_terminal(best)) {
            result.truncated = false;
            break;
        }
    }
    result.predicted_value = predict_value(model, result.path);
    return result;
}

std::size_t default_max_len(const AdvantageModel& model) { return model.max_path_length() + 2; }

PlanResult evaluate_plan(PlanResult result, const PLInstance& instance, const OptimalValues& oracle) {
    if (!(instance.alphabet() == oracle.alphabet()))
        fail(ErrorKind::InvalidInput, "plan evaluation needs the oracle of the same instance");
    const double y = yield_of(instance, result.path);
    result.true_yield = y;
    result.regret = oracle.j_star() - y;
    return result;
}

}  // namespace tarpath
