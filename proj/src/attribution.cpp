#include "tarpath/attribution.hpp"

namespace tarpath {

AttributionReport attribute(const AdvantageModel& model, const PathSeq& path) {
    AttributionReport report;
    report.path = path;
    report.base = model.c();
    report.improper = !is_proper(classify(model.alphabet(), path));
    if (report.improper) return report;

    double total = model.c();
    auto cur = model.start();
    for (std::size_t k = 0; k < path.size(); ++k) {
        const double d = model.step(cur, path[k]).advantage;
        report.steps.push_back({path.prefix(k), path[k], d});
        total += d;
        cur = model.advance(cur, path[k]);
    }
    report.total = total;
    return report;
}

}  // namespace tarpath
