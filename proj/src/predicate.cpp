#include "specmarl/predicate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

namespace specmarl {

namespace {

double linf(std::span<const double> a, std::span<const double> b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        d = std::max(d, std::abs(a[i] - b[i]));
    }
    return d;
}

}  // namespace

double quant_local(const Predicate& pred, std::span<const double> agent_state) {
    if (pred.kind != PredKind::ReachLocal) {
        throw DimensionError("quant_local called on a non-local predicate");
    }
    if (pred.target.size() != agent_state.size()) {
        throw DimensionError("local predicate target dimension does not match agent state");
    }
    return pred.tolerance - linf(agent_state, pred.target);
}

double quant_global(const Predicate& pred,
                    std::span<const double> joint_state,
                    std::span<const int> agent_ids,
                    int dim) {
    const std::size_t n = agent_ids.size();
    if (joint_state.size() != n * static_cast<std::size_t>(dim)) {
        throw DimensionError("joint state size does not match agent count");
    }
    if (pred.kind == PredKind::SumAtLeast) {
        double s = 0.0;
        for (double v : joint_state) s += v;
        return s - pred.threshold;
    }
    if (pred.kind != PredKind::ReachGlobal) {
        throw DimensionError("quant_global called on a local predicate");
    }
    const std::size_t d = static_cast<std::size_t>(dim);
    const bool broadcast = pred.target.size() == d;
    double worst = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        std::span<const double> seg;
        if (broadcast) {
            seg = std::span<const double>(pred.target);
        } else {
            const std::size_t off = static_cast<std::size_t>(agent_ids[j]) * d;
            if (off + d > pred.target.size()) {
                throw DimensionError("global predicate target too short for agent id");
            }
            seg = std::span<const double>(pred.target).subspan(off, d);
        }
        worst = std::max(worst, linf(joint_state.subspan(j * d, d), seg));
    }
    return pred.tolerance - worst;
}

double quant(const Predicate& pred,
             std::span<const double> joint_state,
             std::span<const int> agent_ids,
             int dim,
             int own_agent) {
    if (pred.is_local()) {
        // Locate own_agent's segment inside the restriction.
        for (std::size_t j = 0; j < agent_ids.size(); ++j) {
            if (agent_ids[j] == own_agent) {
                return quant_local(pred, joint_state.subspan(j * static_cast<std::size_t>(dim),
                                                             static_cast<std::size_t>(dim)));
            }
        }
        throw DimensionError("own agent not present in joint-state restriction");
    }
    return quant_global(pred, joint_state, agent_ids, dim);
}

bool holds(const Predicate& pred,
           std::span<const double> joint_state,
           std::span<const int> agent_ids,
           int dim,
           int own_agent) {
    return holds_value(quant(pred, joint_state, agent_ids, dim, own_agent));
}

}  // namespace specmarl
