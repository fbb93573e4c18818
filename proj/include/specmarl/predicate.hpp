#pragma once

#include <span>
#include <vector>

#include "specmarl/common.hpp"

namespace specmarl {

enum class PredKind {
    ReachLocal,   // L-inf ball around a point, one agent's state
    ReachGlobal,  // L-inf ball around per-agent targets, joint state
    SumAtLeast,   // sum of all observed components exceeds a threshold (joint)
};

// Atomic condition over agent or joint states. Quantitative value is positive
// exactly when the Boolean predicate holds (modulo the kHoldsBand guard).
//
// ReachGlobal targets come in two encodings: a single point of agent dimension
// (broadcast to every agent) or a concatenation of per-agent points indexed by
// the agent's global id.
struct Predicate {
    PredKind kind = PredKind::ReachLocal;
    std::vector<double> target;
    double tolerance = 1.0;
    double threshold = 0.0;  // SumAtLeast only

    bool is_local() const { return kind == PredKind::ReachLocal; }
};

inline Predicate reach_local(std::vector<double> point, double tolerance = 1.0) {
    return Predicate{PredKind::ReachLocal, std::move(point), tolerance, 0.0};
}

inline Predicate reach_global(std::vector<double> targets, double tolerance = 1.0) {
    return Predicate{PredKind::ReachGlobal, std::move(targets), tolerance, 0.0};
}

inline Predicate sum_at_least(double threshold) {
    return Predicate{PredKind::SumAtLeast, {}, 1.0, threshold};
}

// Quantitative value of a local predicate on one agent's state.
double quant_local(const Predicate& pred, std::span<const double> agent_state);

// Quantitative value of a global predicate on a set of agent states.
// `agent_ids` carries each state's original index, used to pick the matching
// segment of a concatenated target.
double quant_global(const Predicate& pred,
                    std::span<const double> joint_state,
                    std::span<const int> agent_ids,
                    int dim);

// Dispatch on predicate domain: local predicates read `own_agent`'s segment of
// the joint state, global predicates read the whole restriction.
double quant(const Predicate& pred,
             std::span<const double> joint_state,
             std::span<const int> agent_ids,
             int dim,
             int own_agent);

inline bool holds_value(double q) { return q > kHoldsBand; }

bool holds(const Predicate& pred,
           std::span<const double> joint_state,
           std::span<const int> agent_ids,
           int dim,
           int own_agent);

}  // namespace specmarl
