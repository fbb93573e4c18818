#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "specmarl/predicate.hpp"

namespace specmarl {

enum class SpecKind { Achieve, Ensuring, Seq, Or };

// One node of the specification tree. `pred` is the achieved predicate for
// Achieve nodes and the constraint predicate for Ensuring nodes.
struct SpecNode {
    SpecKind kind = SpecKind::Achieve;
    Predicate pred;
    int left = -1;
    int right = -1;
};

// Specification stored as a node pool; `root` indexes into `nodes`.
struct Spec {
    std::vector<SpecNode> nodes;
    int root = -1;

    const SpecNode& at(int id) const { return nodes.at(static_cast<std::size_t>(id)); }
    bool empty() const { return root < 0; }
};

Spec spec_achieve(Predicate pred);
Spec spec_ensuring(Spec inner, Predicate constraint);
Spec spec_seq(Spec first, Spec second);
Spec spec_or(Spec left, Spec right);

// Parses the surface syntax:
//   spec   := term (";" term)*
//   term   := factor ("or" factor)*
//   factor := "achieve"? pred | "(" spec ")" | "[" spec "]" | factor "ensuring" pred
//   pred   := ("reach_lo" | "reach_gl") "(" num ("," num)* ")"
// ";" binds looser than "or"; the achieve keyword is optional. Square and
// round brackets both group. Ensuring constraints must be local.
//
// If expected_dim > 0, local targets must have exactly that dimension and
// global targets a positive multiple of it.
Spec parse_spec(const std::string& text, int expected_dim = 0, double tolerance = 1.0);

std::string to_string(const Spec& spec);

// Joint-state trajectory: states[t] is the concatenation of all agent states
// at step t, so a horizon-T rollout stores T+1 rows.
struct Trajectory {
    int n_agents = 0;
    int dim = 0;
    std::vector<std::vector<double>> states;

    int horizon() const { return static_cast<int>(states.size()) - 1; }
    std::span<const double> agent_state(int t, int agent) const {
        return std::span<const double>(states[static_cast<std::size_t>(t)])
            .subspan(static_cast<std::size_t>(agent) * static_cast<std::size_t>(dim),
                     static_cast<std::size_t>(dim));
    }
};

// Chosen split index per Seq node id, recorded when a Seq is satisfied.
using SplitAudit = std::map<int, int>;

// Direct recursive check that `traj` restricted to `agents` satisfies the
// specification, with exhaustive split search for Seq nodes. Achieve of a
// local predicate requires every listed agent to hit it at least once (each
// at its own step); a global predicate needs one step where the whole
// restriction holds simultaneously. This is the reference oracle the monitor
// pipeline is tested against.
bool satisfies(const Spec& spec, const Trajectory& traj, const std::vector<int>& agents,
               SplitAudit* audit = nullptr);

inline bool satisfies(const Spec& spec, const Trajectory& traj) {
    std::vector<int> all(static_cast<std::size_t>(traj.n_agents));
    for (int i = 0; i < traj.n_agents; ++i) all[static_cast<std::size_t>(i)] = i;
    return satisfies(spec, traj, all);
}

}  // namespace specmarl
