#pragma once

#include <random>
#include <vector>

#include "specmarl/game.hpp"
#include "specmarl/monitor.hpp"
#include "specmarl/spec.hpp"

namespace specmarl::testing {

inline Trajectory make_traj(int n_agents, int dim,
                            std::vector<std::vector<double>> states) {
    Trajectory t;
    t.n_agents = n_agents;
    t.dim = dim;
    t.states = std::move(states);
    return t;
}

inline std::vector<int> all_agents(int n) {
    std::vector<int> ids(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) ids[static_cast<std::size_t>(i)] = i;
    return ids;
}

// Random specification over 2-d reach predicates, optionally with ensuring
// wrappers, for structural property fuzzing.
inline Spec random_spec(std::mt19937_64& rng, int depth, bool allow_ensuring = true) {
    auto coord = [&] { return static_cast<double>(static_cast<int>(rng() % 9)) - 4.0; };
    if (depth == 0 || rng() % 3 == 0) {
        std::vector<double> target{coord(), coord()};
        return rng() % 2 == 0 ? spec_achieve(reach_local(target))
                              : spec_achieve(reach_global(target));
    }
    switch (rng() % (allow_ensuring ? 3 : 2)) {
        case 0:
            return spec_seq(random_spec(rng, depth - 1, allow_ensuring),
                            random_spec(rng, depth - 1, allow_ensuring));
        case 1:
            return spec_or(random_spec(rng, depth - 1, allow_ensuring),
                           random_spec(rng, depth - 1, allow_ensuring));
        default:
            return spec_ensuring(random_spec(rng, depth - 1, allow_ensuring),
                                 reach_local({coord(), coord()}, 8.0));
    }
}

// Goal anchors of a monitor: the written points of every reach guard.
inline std::vector<std::vector<double>> guard_anchors(const TaskMonitor& m) {
    std::vector<std::vector<double>> anchors;
    for (const Transition& t : m.transitions) {
        for (const GuardPart& g : t.guards) {
            if (g.pred.kind == PredKind::SumAtLeast) continue;
            std::vector<double> point(g.pred.target.begin(),
                                      g.pred.target.begin() + m.dim);
            anchors.push_back(std::move(point));
        }
    }
    if (anchors.empty()) anchors.push_back(std::vector<double>(static_cast<std::size_t>(m.dim), 0.0));
    return anchors;
}

// Monitor-legal random rollout. Reads are biased toward the guard goals so
// transitions actually fire and final states get reached.
inline AugmentedRollout random_rollout(const TaskMonitor& m, int n_agents, int T,
                                       std::mt19937_64& rng, double box = 12.0) {
    AugmentedRollout r;
    r.base.n_agents = n_agents;
    r.base.dim = m.dim;
    std::vector<int> ids = all_agents(n_agents);
    const std::vector<std::vector<double>> anchors = guard_anchors(m);
    std::vector<int> q(static_cast<std::size_t>(n_agents), m.initial);
    std::vector<std::vector<double>> regs(static_cast<std::size_t>(n_agents), m.initial_registers);
    for (int t = 0; t <= T; ++t) {
        std::vector<double> joint(static_cast<std::size_t>(n_agents * m.dim));
        if (rng() % 2 == 0) {
            const auto& anchor = anchors[static_cast<std::size_t>(rng() % anchors.size())];
            for (std::size_t i = 0; i < joint.size(); ++i) {
                joint[i] = anchor[i % anchor.size()] + uniform_in(rng, -1.2, 1.2);
            }
        } else {
            for (double& v : joint) v = uniform_in(rng, -box, box);
        }
        r.base.states.push_back(joint);
        r.qs.push_back(q);
        r.regs.push_back(regs);
        std::vector<int> applied(static_cast<std::size_t>(n_agents));
        for (int i = 0; i < n_agents; ++i) {
            std::vector<int> open;
            for (int tid : m.outgoing[static_cast<std::size_t>(q[static_cast<std::size_t>(i)])]) {
                const Transition& tr = m.trans(tid);
                if (tr.self_loop ||
                    guard_holds(m, tr, joint, ids, i, regs[static_cast<std::size_t>(i)])) {
                    open.push_back(tid);
                }
            }
            int pick = open[static_cast<std::size_t>(rng() % open.size())];
            const Transition& tr = m.trans(pick);
            apply_update(m, tr, joint, ids, i, regs[static_cast<std::size_t>(i)]);
            q[static_cast<std::size_t>(i)] = tr.target;
            applied[static_cast<std::size_t>(i)] = pick;
        }
        r.applied.push_back(applied);
    }
    r.final_q = q;
    r.final_regs = regs;
    return r;
}

}  // namespace specmarl::testing
