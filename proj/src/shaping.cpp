#include "specmarl/shaping.hpp"

#include <algorithm>
#include <cmath>

namespace specmarl {

ShapingConstants compute_constants(const TaskMonitor& m,
                                   const std::vector<double>& box_lo,
                                   const std::vector<double>& box_hi) {
    if (box_lo.size() != box_hi.size() || box_lo.empty()) {
        throw std::invalid_argument("compute_constants: malformed state box");
    }
    double diameter = 0.0;
    for (std::size_t k = 0; k < box_lo.size(); ++k) {
        diameter = std::max(diameter, box_hi[k] - box_lo[k]);
    }
    ShapingConstants c;
    c.final_floor = kFinalRewardFloor;
    c.proximity_bound = 1.0 + diameter + 1.0;
    c.depth = m.depth;
    c.max_depth = m.max_depth;
    return c;
}

double proximity(const TaskMonitor& m, std::span<const double> joint_state,
                 std::span<const int> agent_ids, int agent, int q,
                 std::span<const double> registers) {
    if (m.is_final.at(static_cast<std::size_t>(q))) {
        throw std::invalid_argument("proximity is undefined on final states");
    }
    double best = -std::numeric_limits<double>::infinity();
    for (int tid : m.outgoing[static_cast<std::size_t>(q)]) {
        const Transition& t = m.trans(tid);
        if (t.self_loop) continue;
        best = std::max(best, guard_quant(m, t, joint_state, agent_ids, agent, registers));
    }
    return best;
}

double final_reward(const AugmentedRollout& rollout, int agent, const TaskMonitor& m) {
    const int q = rollout.final_q.at(static_cast<std::size_t>(agent));
    if (!m.is_final[static_cast<std::size_t>(q)]) return kNegInfReward;
    return final_state_reward(m, q, rollout.final_regs[static_cast<std::size_t>(agent)]);
}

double shaped_reward(const AugmentedRollout& rollout, int agent, const TaskMonitor& m,
                     const ShapingConstants& consts) {
    const int T = rollout.horizon();
    if (T <= 0) throw std::invalid_argument("shaped_reward: degenerate rollout");
    const int q_end = rollout.final_q.at(static_cast<std::size_t>(agent));
    if (m.is_final[static_cast<std::size_t>(q_end)]) return final_reward(rollout, agent, m);

    std::vector<int> agent_ids(static_cast<std::size_t>(rollout.base.n_agents));
    for (int i = 0; i < rollout.base.n_agents; ++i) agent_ids[static_cast<std::size_t>(i)] = i;

    // First step from which the agent stayed in its terminal monitor state.
    int settle = T + 1;
    for (int t = T; t >= 0; --t) {
        if (rollout.qs[static_cast<std::size_t>(t)][static_cast<std::size_t>(agent)] != q_end) break;
        settle = t;
    }
    double best;
    if (settle < T) {
        best = -std::numeric_limits<double>::infinity();
        for (int j = settle; j < T; ++j) {
            best = std::max(best, proximity(m, rollout.base.states[static_cast<std::size_t>(j)],
                                            agent_ids, agent, q_end,
                                            rollout.regs[static_cast<std::size_t>(j)]
                                                        [static_cast<std::size_t>(agent)]));
        }
    } else {
        // The terminal state was entered on the last read; score its
        // proximity at the final observation.
        best = proximity(m, rollout.base.states[static_cast<std::size_t>(T)], agent_ids, agent,
                         q_end, rollout.final_regs[static_cast<std::size_t>(agent)]);
    }
    const int depth = consts.depth.at(static_cast<std::size_t>(q_end));
    return best + 2.0 * consts.proximity_bound * (depth - consts.max_depth) + consts.final_floor;
}

double stage_offset(const ShapingConstants& consts) {
    return (2.0 * consts.max_depth + 1.0) * consts.proximity_bound;
}

double stage_reward_min(const ShapingConstants& consts) {
    return -2.0 * consts.max_depth * consts.proximity_bound;
}

double staged_reward(int stage_index, double monitor_reward, const ShapingConstants& consts) {
    const double clipped =
        std::clamp(monitor_reward, stage_reward_min(consts), stage_reward_max(consts));
    return stage_index * stage_offset(consts) + clipped;
}

}  // namespace specmarl
