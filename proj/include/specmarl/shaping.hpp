#pragma once

#include <vector>

#include "specmarl/game.hpp"
#include "specmarl/monitor.hpp"

namespace specmarl {

// Bounds used by the dense reward: a strictly positive floor on final-state
// rewards, an upper bound on |proximity| over the state box, and the monitor
// depth map.
struct ShapingConstants {
    double final_floor = kFinalRewardFloor;
    double proximity_bound = 0.0;
    int max_depth = 0;
    std::vector<int> depth;
};

// proximity_bound = 1 + L-inf diameter of the box + 1 margin, which bounds
// |tolerance - distance| for every reach guard with targets inside the box.
ShapingConstants compute_constants(const TaskMonitor& m,
                                   const std::vector<double>& box_lo,
                                   const std::vector<double>& box_hi);

// Largest guard value over the non-self transitions leaving `q`: how close
// agent `agent`'s monitor copy is to advancing. Undefined on final states.
double proximity(const TaskMonitor& m, std::span<const double> joint_state,
                 std::span<const int> agent_ids, int agent, int q,
                 std::span<const double> registers);

// Sparse per-agent rollout reward: the final-state reward when the agent's
// monitor ended final, -inf otherwise.
double final_reward(const AugmentedRollout& rollout, int agent, const TaskMonitor& m);

// Dense per-agent rollout reward. Final rollouts keep their sparse reward;
// non-final ones score best proximity over the settled tail of the rollout
// plus a depth bonus, arranged so that deeper progress always dominates.
double shaped_reward(const AugmentedRollout& rollout, int agent, const TaskMonitor& m,
                     const ShapingConstants& consts);

// Offset between curriculum stages; stage rewards use
//   stage_index * stage_offset + clipped monitor reward
// so any stage-i reward stays below any stage-(i+1) reward.
double stage_offset(const ShapingConstants& consts);

// Clip interval for monitor rewards entering the staged sum.
double stage_reward_min(const ShapingConstants& consts);
inline double stage_reward_max(const ShapingConstants& consts) { return consts.proximity_bound; }

double staged_reward(int stage_index, double monitor_reward, const ShapingConstants& consts);

}  // namespace specmarl
