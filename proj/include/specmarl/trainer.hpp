#pragma once

#include <cstdint>

#include "specmarl/game.hpp"
#include "specmarl/scaling.hpp"
#include "specmarl/shaping.hpp"

namespace specmarl {

// Per-agent policy with one block per monitor state. A block holds a
// waypoint and a gain driving the agent's velocity
//     a_k = max_speed * tanh(gain * (waypoint_k - s_k))
// plus score rows over features [scaled own state, registers, stage, 1]
// ranking the state's outgoing transitions.
//
// no_mon masks the monitor from the policy: block 0 is always used and the
// register features are zeroed; reward shaping is untouched.
//
// centralized swaps the per-agent blocks for blocks indexed by the joint
// tuple of all monitor states — the product-monitor view, whose block count
// grows as |Q|^N.
struct PolicyParams {
    int n_agents = 0;
    int n_states = 0;  // monitor states (component monitor)
    int n_blocks = 0;  // n_states, or |Q|^N when centralized
    int feat = 0;
    int act_dim = 0;
    int max_out = 0;
    bool no_mon = false;
    bool centralized = false;
    int deploy_stage = 0;  // stage feature value used at evaluation time
    std::vector<double> flat;

    // waypoint, gain, then the score rows
    std::size_t block_size() const {
        return static_cast<std::size_t>(act_dim) + 1 +
               static_cast<std::size_t>(max_out) * static_cast<std::size_t>(feat);
    }
    std::size_t expected_size() const {
        return static_cast<std::size_t>(n_agents) * static_cast<std::size_t>(n_blocks) *
               block_size();
    }
};

// Position features and waypoint parameters are scaled so unit-variance
// parameters cover the workspace: a waypoint parameter w places the target at
// w / kPolicyPositionScale in world units.
inline constexpr double kPolicyPositionScale = 0.1;

struct TrainConfig {
    int population = 32;
    double elite_frac = 0.25;
    int iterations = 60;
    int episodes_per_member = 4;
    int eval_episodes = 100;
    std::uint64_t seed = 0;
    bool staging = false;
    bool no_mon = false;
    bool centralized = false;
    double satisfaction_threshold = 0.9;
    double early_stop = -1.0;  // stop when eval satisfaction reaches this, if >= 0
    int eval_every = 5;
    int workers = 1;
    int k = 2;
    int f = 2;
    double init_std = 1.0;
    double min_std = 0.05;
    double action_noise = 0.1;  // uniform velocity jitter during training rollouts
    std::size_t centralized_block_cap = 1 << 14;

    void validate() const;
};

struct CurvePoint {
    int iteration = 0;
    double best_score = 0.0;
    double mean_score = 0.0;
    double satisfaction = 0.0;
    int stage = 0;
};

struct EvalReport {
    double satisfaction = 0.0;        // trajectory-oracle satisfaction rate
    double monitor_acceptance = 0.0;  // all agents final with positive reward
    std::vector<double> depth_fraction;  // share of agent endings per depth
    int episodes = 0;
};

struct TrainResult {
    PolicyParams params;
    std::vector<CurvePoint> curve;
    ShapingConstants consts;
    int stages_completed = 0;
    std::vector<int> stage_group_sizes;  // visited curriculum sizes
    double final_satisfaction = 0.0;
};

PolicyParams init_policy(const Game& game, const TaskMonitor& m, const TrainConfig& cfg);

// Runs one episode under the policy and returns the recorded rollout.
// action_noise adds seeded uniform velocity jitter (training-time exploration;
// evaluation uses the deterministic policy).
AugmentedRollout run_episode(const Game& game, const TaskMonitor& m, const PolicyParams& params,
                             int stage, std::uint64_t seed, double action_noise = 0.0);

// Population search driven by the summed dense rollout rewards, with sync
// voting active during rollouts. Deterministic for a fixed seed and worker
// count-independent.
TrainResult train(const Game& game, const Spec& spec, const TaskMonitor& m, TrainConfig cfg);

EvalReport evaluate(const PolicyParams& params, const Game& game, const Spec& spec,
                    const TaskMonitor& m, int episodes, std::uint64_t seed);

}  // namespace specmarl
