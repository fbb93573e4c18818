#pragma once

#include <iosfwd>

#include "specmarl/envs.hpp"
#include "specmarl/monitor.hpp"

namespace specmarl {

struct MonitorPosition {
    int q = 0;
    std::vector<double> regs;
};

// Joint environment state plus each agent's monitor copy.
struct GameState {
    std::vector<double> joint;
    std::vector<MonitorPosition> monitors;
    int t = 0;
};

struct JointAction {
    std::vector<double> env;  // n_agents * dim velocities (nav) — unused for grid
    std::vector<int> grid;    // per-agent discrete actions (grid only)
    std::vector<int> deltas;  // per-agent proposed transition id
};

// Augmented rollout with the pre-read convention: row t holds the monitor
// position each agent was in when observing state t. The terminal read of the
// last state lands in final_q / final_regs, which is what rewards inspect.
struct AugmentedRollout {
    Trajectory base;
    std::vector<std::vector<int>> qs;                        // [t][agent]
    std::vector<std::vector<std::vector<double>>> regs;      // [t][agent][register]
    std::vector<std::vector<int>> applied;                   // [t][agent] transition taken
    std::vector<int> final_q;                                // per agent
    std::vector<std::vector<double>> final_regs;             // per agent

    int horizon() const { return base.horizon(); }
};

struct EnvConfig {
    enum class Kind { Nav, Grid } kind = Kind::Nav;
    NavConfig nav;
    GridConfig grid;

    int dim() const { return kind == Kind::Nav ? nav.dim : 2; }
    int n_agents() const { return kind == Kind::Nav ? nav.n_agents : grid.n_agents; }
    int horizon() const { return kind == Kind::Nav ? nav.horizon : grid.horizon; }
};

// One playable instance: environment, a shared monitor whose copy every agent
// runs, the synchronization states, and the (global) ids of the agents that
// take part — a strict subset during curriculum group training.
struct Game {
    const TaskMonitor* monitor = nullptr;
    EnvConfig env;
    std::vector<int> sync_states;
    std::vector<int> agent_ids;
    bool gating = true;

    int n_agents() const { return env.n_agents(); }
    int dim() const { return env.dim(); }
};

Game make_game(const TaskMonitor& monitor, EnvConfig env, bool gating = true,
               std::vector<int> agent_ids = {});

GameState game_reset(const Game& game, std::uint64_t seed);

// Transitions the agent could legally take from its current position: the
// self-loop always, local guards checked on the agent's own state, global
// guards on the joint state.
std::vector<int> available_transitions(const Game& game, const GameState& state, int agent);

// Advances monitors by one read of the current state, then the environment by
// one step. At a synchronization state an agent holds its monitor until every
// agent has arrived; once gathered, the majority-vote winner is taken by all
// of them simultaneously (or everyone holds when it is not open to all).
// Illegal proposals coerce to the self-loop. Appends to `record` if given.
void game_step(const Game& game, GameState& state, const JointAction& action,
               AugmentedRollout* record = nullptr);

// Terminal monitor read of the final environment state; no environment step.
// Without proposals each agent defaults to its first open transition.
void game_finalize(const Game& game, GameState& state, AugmentedRollout* record = nullptr,
                   std::span<const int> proposals = {});

inline const Trajectory& project(const AugmentedRollout& rollout) { return rollout.base; }

// Debug dump: t, agent, state components, monitor state, registers, applied
// transition, final reward.
void write_trace_csv(std::ostream& out, const Game& game, const AugmentedRollout& rollout);

}  // namespace specmarl
