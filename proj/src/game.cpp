#include "specmarl/game.hpp"

#include <algorithm>
#include <ostream>

#include "specmarl/shaping.hpp"
#include "specmarl/sync.hpp"

namespace specmarl {

Game make_game(const TaskMonitor& monitor, EnvConfig env, bool gating, std::vector<int> agent_ids) {
    if (env.kind == EnvConfig::Kind::Nav) {
        env.nav.fill_defaults();
    } else {
        env.grid.fill_defaults();
    }
    if (env.dim() != monitor.dim) {
        throw DimensionError("environment dimension does not match the monitor");
    }
    Game game;
    game.monitor = &monitor;
    game.env = std::move(env);
    game.sync_states = identify_sync_states(monitor);
    if (agent_ids.empty()) {
        for (int i = 0; i < game.env.n_agents(); ++i) agent_ids.push_back(i);
    }
    if (static_cast<int>(agent_ids.size()) != game.env.n_agents()) {
        throw std::invalid_argument("agent id list does not match the environment agent count");
    }
    game.agent_ids = std::move(agent_ids);
    game.gating = gating;
    return game;
}

GameState game_reset(const Game& game, std::uint64_t seed) {
    GameState state;
    state.joint = game.env.kind == EnvConfig::Kind::Nav ? nav_reset(game.env.nav, seed)
                                                        : grid_reset(game.env.grid);
    state.monitors.assign(static_cast<std::size_t>(game.n_agents()),
                          MonitorPosition{game.monitor->initial, game.monitor->initial_registers});
    state.t = 0;
    return state;
}

std::vector<int> available_transitions(const Game& game, const GameState& state, int agent) {
    const TaskMonitor& m = *game.monitor;
    const MonitorPosition& pos = state.monitors[static_cast<std::size_t>(agent)];
    std::vector<int> out;
    for (int tid : m.outgoing[static_cast<std::size_t>(pos.q)]) {
        const Transition& t = m.trans(tid);
        if (t.self_loop ||
            guard_holds(m, t, state.joint, game.agent_ids, game.agent_ids[static_cast<std::size_t>(agent)],
                        pos.regs)) {
            out.push_back(tid);
        }
    }
    return out;
}

namespace {

// One synchronized monitor read of the current environment state. Returns the
// transition actually taken per agent.
std::vector<int> monitor_round(const Game& game, GameState& state, std::span<const int> proposals) {
    const TaskMonitor& m = *game.monitor;
    const int n = game.n_agents();
    std::vector<int> chosen(static_cast<std::size_t>(n));
    std::vector<std::vector<int>> avail(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        avail[static_cast<std::size_t>(i)] = available_transitions(game, state, i);
        int want = proposals.empty() ? -1 : proposals[static_cast<std::size_t>(i)];
        const auto& options = avail[static_cast<std::size_t>(i)];
        if (std::find(options.begin(), options.end(), want) != options.end()) {
            chosen[static_cast<std::size_t>(i)] = want;
        } else if (want < 0 && !m.trans(options.front()).self_loop) {
            // No proposal given: default to the first open transition.
            chosen[static_cast<std::size_t>(i)] = options.front();
        } else {
            // Illegal proposals coerce to the always-open self-loop.
            chosen[static_cast<std::size_t>(i)] =
                m.self_loop_id(state.monitors[static_cast<std::size_t>(i)].q);
        }
    }

    std::vector<int> applied = chosen;
    if (game.gating) {
        for (int i = 0; i < n; ++i) {
            int q = state.monitors[static_cast<std::size_t>(i)].q;
            if (!std::binary_search(game.sync_states.begin(), game.sync_states.end(), q)) continue;
            bool gathered = true;
            for (int j = 0; j < n; ++j) {
                if (state.monitors[static_cast<std::size_t>(j)].q != q) gathered = false;
            }
            if (!gathered) {
                // Wait for the others before committing to a branch.
                applied[static_cast<std::size_t>(i)] = m.self_loop_id(q);
                continue;
            }
            std::map<int, int> votes;
            for (int j = 0; j < n; ++j) votes[j] = chosen[static_cast<std::size_t>(j)];
            int winner = resolve_transition(votes, m.outgoing[static_cast<std::size_t>(q)]);
            bool open_to_all = true;
            for (int j = 0; j < n && !m.trans(winner).self_loop; ++j) {
                const auto& options = avail[static_cast<std::size_t>(j)];
                if (std::find(options.begin(), options.end(), winner) == options.end()) {
                    open_to_all = false;
                }
            }
            for (int j = 0; j < n; ++j) {
                applied[static_cast<std::size_t>(j)] =
                    (open_to_all && !m.trans(winner).self_loop) ? winner : m.self_loop_id(q);
            }
            break;  // the vote covered every agent
        }
    }

    for (int i = 0; i < n; ++i) {
        const Transition& t = m.trans(applied[static_cast<std::size_t>(i)]);
        MonitorPosition& pos = state.monitors[static_cast<std::size_t>(i)];
        apply_update(m, t, state.joint, game.agent_ids, game.agent_ids[static_cast<std::size_t>(i)],
                     pos.regs);
        pos.q = t.target;
    }
    return applied;
}

void record_row(const Game& game, const GameState& state, AugmentedRollout* record) {
    if (!record) return;
    record->base.n_agents = game.n_agents();
    record->base.dim = game.dim();
    record->base.states.push_back(state.joint);
    std::vector<int> qs;
    std::vector<std::vector<double>> regs;
    for (const MonitorPosition& pos : state.monitors) {
        qs.push_back(pos.q);
        regs.push_back(pos.regs);
    }
    record->qs.push_back(std::move(qs));
    record->regs.push_back(std::move(regs));
}

}  // namespace

void game_step(const Game& game, GameState& state, const JointAction& action,
               AugmentedRollout* record) {
    record_row(game, state, record);
    std::vector<int> applied = monitor_round(game, state, action.deltas);
    if (record) record->applied.push_back(applied);
    state.joint = game.env.kind == EnvConfig::Kind::Nav
                      ? nav_step(game.env.nav, state.joint, action.env)
                      : grid_step(game.env.grid, state.joint, action.grid);
    ++state.t;
}

void game_finalize(const Game& game, GameState& state, AugmentedRollout* record,
                   std::span<const int> proposals) {
    record_row(game, state, record);
    std::vector<int> applied = monitor_round(game, state, proposals);
    if (record) {
        record->applied.push_back(applied);
        record->final_q.clear();
        record->final_regs.clear();
        for (const MonitorPosition& pos : state.monitors) {
            record->final_q.push_back(pos.q);
            record->final_regs.push_back(pos.regs);
        }
    }
}

void write_trace_csv(std::ostream& out, const Game& game, const AugmentedRollout& rollout) {
    const TaskMonitor& m = *game.monitor;
    out << "t,agent";
    for (int k = 0; k < game.dim(); ++k) out << ",s" << k;
    out << ",q";
    for (int r = 0; r < m.n_registers(); ++r) out << ",v" << r;
    out << ",delta,reward\n";
    const int T = rollout.horizon();
    for (int t = 0; t <= T; ++t) {
        for (int i = 0; i < rollout.base.n_agents; ++i) {
            out << t << "," << i;
            for (double v : rollout.base.agent_state(t, i)) out << "," << v;
            out << "," << rollout.qs[static_cast<std::size_t>(t)][static_cast<std::size_t>(i)];
            for (double v : rollout.regs[static_cast<std::size_t>(t)][static_cast<std::size_t>(i)]) {
                out << "," << v;
            }
            out << "," << rollout.applied[static_cast<std::size_t>(t)][static_cast<std::size_t>(i)];
            if (t == T) {
                out << "," << final_reward(rollout, i, m);
            } else {
                out << ",0";
            }
            out << "\n";
        }
    }
}

}  // namespace specmarl
