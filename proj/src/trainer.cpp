#include "specmarl/trainer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <numeric>
#include <thread>

namespace specmarl {

void TrainConfig::validate() const {
    const int elites = std::max(1, static_cast<int>(population * elite_frac));
    if (population < 2 * elites) {
        throw std::invalid_argument("population must be at least twice the elite count");
    }
    if (iterations < 1 || episodes_per_member < 1 || eval_episodes < 1 || workers < 1) {
        throw std::invalid_argument("train config counts must be positive");
    }
    if (no_mon && centralized) {
        throw std::invalid_argument("no_mon and centralized are mutually exclusive");
    }
}

namespace {

int max_out_degree(const TaskMonitor& m) {
    int out = 1;
    for (const auto& ids : m.outgoing) out = std::max(out, static_cast<int>(ids.size()));
    return out;
}

// Dense id of the joint monitor-state tuple, used to pick centralized blocks.
std::size_t product_block(const TaskMonitor& m, const GameState& state) {
    std::size_t id = 0;
    for (std::size_t i = state.monitors.size(); i-- > 0;) {
        id = id * static_cast<std::size_t>(m.n_states) +
             static_cast<std::size_t>(state.monitors[i].q);
    }
    return id;
}

struct PolicyView {
    const PolicyParams& p;
    const Game& game;
    const TaskMonitor& m;

    void features(const GameState& state, int agent, int stage, std::vector<double>& x) const {
        x.clear();
        const double* s = state.joint.data() + static_cast<std::size_t>(agent) * game.dim();
        for (int k = 0; k < game.dim(); ++k) x.push_back(kPolicyPositionScale * s[k]);
        const MonitorPosition& pos = state.monitors[static_cast<std::size_t>(agent)];
        // Registers are clamped for the feature vector: the floor value used
        // before a subtask starts recording would otherwise saturate the maps.
        for (double v : pos.regs) x.push_back(p.no_mon ? 0.0 : std::clamp(v, -2.0, 2.0));
        x.push_back(static_cast<double>(stage));
        x.push_back(1.0);
    }

    const double* block(const GameState& state, int agent) const {
        std::size_t b;
        if (p.no_mon) {
            b = 0;
        } else if (p.centralized) {
            b = product_block(m, state);
        } else {
            b = static_cast<std::size_t>(state.monitors[static_cast<std::size_t>(agent)].q);
        }
        const std::size_t per_agent = static_cast<std::size_t>(p.n_blocks) * p.block_size();
        return p.flat.data() + static_cast<std::size_t>(agent) * per_agent + b * p.block_size();
    }

    // Argmax of the learned scores over the transitions open to this agent.
    int choose_delta(const GameState& state, int agent, const std::vector<double>& x,
                     const double* w) const {
        const int q = state.monitors[static_cast<std::size_t>(agent)].q;
        const auto& out_ids = m.outgoing[static_cast<std::size_t>(q)];
        std::vector<int> avail = available_transitions(game, state, agent);
        const double* rows = w + p.act_dim + 1;
        int best = -1;
        double best_score = 0.0;
        for (std::size_t slot = 0; slot < out_ids.size(); ++slot) {
            int tid = out_ids[slot];
            if (std::find(avail.begin(), avail.end(), tid) == avail.end()) continue;
            double acc = 0.0;
            const double* row = rows + slot * static_cast<std::size_t>(p.feat);
            for (int j = 0; j < p.feat; ++j) acc += row[j] * x[static_cast<std::size_t>(j)];
            if (best < 0 || acc > best_score) {
                best = tid;
                best_score = acc;
            }
        }
        return best;
    }

    void act(const GameState& state, int stage, JointAction& action) const {
        const int n = game.n_agents();
        action.env.assign(static_cast<std::size_t>(n) * static_cast<std::size_t>(p.act_dim), 0.0);
        action.deltas.assign(static_cast<std::size_t>(n), -1);
        std::vector<double> x;
        for (int i = 0; i < n; ++i) {
            features(state, i, stage, x);
            const double* w = block(state, i);
            const double* s = state.joint.data() + static_cast<std::size_t>(i) * game.dim();
            const double gain = 0.4 * (1.0 + std::abs(w[p.act_dim]));
            for (int k = 0; k < p.act_dim; ++k) {
                double waypoint = w[k] / kPolicyPositionScale;
                action.env[static_cast<std::size_t>(i * p.act_dim + k)] =
                    game.env.nav.max_speed * std::tanh(gain * (waypoint - s[k]));
            }
            action.deltas[static_cast<std::size_t>(i)] = choose_delta(state, i, x, w);
        }
    }
};

// Population evaluation over a small thread pool; member scores land by index
// so the result is independent of scheduling.
void parallel_for(int count, int workers, const std::function<void(int)>& fn) {
    if (workers <= 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    for (int w = 0; w < std::min(workers, count); ++w) {
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace

PolicyParams init_policy(const Game& game, const TaskMonitor& m, const TrainConfig& cfg) {
    if (game.env.kind != EnvConfig::Kind::Nav) {
        throw std::invalid_argument("training targets the navigation environments");
    }
    PolicyParams p;
    p.n_agents = game.n_agents();
    p.n_states = m.n_states;
    p.no_mon = cfg.no_mon;
    p.centralized = cfg.centralized;
    if (cfg.centralized) {
        std::size_t blocks = 1;
        for (int i = 0; i < p.n_agents; ++i) {
            blocks *= static_cast<std::size_t>(m.n_states);
            if (blocks > cfg.centralized_block_cap) {
                throw std::runtime_error("centralized policy table exceeds the block cap (" +
                                         std::to_string(cfg.centralized_block_cap) + ")");
            }
        }
        p.n_blocks = static_cast<int>(blocks);
    } else {
        p.n_blocks = m.n_states;
    }
    p.feat = game.dim() + m.n_registers() + 2;
    p.act_dim = game.dim();
    p.max_out = max_out_degree(m);
    p.flat.assign(p.expected_size(), 0.0);
    // Hold-position start: every block's waypoint sits on the agent's reset
    // spot, so untrained agents stay put instead of sweeping the workspace.
    const NavConfig& nav = game.env.nav;
    for (int agent = 0; agent < p.n_agents; ++agent) {
        std::vector<double> start(static_cast<std::size_t>(p.act_dim), 2.5);
        start[0] = nav.anchor_x - nav.spacing * (nav.n_agents - 1) / 2.0 + nav.spacing * agent;
        for (int b = 0; b < p.n_blocks; ++b) {
            std::size_t base = (static_cast<std::size_t>(agent) * static_cast<std::size_t>(p.n_blocks) +
                                static_cast<std::size_t>(b)) *
                               p.block_size();
            for (int k = 0; k < p.act_dim; ++k) {
                p.flat[base + static_cast<std::size_t>(k)] =
                    kPolicyPositionScale * start[static_cast<std::size_t>(k)];
            }
        }
    }
    return p;
}

// Per-dimension sampling widths: waypoints move in small world-scale steps,
// score rows explore at full width.
std::vector<double> initial_stddev(const PolicyParams& p, double init_std) {
    std::vector<double> out(p.expected_size(), init_std);
    const std::size_t blocks = static_cast<std::size_t>(p.n_agents) * static_cast<std::size_t>(p.n_blocks);
    for (std::size_t b = 0; b < blocks; ++b) {
        std::size_t base = b * p.block_size();
        for (int k = 0; k < p.act_dim; ++k) out[base + static_cast<std::size_t>(k)] = 0.25 * init_std;
        out[base + static_cast<std::size_t>(p.act_dim)] = 0.5 * init_std;
    }
    return out;
}

AugmentedRollout run_episode(const Game& game, const TaskMonitor& m, const PolicyParams& params,
                             int stage, std::uint64_t seed, double action_noise) {
    if (params.flat.size() != params.expected_size()) {
        throw std::invalid_argument("policy parameter vector has the wrong size");
    }
    PolicyView policy{params, game, m};
    GameState state = game_reset(game, seed);
    std::mt19937_64 noise_rng(mix_seed(seed, 0xac7e));
    AugmentedRollout rollout;
    JointAction action;
    const int T = game.env.horizon();
    for (int t = 0; t < T; ++t) {
        policy.act(state, stage, action);
        if (action_noise > 0.0) {
            for (double& a : action.env) a += uniform_in(noise_rng, -action_noise, action_noise);
        }
        game_step(game, state, action, &rollout);
    }
    policy.act(state, stage, action);
    game_finalize(game, state, &rollout, action.deltas);
    return rollout;
}

EvalReport evaluate(const PolicyParams& params, const Game& game, const Spec& spec,
                    const TaskMonitor& m, int episodes, std::uint64_t seed) {
    EvalReport report;
    report.episodes = episodes;
    report.depth_fraction.assign(static_cast<std::size_t>(m.max_depth) + 1, 0.0);
    int satisfied = 0;
    int accepted = 0;
    for (int e = 0; e < episodes; ++e) {
        AugmentedRollout rollout =
            run_episode(game, m, params, params.deploy_stage, mix_seed(seed, 0xe7a1, static_cast<std::uint64_t>(e)));
        if (satisfies(spec, project(rollout))) ++satisfied;
        bool all_final = true;
        for (int i = 0; i < game.n_agents(); ++i) {
            if (final_reward(rollout, i, m) <= 0.0) all_final = false;
            int d = m.depth[static_cast<std::size_t>(rollout.final_q[static_cast<std::size_t>(i)])];
            report.depth_fraction[static_cast<std::size_t>(d)] += 1.0;
        }
        if (all_final) ++accepted;
    }
    for (double& v : report.depth_fraction) {
        v /= static_cast<double>(episodes) * game.n_agents();
    }
    report.satisfaction = static_cast<double>(satisfied) / episodes;
    report.monitor_acceptance = static_cast<double>(accepted) / episodes;
    return report;
}

namespace {

struct Trainer {
    const Spec& spec;
    const TaskMonitor& m;
    const TrainConfig& cfg;
    ShapingConstants consts;
    PolicyParams proto;

    std::vector<double> mean;
    std::vector<double> stddev;
    std::vector<double> best;  // full vector holding the incumbent of the current context
    double best_score = -std::numeric_limits<double>::infinity();

    std::vector<CurvePoint> curve;
    int iteration = 0;
    double last_satisfaction = 0.0;

    std::pair<std::size_t, std::size_t> agent_span(int agent) const {
        const std::size_t per_agent = proto.expected_size() / static_cast<std::size_t>(proto.n_agents);
        return {static_cast<std::size_t>(agent) * per_agent, per_agent};
    }

    // New scoring context (different game, stage or parameter slice): scores
    // are not comparable across contexts, so the incumbent restarts.
    void reset_incumbent() {
        best = mean;
        best_score = -std::numeric_limits<double>::infinity();
    }

    PolicyParams materialize(const std::vector<double>& flat, std::span<const int> agents,
                             int stage) const {
        PolicyParams p = proto;
        p.deploy_stage = stage;
        if (static_cast<int>(agents.size()) == proto.n_agents) {
            p.flat = flat;
            return p;
        }
        // Group training: assemble a policy over the group's agents only.
        p.n_agents = static_cast<int>(agents.size());
        const std::size_t per_agent = proto.expected_size() / static_cast<std::size_t>(proto.n_agents);
        p.flat.clear();
        p.flat.reserve(per_agent * agents.size());
        for (int a : agents) {
            auto [off, len] = agent_span(a);
            p.flat.insert(p.flat.end(), flat.begin() + static_cast<std::ptrdiff_t>(off),
                          flat.begin() + static_cast<std::ptrdiff_t>(off + len));
        }
        return p;
    }

    double episode_score(const Game& game, const PolicyParams& params, int stage,
                         std::uint64_t seed) const {
        AugmentedRollout rollout = run_episode(game, m, params, stage, seed, cfg.action_noise);
        double total = 0.0;
        for (int i = 0; i < game.n_agents(); ++i) {
            // Stage offset plus the dense rollout reward. The offset is
            // constant within a stage, so selection rides on the shaped term.
            total += stage * stage_offset(consts) + shaped_reward(rollout, i, m, consts);
        }
        return total;
    }

    void cem_iteration(const Game& game, std::span<const int> agents,
                       const std::vector<std::size_t>& dims, int stage) {
        const int pop = cfg.population;
        std::vector<std::vector<double>> members(static_cast<std::size_t>(pop), mean);
        std::mt19937_64 rng(mix_seed(cfg.seed, 0x5ce9, static_cast<std::uint64_t>(iteration)));
        std::normal_distribution<double> normal;
        for (int i = 1; i < pop; ++i) {
            for (std::size_t d : dims) {
                members[static_cast<std::size_t>(i)][d] = mean[d] + stddev[d] * normal(rng);
            }
        }
        // Slot 0 carries the incumbent so the best score never regresses.
        if (std::isfinite(best_score)) members[0] = best;

        std::vector<double> scores(static_cast<std::size_t>(pop), 0.0);
        parallel_for(pop, cfg.workers, [&](int i) {
            PolicyParams p = materialize(members[static_cast<std::size_t>(i)], agents, stage);
            double total = 0.0;
            for (int e = 0; e < cfg.episodes_per_member; ++e) {
                // Common episode seeds keep the objective deterministic.
                total += episode_score(game, p, stage, mix_seed(cfg.seed, 0xe915, static_cast<std::uint64_t>(e)));
            }
            scores[static_cast<std::size_t>(i)] = total / cfg.episodes_per_member;
        });
        for (double s : scores) {
            if (!std::isfinite(s)) throw std::runtime_error("non-finite population member score");
        }

        std::vector<int> order(static_cast<std::size_t>(pop));
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
            return scores[static_cast<std::size_t>(a)] > scores[static_cast<std::size_t>(b)];
        });
        const int elites = std::max(1, static_cast<int>(pop * cfg.elite_frac));
        for (std::size_t d : dims) {
            double mu = 0.0;
            for (int r = 0; r < elites; ++r) {
                mu += members[static_cast<std::size_t>(order[static_cast<std::size_t>(r)])][d];
            }
            mu /= elites;
            double var = 0.0;
            for (int r = 0; r < elites; ++r) {
                double dx =
                    members[static_cast<std::size_t>(order[static_cast<std::size_t>(r)])][d] - mu;
                var += dx * dx;
            }
            mean[d] = mu;
            // Smoothed update keeps exploration alive past early elites.
            stddev[d] = std::max(cfg.min_std, 0.5 * std::sqrt(var / elites) + 0.5 * stddev[d]);
        }
        if (scores[static_cast<std::size_t>(order[0])] > best_score) {
            best_score = scores[static_cast<std::size_t>(order[0])];
            best = members[static_cast<std::size_t>(order[0])];
        }
        const double mean_score = std::accumulate(scores.begin(), scores.end(), 0.0) / pop;
        curve.push_back(CurvePoint{iteration, best_score, mean_score, last_satisfaction, stage});
        ++iteration;
    }
};

Game make_group_game(const Game& full, const std::vector<int>& group) {
    if (static_cast<int>(group.size()) == full.n_agents()) return full;
    EnvConfig env = full.env;
    env.nav.n_agents = static_cast<int>(group.size());
    return make_game(*full.monitor, env, full.gating, group);
}

}  // namespace

TrainResult train(const Game& game, const Spec& spec, const TaskMonitor& m, TrainConfig cfg) {
    cfg.validate();
    Trainer tr{spec, m, cfg, compute_constants(m, game.env.nav.box_lo, game.env.nav.box_hi),
               init_policy(game, m, cfg), {}, {}, {}, -std::numeric_limits<double>::infinity(),
               {}, 0, 0.0};
    tr.mean = tr.proto.flat;
    tr.stddev = initial_stddev(tr.proto, cfg.init_std);
    tr.reset_incumbent();

    std::vector<std::size_t> all_dims(tr.proto.expected_size());
    std::iota(all_dims.begin(), all_dims.end(), std::size_t{0});
    std::vector<int> all_agents(static_cast<std::size_t>(game.n_agents()));
    std::iota(all_agents.begin(), all_agents.end(), 0);

    TrainResult result;
    auto current_params = [&](int stage) {
        PolicyParams p = tr.proto;
        p.flat = std::isfinite(tr.best_score) ? tr.best : tr.mean;
        p.deploy_stage = stage;
        return p;
    };

    if (!cfg.staging) {
        for (int it = 0; it < cfg.iterations; ++it) {
            tr.cem_iteration(game, all_agents, all_dims, 0);
            if (cfg.eval_every > 0 && (it + 1) % cfg.eval_every == 0) {
                EvalReport rep = evaluate(current_params(0), game, spec, m, cfg.eval_episodes,
                                          mix_seed(cfg.seed, 0xeba1));
                tr.last_satisfaction = rep.satisfaction;
                if (cfg.early_stop >= 0.0 && rep.satisfaction >= cfg.early_stop) break;
            }
        }
        result.params = current_params(0);
        result.final_satisfaction =
            evaluate(result.params, game, spec, m, cfg.eval_episodes, mix_seed(cfg.seed, 0xeba1))
                .satisfaction;
        result.curve = tr.curve;
        result.consts = tr.consts;
        result.stages_completed = 1;
        return result;
    }

    // Curriculum: each stage trains the groups of its partition one after the
    // other, then the stage advances once every group clears the threshold
    // (or its share of the iteration budget is spent).
    StageSchedule schedule = build_schedule(game.n_agents(), cfg.k, cfg.f);
    result.stage_group_sizes = schedule.group_sizes;
    const int per_stage = std::max(1, cfg.iterations / schedule.stage_count());
    while (!schedule.complete && tr.iteration < cfg.iterations) {
        const int stage = schedule.current_stage;
        const Partition& groups = schedule.current_partition();
        const int per_group =
            std::max(1, per_stage / static_cast<int>(groups.size()));

        std::map<int, double> group_sat;
        for (std::size_t j = 0; j < groups.size(); ++j) {
            Game group_game = make_group_game(game, groups[j]);
            std::vector<std::size_t> dims;
            for (int a : groups[j]) {
                auto [off, len] = tr.agent_span(a);
                for (std::size_t d = off; d < off + len; ++d) dims.push_back(d);
            }
            tr.reset_incumbent();
            for (int it = 0; it < per_group && tr.iteration < cfg.iterations; ++it) {
                tr.cem_iteration(group_game, groups[j], dims, stage);
                if (cfg.eval_every > 0 && (it + 1) % cfg.eval_every == 0) {
                    PolicyParams gp = tr.materialize(
                        std::isfinite(tr.best_score) ? tr.best : tr.mean, groups[j], stage);
                    EvalReport rep =
                        evaluate(gp, group_game, spec, m, cfg.eval_episodes,
                                 mix_seed(cfg.seed, 0x97a9, static_cast<std::uint64_t>(j)));
                    tr.last_satisfaction = rep.satisfaction;
                    if (rep.satisfaction >= cfg.satisfaction_threshold) break;
                }
            }
            // Fold the group's incumbent into the running mean so later
            // groups and stages start from it.
            if (std::isfinite(tr.best_score)) {
                for (std::size_t d : dims) tr.mean[d] = tr.best[d];
            }
            PolicyParams gp = tr.materialize(tr.mean, groups[j], stage);
            EvalReport rep = evaluate(gp, make_group_game(game, groups[j]), spec, m,
                                      cfg.eval_episodes,
                                      mix_seed(cfg.seed, 0x97a9, static_cast<std::uint64_t>(j)));
            group_sat[static_cast<int>(j)] = rep.satisfaction;
        }

        advance_if_satisfied(schedule, group_sat, cfg.satisfaction_threshold);
        if (!schedule.complete && schedule.current_stage == stage) {
            // Threshold not met within budget; move on anyway so the final
            // stage still gets trained.
            if (schedule.current_stage + 1 < schedule.stage_count()) {
                ++schedule.current_stage;
            } else {
                schedule.complete = true;
            }
        }
        result.stages_completed = schedule.current_stage + (schedule.complete ? 1 : 0);
    }

    const int deploy_stage = schedule.stage_count() - 1;
    result.params = tr.proto;
    result.params.flat = tr.mean;
    result.params.deploy_stage = deploy_stage;
    result.final_satisfaction =
        evaluate(result.params, game, spec, m, cfg.eval_episodes, mix_seed(cfg.seed, 0xeba1))
            .satisfaction;
    result.curve = tr.curve;
    result.consts = tr.consts;
    return result;
}

}  // namespace specmarl
