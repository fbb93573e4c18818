#include "specmarl/envs.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace specmarl {

void NavConfig::fill_defaults() {
    if (box_lo.empty()) box_lo.assign(static_cast<std::size_t>(dim), -20.0);
    if (box_hi.empty()) box_hi.assign(static_cast<std::size_t>(dim), 20.0);
    if (box_lo.size() != static_cast<std::size_t>(dim) ||
        box_hi.size() != static_cast<std::size_t>(dim)) {
        throw std::invalid_argument("state box does not match the environment dimension");
    }
    for (int k = 0; k < dim; ++k) {
        if (!(box_lo[static_cast<std::size_t>(k)] < box_hi[static_cast<std::size_t>(k)])) {
            throw std::invalid_argument("degenerate state box");
        }
    }
    if (horizon < 1 || n_agents < 1 || max_speed <= 0.0 || dt <= 0.0) {
        throw std::invalid_argument("invalid navigation config");
    }
}

std::vector<double> nav_reset(const NavConfig& cfg, std::uint64_t seed) {
    std::mt19937_64 rng(mix_seed(seed, 0x6e61765fULL));
    std::vector<double> joint(static_cast<std::size_t>(cfg.n_agents * cfg.dim));
    // Agents start in a line spaced along x, centered under the anchor, with
    // the remaining coordinates drawn uniformly from (2, 3).
    const double x0 = cfg.anchor_x - cfg.spacing * (cfg.n_agents - 1) / 2.0;
    for (int i = 0; i < cfg.n_agents; ++i) {
        double* s = joint.data() + static_cast<std::size_t>(i * cfg.dim);
        s[0] = x0 + cfg.spacing * i;
        for (int k = 1; k < cfg.dim; ++k) s[k] = uniform_in(rng, 2.0, 3.0);
        for (int k = 0; k < cfg.dim; ++k) {
            s[k] = std::clamp(s[k], cfg.box_lo[static_cast<std::size_t>(k)],
                              cfg.box_hi[static_cast<std::size_t>(k)]);
        }
    }
    return joint;
}

std::vector<double> nav_step(const NavConfig& cfg, std::span<const double> joint,
                             std::span<const double> actions) {
    if (joint.size() != static_cast<std::size_t>(cfg.n_agents * cfg.dim) ||
        actions.size() != joint.size()) {
        throw DimensionError("nav_step: state/action size mismatch");
    }
    std::vector<double> out(joint.begin(), joint.end());
    for (int i = 0; i < cfg.n_agents; ++i) {
        for (int k = 0; k < cfg.dim; ++k) {
            const std::size_t idx = static_cast<std::size_t>(i * cfg.dim + k);
            double a = std::clamp(actions[idx], -cfg.max_speed, cfg.max_speed);
            out[idx] = std::clamp(out[idx] + a * cfg.dt, cfg.box_lo[static_cast<std::size_t>(k)],
                                  cfg.box_hi[static_cast<std::size_t>(k)]);
        }
    }
    return out;
}

void GridConfig::fill_defaults() {
    if (width < 1 || height < 1 || width > 5 || height > 5) {
        throw std::invalid_argument("grid sides must be between 1 and 5");
    }
    if (n_agents < 1 || n_agents > 2 || horizon < 1 || horizon > 6) {
        throw std::invalid_argument("grid oracle configs are capped at 2 agents and horizon 6");
    }
    if (start_cells.empty()) start_cells.assign(static_cast<std::size_t>(2 * n_agents), 0);
    if (start_cells.size() != static_cast<std::size_t>(2 * n_agents)) {
        throw std::invalid_argument("start_cells must hold one (x, y) pair per agent");
    }
}

std::size_t GridConfig::rollout_count() const {
    std::size_t count = 1;
    for (int i = 0; i < n_agents * horizon; ++i) count *= kGridActions;
    return count;
}

std::vector<double> grid_reset(const GridConfig& cfg) {
    std::vector<double> joint;
    joint.reserve(static_cast<std::size_t>(2 * cfg.n_agents));
    for (int v : cfg.start_cells) joint.push_back(static_cast<double>(v));
    return joint;
}

std::vector<double> grid_step(const GridConfig& cfg, std::span<const double> joint,
                              std::span<const int> actions) {
    std::vector<double> out(joint.begin(), joint.end());
    for (int i = 0; i < cfg.n_agents; ++i) {
        double& x = out[static_cast<std::size_t>(2 * i)];
        double& y = out[static_cast<std::size_t>(2 * i + 1)];
        switch (actions[static_cast<std::size_t>(i)]) {
            case 0: break;
            case 1: y += 1; break;
            case 2: y -= 1; break;
            case 3: x += 1; break;
            case 4: x -= 1; break;
            default: throw std::invalid_argument("unknown grid action");
        }
        x = std::clamp(x, 0.0, static_cast<double>(cfg.width - 1));
        y = std::clamp(y, 0.0, static_cast<double>(cfg.height - 1));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Exhaustive oracle
// ---------------------------------------------------------------------------

bool monitor_accepts(const TaskMonitor& m, const Trajectory& traj, int agent) {
    // Violation flags are the only registers that can gate acceptance, so the
    // search state is (monitor state, violation mask).
    std::vector<int> viol_regs;
    for (const Transition& t : m.transitions) {
        for (const RegisterOp& op : t.ops) {
            if (op.kind == RegisterOp::Kind::FlagViolation) viol_regs.push_back(op.reg);
        }
    }
    std::sort(viol_regs.begin(), viol_regs.end());
    viol_regs.erase(std::unique(viol_regs.begin(), viol_regs.end()), viol_regs.end());
    if (viol_regs.size() > 16) {
        throw std::runtime_error("monitor_accepts supports at most 16 constraint scopes");
    }
    auto viol_bit = [&](int reg) {
        return static_cast<std::uint32_t>(1)
               << (std::lower_bound(viol_regs.begin(), viol_regs.end(), reg) - viol_regs.begin());
    };

    std::vector<int> agent_ids(static_cast<std::size_t>(traj.n_agents));
    for (int i = 0; i < traj.n_agents; ++i) agent_ids[static_cast<std::size_t>(i)] = i;

    std::set<std::pair<int, std::uint32_t>> frontier{{m.initial, 0}};
    std::vector<double> no_regs;
    for (const std::vector<double>& joint : traj.states) {
        std::set<std::pair<int, std::uint32_t>> next;
        for (const auto& [q, mask] : frontier) {
            for (int tid : m.outgoing[static_cast<std::size_t>(q)]) {
                const Transition& t = m.trans(tid);
                if (!t.self_loop && !guard_holds(m, t, joint, agent_ids, agent, no_regs)) continue;
                std::uint32_t mask2 = mask;
                for (const RegisterOp& op : t.ops) {
                    if (op.kind != RegisterOp::Kind::FlagViolation) continue;
                    int own = op.owner >= 0 ? op.owner : agent;
                    if (!holds(op.pred, joint, agent_ids, m.dim, own)) mask2 |= viol_bit(op.reg);
                }
                next.insert({t.target, mask2});
            }
        }
        frontier.swap(next);
    }
    for (const auto& [q, mask] : frontier) {
        if (!m.is_final[static_cast<std::size_t>(q)]) continue;
        bool poisoned = false;
        for (int w : m.violation_registers[static_cast<std::size_t>(q)]) {
            if (mask & viol_bit(w)) poisoned = true;
        }
        if (!poisoned) return true;
    }
    return false;
}

namespace {

struct Enumerator {
    const GridConfig& cfg;
    const Spec& spec;
    const TaskMonitor& monitor;
    OracleReport report;
    Trajectory traj;
    std::vector<int> actions;  // flattened [t][agent]

    void check_leaf() {
        ++report.rollouts;
        bool sat = satisfies(spec, traj);
        bool acc = true;
        for (int i = 0; i < cfg.n_agents && acc; ++i) acc = monitor_accepts(monitor, traj, i);
        if (sat) ++report.satisfied;
        if (acc) ++report.accepted;
        if (sat != acc) {
            ++report.disagreements;
            if (report.witness.empty()) {
                std::ostringstream out;
                out << (sat ? "oracle satisfied, monitor rejected" : "monitor accepted, oracle unsatisfied")
                    << "; actions:";
                for (int a : actions) out << " " << a;
                report.witness = out.str();
            }
        }
    }

    void recurse(int t) {
        if (t == cfg.horizon) {
            check_leaf();
            return;
        }
        std::vector<int> step_actions(static_cast<std::size_t>(cfg.n_agents));
        const std::size_t combos = [&] {
            std::size_t c = 1;
            for (int i = 0; i < cfg.n_agents; ++i) c *= kGridActions;
            return c;
        }();
        for (std::size_t combo = 0; combo < combos; ++combo) {
            std::size_t rest = combo;
            for (int i = 0; i < cfg.n_agents; ++i) {
                step_actions[static_cast<std::size_t>(i)] = static_cast<int>(rest % kGridActions);
                rest /= kGridActions;
            }
            traj.states.push_back(grid_step(cfg, traj.states.back(), step_actions));
            for (int a : step_actions) actions.push_back(a);
            recurse(t + 1);
            for (int i = 0; i < cfg.n_agents; ++i) actions.pop_back();
            traj.states.pop_back();
        }
    }
};

}  // namespace

OracleReport grid_enumerate(const GridConfig& cfg_in, const Spec& spec, const TaskMonitor& monitor) {
    GridConfig cfg = cfg_in;
    cfg.fill_defaults();
    if (cfg.rollout_count() > 10000000ULL) {
        throw std::invalid_argument("grid config too large for exhaustive enumeration");
    }
    Enumerator e{cfg, spec, monitor, {}, {}, {}};
    e.traj.n_agents = cfg.n_agents;
    e.traj.dim = 2;
    e.traj.states.push_back(grid_reset(cfg));
    e.recurse(0);
    return e.report;
}

}  // namespace specmarl
