#include "specmarl/verify.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>
#include <sstream>

#include "specmarl/scaling.hpp"
#include "specmarl/shaping.hpp"

namespace specmarl {

std::vector<GridCase> builtin_grid_cases() {
    std::vector<GridCase> cases;
    auto add = [&](std::string name, std::string spec, int w, int h, int n, int t,
                   std::vector<int> start, double tolerance = 1.0) {
        GridCase c;
        c.name = std::move(name);
        c.spec = std::move(spec);
        c.grid.width = w;
        c.grid.height = h;
        c.grid.n_agents = n;
        c.grid.horizon = t;
        c.grid.start_cells = std::move(start);
        c.tolerance = tolerance;
        cases.push_back(std::move(c));
    };
    add("achieve_local_n1", "reach_lo(2,2)", 3, 3, 1, 5, {0, 0});
    add("achieve_local_n2", "reach_lo(1,0)", 2, 2, 2, 3, {0, 0, 1, 1});
    add("achieve_global_n2", "reach_gl(1,1)", 2, 2, 2, 4, {0, 0, 1, 0});
    add("seq_local_local_n1", "reach_lo(0,1); reach_lo(2,0)", 3, 3, 1, 5, {0, 0});
    add("seq_local_global_n2", "reach_lo(1,1); reach_gl(0,0)", 2, 2, 2, 4, {0, 0, 1, 1});
    add("seq_global_global_n2", "reach_gl(0,1); reach_gl(1,0)", 2, 2, 2, 4, {0, 0, 0, 1});
    add("or_local_local_n1", "reach_lo(2,0) or reach_lo(0,2)", 3, 3, 1, 5, {0, 0});
    add("or_global_local_n2", "reach_gl(1,1) or reach_lo(0,0)", 2, 2, 2, 4, {0, 1, 1, 0});
    // Wider band so the constraint admits some cells but not all.
    add("ensuring_band_n1", "reach_lo(3,0) ensuring reach_lo(1,0)", 5, 3, 1, 4, {0, 0}, 2.0);
    add("unsatisfiable_horizon", "reach_lo(2,2); reach_lo(0,0)", 3, 3, 1, 2, {0, 0});
    return cases;
}

bool verify_monitor_oracle(std::ostream& log, std::vector<OracleReport>* reports) {
    bool ok = true;
    for (const GridCase& c : builtin_grid_cases()) {
        Spec spec = parse_spec(c.spec, 2, c.tolerance);
        TaskMonitor monitor = compile(spec, 2);
        OracleReport rep = grid_enumerate(c.grid, spec, monitor);
        log << "  " << c.name << ": " << rep.rollouts << " rollouts, " << rep.satisfied
            << " satisfied, " << rep.disagreements << " disagreements\n";
        if (rep.disagreements > 0) {
            log << "    witness: " << rep.witness << "\n";
            ok = false;
        }
        if (reports) reports->push_back(rep);
    }
    return ok;
}

namespace {

// Monitor-legal random rollout. Half of the reads teleport every agent near a
// goal guarding one of the currently open transitions, so runs of all depths
// and both final and non-final endings occur.
AugmentedRollout random_legal_rollout(const TaskMonitor& m, int n_agents, int T,
                                      std::mt19937_64& rng, double box) {
    AugmentedRollout r;
    r.base.n_agents = n_agents;
    r.base.dim = m.dim;
    std::vector<int> ids(static_cast<std::size_t>(n_agents));
    std::iota(ids.begin(), ids.end(), 0);
    std::vector<int> q(static_cast<std::size_t>(n_agents), m.initial);
    std::vector<std::vector<double>> regs(static_cast<std::size_t>(n_agents), m.initial_registers);
    for (int t = 0; t <= T; ++t) {
        std::vector<double> joint(static_cast<std::size_t>(n_agents * m.dim));
        std::vector<const Predicate*> frontier;
        for (int i = 0; i < n_agents; ++i) {
            for (int tid : m.outgoing[static_cast<std::size_t>(q[static_cast<std::size_t>(i)])]) {
                const Transition& tr = m.trans(tid);
                if (!tr.self_loop && !tr.guards.empty()) frontier.push_back(&tr.guards[0].pred);
            }
        }
        if (!frontier.empty() && rng() % 2 == 0) {
            const Predicate* pred = frontier[static_cast<std::size_t>(rng() % frontier.size())];
            for (std::size_t i = 0; i < joint.size(); ++i) {
                joint[i] = pred->target[i % pred->target.size()] + uniform_in(rng, -1.2, 1.2);
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
            std::vector<int> moves;
            for (int tid : m.outgoing[static_cast<std::size_t>(q[static_cast<std::size_t>(i)])]) {
                const Transition& tr = m.trans(tid);
                if (tr.self_loop ||
                    guard_holds(m, tr, joint, ids, i, regs[static_cast<std::size_t>(i)])) {
                    open.push_back(tid);
                    if (!tr.self_loop) moves.push_back(tid);
                }
            }
            // Mostly take an open transition so deep runs are common.
            int pick = (!moves.empty() && rng() % 4 != 0)
                           ? moves[static_cast<std::size_t>(rng() % moves.size())]
                           : open[static_cast<std::size_t>(rng() % open.size())];
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

}  // namespace

bool verify_reward_ordering(std::ostream& log, std::uint64_t seed, int pairs_per_spec) {
    const std::vector<std::string> specs = {
        "reach_gl(5,0); reach_gl(0,0)",
        "reach_gl(5,0); reach_gl(0,0); reach_gl(3,0)",
        "reach_lo(5,0); reach_gl(0,0); reach_gl(3,0)",
        "[reach_lo(3,0) or reach_lo(5,10)]; reach_lo(5,0); reach_gl(0,0); reach_gl(3,0)",
    };
    std::mt19937_64 rng(seed);
    bool ok = true;
    for (const std::string& text : specs) {
        Spec spec = parse_spec(text, 2);
        TaskMonitor m = compile(spec, 2);
        ShapingConstants consts =
            compute_constants(m, std::vector<double>(2, -20.0), std::vector<double>(2, 20.0));
        long violations_i = 0;
        long violations_ii = 0;
        long applicable_i = 0;
        long applicable_ii = 0;
        for (int p = 0; p < pairs_per_spec; ++p) {
            int T = 2 + static_cast<int>(rng() % 8);
            AugmentedRollout a = random_legal_rollout(m, 2, T, rng, 12.0);
            AugmentedRollout b = random_legal_rollout(m, 2, T, rng, 12.0);
            double fa = final_reward(a, 0, m);
            double fb = final_reward(b, 0, m);
            double sa = shaped_reward(a, 0, m, consts);
            double sb = shaped_reward(b, 0, m, consts);
            if (fa > fb) {
                ++applicable_i;
                if (!(sa > sb)) ++violations_i;
            }
            int qa = a.final_q[0];
            int qb = b.final_q[0];
            if (!m.is_final[static_cast<std::size_t>(qa)] &&
                !m.is_final[static_cast<std::size_t>(qb)] && qa != qb &&
                m.depth[static_cast<std::size_t>(qa)] > m.depth[static_cast<std::size_t>(qb)]) {
                ++applicable_ii;
                if (!(sa >= sb)) ++violations_ii;
            }
        }
        log << "  " << text << ": " << pairs_per_spec << " pairs, ordering violations "
            << violations_i << " (of " << applicable_i << "), depth violations " << violations_ii
            << " (of " << applicable_ii << " applicable)\n";
        if (violations_i != 0 || violations_ii != 0 || applicable_i == 0 || applicable_ii == 0) {
            ok = false;
        }
    }
    return ok;
}

namespace {

Spec random_reach_spec(std::mt19937_64& rng, int depth) {
    auto coord = [&] { return static_cast<double>(static_cast<int>(rng() % 9)) - 4.0; };
    if (depth == 0 || rng() % 3 == 0) {
        std::vector<double> target{coord(), coord()};
        return rng() % 2 == 0 ? spec_achieve(reach_local(target))
                              : spec_achieve(reach_global(target));
    }
    switch (rng() % 3) {
        case 0:
            return spec_seq(random_reach_spec(rng, depth - 1), random_reach_spec(rng, depth - 1));
        case 1:
            return spec_or(random_reach_spec(rng, depth - 1), random_reach_spec(rng, depth - 1));
        default:
            return spec_ensuring(random_reach_spec(rng, depth - 1),
                                 reach_local({coord(), coord()}, 6.0));
    }
}

// Random walk that repeatedly herds every agent toward one of the spec's
// goal points, so a healthy share of trajectories satisfy the full spec.
Trajectory random_walk_trajectory(std::mt19937_64& rng, const Spec& spec, int n_agents, int T) {
    std::vector<std::vector<double>> goals;
    for (const SpecNode& node : spec.nodes) {
        if (node.kind == SpecKind::Achieve || node.kind == SpecKind::Ensuring) {
            if (!node.pred.target.empty()) {
                goals.push_back({node.pred.target[0], node.pred.target[1]});
            }
        }
    }
    if (goals.empty()) goals.push_back({0.0, 0.0});
    Trajectory traj;
    traj.n_agents = n_agents;
    traj.dim = 2;
    std::vector<double> joint(static_cast<std::size_t>(n_agents * 2));
    for (double& v : joint) v = uniform_in(rng, -3.0, 3.0);
    traj.states.push_back(joint);
    std::vector<double> target = goals[static_cast<std::size_t>(rng() % goals.size())];
    for (int t = 0; t < T; ++t) {
        if (rng() % 4 == 0) target = goals[static_cast<std::size_t>(rng() % goals.size())];
        for (std::size_t i = 0; i < joint.size(); ++i) {
            double pull = target[i % 2] - joint[i];
            joint[i] = std::clamp(joint[i] + std::clamp(pull, -1.0, 1.0) +
                                      uniform_in(rng, -0.4, 0.4),
                                  -6.0, 6.0);
        }
        traj.states.push_back(joint);
    }
    return traj;
}

}  // namespace

bool verify_decomposition(std::ostream& log, std::uint64_t seed, int trials) {
    std::mt19937_64 rng(seed);
    long violations = 0;
    long applicable = 0;
    for (int i = 0; i < trials; ++i) {
        Spec spec = random_reach_spec(rng, 2);
        int n = 2 + static_cast<int>(rng() % 5);
        Trajectory traj = random_walk_trajectory(rng, spec, n, 6 + static_cast<int>(rng() % 16));
        std::vector<int> agents(static_cast<std::size_t>(n));
        std::iota(agents.begin(), agents.end(), 0);
        if (!satisfies(spec, traj, agents)) continue;
        ++applicable;
        int k = 1 + static_cast<int>(rng() % std::max(1, n - 1));
        if (!check_decomposition(spec, traj, set_groups(k, agents))) ++violations;
    }
    log << "  reach specs: " << trials << " trials, " << applicable
        << " with the full group satisfied, " << violations << " decomposition violations\n";
    const bool enough = applicable >= trials / 20;

    // Capacity-style counterexample: four agents each carrying at most one
    // unit can only clear the threshold together.
    Spec capacity = spec_achieve(sum_at_least(3.5));
    Trajectory traj;
    traj.n_agents = 4;
    traj.dim = 1;
    traj.states = {{0.0, 0.0, 0.0, 0.0}, {1.0, 1.0, 1.0, 1.0}};
    std::vector<int> all{0, 1, 2, 3};
    bool full = satisfies(capacity, traj, all);
    bool split_holds = check_decomposition(capacity, traj, set_groups(2, all));
    log << "  capacity spec: full group " << (full ? "satisfied" : "unsatisfied")
        << ", 2-partition " << (split_holds ? "satisfied" : "violated") << "\n";
    return violations == 0 && enough && full && !split_holds;
}

}  // namespace specmarl
