#include "specmarl/monitor.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <set>
#include <sstream>

namespace specmarl {

namespace {

// ---------------------------------------------------------------------------
// Compilation
// ---------------------------------------------------------------------------

struct BuildState {
    std::vector<RegisterOp> self_ops;  // coasting updates for the self-loop
    std::vector<int> entry_resets;     // registers cleared when entering
    int terminal_reg = -1;
    std::vector<int> violation_regs;
    bool dead = false;
};

struct SubMonitor {
    int initial = -1;
    std::vector<int> finals;
};

struct Builder {
    std::vector<BuildState> states;
    std::vector<Transition> transitions;  // non-self transitions only
    std::vector<double> v0;
    std::vector<TransKind> reg_kind;
    std::vector<std::string> reg_name;
    int dim = 0;

    int new_state() {
        states.push_back({});
        return static_cast<int>(states.size()) - 1;
    }

    int new_register(double init, TransKind kind, std::string name) {
        v0.push_back(init);
        reg_kind.push_back(kind);
        reg_name.push_back(std::move(name));
        return static_cast<int>(v0.size()) - 1;
    }

    std::vector<int> transitions_from(int state) const {
        std::vector<int> ids;
        for (std::size_t i = 0; i < transitions.size(); ++i) {
            if (transitions[i].source == state) ids.push_back(static_cast<int>(i));
        }
        return ids;
    }
};

std::string pred_label(const Predicate& p) {
    std::ostringstream out;
    switch (p.kind) {
        case PredKind::ReachLocal: out << "reach_lo("; break;
        case PredKind::ReachGlobal: out << "reach_gl("; break;
        case PredKind::SumAtLeast: out << "sum_at_least(" << p.threshold << ")"; return out.str();
    }
    for (std::size_t i = 0; i < p.target.size(); ++i) {
        if (i) out << ",";
        out << p.target[i];
    }
    out << ")";
    return out.str();
}

void check_pred_dim(const Predicate& p, int dim) {
    const std::size_t d = static_cast<std::size_t>(dim);
    if (p.kind == PredKind::ReachLocal && p.target.size() != d) {
        throw DimensionError("local predicate target dimension does not match agent state dimension");
    }
    if (p.kind == PredKind::ReachGlobal && (p.target.empty() || p.target.size() % d != 0)) {
        throw DimensionError("global predicate target is not a multiple of the state dimension");
    }
}

SubMonitor compile_node(Builder& b, const Spec& spec, int node_id) {
    const SpecNode& node = spec.at(node_id);
    switch (node.kind) {
        case SpecKind::Achieve: {
            check_pred_dim(node.pred, b.dim);
            const TransKind kind = node.pred.is_local() ? TransKind::Local : TransKind::Global;
            int s = b.new_state();
            int f = b.new_state();
            int r = b.new_register(kRegisterFloor, kind, pred_label(node.pred) + " progress");
            RegisterOp progress{RegisterOp::Kind::MaxQuant, r, node.pred, -1};
            Transition t;
            t.source = s;
            t.target = f;
            t.kind = kind;
            t.guards.push_back(GuardPart{node.pred, -1});
            t.ops.push_back(progress);
            b.transitions.push_back(std::move(t));
            b.states[static_cast<std::size_t>(s)].self_ops.push_back(progress);
            b.states[static_cast<std::size_t>(s)].entry_resets.push_back(r);
            // The final keeps recording terminal progress, which also marks
            // finals of global subtasks as global states.
            b.states[static_cast<std::size_t>(f)].self_ops.push_back(progress);
            b.states[static_cast<std::size_t>(f)].terminal_reg = r;
            return SubMonitor{s, {f}};
        }
        case SpecKind::Seq: {
            SubMonitor first = compile_node(b, spec, node.left);
            SubMonitor second = compile_node(b, spec, node.right);
            const BuildState entry = b.states[static_cast<std::size_t>(second.initial)];
            const std::vector<int> entry_trans = b.transitions_from(second.initial);
            for (int f : first.finals) {
                BuildState& fs = b.states[static_cast<std::size_t>(f)];
                fs.self_ops = entry.self_ops;
                fs.entry_resets = entry.entry_resets;
                fs.terminal_reg = -1;
                fs.violation_regs.clear();
                for (int tid : entry_trans) {
                    Transition copy = b.transitions[static_cast<std::size_t>(tid)];
                    copy.source = f;
                    b.transitions.push_back(std::move(copy));
                }
            }
            b.states[static_cast<std::size_t>(second.initial)].dead = true;
            return SubMonitor{first.initial, second.finals};
        }
        case SpecKind::Or: {
            int s = b.new_state();
            SubMonitor left = compile_node(b, spec, node.left);
            SubMonitor right = compile_node(b, spec, node.right);
            for (int branch_initial : {left.initial, right.initial}) {
                BuildState& bs = b.states[static_cast<std::size_t>(branch_initial)];
                BuildState& merged = b.states[static_cast<std::size_t>(s)];
                merged.self_ops.insert(merged.self_ops.end(), bs.self_ops.begin(), bs.self_ops.end());
                merged.entry_resets.insert(merged.entry_resets.end(), bs.entry_resets.begin(),
                                           bs.entry_resets.end());
                for (int tid : b.transitions_from(branch_initial)) {
                    Transition copy = b.transitions[static_cast<std::size_t>(tid)];
                    copy.source = s;
                    b.transitions.push_back(std::move(copy));
                }
                bs.dead = true;
            }
            SubMonitor out{s, left.finals};
            out.finals.insert(out.finals.end(), right.finals.begin(), right.finals.end());
            return out;
        }
        case SpecKind::Ensuring: {
            if (!node.pred.is_local()) {
                throw std::invalid_argument("ensuring constraints must be local predicates");
            }
            check_pred_dim(node.pred, b.dim);
            const std::size_t state_lo = b.states.size();
            const std::size_t trans_lo = b.transitions.size();
            SubMonitor inner = compile_node(b, spec, node.left);
            int w = b.new_register(0.0, TransKind::Local, pred_label(node.pred) + " violated");
            RegisterOp viol{RegisterOp::Kind::FlagViolation, w, node.pred, -1};
            for (std::size_t i = trans_lo; i < b.transitions.size(); ++i) {
                b.transitions[i].guards.push_back(GuardPart{node.pred, -1});
                b.transitions[i].ops.push_back(viol);
            }
            for (std::size_t i = state_lo; i < b.states.size(); ++i) {
                b.states[i].self_ops.push_back(viol);
            }
            for (int f : inner.finals) {
                b.states[static_cast<std::size_t>(f)].violation_regs.push_back(w);
            }
            return inner;
        }
    }
    throw std::invalid_argument("malformed specification node");
}

bool op_is_global(const RegisterOp& op) {
    return op.kind != RegisterOp::Kind::Reset && !op.pred.is_local();
}

TransKind classify(const Transition& t) {
    for (const GuardPart& g : t.guards) {
        if (!g.pred.is_local()) return TransKind::Global;
    }
    for (const RegisterOp& op : t.ops) {
        if (op_is_global(op)) return TransKind::Global;
    }
    return TransKind::Local;
}

TaskMonitor finalize(Builder& b, const SubMonitor& root) {
    // Compact away states merged out by Seq/Or composition.
    std::vector<int> remap(b.states.size(), -1);
    int alive = 0;
    for (std::size_t i = 0; i < b.states.size(); ++i) {
        if (!b.states[i].dead) remap[i] = alive++;
    }

    TaskMonitor m;
    m.n_states = alive;
    m.dim = b.dim;
    m.initial = remap[static_cast<std::size_t>(root.initial)];
    m.initial_registers = b.v0;
    m.register_kind = b.reg_kind;
    m.register_name = b.reg_name;
    m.is_final.assign(static_cast<std::size_t>(alive), 0);
    m.terminal_progress_register.assign(static_cast<std::size_t>(alive), -1);
    m.violation_registers.assign(static_cast<std::size_t>(alive), {});
    for (int f : root.finals) {
        int nf = remap[static_cast<std::size_t>(f)];
        m.is_final[static_cast<std::size_t>(nf)] = 1;
        m.terminal_progress_register[static_cast<std::size_t>(nf)] =
            b.states[static_cast<std::size_t>(f)].terminal_reg;
        m.violation_registers[static_cast<std::size_t>(nf)] =
            b.states[static_cast<std::size_t>(f)].violation_regs;
    }

    for (Transition& t : b.transitions) {
        if (b.states[static_cast<std::size_t>(t.source)].dead) continue;
        Transition out = t;
        out.source = remap[static_cast<std::size_t>(t.source)];
        out.target = remap[static_cast<std::size_t>(t.target)];
        // Entering a state clears the progress registers of its subtasks.
        for (int r : b.states[static_cast<std::size_t>(t.target)].entry_resets) {
            out.ops.push_back(RegisterOp{RegisterOp::Kind::Reset, r, Predicate{}, -1});
        }
        m.transitions.push_back(std::move(out));
    }
    for (std::size_t i = 0; i < b.states.size(); ++i) {
        if (b.states[i].dead) continue;
        Transition loop;
        loop.source = loop.target = remap[i];
        loop.self_loop = true;
        loop.ops = b.states[i].self_ops;
        m.transitions.push_back(std::move(loop));
    }
    reindex(m);
    return m;
}

}  // namespace

void reindex(TaskMonitor& m) {
    for (Transition& t : m.transitions) {
        t.self_loop = t.source == t.target;
        t.kind = classify(t);
    }
    // Deterministic ids: by source state, self-loops after the real
    // transitions of the same state, insertion order otherwise.
    std::stable_sort(m.transitions.begin(), m.transitions.end(),
                     [](const Transition& a, const Transition& b) {
                         if (a.source != b.source) return a.source < b.source;
                         return static_cast<int>(a.self_loop) < static_cast<int>(b.self_loop);
                     });
    m.outgoing.assign(static_cast<std::size_t>(m.n_states), {});
    for (std::size_t i = 0; i < m.transitions.size(); ++i) {
        m.transitions[i].id = static_cast<int>(i);
        m.outgoing[static_cast<std::size_t>(m.transitions[i].source)].push_back(static_cast<int>(i));
    }
    m.is_global_state.assign(static_cast<std::size_t>(m.n_states), 0);
    for (const Transition& t : m.transitions) {
        if (t.kind == TransKind::Global) m.is_global_state[static_cast<std::size_t>(t.source)] = 1;
    }

    // Longest path from the initial state over non-self edges (Kahn order so
    // a hand-made cycle cannot hang us; cycle states keep depth 0).
    std::vector<int> indeg(static_cast<std::size_t>(m.n_states), 0);
    for (const Transition& t : m.transitions) {
        if (!t.self_loop) ++indeg[static_cast<std::size_t>(t.target)];
    }
    m.depth.assign(static_cast<std::size_t>(m.n_states), 0);
    std::deque<int> queue;
    for (int q = 0; q < m.n_states; ++q) {
        if (indeg[static_cast<std::size_t>(q)] == 0) queue.push_back(q);
    }
    while (!queue.empty()) {
        int q = queue.front();
        queue.pop_front();
        for (int tid : m.outgoing[static_cast<std::size_t>(q)]) {
            const Transition& t = m.transitions[static_cast<std::size_t>(tid)];
            if (t.self_loop) continue;
            auto& dt = m.depth[static_cast<std::size_t>(t.target)];
            dt = std::max(dt, m.depth[static_cast<std::size_t>(q)] + 1);
            if (--indeg[static_cast<std::size_t>(t.target)] == 0) queue.push_back(t.target);
        }
    }
    m.max_depth = 0;
    for (int d : m.depth) m.max_depth = std::max(m.max_depth, d);
}

TaskMonitor compile(const Spec& spec, int dim) {
    if (spec.empty()) throw std::invalid_argument("compile: empty specification");
    if (dim <= 0) throw std::invalid_argument("compile: state dimension must be positive");
    Builder b;
    b.dim = dim;
    SubMonitor root = compile_node(b, spec, spec.root);
    return finalize(b, root);
}

int TaskMonitor::self_loop_id(int state) const {
    for (int tid : outgoing.at(static_cast<std::size_t>(state))) {
        if (transitions[static_cast<std::size_t>(tid)].self_loop) return tid;
    }
    throw std::logic_error("state has no self-loop");
}

std::vector<int> TaskMonitor::final_states() const {
    std::vector<int> out;
    for (int q = 0; q < n_states; ++q) {
        if (is_final[static_cast<std::size_t>(q)]) out.push_back(q);
    }
    return out;
}

std::vector<int> TaskMonitor::global_states() const {
    std::vector<int> out;
    for (int q = 0; q < n_states; ++q) {
        if (is_global_state[static_cast<std::size_t>(q)]) out.push_back(q);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Guard evaluation and register updates
// ---------------------------------------------------------------------------

double guard_quant(const TaskMonitor& m, const Transition& t,
                   std::span<const double> joint_state, std::span<const int> agent_ids,
                   int own_agent, std::span<const double>) {
    if (t.guards.empty()) return std::numeric_limits<double>::infinity();
    double v = std::numeric_limits<double>::infinity();
    for (const GuardPart& g : t.guards) {
        int agent = g.owner >= 0 ? g.owner : own_agent;
        v = std::min(v, quant(g.pred, joint_state, agent_ids, m.dim, agent));
    }
    return v;
}

bool guard_holds(const TaskMonitor& m, const Transition& t,
                 std::span<const double> joint_state, std::span<const int> agent_ids,
                 int own_agent, std::span<const double> registers) {
    return holds_value(guard_quant(m, t, joint_state, agent_ids, own_agent, registers));
}

void apply_update(const TaskMonitor& m, const Transition& t,
                  std::span<const double> joint_state, std::span<const int> agent_ids,
                  int own_agent, std::vector<double>& registers) {
    for (const RegisterOp& op : t.ops) {
        auto& cell = registers.at(static_cast<std::size_t>(op.reg));
        switch (op.kind) {
            case RegisterOp::Kind::MaxQuant: {
                int agent = op.owner >= 0 ? op.owner : own_agent;
                cell = std::max(cell, quant(op.pred, joint_state, agent_ids, m.dim, agent));
                break;
            }
            case RegisterOp::Kind::FlagViolation: {
                int agent = op.owner >= 0 ? op.owner : own_agent;
                if (!holds(op.pred, joint_state, agent_ids, m.dim, agent)) cell = 1.0;
                break;
            }
            case RegisterOp::Kind::Reset:
                cell = kRegisterFloor;
                break;
        }
    }
}

double final_state_reward(const TaskMonitor& m, int state, std::span<const double> registers) {
    if (!m.is_final.at(static_cast<std::size_t>(state))) {
        throw std::invalid_argument("final_state_reward: state is not final");
    }
    for (int w : m.violation_registers[static_cast<std::size_t>(state)]) {
        if (registers[static_cast<std::size_t>(w)] > 0.5) return kNegInfReward;
    }
    double progress = 0.0;
    int r = m.terminal_progress_register[static_cast<std::size_t>(state)];
    if (r >= 0) progress = std::max(0.0, registers[static_cast<std::size_t>(r)]);
    return kFinalRewardFloor + progress;
}

// ---------------------------------------------------------------------------
// Structural validation
// ---------------------------------------------------------------------------

StructureReport validate_structure(const TaskMonitor& m) {
    StructureReport rep;
    const std::size_t n = static_cast<std::size_t>(m.n_states);

    // 1: cycles other than self-loops, via iterative DFS coloring.
    {
        std::vector<int> color(n, 0);
        for (int start = 0; start < m.n_states && rep.only_self_loop_cycles; ++start) {
            if (color[static_cast<std::size_t>(start)] != 0) continue;
            std::vector<std::pair<int, std::size_t>> stack{{start, 0}};
            color[static_cast<std::size_t>(start)] = 1;
            while (!stack.empty()) {
                auto& [q, idx] = stack.back();
                const auto& out = m.outgoing[static_cast<std::size_t>(q)];
                bool advanced = false;
                while (idx < out.size()) {
                    const Transition& t = m.transitions[static_cast<std::size_t>(out[idx++])];
                    if (t.self_loop) continue;
                    int c = color[static_cast<std::size_t>(t.target)];
                    if (c == 1) {
                        rep.only_self_loop_cycles = false;
                        rep.violations.push_back("cycle through states " + std::to_string(t.source) +
                                                 " -> " + std::to_string(t.target));
                        break;
                    }
                    if (c == 0) {
                        color[static_cast<std::size_t>(t.target)] = 1;
                        stack.emplace_back(t.target, 0);
                        advanced = true;
                        break;
                    }
                }
                if (!rep.only_self_loop_cycles) break;
                if (!advanced && idx >= out.size()) {
                    color[static_cast<std::size_t>(q)] = 2;
                    stack.pop_back();
                }
            }
        }
    }

    // 2: finals are exactly the states without non-self exits.
    for (int q = 0; q < m.n_states; ++q) {
        bool has_exit = false;
        for (int tid : m.outgoing[static_cast<std::size_t>(q)]) {
            if (!m.transitions[static_cast<std::size_t>(tid)].self_loop) has_exit = true;
        }
        if (m.is_final[static_cast<std::size_t>(q)] && has_exit) {
            rep.finals_have_no_exits = false;
            rep.violations.push_back("final state " + std::to_string(q) + " has an outgoing edge");
        }
        if (!m.is_final[static_cast<std::size_t>(q)] && !has_exit) {
            rep.finals_have_no_exits = false;
            rep.violations.push_back("non-final state " + std::to_string(q) + " has no exits");
        }
    }

    // 3: reachability from the initial state and of some final state.
    {
        std::vector<char> fwd(n, 0);
        std::deque<int> queue{m.initial};
        fwd[static_cast<std::size_t>(m.initial)] = 1;
        while (!queue.empty()) {
            int q = queue.front();
            queue.pop_front();
            for (int tid : m.outgoing[static_cast<std::size_t>(q)]) {
                int to = m.transitions[static_cast<std::size_t>(tid)].target;
                if (!fwd[static_cast<std::size_t>(to)]) {
                    fwd[static_cast<std::size_t>(to)] = 1;
                    queue.push_back(to);
                }
            }
        }
        std::vector<std::vector<int>> incoming(n);
        for (const Transition& t : m.transitions) {
            if (!t.self_loop) incoming[static_cast<std::size_t>(t.target)].push_back(t.source);
        }
        std::vector<char> to_final(n, 0);
        std::deque<int> rqueue;
        for (int q = 0; q < m.n_states; ++q) {
            if (m.is_final[static_cast<std::size_t>(q)]) {
                to_final[static_cast<std::size_t>(q)] = 1;
                rqueue.push_back(q);
            }
        }
        while (!rqueue.empty()) {
            int q = rqueue.front();
            rqueue.pop_front();
            for (int src : incoming[static_cast<std::size_t>(q)]) {
                if (!to_final[static_cast<std::size_t>(src)]) {
                    to_final[static_cast<std::size_t>(src)] = 1;
                    rqueue.push_back(src);
                }
            }
        }
        for (int q = 0; q < m.n_states; ++q) {
            if (!fwd[static_cast<std::size_t>(q)]) {
                rep.connected = false;
                rep.violations.push_back("state " + std::to_string(q) + " unreachable from the initial state");
            }
            if (!to_final[static_cast<std::size_t>(q)]) {
                rep.connected = false;
                rep.violations.push_back("state " + std::to_string(q) + " cannot reach a final state");
            }
        }
    }

    // 4: at most one transition per ordered state pair.
    {
        std::set<std::pair<int, int>> seen;
        for (const Transition& t : m.transitions) {
            if (!seen.insert({t.source, t.target}).second) {
                rep.no_duplicate_edges = false;
                rep.violations.push_back("duplicate edge " + std::to_string(t.source) + " -> " +
                                         std::to_string(t.target));
            }
        }
    }

    // 5: a true-guarded self-loop on every state.
    for (int q = 0; q < m.n_states; ++q) {
        int loops = 0;
        bool guarded = false;
        for (int tid : m.outgoing[static_cast<std::size_t>(q)]) {
            const Transition& t = m.transitions[static_cast<std::size_t>(tid)];
            if (t.self_loop) {
                ++loops;
                if (!t.guards.empty()) guarded = true;
            }
        }
        if (loops != 1 || guarded) {
            rep.self_loop_everywhere = false;
            rep.violations.push_back("state " + std::to_string(q) +
                                     (loops == 0 ? " is missing its self-loop"
                                                 : " has a malformed self-loop"));
        }
    }

    return rep;
}

// ---------------------------------------------------------------------------
// Synchronous product
// ---------------------------------------------------------------------------

namespace {

struct ProductWalk {
    const std::vector<TaskMonitor>& parts;
    std::size_t cap;
    std::map<std::vector<int>, int> index;
    std::vector<std::vector<int>> tuples;

    int intern(const std::vector<int>& tuple) {
        auto it = index.find(tuple);
        if (it != index.end()) return it->second;
        if (tuples.size() >= cap) {
            throw std::runtime_error("product state cap exceeded after " +
                                     std::to_string(tuples.size()) + " states");
        }
        int id = static_cast<int>(tuples.size());
        index.emplace(tuple, id);
        tuples.push_back(tuple);
        return id;
    }
};

}  // namespace

std::size_t product_state_count(const std::vector<TaskMonitor>& monitors, std::size_t state_cap) {
    if (monitors.empty()) throw std::invalid_argument("product of zero monitors");
    ProductWalk walk{monitors, state_cap, {}, {}};
    std::vector<int> start;
    for (const TaskMonitor& m : monitors) start.push_back(m.initial);
    walk.intern(start);
    for (std::size_t head = 0; head < walk.tuples.size(); ++head) {
        const std::vector<int> tuple = walk.tuples[head];
        // Components move independently, so successors are the per-component
        // choices of staying or following any non-self edge.
        std::vector<std::vector<int>> options(monitors.size());
        for (std::size_t i = 0; i < monitors.size(); ++i) {
            options[i].push_back(tuple[i]);
            for (int tid : monitors[i].outgoing[static_cast<std::size_t>(tuple[i])]) {
                const Transition& t = monitors[i].transitions[static_cast<std::size_t>(tid)];
                if (!t.self_loop) options[i].push_back(t.target);
            }
        }
        std::vector<int> next(monitors.size());
        std::vector<std::size_t> pick(monitors.size(), 0);
        while (true) {
            for (std::size_t i = 0; i < monitors.size(); ++i) next[i] = options[i][pick[i]];
            walk.intern(next);
            std::size_t i = 0;
            for (; i < monitors.size(); ++i) {
                if (++pick[i] < options[i].size()) break;
                pick[i] = 0;
            }
            if (i == monitors.size()) break;
        }
    }
    return walk.tuples.size();
}

TaskMonitor product(const std::vector<TaskMonitor>& monitors, std::size_t state_cap) {
    if (monitors.empty()) throw std::invalid_argument("product of zero monitors");
    const std::size_t n = monitors.size();
    std::vector<int> reg_offset(n, 0);
    int total_regs = 0;
    for (std::size_t i = 0; i < n; ++i) {
        reg_offset[i] = total_regs;
        total_regs += monitors[i].n_registers();
    }

    ProductWalk walk{monitors, state_cap, {}, {}};
    std::vector<int> start;
    for (const TaskMonitor& m : monitors) start.push_back(m.initial);
    walk.intern(start);

    TaskMonitor out;
    out.dim = monitors[0].dim;
    out.initial = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const TaskMonitor& m = monitors[i];
        out.initial_registers.insert(out.initial_registers.end(), m.initial_registers.begin(),
                                     m.initial_registers.end());
        out.register_kind.insert(out.register_kind.end(), m.register_kind.begin(),
                                 m.register_kind.end());
        for (const std::string& name : m.register_name) {
            out.register_name.push_back("agent" + std::to_string(i) + ":" + name);
        }
    }

    auto rebind = [&](const Transition& t, std::size_t component) {
        Transition copy = t;
        for (GuardPart& g : copy.guards) g.owner = static_cast<int>(component);
        for (RegisterOp& op : copy.ops) {
            op.owner = static_cast<int>(component);
            op.reg += reg_offset[component];
        }
        return copy;
    };

    for (std::size_t head = 0; head < walk.tuples.size(); ++head) {
        const std::vector<int> tuple = walk.tuples[head];
        // Per component: index -1 means take the self-loop, otherwise the
        // k-th non-self transition out of the component state.
        std::vector<std::vector<int>> moves(n);
        for (std::size_t i = 0; i < n; ++i) {
            moves[i].push_back(-1);
            for (int tid : monitors[i].outgoing[static_cast<std::size_t>(tuple[i])]) {
                if (!monitors[i].trans(tid).self_loop) moves[i].push_back(tid);
            }
        }
        std::vector<std::size_t> pick(n, 0);
        while (true) {
            Transition combo;
            combo.source = static_cast<int>(head);
            std::vector<int> next(n);
            bool any_move = false;
            for (std::size_t i = 0; i < n; ++i) {
                int mv = moves[i][pick[i]];
                if (mv < 0) {
                    next[i] = tuple[i];
                    const Transition& loop =
                        monitors[i].trans(monitors[i].self_loop_id(tuple[i]));
                    Transition bound = rebind(loop, i);
                    combo.ops.insert(combo.ops.end(), bound.ops.begin(), bound.ops.end());
                } else {
                    any_move = true;
                    const Transition& t = monitors[i].trans(mv);
                    next[i] = t.target;
                    Transition bound = rebind(t, i);
                    combo.guards.insert(combo.guards.end(), bound.guards.begin(), bound.guards.end());
                    combo.ops.insert(combo.ops.end(), bound.ops.begin(), bound.ops.end());
                }
            }
            combo.target = walk.intern(next);
            combo.self_loop = !any_move;
            out.transitions.push_back(std::move(combo));

            std::size_t i = 0;
            for (; i < n; ++i) {
                if (++pick[i] < moves[i].size()) break;
                pick[i] = 0;
            }
            if (i == n) break;
        }
    }

    out.n_states = static_cast<int>(walk.tuples.size());
    out.is_final.assign(static_cast<std::size_t>(out.n_states), 0);
    out.terminal_progress_register.assign(static_cast<std::size_t>(out.n_states), -1);
    out.violation_registers.assign(static_cast<std::size_t>(out.n_states), {});
    for (int q = 0; q < out.n_states; ++q) {
        const std::vector<int>& tuple = walk.tuples[static_cast<std::size_t>(q)];
        bool all_final = true;
        for (std::size_t i = 0; i < n; ++i) {
            if (!monitors[i].is_final[static_cast<std::size_t>(tuple[i])]) all_final = false;
        }
        if (all_final) {
            out.is_final[static_cast<std::size_t>(q)] = 1;
            int rep = monitors[0].terminal_progress_register[static_cast<std::size_t>(tuple[0])];
            out.terminal_progress_register[static_cast<std::size_t>(q)] = rep;
            for (std::size_t i = 0; i < n; ++i) {
                for (int w : monitors[i].violation_registers[static_cast<std::size_t>(tuple[i])]) {
                    out.violation_registers[static_cast<std::size_t>(q)].push_back(w + reg_offset[i]);
                }
            }
        }
    }
    reindex(out);
    return out;
}

// ---------------------------------------------------------------------------
// DOT export
// ---------------------------------------------------------------------------

std::string to_dot(const TaskMonitor& m, const DotOptions& opts) {
    std::set<int> sync(opts.sync_states.begin(), opts.sync_states.end());
    std::ostringstream out;
    out << "digraph task_monitor {\n  rankdir=LR;\n  node [shape=circle];\n";
    for (int q = 0; q < m.n_states; ++q) {
        out << "  q" << q << " [";
        if (m.is_final[static_cast<std::size_t>(q)]) out << "shape=doublecircle ";
        if (m.is_global_state[static_cast<std::size_t>(q)]) {
            out << "style=filled fillcolor=palegreen ";
        }
        if (sync.count(q)) out << "penwidth=2.5 ";
        out << "label=\"q" << q << "\"];\n";
    }
    out << "  __start [shape=point];\n  __start -> q" << m.initial << ";\n";
    for (const Transition& t : m.transitions) {
        if (t.self_loop && !opts.show_self_loops) continue;
        out << "  q" << t.source << " -> q" << t.target << " [label=\"";
        if (t.guards.empty()) {
            out << "true";
        } else {
            for (std::size_t i = 0; i < t.guards.size(); ++i) {
                if (i) out << " & ";
                out << pred_label(t.guards[i].pred);
            }
        }
        out << "\"";
        if (t.kind == TransKind::Global) out << " color=seagreen";
        out << "];\n";
    }
    out << "}\n";
    return out.str();
}

}  // namespace specmarl
