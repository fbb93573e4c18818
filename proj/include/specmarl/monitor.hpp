#pragma once

#include <optional>
#include <string>
#include <vector>

#include "specmarl/spec.hpp"

namespace specmarl {

enum class TransKind { Local, Global };

// One conjunct of a transition guard. `owner` binds the conjunct to a fixed
// agent (used by product monitors); -1 means "the agent evaluating its own
// monitor copy".
struct GuardPart {
    Predicate pred;
    int owner = -1;
};

// Register update executed when a transition is taken.
//   MaxQuant:  v[reg] = max(v[reg], quant(pred, state))   (progress tracking)
//   FlagViolation: v[reg] = 1 when pred fails on the read state
//   Reset:     v[reg] = kRegisterFloor                     (entering a subtask)
struct RegisterOp {
    enum class Kind { MaxQuant, FlagViolation, Reset };
    Kind kind = Kind::MaxQuant;
    int reg = -1;
    Predicate pred;
    int owner = -1;
};

struct Transition {
    int id = -1;
    int source = 0;
    int target = 0;
    TransKind kind = TransKind::Local;
    bool self_loop = false;
    std::vector<GuardPart> guards;  // empty means the true predicate
    std::vector<RegisterOp> ops;
};

// Composite task monitor compiled from a Spec: a DAG of subtask states with
// self-loops, split into local transitions (agent-state guards) and global
// transitions (joint-state guards), plus progress registers feeding the
// final-state reward.
struct TaskMonitor {
    int n_states = 0;
    int initial = 0;
    int dim = 0;  // per-agent state dimension the guards expect
    std::vector<Transition> transitions;
    std::vector<char> is_final;
    std::vector<char> is_global_state;            // states sourcing a global transition
    std::vector<int> terminal_progress_register;  // per state, -1 when not final
    std::vector<std::vector<int>> violation_registers;  // per final state
    std::vector<double> initial_registers;
    std::vector<TransKind> register_kind;
    std::vector<std::string> register_name;
    std::vector<int> depth;  // longest path from initial, self-loops ignored
    int max_depth = 0;
    std::vector<std::vector<int>> outgoing;  // transition ids per source state

    int n_registers() const { return static_cast<int>(initial_registers.size()); }
    const Transition& trans(int id) const { return transitions.at(static_cast<std::size_t>(id)); }
    int self_loop_id(int state) const;  // every state has exactly one

    std::vector<int> final_states() const;
    std::vector<int> global_states() const;
};

// Compiles a specification into a task monitor for agents of state dimension
// `dim`. Throws on global ensuring constraints or malformed specs.
TaskMonitor compile(const Spec& spec, int dim);

// Guard evaluation. `agent_ids` maps positions in `joint_state` to original
// agent ids; `own_agent` resolves owner == -1 conjuncts.
double guard_quant(const TaskMonitor& m, const Transition& t,
                   std::span<const double> joint_state, std::span<const int> agent_ids,
                   int own_agent, std::span<const double> registers);
bool guard_holds(const TaskMonitor& m, const Transition& t,
                 std::span<const double> joint_state, std::span<const int> agent_ids,
                 int own_agent, std::span<const double> registers);

// Applies a transition's register ops in place, then the target state's
// subtask resets when the transition changes state.
void apply_update(const TaskMonitor& m, const Transition& t,
                  std::span<const double> joint_state, std::span<const int> agent_ids,
                  int own_agent, std::vector<double>& registers);

// Final-state reward: a fixed floor plus the clamped progress register of the
// terminal subtask; -inf when a tracked constraint was violated.
inline constexpr double kFinalRewardFloor = 0.1;
double final_state_reward(const TaskMonitor& m, int state, std::span<const double> registers);

// Structural validation report. Each entry names the violated property and a
// witness description.
struct StructureReport {
    bool only_self_loop_cycles = true;       // 1: the only cycles are self-loops
    bool finals_have_no_exits = true;        // 2: finals are exactly the exit-free states
    bool connected = true;                   // 3: reachable from initial, finals reachable
    bool no_duplicate_edges = true;          // 4: at most one transition per (q, q')
    bool self_loop_everywhere = true;        // 5: a true-guarded self-loop on every state
    std::vector<std::string> violations;

    bool ok() const {
        return only_self_loop_cycles && finals_have_no_exits && connected &&
               no_duplicate_edges && self_loop_everywhere;
    }
};

StructureReport validate_structure(const TaskMonitor& m);

// Recomputes depth, Q_g, adjacency and transition ids from raw states and
// transitions. compile() calls this; tests that hand-edit monitors do too.
void reindex(TaskMonitor& m);

// Synchronous product of per-agent monitor copies: component i is bound to
// agent i. Grows as the product of component state counts; throws when the
// reachable state count exceeds `state_cap` (message carries the count so
// far). Used to measure centralized state explosion.
TaskMonitor product(const std::vector<TaskMonitor>& monitors, std::size_t state_cap = 1000000);

// Reachable product state count without materializing transitions.
std::size_t product_state_count(const std::vector<TaskMonitor>& monitors,
                                std::size_t state_cap = 1000000);

struct DotOptions {
    bool show_self_loops = false;
    std::vector<int> sync_states;  // drawn with a bold border
};

std::string to_dot(const TaskMonitor& m, const DotOptions& opts = {});

}  // namespace specmarl
