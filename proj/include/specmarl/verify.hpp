#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "specmarl/envs.hpp"

namespace specmarl {

// Exhaustively checkable grid cases covering each spec combinator. Local-only
// sequences and choices run single-agent; multi-agent cases anchor on a
// global subtask, whose shared witness time keeps the joint-split oracle and
// the per-agent monitors in exact agreement.
struct GridCase {
    std::string name;
    std::string spec;
    GridConfig grid;
    double tolerance = 1.0;
};

std::vector<GridCase> builtin_grid_cases();

// Runs every grid case; logs one line each and collects the reports. True
// when no case disagrees.
bool verify_monitor_oracle(std::ostream& log, std::vector<OracleReport>* reports = nullptr);

// Reward-ordering fuzz over random monitor-legal rollout pairs on the bundled
// navigation specs: (i) sparse-reward ordering is preserved by the dense
// reward, (ii) deeper non-final endings never score lower. True when no pair
// violates either.
bool verify_reward_ordering(std::ostream& log, std::uint64_t seed, int pairs_per_spec);

// Decomposition fuzz: random reach specs satisfied by the full group stay
// satisfied on every subgroup of a random partition; the bundled
// capacity-style spec demonstrates the violation the checker exists to catch.
bool verify_decomposition(std::ostream& log, std::uint64_t seed, int trials);

}  // namespace specmarl
