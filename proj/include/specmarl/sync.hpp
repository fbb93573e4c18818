#pragma once

#include <map>
#include <vector>

#include "specmarl/monitor.hpp"

namespace specmarl {

// States where all agents must agree on the next monitor transition: every
// global state, plus branching states whose branches could commit agents to
// incompatible futures. Branching states are dropped again when
//   - their branches are pairwise disjoint and contain only local
//     transitions, or
//   - their branches rejoin and no global state occurs strictly before the
//     shared region.
// Branching states with a global state inside a branch are kept.
std::vector<int> identify_sync_states(const TaskMonitor& m);

// Majority vote over per-agent transition proposals, ties broken by the
// smallest transition id (compilation order). Every proposal must be listed
// in `available`.
int resolve_transition(const std::map<int, int>& proposals, const std::vector<int>& available);

}  // namespace specmarl
