#pragma once

#include <map>
#include <vector>

#include "specmarl/spec.hpp"

namespace specmarl {

using Partition = std::vector<std::vector<int>>;

// Greedy partition of `agents` into floor(N/g) groups of at least g members;
// the last group absorbs leftovers. g > N yields a single group of everyone.
Partition set_groups(int g, const std::vector<int>& agents);

// Curriculum over group sizes: start at minimum size k and multiply by f each
// stage until one stage covers every agent (or the next size would overshoot).
struct StageSchedule {
    int n_agents = 0;
    int k = 2;
    int f = 2;
    std::vector<int> group_sizes;      // minimum group size per stage
    std::vector<Partition> partitions;  // per stage
    int current_stage = 0;             // index into group_sizes
    bool complete = false;

    int stage_count() const { return static_cast<int>(group_sizes.size()); }
    const Partition& current_partition() const {
        return partitions.at(static_cast<std::size_t>(current_stage));
    }
};

StageSchedule build_schedule(int n_agents, int k, int f);

// Advances the stage when every group's satisfaction rate clears the
// threshold; the final stage marks the schedule complete instead.
void advance_if_satisfied(StageSchedule& schedule,
                          const std::map<int, double>& per_group_satisfaction,
                          double threshold = 0.9);

// Does satisfaction on the union imply satisfaction on both disjoint parts,
// for this trajectory? True for every reach-based composition; capacity-style
// predicates break it.
bool check_ma_distributive(const Spec& spec, const Trajectory& traj,
                           const std::vector<int>& n1, const std::vector<int>& n2);

// Satisfaction of the spec on every group of the partition.
bool check_decomposition(const Spec& spec, const Trajectory& traj, const Partition& partition);

}  // namespace specmarl
