#include "specmarl/scaling.hpp"

#include <algorithm>
#include <set>

namespace specmarl {

Partition set_groups(int g, const std::vector<int>& agents) {
    if (agents.empty()) throw std::invalid_argument("set_groups: empty agent set");
    if (g < 1) throw std::invalid_argument("set_groups: minimum group size must be at least 1");
    const int n = static_cast<int>(agents.size());
    if (g > n) return {agents};
    const int n_groups = n / g;
    Partition out(static_cast<std::size_t>(n_groups));
    int j = 0;
    for (int a : agents) {
        if (static_cast<int>(out[static_cast<std::size_t>(j)].size()) >= g && j + 1 < n_groups) {
            ++j;
        }
        out[static_cast<std::size_t>(j)].push_back(a);
    }
    return out;
}

StageSchedule build_schedule(int n_agents, int k, int f) {
    if (n_agents < 1) throw std::invalid_argument("build_schedule: need at least one agent");
    if (k < 1) throw std::invalid_argument("build_schedule: decomposability factor must be >= 1");
    if (f < 2) throw std::invalid_argument("build_schedule: growth factor must be > 1");
    StageSchedule s;
    s.n_agents = n_agents;
    s.k = k;
    s.f = f;
    std::vector<int> agents(static_cast<std::size_t>(n_agents));
    for (int i = 0; i < n_agents; ++i) agents[static_cast<std::size_t>(i)] = i;
    int g = k;
    while (true) {
        s.group_sizes.push_back(g);
        s.partitions.push_back(set_groups(g, agents));
        if (static_cast<long long>(g) * f > n_agents) break;
        g *= f;
    }
    return s;
}

void advance_if_satisfied(StageSchedule& schedule,
                          const std::map<int, double>& per_group_satisfaction,
                          double threshold) {
    if (schedule.complete) return;
    const Partition& groups = schedule.current_partition();
    for (std::size_t j = 0; j < groups.size(); ++j) {
        auto it = per_group_satisfaction.find(static_cast<int>(j));
        if (it == per_group_satisfaction.end() || it->second < threshold) return;
    }
    if (schedule.current_stage + 1 < schedule.stage_count()) {
        ++schedule.current_stage;
    } else {
        schedule.complete = true;
    }
}

bool check_ma_distributive(const Spec& spec, const Trajectory& traj,
                           const std::vector<int>& n1, const std::vector<int>& n2) {
    std::set<int> seen(n1.begin(), n1.end());
    for (int a : n2) {
        if (seen.count(a)) throw std::invalid_argument("check_ma_distributive: overlapping agent sets");
    }
    std::vector<int> both = n1;
    both.insert(both.end(), n2.begin(), n2.end());
    std::sort(both.begin(), both.end());
    if (!satisfies(spec, traj, both)) return true;  // vacuous
    return satisfies(spec, traj, n1) && satisfies(spec, traj, n2);
}

bool check_decomposition(const Spec& spec, const Trajectory& traj, const Partition& partition) {
    for (const std::vector<int>& group : partition) {
        if (!satisfies(spec, traj, group)) return false;
    }
    return true;
}

}  // namespace specmarl
