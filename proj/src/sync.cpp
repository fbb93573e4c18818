#include "specmarl/sync.hpp"

#include <algorithm>
#include <deque>
#include <set>

namespace specmarl {

namespace {

// States reachable from `start` (inclusive) over non-self edges.
std::set<int> reachable_from(const TaskMonitor& m, int start) {
    std::set<int> seen{start};
    std::deque<int> queue{start};
    while (!queue.empty()) {
        int q = queue.front();
        queue.pop_front();
        for (int tid : m.outgoing[static_cast<std::size_t>(q)]) {
            const Transition& t = m.trans(tid);
            if (t.self_loop) continue;
            if (seen.insert(t.target).second) queue.push_back(t.target);
        }
    }
    return seen;
}

}  // namespace

std::vector<int> identify_sync_states(const TaskMonitor& m) {
    std::set<int> sync;
    for (int q = 0; q < m.n_states; ++q) {
        if (m.is_global_state[static_cast<std::size_t>(q)]) sync.insert(q);
    }

    for (int q = 0; q < m.n_states; ++q) {
        if (sync.count(q)) continue;
        std::vector<int> succ;
        for (int tid : m.outgoing[static_cast<std::size_t>(q)]) {
            const Transition& t = m.trans(tid);
            if (!t.self_loop) succ.push_back(t.target);
        }
        std::sort(succ.begin(), succ.end());
        succ.erase(std::unique(succ.begin(), succ.end()), succ.end());
        if (succ.size() < 2) continue;  // only branching states are candidates

        std::vector<std::set<int>> branches;
        for (int s : succ) branches.push_back(reachable_from(m, s));

        // Nodes reachable through at least two different branches.
        std::set<int> shared;
        for (std::size_t i = 0; i < branches.size(); ++i) {
            for (std::size_t j = i + 1; j < branches.size(); ++j) {
                for (int x : branches[i]) {
                    if (branches[j].count(x)) shared.insert(x);
                }
            }
        }

        bool has_global_before_shared = false;
        for (const std::set<int>& branch : branches) {
            for (int x : branch) {
                if (shared.count(x)) continue;
                if (m.is_global_state[static_cast<std::size_t>(x)]) has_global_before_shared = true;
            }
        }

        if (shared.empty()) {
            // Disjoint branches: a sync point only if some branch carries a
            // global obligation.
            if (has_global_before_shared) sync.insert(q);
        } else {
            // Rejoining branches: agents converge again, so agreement is only
            // needed when a global state can be hit before the rejoin.
            if (has_global_before_shared) sync.insert(q);
        }
    }

    return {sync.begin(), sync.end()};
}

int resolve_transition(const std::map<int, int>& proposals, const std::vector<int>& available) {
    if (available.empty()) throw std::invalid_argument("resolve_transition: no available transitions");
    if (proposals.empty()) throw std::invalid_argument("resolve_transition: no proposals");
    std::map<int, int> votes;
    for (const auto& [agent, tid] : proposals) {
        if (std::find(available.begin(), available.end(), tid) == available.end()) {
            throw std::invalid_argument("resolve_transition: proposal " + std::to_string(tid) +
                                        " is not available");
        }
        ++votes[tid];
    }
    int best_tid = -1;
    int best_count = -1;
    for (const auto& [tid, count] : votes) {
        // std::map iterates in increasing tid order, so ties keep the
        // smallest id.
        if (count > best_count) {
            best_tid = tid;
            best_count = count;
        }
    }
    return best_tid;
}

}  // namespace specmarl
