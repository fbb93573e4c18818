#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "specmarl/monitor.hpp"
#include "specmarl/spec.hpp"

namespace specmarl {

// Point-mass navigation: actions are velocities, integrated with first-order
// dynamics and clipped to the state box.
struct NavConfig {
    int dim = 2;
    int n_agents = 2;
    int horizon = 200;
    std::vector<double> box_lo;  // defaults to -20 per axis
    std::vector<double> box_hi;  // defaults to +20 per axis
    double dt = 1.0;
    double max_speed = 1.0;
    double anchor_x = 0.0;  // agents reset in a line centered under this x
    double spacing = 2.0;

    void fill_defaults();
};

std::vector<double> nav_reset(const NavConfig& cfg, std::uint64_t seed);
std::vector<double> nav_step(const NavConfig& cfg, std::span<const double> joint,
                             std::span<const double> actions);

// Tiny enumerable grid used as the exhaustive oracle environment. Actions:
// 0 stay, 1 north, 2 south, 3 east, 4 west; moves off the edge clamp.
struct GridConfig {
    int width = 3;
    int height = 3;
    int n_agents = 1;
    int horizon = 4;
    std::vector<int> start_cells;  // per agent (x, y), defaults to (0, 0)

    void fill_defaults();
    std::size_t rollout_count() const;
};

inline constexpr int kGridActions = 5;

std::vector<double> grid_reset(const GridConfig& cfg);
std::vector<double> grid_step(const GridConfig& cfg, std::span<const double> joint,
                              std::span<const int> actions);

// Exhaustive comparison of the trajectory oracle against monitor acceptance:
// for every joint action sequence, does some legal assignment of monitor
// transitions end every agent in a final state with positive reward exactly
// when the trajectory satisfies the spec?
struct OracleReport {
    std::size_t rollouts = 0;
    std::size_t satisfied = 0;
    std::size_t accepted = 0;
    std::size_t disagreements = 0;
    std::string witness;  // first disagreeing action sequence, if any
};

OracleReport grid_enumerate(const GridConfig& cfg, const Spec& spec, const TaskMonitor& monitor);

// Existence of an accepting per-agent monitor run over the trajectory reads
// (ungated; one transition opportunity per observed state).
bool monitor_accepts(const TaskMonitor& m, const Trajectory& traj, int agent);

}  // namespace specmarl
