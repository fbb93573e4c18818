#pragma once

#include <iosfwd>
#include <string>

#include "specmarl/trainer.hpp"

namespace specmarl {

// Monitor artifact for the compile command: states, registers, transitions
// with guard descriptors, global and sync sets, depths.
std::string monitor_to_json(const TaskMonitor& m, const std::vector<int>& sync_states);

std::string policy_to_json(const PolicyParams& params);
PolicyParams policy_from_json(const std::string& text);

// Declarative experiment description: spec text, environment and optimizer
// knobs. Unknown keys are rejected so typos fail loudly.
struct ExperimentConfig {
    std::string spec_text;
    double tolerance = 1.0;
    EnvConfig env;
    TrainConfig train;
};

ExperimentConfig load_experiment(const std::string& path);

void write_curve_csv(std::ostream& out, const std::vector<CurvePoint>& curve);

}  // namespace specmarl
