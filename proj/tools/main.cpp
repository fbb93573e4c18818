// Command-line front end: compile specs to monitor artifacts, verify the
// structural and reward properties, train policies, and evaluate them.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>

#include <CLI11.hpp>

#include "specmarl/serialize.hpp"
#include "specmarl/sync.hpp"
#include "specmarl/verify.hpp"

namespace fs = std::filesystem;
using namespace specmarl;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitCounterexample = 2;

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    return std::string(std::istreambuf_iterator<char>(in), {});
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write file: " + path.string());
    out << content;
}

int cmd_compile(const std::string& spec_path, int dim, double tolerance, bool show_self_loops,
                const std::string& out_dir) {
    Spec spec = parse_spec(read_file(spec_path), dim, tolerance);
    TaskMonitor monitor = compile(spec, dim);
    std::vector<int> sync = identify_sync_states(monitor);
    StructureReport report = validate_structure(monitor);

    fs::create_directories(out_dir);
    write_file(fs::path(out_dir) / "monitor.json", monitor_to_json(monitor, sync));
    DotOptions dot_opts;
    dot_opts.show_self_loops = show_self_loops;
    dot_opts.sync_states = sync;
    write_file(fs::path(out_dir) / "monitor.dot", to_dot(monitor, dot_opts));

    std::ostringstream summary;
    summary << "spec: " << to_string(spec) << "\n";
    summary << "states: " << monitor.n_states << "  transitions: " << monitor.transitions.size()
            << "  registers: " << monitor.n_registers() << "  max depth: " << monitor.max_depth
            << "\n";
    summary << "finals:";
    for (int q : monitor.final_states()) summary << " q" << q;
    summary << "\nglobal states:";
    for (int q : monitor.global_states()) summary << " q" << q;
    summary << "\nsync states:";
    for (int q : sync) summary << " q" << q;
    summary << "\nstructure: " << (report.ok() ? "all 5 properties hold" : "VIOLATIONS FOUND") << "\n";
    for (const std::string& v : report.violations) summary << "  - " << v << "\n";
    write_file(fs::path(out_dir) / "report.txt", summary.str());
    std::cout << summary.str();
    return report.ok() ? 0 : kExitCounterexample;
}

int cmd_verify(std::uint64_t seed, int pairs, int trials, const std::string& out_dir) {
    std::ostringstream log;
    log << "monitor acceptance vs trajectory oracle (exhaustive grids):\n";
    bool r1 = verify_monitor_oracle(log);
    log << "reward ordering over random rollout pairs:\n";
    bool r2 = verify_reward_ordering(log, mix_seed(seed, 2), pairs);
    log << "group decomposition of satisfied trajectories:\n";
    bool r3 = verify_decomposition(log, mix_seed(seed, 3), trials);
    const bool ok = r1 && r2 && r3;
    log << (ok ? "all checks passed\n" : "COUNTEREXAMPLES FOUND\n");
    std::cout << log.str();
    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        write_file(fs::path(out_dir) / "verify.txt", log.str());
    }
    return ok ? 0 : kExitCounterexample;
}

int cmd_train(const std::string& config_path, std::uint64_t seed, bool seed_set, int workers,
              bool staging, bool no_mon, bool centralized, int episodes, const std::string& out_dir) {
    ExperimentConfig cfg = load_experiment(config_path);
    if (seed_set) cfg.train.seed = seed;
    if (workers > 0) cfg.train.workers = workers;
    cfg.train.staging = staging;
    cfg.train.no_mon = no_mon;
    cfg.train.centralized = centralized;
    if (episodes > 0) cfg.train.eval_episodes = episodes;

    Spec spec = parse_spec(cfg.spec_text, cfg.env.dim(), cfg.tolerance);
    TaskMonitor monitor = compile(spec, cfg.env.dim());
    Game game = make_game(monitor, cfg.env, !centralized);

    if (centralized) {
        std::vector<TaskMonitor> copies(static_cast<std::size_t>(cfg.env.n_agents()), monitor);
        std::size_t count = product_state_count(copies);
        std::cout << "centralized monitor: " << count << " joint states vs "
                  << cfg.env.n_agents() * monitor.n_states << " distributed\n";
    }

    TrainResult result = train(game, spec, monitor, cfg.train);
    ShapingConstants& c = result.consts;
    std::cout << "constants: final_floor=" << c.final_floor
              << " proximity_bound=" << c.proximity_bound << " max_depth=" << c.max_depth << "\n";
    if (!result.stage_group_sizes.empty()) {
        std::cout << "curriculum group sizes:";
        for (int g : result.stage_group_sizes) std::cout << " " << g;
        std::cout << "\n";
    }
    std::cout << "final satisfaction: " << result.final_satisfaction << "\n";

    fs::create_directories(out_dir);
    write_file(fs::path(out_dir) / "params.json", policy_to_json(result.params));
    std::ofstream curve(fs::path(out_dir) / "curve.csv");
    write_curve_csv(curve, result.curve);
    return 0;
}

int cmd_eval(const std::string& config_path, const std::string& params_path, std::uint64_t seed,
             int episodes, const std::string& out_dir, bool dump_trace) {
    ExperimentConfig cfg = load_experiment(config_path);
    Spec spec = parse_spec(cfg.spec_text, cfg.env.dim(), cfg.tolerance);
    TaskMonitor monitor = compile(spec, cfg.env.dim());
    Game game = make_game(monitor, cfg.env, true);
    PolicyParams params = policy_from_json(read_file(params_path));
    if (episodes <= 0) episodes = cfg.train.eval_episodes;

    EvalReport rep = evaluate(params, game, spec, monitor, episodes, seed);
    std::cout << "episodes: " << rep.episodes << "\n";
    std::cout << "satisfaction: " << rep.satisfaction << "\n";
    std::cout << "monitor acceptance: " << rep.monitor_acceptance << "\n";
    std::cout << "depth fractions:";
    for (double v : rep.depth_fraction) std::cout << " " << v;
    std::cout << "\n";

    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        std::ofstream out(fs::path(out_dir) / "eval.csv");
        out << "episodes,satisfaction,monitor_acceptance\n";
        out << rep.episodes << "," << rep.satisfaction << "," << rep.monitor_acceptance << "\n";
        if (dump_trace) {
            AugmentedRollout rollout =
                run_episode(game, monitor, params, params.deploy_stage, mix_seed(seed, 0xe7a1, 0));
            std::ofstream trace(fs::path(out_dir) / "trace.csv");
            write_trace_csv(trace, game, rollout);
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"specification-guided multi-agent control toolkit"};
    app.require_subcommand(1);

    std::string spec_path, config_path, params_path, out_dir = "out";
    std::uint64_t seed = 0;
    bool seed_set = false;
    int dim = 2, workers = 0, episodes = 0, pairs = 10000, trials = 1000;
    double tolerance = 1.0;
    bool show_self_loops = false, staging = false, no_mon = false, centralized = false,
         dump_trace = false;

    auto* compile_cmd = app.add_subcommand("compile", "compile a spec file to a monitor artifact");
    compile_cmd->add_option("spec", spec_path, "specification text file")->required();
    compile_cmd->add_option("--dim", dim, "agent state dimension");
    compile_cmd->add_option("--tolerance", tolerance, "reach predicate tolerance");
    compile_cmd->add_flag("--self-loops", show_self_loops, "keep self-loops in the DOT output");
    compile_cmd->add_option("--out-dir", out_dir, "artifact directory");

    auto* verify_cmd = app.add_subcommand("verify", "run the oracle, reward and decomposition checks");
    verify_cmd->add_option("--seed", seed, "fuzz seed");
    verify_cmd->add_option("--pairs", pairs, "rollout pairs per monitor");
    verify_cmd->add_option("--trials", trials, "decomposition trials");
    verify_cmd->add_option("--out-dir", out_dir, "report directory");

    auto* train_cmd = app.add_subcommand("train", "train policies from an experiment config");
    train_cmd->add_option("config", config_path, "experiment config (json)")->required();
    train_cmd->add_option("--seed", seed)->each([&](const std::string&) { seed_set = true; });
    train_cmd->add_option("--workers", workers, "population evaluation threads");
    train_cmd->add_flag("--stage", staging, "enable curriculum scaling");
    train_cmd->add_flag("--no-mon", no_mon, "mask the monitor from policies");
    train_cmd->add_flag("--centralized", centralized, "train against the joint monitor");
    train_cmd->add_option("--episodes", episodes, "evaluation episodes");
    train_cmd->add_option("--out-dir", out_dir, "output directory");

    auto* eval_cmd = app.add_subcommand("eval", "evaluate trained policies");
    eval_cmd->add_option("config", config_path, "experiment config (json)")->required();
    eval_cmd->add_option("--params", params_path, "trained parameter file")->required();
    eval_cmd->add_option("--seed", seed);
    eval_cmd->add_option("--episodes", episodes, "evaluation episodes");
    eval_cmd->add_option("--out-dir", out_dir, "output directory");
    eval_cmd->add_flag("--trace", dump_trace, "dump one rollout trace CSV");

    CLI11_PARSE(app, argc, argv);

    try {
        if (compile_cmd->parsed()) {
            return cmd_compile(spec_path, dim, tolerance, show_self_loops, out_dir);
        }
        if (verify_cmd->parsed()) return cmd_verify(seed, pairs, trials, out_dir);
        if (train_cmd->parsed()) {
            return cmd_train(config_path, seed, seed_set, workers, staging, no_mon, centralized,
                             episodes, out_dir);
        }
        if (eval_cmd->parsed()) {
            return cmd_eval(config_path, params_path, seed, episodes, out_dir, dump_trace);
        }
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
