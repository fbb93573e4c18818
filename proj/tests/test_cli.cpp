#include <doctest.h>

#include <cstdlib>
#include <unistd.h>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "specmarl/serialize.hpp"

namespace fs = std::filesystem;
using namespace specmarl;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("specmarl_test_" + std::to_string(::getpid()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

int run_cli(const std::string& args) {
    std::string cmd = std::string(SPECMARL_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("cli compile: writes the monitor artifact, dot file and report") {
    TempDir tmp;
    std::ofstream(tmp.path / "phi1.spec") << "reach_gl(5,0); reach_gl(0,0)\n";
    int rc = run_cli("compile " + (tmp.path / "phi1.spec").string() + " --out-dir " +
                     (tmp.path / "out").string());
    CHECK(rc == 0);
    std::string json = slurp(tmp.path / "out" / "monitor.json");
    CHECK(json.find("\"n_states\": 3") != std::string::npos);
    CHECK(json.find("sync_states") != std::string::npos);
    std::string dot = slurp(tmp.path / "out" / "monitor.dot");
    CHECK(dot.find("doublecircle") != std::string::npos);
    std::string report = slurp(tmp.path / "out" / "report.txt");
    CHECK(report.find("all 5 properties hold") != std::string::npos);
}

TEST_CASE("cli compile: branching example lists its synchronization states") {
    TempDir tmp;
    std::ofstream(tmp.path / "phi_ex.spec")
        << "reach_gl(10,10) or [reach_lo(3,0); [reach_lo(10,10) or reach_gl(5,0)]]\n";
    int rc = run_cli("compile " + (tmp.path / "phi_ex.spec").string() + " --out-dir " +
                     (tmp.path / "out").string());
    CHECK(rc == 0);
    std::string report = slurp(tmp.path / "out" / "report.txt");
    CHECK(report.find("sync states: q0") != std::string::npos);
}

TEST_CASE("cli compile: malformed input exits nonzero with a message") {
    TempDir tmp;
    std::ofstream(tmp.path / "bad.spec") << "reach_lo(5,\n";
    int rc = run_cli("compile " + (tmp.path / "bad.spec").string() + " --out-dir " +
                     (tmp.path / "out").string());
    CHECK(rc == 1);
}

TEST_CASE("cli: unknown config keys are rejected") {
    TempDir tmp;
    std::ofstream(tmp.path / "exp.json")
        << R"json({"spec": "reach_lo(1,0)", "env": {"kind": "nav"}, "typo_knob": 3})json";
    int rc = run_cli("train " + (tmp.path / "exp.json").string() + " --out-dir " +
                     (tmp.path / "out").string());
    CHECK(rc == 1);
}

TEST_CASE("cli train/eval: a tiny experiment round-trips through params and curve files") {
    TempDir tmp;
    std::ofstream(tmp.path / "exp.json") << R"json({
        "spec": "reach_lo(3,0)",
        "env": {"kind": "nav", "dim": 2, "agents": 1, "horizon": 25, "anchor_x": 3.0},
        "seed": 3,
        "train": {"population": 12, "iterations": 6, "episodes_per_member": 2,
                  "eval_episodes": 20, "eval_every": 3, "early_stop": 0.95}
    })json";
    int rc = run_cli("train " + (tmp.path / "exp.json").string() + " --out-dir " +
                     (tmp.path / "out").string());
    CHECK(rc == 0);
    CHECK(fs::exists(tmp.path / "out" / "params.json"));
    std::string curve = slurp(tmp.path / "out" / "curve.csv");
    CHECK(curve.rfind("iteration,best_score,mean_score,satisfaction,stage", 0) == 0);

    rc = run_cli("eval " + (tmp.path / "exp.json").string() + " --params " +
                 (tmp.path / "out" / "params.json").string() + " --episodes 10 --out-dir " +
                 (tmp.path / "eval").string() + " --trace");
    CHECK(rc == 0);
    std::string eval_csv = slurp(tmp.path / "eval" / "eval.csv");
    CHECK(eval_csv.find("satisfaction") != std::string::npos);
    CHECK(fs::exists(tmp.path / "eval" / "trace.csv"));
}

TEST_CASE("policy parameters survive a json round-trip") {
    PolicyParams p;
    p.n_agents = 2;
    p.n_states = 3;
    p.n_blocks = 3;
    p.feat = 4;
    p.act_dim = 2;
    p.max_out = 2;
    p.deploy_stage = 1;
    p.flat.assign(p.expected_size(), 0.0);
    p.flat[3] = -1.25;
    PolicyParams q = policy_from_json(policy_to_json(p));
    CHECK(q.flat == p.flat);
    CHECK(q.deploy_stage == 1);
    CHECK(q.n_blocks == 3);
}
