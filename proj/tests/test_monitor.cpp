#include <doctest.h>

#include <set>

#include "helpers.hpp"
#include "specmarl/monitor.hpp"

using namespace specmarl;
using namespace specmarl::testing;

namespace {

Spec phi1() { return parse_spec("reach_gl(5,0); reach_gl(0,0)", 2); }

// Fig-style example: one global branch against a local subtask followed by a
// local/global choice.
Spec phi_ex() {
    return parse_spec("reach_gl(10,10) or [reach_lo(3,0); [reach_lo(10,10) or reach_gl(5,0)]]", 2);
}

}  // namespace

TEST_CASE("compile: two sequenced global reaches form a three-state chain") {
    TaskMonitor m = compile(phi1(), 2);
    CHECK(m.n_states == 3);
    CHECK(m.initial == 0);
    CHECK(m.final_states() == std::vector<int>{2});
    CHECK(m.global_states() == std::vector<int>{0, 1, 2});
    CHECK(m.max_depth == 2);
    CHECK(m.depth == std::vector<int>{0, 1, 2});
    // Two progress registers, both fed from the joint state.
    REQUIRE(m.n_registers() == 2);
    CHECK(m.register_kind[0] == TransKind::Global);
    CHECK(m.register_kind[1] == TransKind::Global);
    CHECK(m.initial_registers[0] == kRegisterFloor);
    // One non-self transition out of each interior state, self-loops last.
    REQUIRE(m.outgoing[0].size() == 2);
    CHECK_FALSE(m.trans(m.outgoing[0][0]).self_loop);
    CHECK(m.trans(m.outgoing[0][1]).self_loop);
    CHECK(validate_structure(m).ok());
}

TEST_CASE("compile: branching example matches the expected topology") {
    TaskMonitor m = compile(phi_ex(), 2);
    CHECK(m.n_states == 5);
    CHECK(m.final_states().size() == 3);
    // Finals of the two global subtasks are global states; the local final is
    // not.
    std::vector<int> global_list = m.global_states();
    std::set<int> global(global_list.begin(), global_list.end());
    std::set<int> finals_set;
    int local_final = -1;
    for (int q : m.final_states()) {
        finals_set.insert(q);
        if (!global.count(q)) local_final = q;
    }
    CHECK(local_final != -1);
    CHECK(finals_set.size() == 3);
    // Four task goals: four non-self transitions, distinct as (kind, target)
    // pairs (the same point serves once locally and once globally).
    std::set<std::pair<int, std::vector<double>>> goals;
    int non_self = 0;
    for (const Transition& t : m.transitions) {
        if (t.self_loop) continue;
        ++non_self;
        goals.insert({static_cast<int>(t.guards.at(0).pred.kind), t.guards.at(0).pred.target});
    }
    CHECK(non_self == 4);
    CHECK(goals.size() == 4);
    CHECK(m.max_depth == 2);
    CHECK(validate_structure(m).ok());
}

TEST_CASE("compile: a single local leaf has no global states") {
    TaskMonitor m = compile(parse_spec("reach_lo(0,0)", 2), 2);
    CHECK(m.n_states == 2);
    CHECK(m.global_states().empty());
    CHECK(m.max_depth == 1);
    CHECK(validate_structure(m).ok());
}

TEST_CASE("compile: global ensuring is rejected") {
    CHECK_THROWS(compile(spec_ensuring(parse_spec("reach_lo(0,0)", 2),
                                       reach_global({1.0, 1.0})),
                         2));
    CHECK_THROWS_AS(compile(Spec{}, 2), std::invalid_argument);
}

TEST_CASE("final-state reward: floor plus clamped terminal progress") {
    TaskMonitor m = compile(phi1(), 2);
    int final_q = m.final_states()[0];
    int reg = m.terminal_progress_register[static_cast<std::size_t>(final_q)];
    REQUIRE(reg >= 0);
    std::vector<double> regs = m.initial_registers;
    regs[static_cast<std::size_t>(reg)] = 0.4;
    CHECK(final_state_reward(m, final_q, regs) == doctest::Approx(0.5));
    regs[static_cast<std::size_t>(reg)] = -3.0;
    CHECK(final_state_reward(m, final_q, regs) == doctest::Approx(kFinalRewardFloor));
    CHECK_THROWS_AS(final_state_reward(m, m.initial, regs), std::invalid_argument);
}

TEST_CASE("validate: a back-edge breaks the acyclicity property") {
    TaskMonitor m = compile(phi1(), 2);
    Transition back;
    back.source = 2;
    back.target = 1;
    back.guards.push_back(GuardPart{reach_local({0.0, 0.0}), -1});
    m.transitions.push_back(back);
    reindex(m);
    StructureReport rep = validate_structure(m);
    CHECK_FALSE(rep.only_self_loop_cycles);
    CHECK_FALSE(rep.ok());
    CHECK(!rep.violations.empty());
}

TEST_CASE("validate: a missing self-loop is reported") {
    TaskMonitor m = compile(phi1(), 2);
    int loop = m.self_loop_id(1);
    m.transitions.erase(m.transitions.begin() + loop);
    reindex(m);
    StructureReport rep = validate_structure(m);
    CHECK_FALSE(rep.self_loop_everywhere);
    CHECK_FALSE(rep.ok());
}

TEST_CASE("validate: an unreachable state is reported") {
    TaskMonitor m = compile(phi1(), 2);
    m.n_states += 1;
    m.is_final.push_back(0);
    m.terminal_progress_register.push_back(-1);
    m.violation_registers.push_back({});
    Transition loop;
    loop.source = loop.target = 3;
    m.transitions.push_back(loop);
    reindex(m);
    StructureReport rep = validate_structure(m);
    CHECK_FALSE(rep.connected);
}

TEST_CASE("property: random specifications compile to structurally sound monitors") {
    std::mt19937_64 rng(1234);
    for (int i = 0; i < 120; ++i) {
        Spec s = random_spec(rng, 1 + static_cast<int>(rng() % 4));
        TaskMonitor m = compile(s, 2);
        StructureReport rep = validate_structure(m);
        if (!rep.ok()) {
            CAPTURE(to_string(s));
            for (const auto& v : rep.violations) CAPTURE(v);
            REQUIRE(rep.ok());
        }
        // Depth increases along every non-self edge.
        for (const Transition& t : m.transitions) {
            if (!t.self_loop) {
                CHECK(m.depth[static_cast<std::size_t>(t.target)] >=
                      m.depth[static_cast<std::size_t>(t.source)] + 1);
            }
        }
    }
}

TEST_CASE("product: local chains multiply while distributed copies add") {
    Spec chain = parse_spec("reach_lo(0,0); reach_lo(1,0); reach_lo(2,0)", 2);
    TaskMonitor m = compile(chain, 2);
    REQUIRE(m.n_states == 4);
    CHECK(product_state_count({m, m}) == 16);
    CHECK(product_state_count({m, m, m}) == 64);
    // Distributed representation: one four-state copy per agent.
    CHECK(3 * m.n_states == 12);

    TaskMonitor p2 = product({m, m});
    CHECK(p2.n_states == 16);
    CHECK(validate_structure(p2).ok());
    CHECK(p2.final_states().size() == 1);
}

TEST_CASE("product: a single monitor is unchanged up to guard ownership") {
    TaskMonitor m = compile(phi1(), 2);
    TaskMonitor p = product({m});
    CHECK(p.n_states == m.n_states);
    CHECK(p.transitions.size() == m.transitions.size());
    CHECK(p.final_states() == m.final_states());
    CHECK(p.depth == m.depth);
}

TEST_CASE("product: two three-state chains reach nine joint states") {
    Spec chain = parse_spec("reach_lo(0,0); reach_lo(1,0)", 2);
    TaskMonitor m = compile(chain, 2);
    REQUIRE(m.n_states == 3);
    CHECK(product_state_count({m, m}) == 9);
}

TEST_CASE("product: the state cap aborts with the count so far") {
    Spec chain = parse_spec("reach_lo(0,0); reach_lo(1,0); reach_lo(2,0)", 2);
    TaskMonitor m = compile(chain, 2);
    CHECK_THROWS_WITH_AS(product({m, m, m}, 5), doctest::Contains("5 states"), std::runtime_error);
}

TEST_CASE("dot export: finals doubled, global states filled, self-loops optional") {
    TaskMonitor m = compile(phi1(), 2);
    std::string dot = to_dot(m);
    CHECK(dot.find("doublecircle") != std::string::npos);
    CHECK(dot.find("palegreen") != std::string::npos);
    CHECK(dot.find("q0 -> q0") == std::string::npos);
    DotOptions opts;
    opts.show_self_loops = true;
    std::string with_loops = to_dot(m, opts);
    CHECK(with_loops.find("q0 -> q0") != std::string::npos);
    CHECK(with_loops.find("reach_gl(5,0)") != std::string::npos);
}
