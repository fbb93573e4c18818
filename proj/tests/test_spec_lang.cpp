#include <doctest.h>

#include "helpers.hpp"
#include "specmarl/spec.hpp"

using namespace specmarl;
using namespace specmarl::testing;

TEST_CASE("parse: sequence of global reaches") {
    Spec s = parse_spec("reach_gl(5,0); reach_gl(0,0)");
    const SpecNode& root = s.at(s.root);
    REQUIRE(root.kind == SpecKind::Seq);
    const SpecNode& left = s.at(root.left);
    const SpecNode& right = s.at(root.right);
    REQUIRE(left.kind == SpecKind::Achieve);
    CHECK(left.pred.kind == PredKind::ReachGlobal);
    CHECK(left.pred.target == std::vector<double>{5.0, 0.0});
    REQUIRE(right.kind == SpecKind::Achieve);
    CHECK(right.pred.target == std::vector<double>{0.0, 0.0});
}

TEST_CASE("parse: single local leaf with optional achieve keyword") {
    for (const char* text : {"reach_lo(5,0)", "achieve reach_lo(5,0)"}) {
        Spec s = parse_spec(text);
        const SpecNode& root = s.at(s.root);
        REQUIRE(root.kind == SpecKind::Achieve);
        CHECK(root.pred.kind == PredKind::ReachLocal);
        CHECK(root.pred.target == std::vector<double>{5.0, 0.0});
    }
}

TEST_CASE("parse: bracketed or binds tighter than sequencing") {
    Spec s = parse_spec("[reach_lo(3,0) or reach_lo(5,10)]; reach_lo(5,0)");
    const SpecNode& root = s.at(s.root);
    REQUIRE(root.kind == SpecKind::Seq);
    CHECK(s.at(root.left).kind == SpecKind::Or);
    CHECK(s.at(root.right).kind == SpecKind::Achieve);

    // Without brackets the sequencing splits first.
    Spec flat = parse_spec("reach_lo(3,0) or reach_lo(5,10); reach_lo(5,0)");
    CHECK(flat.at(flat.root).kind == SpecKind::Seq);
    CHECK(flat.at(flat.at(flat.root).left).kind == SpecKind::Or);
}

TEST_CASE("parse: ensuring attaches to the nearest factor") {
    Spec s = parse_spec("[reach_lo(0,0); reach_lo(1,1)] ensuring reach_lo(2,2)");
    CHECK(s.at(s.root).kind == SpecKind::Ensuring);
    CHECK(s.at(s.at(s.root).left).kind == SpecKind::Seq);
}

TEST_CASE("parse: errors carry a position") {
    CHECK_THROWS_AS(parse_spec(""), ParseError);
    CHECK_THROWS_AS(parse_spec("reach_lo(5,"), ParseError);
    CHECK_THROWS_AS(parse_spec("reach_lo(5,0) extra"), ParseError);
    CHECK_THROWS_AS(parse_spec("walk_to(5,0)"), ParseError);
    try {
        parse_spec("reach_lo(5,0) or ");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.position >= 16);
    }
}

TEST_CASE("parse: dimension checking against a configured state size") {
    CHECK_THROWS_AS(parse_spec("reach_lo(5)", 2), ParseError);
    CHECK_THROWS_AS(parse_spec("reach_gl(5,0,1)", 2), ParseError);
    CHECK_NOTHROW(parse_spec("reach_gl(5,0,1,1)", 2));  // explicit 2-agent target
    CHECK_THROWS_AS(parse_spec("reach_lo(0,0) ensuring reach_gl(1,1)", 2), ParseError);
}

TEST_CASE("quant: local reach distances") {
    Predicate p = reach_local({5.0, 0.0});
    CHECK(quant_local(p, std::vector<double>{5.0, 0.0}) == doctest::Approx(1.0));
    CHECK(quant_local(p, std::vector<double>{3.0, 0.0}) == doctest::Approx(-1.0));
    CHECK_THROWS_AS(quant_local(p, std::vector<double>{3.0, 0.0, 0.0}), DimensionError);
}

TEST_CASE("quant: global reach over a concatenated target") {
    Predicate p = reach_global({5.0, 0.0, 5.0, 0.0});
    std::vector<double> joint{5.0, 0.5, 4.5, 0.0};
    std::vector<int> ids{0, 1};
    CHECK(quant_global(p, joint, ids, 2) == doctest::Approx(0.5));
}

TEST_CASE("quant: broadcast target restricted to one agent uses its own segment") {
    Predicate p = reach_global({1.0, 1.0, 9.0, 9.0});
    std::vector<double> joint{9.0, 9.0};
    std::vector<int> ids{1};  // agent 1's segment is (9, 9)
    CHECK(quant_global(p, joint, ids, 2) == doctest::Approx(1.0));
}

TEST_CASE("holds: strict threshold") {
    Predicate p = reach_local({5.0, 0.0});
    std::vector<int> ids{0};
    CHECK(holds(p, std::vector<double>{4.5, 0.5}, ids, 2, 0));
    CHECK_FALSE(holds(p, std::vector<double>{4.0, 0.0}, ids, 2, 0));  // quant exactly 0
    Predicate g = reach_global({0.0, 0.0});
    CHECK(holds(g, std::vector<double>{0.0, 0.0}, ids, 2, 0));
}

TEST_CASE("satisfies: sequenced global reaches need simultaneity in order") {
    Spec phi1 = parse_spec("reach_gl(5,0); reach_gl(0,0)");
    std::vector<double> apart{9.0, 9.0, -9.0, -9.0};
    auto both_at = [](double x, double y) { return std::vector<double>{x, y, x, y}; };

    std::vector<std::vector<double>> states(9, apart);
    states[3] = both_at(5.0, 0.0);
    states[7] = both_at(0.0, 0.0);
    CHECK(satisfies(phi1, make_traj(2, 2, states)));

    // Agents pass the first goal at different times, never together.
    std::vector<std::vector<double>> staggered(9, apart);
    staggered[2] = {5.0, 0.0, 9.0, 9.0};
    staggered[4] = {9.0, 9.0, 5.0, 0.0};
    staggered[6] = both_at(0.0, 0.0);
    CHECK_FALSE(satisfies(phi1, make_traj(2, 2, staggered)));
}

TEST_CASE("satisfies: disjunction with only one satisfied branch") {
    Spec s = parse_spec("reach_lo(8,8) or reach_lo(0,0)");
    std::vector<std::vector<double>> states{{0.0, 0.0}, {1.0, 1.0}};
    CHECK(satisfies(s, make_traj(1, 2, states)));
}

TEST_CASE("satisfies: local achieve lets agents hit the goal at their own step") {
    Spec s = parse_spec("reach_lo(0,0)");
    std::vector<std::vector<double>> states{
        {0.0, 0.0, 9.0, 9.0}, {9.0, 9.0, 9.0, 9.0}, {9.0, 9.0, 0.0, 0.0}};
    CHECK(satisfies(s, make_traj(2, 2, states)));
    // Restricting to an agent that never arrives fails.
    std::vector<std::vector<double>> one_sided{{0.0, 0.0, 9.0, 9.0}, {9.0, 9.0, 9.0, 9.0}};
    CHECK_FALSE(satisfies(s, make_traj(2, 2, one_sided)));
}

TEST_CASE("satisfies: ensuring constrains every step of its window") {
    Spec s = parse_spec("reach_lo(2,0) ensuring reach_lo(1,0)", 0, 1.0);
    // Constraint tolerance 1 around (1,0): states must stay within the band.
    std::vector<std::vector<double>> good{{0.5, 0.0}, {1.5, 0.0}, {1.6, 0.0}};
    CHECK(satisfies(s, make_traj(1, 2, good)));
    std::vector<std::vector<double>> bad{{0.5, 0.0}, {3.5, 0.0}, {1.6, 0.0}};
    CHECK_FALSE(satisfies(s, make_traj(1, 2, bad)));
}

TEST_CASE("satisfies: empty trajectory is an error") {
    Spec s = parse_spec("reach_lo(0,0)");
    Trajectory t;
    t.n_agents = 1;
    t.dim = 2;
    CHECK_THROWS_AS(satisfies(s, t), std::invalid_argument);
}

TEST_CASE("satisfies: seq records an auditable split") {
    Spec s = parse_spec("reach_lo(1,0); reach_lo(3,0)");
    std::vector<std::vector<double>> states{
        {0.0, 0.0}, {1.0, 0.0}, {2.0, 0.0}, {3.0, 0.0}, {4.0, 0.0}};
    Trajectory traj = make_traj(1, 2, states);
    SplitAudit audit;
    REQUIRE(satisfies(s, traj, {0}, &audit));
    REQUIRE(audit.count(s.root) == 1);
    int k = audit[s.root];
    CHECK(k >= 0);
    CHECK(k < traj.horizon());
    // Replay both sides of the recorded split.
    Trajectory prefix = make_traj(1, 2, {states.begin(), states.begin() + k + 1});
    Trajectory suffix = make_traj(1, 2, {states.begin() + k + 1, states.end()});
    const SpecNode& root = s.at(s.root);
    Spec left{std::vector<SpecNode>{s.at(root.left)}, 0};
    Spec right{std::vector<SpecNode>{s.at(root.right)}, 0};
    CHECK(satisfies(left, prefix));
    CHECK(satisfies(right, suffix));
}

TEST_CASE("property: boolean and quantitative semantics agree away from the boundary") {
    std::mt19937_64 rng(7);
    std::vector<int> ids{0, 1};
    for (int i = 0; i < 3000; ++i) {
        Predicate p = rng() % 2 == 0
                          ? reach_local({uniform_in(rng, -5, 5), uniform_in(rng, -5, 5)})
                          : reach_global({uniform_in(rng, -5, 5), uniform_in(rng, -5, 5)});
        std::vector<double> joint{uniform_in(rng, -6, 6), uniform_in(rng, -6, 6),
                                  uniform_in(rng, -6, 6), uniform_in(rng, -6, 6)};
        int own = static_cast<int>(rng() % 2);
        double q = quant(p, joint, ids, 2, own);
        bool h = holds(p, joint, ids, 2, own);
        if (q > 1e-6) CHECK(h);
        if (q < -1e-6) CHECK_FALSE(h);
    }
}

TEST_CASE("property: reach values are 1-Lipschitz in the state") {
    std::mt19937_64 rng(11);
    std::vector<int> ids{0, 1};
    for (int i = 0; i < 3000; ++i) {
        Predicate p = rng() % 2 == 0
                          ? reach_local({uniform_in(rng, -5, 5), uniform_in(rng, -5, 5)})
                          : reach_global({uniform_in(rng, -5, 5), uniform_in(rng, -5, 5)});
        std::vector<double> a(4), b(4);
        double dist = 0.0;
        for (int k = 0; k < 4; ++k) {
            a[static_cast<std::size_t>(k)] = uniform_in(rng, -6, 6);
            b[static_cast<std::size_t>(k)] = uniform_in(rng, -6, 6);
            dist = std::max(dist, std::abs(a[static_cast<std::size_t>(k)] -
                                           b[static_cast<std::size_t>(k)]));
        }
        int own = static_cast<int>(rng() % 2);
        double qa = quant(p, a, ids, 2, own);
        double qb = quant(p, b, ids, 2, own);
        CHECK(std::abs(qa - qb) <= dist + 1e-12);
    }
}

TEST_CASE("property: joint reach implies each agent's local reach at the same step") {
    std::mt19937_64 rng(13);
    for (int i = 0; i < 2000; ++i) {
        std::vector<double> point{uniform_in(rng, -3, 3), uniform_in(rng, -3, 3)};
        Predicate joint_reach = reach_global(point);
        std::vector<double> joint{uniform_in(rng, -4, 4), uniform_in(rng, -4, 4),
                                  uniform_in(rng, -4, 4), uniform_in(rng, -4, 4)};
        std::vector<int> ids{0, 1};
        if (!holds(joint_reach, joint, ids, 2, 0)) continue;
        Predicate local_reach = reach_local(point);
        for (int a = 0; a < 2; ++a) {
            std::span<const double> seg(joint.data() + 2 * a, 2);
            CHECK(holds_value(quant_local(local_reach, seg)));
        }
    }
}
