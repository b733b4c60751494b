#include "doctest.h"
#include "taskforge/synthesis.hpp"
#include "testutil.hpp"

using namespace taskforge;
using namespace taskforge::synthesis;
using testutil::Rand;

namespace {

// Line of rooms room_1 - room_2 - ... - room_k, unit step cost, free waiting.
models::CapabilityTS line_motion(int k) {
  models::CapabilityTS ts;
  ts.name = "motion";
  for (int i = 1; i <= k; ++i) {
    const std::string room = "room_" + std::to_string(i);
    ts.props.push_back(room);
    ts.state_names.push_back(room);
    ts.labels.push_back({room});
  }
  ts.initial = 0;
  for (int i = 0; i < k; ++i) {
    ts.edges.push_back({i, i, 0.0});
    if (i + 1 < k) {
      ts.edges.push_back({i, i + 1, 1.0});
      ts.edges.push_back({i + 1, i, 1.0});
    }
  }
  return ts;
}

models::CapabilityTS scan_cap() {
  return models::CapabilityTS{"scan",
                              {"scan"},
                              {"idle", "scan"},
                              0,
                              {{0, 0, 0.0}, {0, 1, 0.5}, {1, 0, 0.5}, {1, 1, 0.0}},
                              {{}, {"scan"}}};
}

}  // namespace

TEST_CASE("product with the universal automaton mirrors the robot model") {
  const models::RobotModel robot = models::compose_robot(line_motion(3), {}, 1);
  const ProductGraph g = build_product(robot, buchi::translate(ltl::tt()));
  CHECK(g.states.size() == static_cast<std::size_t>(robot.num_states()));
  for (std::size_t q = 0; q < g.states.size(); ++q) {
    CHECK(g.accepting[q]);
    CHECK(g.out[q].size() == robot.out(g.states[q].robot_state).size());
  }
}

TEST_CASE("product labels are restricted to the automaton alphabet") {
  const models::RobotModel robot =
      models::compose_robot(line_motion(2), {scan_cap()}, 1);
  const ProductGraph g =
      build_product(robot, buchi::translate(ltl::parse_ltl("F room_2")));
  for (const auto& letter : g.labels) CHECK_FALSE(letter.has("scan"));
}

TEST_CASE("two-room product accepting states carry accepting automaton part") {
  const models::RobotModel robot = models::compose_robot(line_motion(2), {}, 1);
  const buchi::BuchiAutomaton b = buchi::translate(ltl::parse_ltl("F room_2"));
  const ProductGraph g = build_product(robot, b);
  for (std::size_t q = 0; q < g.states.size(); ++q)
    CHECK(static_cast<bool>(g.accepting[q]) ==
          b.is_accepting(g.states[q].buchi_state));

  // Accepting states are reachable, but never without passing room_2.
  bool accepting_reached = false;
  for (std::size_t q = 0; q < g.states.size(); ++q)
    if (g.accepting[q]) accepting_reached = true;
  CHECK(accepting_reached);

  std::vector<char> seen(g.states.size(), 0);
  std::vector<int> stack;
  if (g.states[0].robot_state != 1) {
    seen[0] = 1;
    stack.push_back(0);
  }
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    CHECK_FALSE(g.accepting[v]);
    for (const auto& e : g.out[v]) {
      if (!seen[e.dst] && g.states[e.dst].robot_state != 1) {
        seen[e.dst] = 1;
        stack.push_back(e.dst);
      }
    }
  }
}

TEST_CASE("shortest lasso on the three-room line") {
  const models::RobotModel robot = models::compose_robot(line_motion(3), {}, 1);
  const ProductGraph g =
      build_product(robot, buchi::translate(ltl::parse_ltl("F room_3")));
  const Behavior b = shortest_accepting_lasso(g);
  REQUIRE_FALSE(b.empty());
  CHECK(b.cost == 2.0);
  CHECK(b.cost == testutil::lasso_cost_oracle(g));
}

TEST_CASE("accepting initial state with a free self-loop costs zero") {
  ProductGraph g;
  g.states = {{0, 0}};
  g.out = {{{0, 0.0}}};
  g.accepting = {1};
  g.labels = {{}};
  const Behavior b = shortest_accepting_lasso(g);
  REQUIRE_FALSE(b.empty());
  CHECK(b.cost == 0.0);
  CHECK(b.prefix == std::vector<int>{0});
  CHECK(b.suffix == std::vector<int>{0, 0});
}

TEST_CASE("accepting states off every cycle give an empty behavior") {
  // 0 -> 1 (accepting, no outgoing edges), 0 -> 0 cycle non-accepting.
  ProductGraph g;
  g.states = {{0, 0}, {1, 1}};
  g.out = {{{0, 1.0}, {1, 1.0}}, {}};
  g.accepting = {0, 1};
  g.labels = {{}, {}};
  const Behavior b = shortest_accepting_lasso(g);
  CHECK(b.empty());
  CHECK(b.cost == kInfiniteCost);
  CHECK(testutil::lasso_cost_oracle(g) == kInfiniteCost);
}

TEST_CASE("lasso search matches the exhaustive oracle on random graphs") {
  Rand rng(60601);
  for (int i = 0; i < 120; ++i) {
    const ProductGraph g = testutil::random_product_graph(rng, 60);
    const Behavior b = shortest_accepting_lasso(g);
    const double oracle = testutil::lasso_cost_oracle(g);
    CAPTURE(i);
    REQUIRE(b.cost == oracle);
    if (!b.empty()) {
      // The returned paths are real paths with the claimed cost.
      double prefix_cost = 0;
      for (std::size_t p = 0; p + 1 < b.prefix.size(); ++p) {
        double best = kInfiniteCost;
        for (const auto& e : g.out[b.prefix[p]])
          if (e.dst == b.prefix[p + 1]) best = std::min(best, e.weight);
        REQUIRE(best < kInfiniteCost);
        prefix_cost += best;
      }
      CHECK(prefix_cost == b.cost);
      REQUIRE(b.suffix.size() >= 2);
      CHECK(b.suffix.front() == b.prefix.back());
      CHECK(b.suffix.back() == b.prefix.back());
      for (std::size_t p = 0; p + 1 < b.suffix.size(); ++p) {
        bool exists = false;
        for (const auto& e : g.out[b.suffix[p]])
          if (e.dst == b.suffix[p + 1]) exists = true;
        REQUIRE(exists);
      }
    }
  }
}

TEST_CASE("prefix-only cost: suffix weights do not change the cost") {
  const models::RobotModel robot = models::compose_robot(line_motion(3), {}, 1);
  const buchi::BuchiAutomaton b =
      buchi::translate(ltl::parse_ltl("G F room_3"));
  ProductGraph g = build_product(robot, b);
  const Behavior before = shortest_accepting_lasso(g);
  REQUIRE_FALSE(before.empty());

  // Double every edge weight that no shortest prefix uses: here, prefix
  // edges go right, so doubling the self-loop at room_3 is suffix-only.
  ProductGraph doubled = g;
  for (std::size_t q = 0; q < doubled.states.size(); ++q)
    for (auto& e : doubled.out[q])
      if (e.dst == static_cast<int>(q)) e.weight = e.weight * 2 + 1;
  const Behavior after = shortest_accepting_lasso(doubled);
  CHECK(after.cost == before.cost);
}

TEST_CASE("synthesize_behavior without needed capability is infeasible") {
  // Robot without a scanner: scan is never labeled true.
  const models::RobotModel robot = models::compose_robot(line_motion(3), {}, 1);
  const buchi::BuchiAutomaton b_curr = buchi::translate(ltl::tt());
  const Behavior b = synthesize_behavior(
      robot, b_curr.initial(), b_curr, ltl::parse_ltl("F (room_2 & scan)"));
  CHECK(b.empty());
  CHECK(b.cost == kInfiniteCost);
}

TEST_CASE("conflicting current and new tasks are infeasible") {
  const models::RobotModel robot = models::compose_robot(line_motion(3), {}, 1);
  const buchi::BuchiAutomaton b_curr =
      buchi::translate(ltl::parse_ltl("G !room_3"));
  const Behavior b = synthesize_behavior(robot, b_curr.initial(), b_curr,
                                         ltl::parse_ltl("F room_3"));
  CHECK(b.empty());
}

TEST_CASE("phi = true reduces to the current task alone") {
  const models::RobotModel robot =
      models::compose_robot(line_motion(3), {scan_cap()}, 1);
  const buchi::BuchiAutomaton b_curr =
      buchi::translate(ltl::parse_ltl("F (room_3 & scan)"));
  const Behavior via_true =
      synthesize_behavior(robot, b_curr.initial(), b_curr, ltl::tt());
  const Behavior direct =
      shortest_accepting_lasso(build_product(robot, b_curr));
  REQUIRE_FALSE(via_true.empty());
  CHECK(via_true.cost == direct.cost);
}

TEST_CASE("behavior word satisfies both the task and the residual") {
  const models::RobotModel robot =
      models::compose_robot(line_motion(3), {scan_cap()}, 1);
  const ltl::Formula curr = ltl::parse_ltl("F (room_1 & scan)");
  const buchi::BuchiAutomaton b_curr = buchi::translate(curr);
  const ltl::Formula phi = ltl::parse_ltl("F room_3");
  const Behavior b =
      synthesize_behavior(robot, b_curr.initial(), b_curr, phi);
  REQUIRE_FALSE(b.empty());
  const ltl::LassoWord w = b.word();
  CHECK(ltl::eval_lasso(phi, w));
  CHECK(buchi::accepts_lasso(b_curr, w));
}

TEST_CASE("compute_sat_cost shapes") {
  const models::RobotModel robot = models::compose_robot(line_motion(3), {}, 1);
  const buchi::BuchiAutomaton b_curr = buchi::translate(ltl::tt());

  SUBCASE("no satisfiable sub-task") {
    const std::vector<ltl::Formula> tasks{
        ltl::parse_ltl("F (room_1 & scan)"),
        ltl::parse_ltl("F (room_2 & scan)")};
    const SatCost sc =
        compute_sat_cost(robot, b_curr.initial(), b_curr, tasks);
    CHECK(sc.zeta == SatVector{0, 0});
    CHECK(sc.gamma.entries().size() == 3);  // empty set + two singletons
    CHECK(sc.gamma.at(0) == 0.0);
    CHECK(sc.gamma.at(1) == kInfiniteCost);
    CHECK(sc.gamma.at(2) == kInfiniteCost);
  }

  SUBCASE("single satisfiable sub-task") {
    const std::vector<ltl::Formula> tasks{ltl::parse_ltl("F room_3")};
    const SatCost sc =
        compute_sat_cost(robot, b_curr.initial(), b_curr, tasks);
    CHECK(sc.zeta == SatVector{1});
    CHECK(sc.gamma.entries().size() == 2);
    CHECK(sc.gamma.at(1) == 2.0);
  }

  SUBCASE("m = 0") {
    const SatCost sc = compute_sat_cost(robot, b_curr.initial(), b_curr, {});
    CHECK(sc.zeta.empty());
    CHECK(sc.gamma.entries().size() == 1);
    CHECK(sc.gamma.at(0) == 0.0);
  }
}

TEST_CASE("non-additive costs on the line world") {
  // Robot at room_1; task A = visit room_2, task B = visit room_3 (beyond A).
  const models::RobotModel robot = models::compose_robot(line_motion(3), {}, 1);
  const buchi::BuchiAutomaton b_curr = buchi::translate(ltl::tt());
  const std::vector<ltl::Formula> tasks{ltl::parse_ltl("F room_2"),
                                        ltl::parse_ltl("F room_3")};
  const SatCost sc = compute_sat_cost(robot, b_curr.initial(), b_curr, tasks);
  REQUIRE(sc.zeta == SatVector{1, 1});
  const double together = sc.gamma.at(0b11);
  const double a = sc.gamma.at(0b01);
  const double b = sc.gamma.at(0b10);
  const double base = sc.gamma.at(0);
  CHECK(together == 2.0);
  CHECK(a == 1.0);
  CHECK(b == 2.0);
  // Doing both along the way is strictly cheaper than summing the parts.
  CHECK(together < a + b - base);
}

TEST_CASE("gamma entries never drop below the current-task-only cost") {
  Rand rng(11);
  const models::RobotModel robot =
      models::compose_robot(line_motion(3), {scan_cap()}, 1);
  const buchi::BuchiAutomaton b_curr =
      buchi::translate(ltl::parse_ltl("F (room_2 & scan)"));
  const std::vector<ltl::Formula> tasks{
      ltl::parse_ltl("F room_3"), ltl::parse_ltl("F (room_1 & scan)")};
  const SatCost sc = compute_sat_cost(robot, b_curr.initial(), b_curr, tasks);
  for (const auto& [mask, cost] : sc.gamma.entries())
    CHECK(cost >= sc.gamma.at(0));
}
