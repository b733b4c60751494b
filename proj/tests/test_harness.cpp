#include <algorithm>
#include <sstream>

#include "doctest.h"
#include "taskforge/bench.hpp"
#include "taskforge/random_gen.hpp"
#include "taskforge/scenario.hpp"
#include "testutil.hpp"

using namespace taskforge;
using namespace taskforge::harness;

namespace {

nlohmann::json minimal_scenario_json() {
  return nlohmann::json::parse(R"({
    "environment": {
      "regions": ["room_1", "room_2"],
      "edges": [
        {"from": "room_1", "to": "room_1", "weight": 0.0},
        {"from": "room_2", "to": "room_2", "weight": 0.0},
        {"from": "room_1", "to": "room_2", "weight": 1.0},
        {"from": "room_2", "to": "room_1", "weight": 1.0}
      ]
    },
    "capabilities": {},
    "robots": [
      {
        "id": 1,
        "capabilities": [],
        "initial": {"motion": "room_1"},
        "current_task": "F room_2",
        "progress_steps": 0
      }
    ],
    "new_tasks": []
  })");
}

}  // namespace

TEST_CASE("minimal scenario loads and validates") {
  const Scenario s = scenario_from_json(minimal_scenario_json());
  validate_scenario(s);
  CHECK(s.new_tasks.empty());
  CHECK(s.robots.size() == 1);
  CHECK(s.environment.state_names.size() == 2);
}

TEST_CASE("scenario validation errors") {
  SUBCASE("conflicting new-task set") {
    auto j = minimal_scenario_json();
    j["new_tasks"] = {"G a", "G !a"};
    const Scenario s = scenario_from_json(j);
    CHECK_THROWS_WITH_AS(validate_scenario(s),
                         "/new_tasks: conflicting new-task set",
                         ScenarioError);
  }
  SUBCASE("unknown capability") {
    auto j = minimal_scenario_json();
    j["robots"][0]["capabilities"] = {"jetpack"};
    const Scenario s = scenario_from_json(j);
    try {
      validate_scenario(s);
      FAIL("expected a scenario error");
    } catch (const ScenarioError& e) {
      CHECK(e.path() == "/robots/0/capabilities");
    }
  }
  SUBCASE("invalid LTL reports the offset") {
    auto j = minimal_scenario_json();
    j["robots"][0]["current_task"] = "F (room_2";
    try {
      scenario_from_json(j);
      FAIL("expected a scenario error");
    } catch (const ScenarioError& e) {
      CHECK(e.path() == "/robots/0/current_task");
      CHECK(std::string(e.what()).find("offset") != std::string::npos);
    }
  }
  SUBCASE("unsatisfiable current task") {
    auto j = minimal_scenario_json();
    j["robots"][0]["current_task"] = "F (room_1 & room_2)";
    const Scenario s = scenario_from_json(j);
    CHECK_THROWS_AS(validate_scenario(s), ScenarioError);
  }
  SUBCASE("robot ids must be contiguous from 1") {
    auto j = minimal_scenario_json();
    j["robots"][0]["id"] = 2;
    const Scenario s = scenario_from_json(j);
    CHECK_THROWS_AS(validate_scenario(s), ScenarioError);
  }
}

TEST_CASE("scenario JSON round-trip") {
  const Scenario s = load_scenario("scenarios/warehouse.json");
  const Scenario again = scenario_from_json(scenario_to_json(s));
  CHECK(again == s);
}

TEST_CASE("advance_progress") {
  const Scenario s = load_scenario("scenarios/warehouse.json");

  SUBCASE("zero steps returns the automaton's initial state") {
    synthesis::TranslationCache cache;
    const auto& b = cache.get(s.robots[0].current_task);
    CHECK(advance_progress(s, 1, 0) == b.initial());
  }

  SUBCASE("periodic once on the suffix cycle") {
    // Find the plan's prefix and cycle lengths by probing periodicity.
    const int far = 64;
    for (int robot_id = 1; robot_id <= 3; ++robot_id) {
      const int z_far = advance_progress(s, robot_id, far);
      bool periodic = false;
      for (int period = 1; period <= 16 && !periodic; ++period)
        periodic = advance_progress(s, robot_id, far + period) == z_far;
      CHECK(periodic);
    }
  }
}

TEST_CASE("pipeline on an m = 0 scenario") {
  const Scenario s = scenario_from_json(minimal_scenario_json());
  validate_scenario(s);
  const AllocationReport rep = run_pipeline(s);
  CHECK(rep.token_assignment.size() == 0);
  CHECK(rep.complete());
  // Token cost is the sum of the empty-set entries: the current task alone.
  CHECK(rep.token_cost == 1.0);
  REQUIRE(rep.robots.size() == 1);
  CHECK_FALSE(rep.robots[0].behavior.empty());
  CHECK(rep.robots[0].behavior.cost == 1.0);
}

TEST_CASE("warehouse pipeline end to end") {
  const Scenario s = load_scenario("scenarios/warehouse.json");
  const AllocationReport rep = run_pipeline(s);
  REQUIRE(rep.optimal_assignment.has_value());
  CHECK(rep.complete());
  CHECK(rep.token_assigned == 3);
  CHECK(rep.optimal_assigned == 3);
  CHECK(rep.token_cost >= rep.optimal_cost);

  // Only robot 2 carries both scanner and camera, so the recurrence task
  // must be robot 2's or nobody's.
  CHECK(rep.token_assignment.owner(2) == 2);

  // Every final behavior satisfies the robot's residual current task and
  // its assigned sub-tasks.
  for (std::size_t i = 0; i < rep.robots.size(); ++i) {
    const RobotReport& rr = rep.robots[i];
    REQUIRE_FALSE(rr.behavior.empty());
    const ltl::LassoWord w = rr.behavior.word();
    for (std::size_t j = 0; j < s.new_tasks.size(); ++j)
      if (rr.assigned & (synthesis::TaskSet(1) << j))
        CHECK(ltl::eval_lasso(s.new_tasks[j], w));
  }

  // Determinism.
  const AllocationReport rep2 = run_pipeline(s);
  CHECK(rep2.token_assignment == rep.token_assignment);
  CHECK(rep2.token_cost == rep.token_cost);
  CHECK(*rep2.optimal_assignment == *rep.optimal_assignment);
}

TEST_CASE("arm-only tasks go to arm robots") {
  Scenario s = load_scenario("scenarios/warehouse.json");
  const AllocationReport rep = run_pipeline(s);
  // Tasks 1 and 2 need the arm: robot 2 can never own them.
  CHECK(rep.token_assignment.owner(0) != 2);
  CHECK(rep.token_assignment.owner(1) != 2);
}

TEST_CASE("line world non-additivity") {
  const Scenario s = load_scenario("scenarios/line_world.json");
  PreparedInstance prep = prepare_instance(s);
  const synthesis::CostTable& gamma = prep.tables[0];
  CHECK(gamma.at(0b11) < gamma.at(0b01) + gamma.at(0b10) - gamma.at(0b00));
}

TEST_CASE("generate_random determinism and validity") {
  BenchConfig config;
  config.seed = 99;
  const Scenario a = generate_random(config, 2, 2, 0);
  const Scenario b = generate_random(config, 2, 2, 0);
  CHECK(a == b);
  CHECK(scenario_to_json(a).dump() == scenario_to_json(b).dump());

  const Scenario c = generate_random(config, 2, 2, 1);
  CHECK(scenario_to_json(a).dump() != scenario_to_json(c).dump());

  const Scenario one = generate_random(config, 1, 1, 0);
  CHECK(one.robots.size() == 1);
  CHECK(one.new_tasks.size() == 1);
  validate_scenario(one);  // must not throw
}

TEST_CASE("random scenarios run through the pipeline") {
  BenchConfig config;
  config.seed = 4242;
  config.grid_rows = 2;
  config.grid_cols = 2;
  for (int trial = 0; trial < 4; ++trial) {
    const Scenario s = generate_random(config, 3, 2, trial);
    const AllocationReport rep = run_pipeline(s);
    CAPTURE(trial);
    if (rep.optimal_assignment &&
        rep.token_assigned == rep.optimal_assigned)
      CHECK(rep.token_cost >= rep.optimal_cost);
  }
}

TEST_CASE("bench CSV shape") {
  BenchConfig config;
  config.seed = 5;
  config.robot_counts = {2};
  config.task_counts = {2};
  config.trials = 1;
  config.grid_rows = 2;
  config.grid_cols = 2;
  const BenchResult result = run_bench(config);
  REQUIRE(result.rows.size() == 1);
  CHECK(result.rows[0].status == "ok");
  REQUIRE(result.aggregates.size() == 1);
  std::ostringstream csv;
  write_csv(result, csv);
  const std::string text = csv.str();
  CHECK(text.find("n,m,trial,seed,token_cost,opt_cost,token_ms,opt_ms,"
                   "token_assigned,opt_assigned,status") == 0);
  CHECK(text.find("agg_mean") != std::string::npos);
  CHECK(text.find("agg_min") != std::string::npos);
  CHECK(text.find("agg_max") != std::string::npos);
  // 1 data row + 3 aggregate rows + header.
  CHECK(std::count(text.begin(), text.end(), '\n') == 5);
}

TEST_CASE("report JSON serialization") {
  const Scenario s = scenario_from_json(minimal_scenario_json());
  validate_scenario(s);
  const AllocationReport rep = run_pipeline(s);
  const nlohmann::json j = report_to_json(rep);
  CHECK(j.contains("token"));
  CHECK(j.contains("optimal"));
  CHECK(j["complete"] == true);
  CHECK(j["robots"].size() == 1);
}
