#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "taskforge/allocation.hpp"
#include "taskforge/models.hpp"
#include "taskforge/synthesis.hpp"

namespace taskforge::harness {

class ScenarioError : public std::runtime_error {
 public:
  ScenarioError(std::string path, const std::string& message)
      : std::runtime_error(path + ": " + message), path_(std::move(path)) {}

  /// JSON-pointer-style location of the offending element.
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

struct RobotSpec {
  int id = 0;  // 1-based, contiguous
  std::vector<std::string> capabilities;
  std::string initial_region;
  std::map<std::string, std::string> initial_cap_states;
  ltl::Formula current_task;
  int progress_steps = 0;

  friend bool operator==(const RobotSpec&, const RobotSpec&) = default;
};

struct Scenario {
  models::CapabilityTS environment;  // motion template; per-robot initials
  std::map<std::string, models::CapabilityTS> capabilities;
  std::vector<RobotSpec> robots;
  std::vector<ltl::Formula> new_tasks;

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

Scenario scenario_from_json(const nlohmann::json& j);
nlohmann::json scenario_to_json(const Scenario& s);

/// Parse + full validation (structural checks, non-conflicting new-task
/// set, per-robot current-task satisfiability).
Scenario load_scenario(const std::filesystem::path& path);
void save_scenario(const Scenario& s, const std::filesystem::path& path);

/// All load-time checks; throws ScenarioError on the first violation.
void validate_scenario(const Scenario& s);

/// Robot model for the robot at the given index (motion first, then its
/// capabilities in listed order), starting from its configured initials.
models::RobotModel build_robot_model(const Scenario& s, std::size_t robot_index);

/// Walks the robot's current plan t steps (prefix, then cycling the suffix)
/// and returns the current-task automaton state reached. Throws if the
/// current task has no behavior from the robot's initial state.
int advance_progress(const Scenario& s, int robot_id, int steps);

struct PreparedRobot {
  models::RobotModel planning_model;  // initial = state at interruption
  int z_state = 0;                    // current-task automaton state
  ltl::Formula current_task;
};

/// Synthesis stage of the pipeline: per-robot progress, satisfiability
/// vectors and cost tables. Robots are processed in parallel workers.
struct PreparedInstance {
  std::vector<PreparedRobot> robots;
  std::vector<synthesis::SatVector> sat;
  std::vector<synthesis::CostTable> tables;
  std::shared_ptr<synthesis::TranslationCache> cache;
};

PreparedInstance prepare_instance(const Scenario& s, bool parallel = true);

struct RobotReport {
  int robot_id = 0;
  synthesis::SatVector zeta;
  synthesis::CostTable gamma;
  synthesis::TaskSet assigned = 0;  // from the token assignment
  synthesis::Behavior behavior;     // final behavior for the assigned set
  std::vector<std::string> prefix_states;  // rendered robot/automaton states
  std::vector<std::string> suffix_states;
};

struct AllocationReport {
  allocation::AssignmentToken token_assignment;
  std::optional<allocation::AssignmentToken> optimal_assignment;
  double token_cost = synthesis::kInfiniteCost;
  double optimal_cost = synthesis::kInfiniteCost;
  double token_ms = 0;
  double optimal_ms = 0;
  std::size_t token_assigned = 0;
  std::size_t optimal_assigned = 0;
  std::vector<RobotReport> robots;

  bool complete() const {
    return token_assignment.assigned_count() == token_assignment.size();
  }
};

nlohmann::json report_to_json(const AllocationReport& r);

struct PipelineOptions {
  bool run_optimal = true;
  bool parallel = true;
};

/// Full pipeline: prepare, allocate (token and, unless skipped, optimal),
/// then re-synthesize each robot's behavior for its assigned sub-tasks.
/// Expects a validated scenario.
AllocationReport run_pipeline(const Scenario& s, const PipelineOptions& opts = {});

}  // namespace taskforge::harness
