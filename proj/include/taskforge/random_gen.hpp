#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "taskforge/scenario.hpp"

namespace taskforge::harness {

struct BenchConfig {
  std::uint64_t seed = 1;
  std::vector<int> robot_counts{3};
  std::vector<int> task_counts{3};
  int trials = 1;
  int grid_rows = 3;
  int grid_cols = 3;
  double motion_weight_min = 0.5;
  double motion_weight_max = 2.0;
  double action_weight_min = 0.2;
  double action_weight_max = 0.8;
  std::vector<std::string> capability_pool{"arm", "scan", "camera"};
  int max_retries = 25;
  int skip_optimal_above_robots = 0;  // 0 = always run the optimal baseline

  void validate() const;  // throws std::invalid_argument
};

BenchConfig bench_config_from_json(const nlohmann::json& j);
BenchConfig load_bench_config(const std::filesystem::path& path);

/// Deterministic in (seed, n, m, trial): grid-room motion model, 1-3
/// capabilities per robot, template-instantiated current and new tasks.
/// Draws are retried until the scenario validates; throws std::runtime_error
/// when the retry budget is exhausted.
Scenario generate_random(const BenchConfig& config, int n, int m, int trial);

}  // namespace taskforge::harness
