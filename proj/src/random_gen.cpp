#include "taskforge/random_gen.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <stdexcept>

namespace taskforge::harness {

namespace {

using nlohmann::json;

// Deterministic RNG wrapper; draws are pinned to mt19937_64 output so that
// identical (seed, n, m, trial) inputs reproduce byte-identical scenarios.
class Rng {
 public:
  Rng(std::uint64_t seed, int n, int m, int trial, int attempt) {
    std::seed_seq seq{seed, static_cast<std::uint64_t>(n),
                      static_cast<std::uint64_t>(m),
                      static_cast<std::uint64_t>(trial),
                      static_cast<std::uint64_t>(attempt)};
    engine_.seed(seq);
  }

  int uniform_int(int lo, int hi) {  // inclusive bounds
    return lo + static_cast<int>(engine_() %
                                 static_cast<std::uint64_t>(hi - lo + 1));
  }

  // One-decimal weights keep scenario files short and comparisons stable.
  double uniform_weight(double lo, double hi) {
    const int lo10 = static_cast<int>(lo * 10 + 0.5);
    const int hi10 = static_cast<int>(hi * 10 + 0.5);
    return uniform_int(lo10, hi10) / 10.0;
  }

  template <typename T>
  const T& pick(const std::vector<T>& items) {
    return items[uniform_int(0, static_cast<int>(items.size()) - 1)];
  }

 private:
  std::mt19937_64 engine_;
};

const std::vector<std::string>& actions_of(const std::string& capability) {
  static const std::vector<std::string> arm{"pick_up", "drop_off",
                                            "pull_lever"};
  static const std::vector<std::string> scan{"scan"};
  static const std::vector<std::string> camera{"use_camera"};
  static const std::vector<std::string> none;
  if (capability == "arm") return arm;
  if (capability == "scan") return scan;
  if (capability == "camera") return camera;
  return none;
}

models::CapabilityTS make_capability(const std::string& name,
                                     double action_weight) {
  const std::vector<std::string>& actions = actions_of(name);
  models::CapabilityTS ts;
  ts.name = name;
  ts.props = actions;
  ts.state_names.push_back("idle");
  ts.labels.push_back({});
  for (const std::string& a : actions) {
    ts.state_names.push_back(a);
    ts.labels.push_back({a});
  }
  ts.initial = 0;
  const int k = static_cast<int>(ts.state_names.size());
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b)
      ts.edges.push_back({a, b, a == b ? 0.0 : action_weight});
  return ts;
}

models::CapabilityTS make_grid_motion(int rows, int cols, Rng& rng,
                                      const BenchConfig& cfg) {
  models::CapabilityTS ts;
  ts.name = "motion";
  for (int i = 0; i < rows * cols; ++i) {
    const std::string room = "room_" + std::to_string(i + 1);
    ts.props.push_back(room);
    ts.state_names.push_back(room);
    ts.labels.push_back({room});
  }
  ts.initial = 0;
  auto idx = [cols](int r, int c) { return r * cols + c; };
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      ts.edges.push_back({idx(r, c), idx(r, c), 0.0});
      if (c + 1 < cols) {
        const double w =
            rng.uniform_weight(cfg.motion_weight_min, cfg.motion_weight_max);
        ts.edges.push_back({idx(r, c), idx(r, c + 1), w});
        ts.edges.push_back({idx(r, c + 1), idx(r, c), w});
      }
      if (r + 1 < rows) {
        const double w =
            rng.uniform_weight(cfg.motion_weight_min, cfg.motion_weight_max);
        ts.edges.push_back({idx(r, c), idx(r + 1, c), w});
        ts.edges.push_back({idx(r + 1, c), idx(r, c), w});
      }
    }
  }
  return ts;
}

std::string atom(const std::string& room, const std::string& action) {
  return "(" + room + " & " + action + ")";
}

}  // namespace

void BenchConfig::validate() const {
  if (robot_counts.empty() || task_counts.empty())
    throw std::invalid_argument("robot_counts/task_counts must be nonempty");
  for (int n : robot_counts)
    if (n < 1) throw std::invalid_argument("robot counts must be >= 1");
  for (int m : task_counts)
    if (m < 0) throw std::invalid_argument("task counts must be >= 0");
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  if (grid_rows < 1 || grid_cols < 1 || grid_rows * grid_cols < 2)
    throw std::invalid_argument("grid must contain at least 2 rooms");
  if (motion_weight_min < 0 || motion_weight_max < motion_weight_min ||
      action_weight_min < 0 || action_weight_max < action_weight_min)
    throw std::invalid_argument("invalid weight range");
  if (capability_pool.empty())
    throw std::invalid_argument("capability pool is empty");
  for (const std::string& c : capability_pool)
    if (actions_of(c).empty())
      throw std::invalid_argument("unknown capability '" + c + "' in pool");
  if (max_retries < 1) throw std::invalid_argument("max_retries must be >= 1");
}

BenchConfig bench_config_from_json(const json& j) {
  BenchConfig c;
  if (!j.is_object()) throw std::invalid_argument("config must be an object");
  auto get_int = [&](const char* key, int& out) {
    if (j.contains(key)) out = j.at(key).get<int>();
  };
  if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("robot_counts"))
    c.robot_counts = j.at("robot_counts").get<std::vector<int>>();
  if (j.contains("task_counts"))
    c.task_counts = j.at("task_counts").get<std::vector<int>>();
  get_int("trials", c.trials);
  get_int("grid_rows", c.grid_rows);
  get_int("grid_cols", c.grid_cols);
  if (j.contains("motion_weight_range")) {
    const auto r = j.at("motion_weight_range").get<std::vector<double>>();
    if (r.size() != 2) throw std::invalid_argument("motion_weight_range");
    c.motion_weight_min = r[0];
    c.motion_weight_max = r[1];
  }
  if (j.contains("action_weight_range")) {
    const auto r = j.at("action_weight_range").get<std::vector<double>>();
    if (r.size() != 2) throw std::invalid_argument("action_weight_range");
    c.action_weight_min = r[0];
    c.action_weight_max = r[1];
  }
  if (j.contains("capability_pool"))
    c.capability_pool =
        j.at("capability_pool").get<std::vector<std::string>>();
  get_int("max_retries", c.max_retries);
  get_int("skip_optimal_above_robots", c.skip_optimal_above_robots);
  c.validate();
  return c;
}

BenchConfig load_bench_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in)
    throw std::invalid_argument("cannot open config " + path.string());
  json j;
  in >> j;
  return bench_config_from_json(j);
}

Scenario generate_random(const BenchConfig& config, int n, int m, int trial) {
  config.validate();
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  if (m < 0) throw std::invalid_argument("m must be >= 0");

  std::string last_error;
  for (int attempt = 0; attempt < config.max_retries; ++attempt) {
    Rng rng(config.seed, n, m, trial, attempt);
    Scenario s;
    s.environment = make_grid_motion(config.grid_rows, config.grid_cols, rng,
                                     config);
    const std::vector<std::string>& rooms = s.environment.state_names;

    for (const std::string& cap : config.capability_pool)
      s.capabilities.emplace(
          cap, make_capability(cap, rng.uniform_weight(config.action_weight_min,
                                                       config.action_weight_max)));

    for (int i = 1; i <= n; ++i) {
      RobotSpec r;
      r.id = i;
      const int cap_count = rng.uniform_int(
          1, std::min<int>(3, static_cast<int>(config.capability_pool.size())));
      std::vector<std::string> pool = config.capability_pool;
      for (int k = 0; k < cap_count; ++k) {
        const int pick = rng.uniform_int(0, static_cast<int>(pool.size()) - 1);
        r.capabilities.push_back(pool[pick]);
        pool.erase(pool.begin() + pick);
      }
      std::sort(r.capabilities.begin(), r.capabilities.end());
      r.initial_region = rng.pick(rooms);

      std::vector<std::string> my_actions;
      for (const std::string& cap : r.capabilities) {
        const auto& acts = actions_of(cap);
        my_actions.insert(my_actions.end(), acts.begin(), acts.end());
      }

      const std::string room_a = rng.pick(rooms);
      std::string room_b = rng.pick(rooms);
      while (room_b == room_a) room_b = rng.pick(rooms);
      const std::string act_x = rng.pick(my_actions);
      switch (rng.uniform_int(0, 2)) {
        case 0:  // visit B acting, then A acting
          r.current_task = ltl::parse_ltl(
              "(!" + atom(room_a, act_x) + " U " + atom(room_b, act_x) +
              ") & F " + atom(room_a, act_x));
          break;
        case 1:  // patrol two rooms
          r.current_task = ltl::parse_ltl("G F " + atom(room_a, act_x) +
                                          " & G F " + atom(room_b, act_x));
          break;
        default: {  // two unordered goals
          const std::string act_y = rng.pick(my_actions);
          r.current_task = ltl::parse_ltl("F " + atom(room_a, act_x) +
                                          " & F " + atom(room_b, act_y));
          break;
        }
      }
      r.progress_steps = rng.uniform_int(0, 4);
      s.robots.push_back(std::move(r));
    }

    std::vector<std::string> pool_actions;
    for (const std::string& cap : config.capability_pool) {
      const auto& acts = actions_of(cap);
      pool_actions.insert(pool_actions.end(), acts.begin(), acts.end());
    }
    const bool pool_has_arm =
        std::find(config.capability_pool.begin(), config.capability_pool.end(),
                  "arm") != config.capability_pool.end();
    const bool pool_has_scan_camera =
        std::find(config.capability_pool.begin(), config.capability_pool.end(),
                  "scan") != config.capability_pool.end() &&
        std::find(config.capability_pool.begin(), config.capability_pool.end(),
                  "camera") != config.capability_pool.end();

    bool chain_used = false;  // at most one pick-and-drop chain per instance
    for (int j = 0; j < m; ++j) {
      const std::string room_a = rng.pick(rooms);
      std::string room_b = rng.pick(rooms);
      while (room_b == room_a) room_b = rng.pick(rooms);
      const int shape = rng.uniform_int(0, 2);
      if (shape == 0 && pool_has_arm && !chain_used) {
        chain_used = true;
        s.new_tasks.push_back(ltl::parse_ltl(
            "(!drop_off U " + atom(room_a, "pick_up") + ") & (!drop_off U " +
            atom(room_b, "drop_off") + ")"));
      } else if (shape == 1 && pool_has_scan_camera &&
                 rng.uniform_int(0, 1) == 1) {
        s.new_tasks.push_back(ltl::parse_ltl("G F (" + room_a +
                                             " & scan & use_camera)"));
      } else if (shape == 1) {
        s.new_tasks.push_back(
            ltl::parse_ltl("G F " + atom(room_a, rng.pick(pool_actions))));
      } else {
        s.new_tasks.push_back(
            ltl::parse_ltl("F " + atom(room_a, rng.pick(pool_actions))));
      }
    }

    try {
      validate_scenario(s);
      return s;
    } catch (const std::exception& e) {
      last_error = e.what();
    }
  }
  throw std::runtime_error(
      "generate_random: no valid scenario after " +
      std::to_string(config.max_retries) + " attempts (n=" + std::to_string(n) +
      " m=" + std::to_string(m) + " trial=" + std::to_string(trial) +
      "): last failure: " + last_error);
}

}  // namespace taskforge::harness
