#include "taskforge/scenario.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <future>
#include <set>
#include <sstream>

#include "taskforge/buchi.hpp"

namespace taskforge::harness {

namespace {

using nlohmann::json;

bool valid_name(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
  return true;
}

const json& require(const json& j, const char* key, const std::string& path) {
  if (!j.is_object())
    throw ScenarioError(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end())
    throw ScenarioError(path, std::string("missing key '") + key + "'");
  return *it;
}

std::string as_string(const json& j, const std::string& path) {
  if (!j.is_string()) throw ScenarioError(path, "expected a string");
  return j.get<std::string>();
}

double as_number(const json& j, const std::string& path) {
  if (!j.is_number()) throw ScenarioError(path, "expected a number");
  return j.get<double>();
}

int as_int(const json& j, const std::string& path) {
  if (!j.is_number_integer()) throw ScenarioError(path, "expected an integer");
  return j.get<int>();
}

ltl::Formula parse_task(const std::string& text, const std::string& path) {
  try {
    return ltl::parse_ltl(text);
  } catch (const ltl::ParseError& e) {
    throw ScenarioError(path, e.what());
  }
}

std::vector<models::CapabilityTS::Edge> edges_from_json(
    const json& j, const models::CapabilityTS& ts, const std::string& path) {
  if (!j.is_array()) throw ScenarioError(path, "expected an array");
  std::vector<models::CapabilityTS::Edge> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string epath = path + "/" + std::to_string(i);
    const json& e = j[i];
    const std::string from = as_string(require(e, "from", epath), epath + "/from");
    const std::string to = as_string(require(e, "to", epath), epath + "/to");
    const double w = as_number(require(e, "weight", epath), epath + "/weight");
    const int src = ts.state_index(from);
    const int dst = ts.state_index(to);
    if (src < 0) throw ScenarioError(epath + "/from", "unknown state '" + from + "'");
    if (dst < 0) throw ScenarioError(epath + "/to", "unknown state '" + to + "'");
    if (w < 0) throw ScenarioError(epath + "/weight", "negative weight");
    out.push_back({src, dst, w});
  }
  return out;
}

}  // namespace

Scenario scenario_from_json(const json& j) {
  Scenario s;

  {
    const json& env = require(j, "environment", "");
    const json& regions = require(env, "regions", "/environment");
    if (!regions.is_array() || regions.empty())
      throw ScenarioError("/environment/regions", "expected a nonempty array");
    s.environment.name = "motion";
    for (std::size_t i = 0; i < regions.size(); ++i) {
      const std::string path = "/environment/regions/" + std::to_string(i);
      const std::string name = as_string(regions[i], path);
      if (!valid_name(name))
        throw ScenarioError(path, "invalid region name '" + name + "'");
      s.environment.props.push_back(name);
      s.environment.state_names.push_back(name);
      s.environment.labels.push_back({name});
    }
    s.environment.initial = 0;
    s.environment.edges = edges_from_json(require(env, "edges", "/environment"),
                                          s.environment, "/environment/edges");
  }

  if (auto it = j.find("capabilities"); it != j.end()) {
    if (!it->is_object())
      throw ScenarioError("/capabilities", "expected an object");
    for (const auto& [name, cj] : it->items()) {
      const std::string path = "/capabilities/" + name;
      if (!valid_name(name))
        throw ScenarioError(path, "invalid capability name");
      models::CapabilityTS ts;
      ts.name = name;
      const json& props = require(cj, "props", path);
      if (!props.is_array()) throw ScenarioError(path + "/props", "expected an array");
      for (std::size_t i = 0; i < props.size(); ++i) {
        const std::string p =
            as_string(props[i], path + "/props/" + std::to_string(i));
        if (!valid_name(p))
          throw ScenarioError(path + "/props/" + std::to_string(i),
                              "invalid proposition name '" + p + "'");
        ts.props.push_back(p);
      }
      const json& states = require(cj, "states", path);
      if (!states.is_array() || states.empty())
        throw ScenarioError(path + "/states", "expected a nonempty array");
      for (std::size_t i = 0; i < states.size(); ++i) {
        const std::string spath = path + "/states/" + std::to_string(i);
        const json& st = states[i];
        ts.state_names.push_back(
            as_string(require(st, "id", spath), spath + "/id"));
        std::vector<std::string> label;
        const json& lj = require(st, "label", spath);
        if (!lj.is_array()) throw ScenarioError(spath + "/label", "expected an array");
        for (std::size_t k = 0; k < lj.size(); ++k)
          label.push_back(as_string(lj[k], spath + "/label/" + std::to_string(k)));
        ts.labels.push_back(std::move(label));
      }
      ts.edges = edges_from_json(require(cj, "edges", path), ts, path + "/edges");
      const std::string init =
          as_string(require(cj, "initial", path), path + "/initial");
      ts.initial = ts.state_index(init);
      if (ts.initial < 0)
        throw ScenarioError(path + "/initial", "unknown state '" + init + "'");
      s.capabilities.emplace(name, std::move(ts));
    }
  }

  {
    const json& robots = require(j, "robots", "");
    if (!robots.is_array() || robots.empty())
      throw ScenarioError("/robots", "expected a nonempty array");
    for (std::size_t i = 0; i < robots.size(); ++i) {
      const std::string path = "/robots/" + std::to_string(i);
      const json& rj = robots[i];
      RobotSpec r;
      r.id = as_int(require(rj, "id", path), path + "/id");
      const json& caps = require(rj, "capabilities", path);
      if (!caps.is_array())
        throw ScenarioError(path + "/capabilities", "expected an array");
      for (std::size_t k = 0; k < caps.size(); ++k)
        r.capabilities.push_back(
            as_string(caps[k], path + "/capabilities/" + std::to_string(k)));
      const json& init = require(rj, "initial", path);
      r.initial_region =
          as_string(require(init, "motion", path + "/initial"),
                    path + "/initial/motion");
      for (const auto& [key, value] : init.items()) {
        if (key == "motion") continue;
        r.initial_cap_states[key] = as_string(value, path + "/initial/" + key);
      }
      r.current_task =
          parse_task(as_string(require(rj, "current_task", path),
                               path + "/current_task"),
                     path + "/current_task");
      r.progress_steps =
          as_int(require(rj, "progress_steps", path), path + "/progress_steps");
      s.robots.push_back(std::move(r));
    }
  }

  if (auto it = j.find("new_tasks"); it != j.end()) {
    if (!it->is_array()) throw ScenarioError("/new_tasks", "expected an array");
    for (std::size_t i = 0; i < it->size(); ++i) {
      const std::string path = "/new_tasks/" + std::to_string(i);
      s.new_tasks.push_back(parse_task(as_string((*it)[i], path), path));
    }
  }
  return s;
}

json scenario_to_json(const Scenario& s) {
  json j;
  {
    json env;
    env["regions"] = s.environment.state_names;
    json edges = json::array();
    for (const auto& e : s.environment.edges)
      edges.push_back({{"from", s.environment.state_names[e.src]},
                       {"to", s.environment.state_names[e.dst]},
                       {"weight", e.weight}});
    env["edges"] = std::move(edges);
    j["environment"] = std::move(env);
  }
  {
    json caps = json::object();
    for (const auto& [name, ts] : s.capabilities) {
      json cj;
      cj["props"] = ts.props;
      json states = json::array();
      for (std::size_t i = 0; i < ts.state_names.size(); ++i)
        states.push_back({{"id", ts.state_names[i]}, {"label", ts.labels[i]}});
      cj["states"] = std::move(states);
      json edges = json::array();
      for (const auto& e : ts.edges)
        edges.push_back({{"from", ts.state_names[e.src]},
                         {"to", ts.state_names[e.dst]},
                         {"weight", e.weight}});
      cj["edges"] = std::move(edges);
      cj["initial"] = ts.state_names[ts.initial];
      caps[name] = std::move(cj);
    }
    j["capabilities"] = std::move(caps);
  }
  {
    json robots = json::array();
    for (const RobotSpec& r : s.robots) {
      json rj;
      rj["id"] = r.id;
      rj["capabilities"] = r.capabilities;
      json init;
      init["motion"] = r.initial_region;
      for (const auto& [cap, st] : r.initial_cap_states) init[cap] = st;
      rj["initial"] = std::move(init);
      rj["current_task"] = r.current_task.to_string();
      rj["progress_steps"] = r.progress_steps;
      robots.push_back(std::move(rj));
    }
    j["robots"] = std::move(robots);
  }
  {
    json tasks = json::array();
    for (const ltl::Formula& f : s.new_tasks) tasks.push_back(f.to_string());
    j["new_tasks"] = std::move(tasks);
  }
  return j;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("", "cannot open " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ScenarioError("", std::string("JSON parse error: ") + e.what());
  }
  Scenario s = scenario_from_json(j);
  validate_scenario(s);
  return s;
}

void save_scenario(const Scenario& s, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ScenarioError("", "cannot open " + path.string() + " for writing");
  out << scenario_to_json(s).dump(2) << "\n";
}

models::RobotModel build_robot_model(const Scenario& s,
                                     std::size_t robot_index) {
  const RobotSpec& r = s.robots.at(robot_index);
  const std::string path = "/robots/" + std::to_string(robot_index);

  models::CapabilityTS motion = s.environment;
  motion.initial = motion.state_index(r.initial_region);
  if (motion.initial < 0)
    throw ScenarioError(path + "/initial/motion",
                        "unknown region '" + r.initial_region + "'");

  std::vector<models::CapabilityTS> caps;
  for (const std::string& cap_name : r.capabilities) {
    auto it = s.capabilities.find(cap_name);
    if (it == s.capabilities.end())
      throw ScenarioError(path + "/capabilities",
                          "unknown capability '" + cap_name + "'");
    models::CapabilityTS cap = it->second;
    if (auto sit = r.initial_cap_states.find(cap_name);
        sit != r.initial_cap_states.end()) {
      cap.initial = cap.state_index(sit->second);
      if (cap.initial < 0)
        throw ScenarioError(path + "/initial/" + cap_name,
                            "unknown state '" + sit->second + "'");
    }
    caps.push_back(std::move(cap));
  }
  try {
    return models::compose_robot(motion, caps, r.id);
  } catch (const std::invalid_argument& e) {
    throw ScenarioError(path, e.what());
  }
}

namespace {

// Product-graph state reached after t steps of the plan.
int state_at_step(const synthesis::Behavior& plan, int t) {
  const int l = static_cast<int>(plan.prefix.size()) - 1;
  if (t <= l) return plan.prefix[t];
  const int r = static_cast<int>(plan.suffix.size()) - 1;
  return plan.suffix[(t - l) % r];
}

struct PlannedRobot {
  models::RobotModel model;
  synthesis::ProductGraph plan_product;
  synthesis::Behavior plan;
};

PlannedRobot plan_current(const Scenario& s, std::size_t robot_index,
                          synthesis::TranslationCache& cache) {
  PlannedRobot out;
  out.model = build_robot_model(s, robot_index);
  const buchi::BuchiAutomaton& b_curr =
      cache.get(s.robots[robot_index].current_task);
  out.plan_product = synthesis::build_product(out.model, b_curr);
  out.plan = synthesis::shortest_accepting_lasso(out.plan_product);
  if (out.plan.empty())
    throw ScenarioError(
        "/robots/" + std::to_string(robot_index) + "/current_task",
        "current task is unsatisfiable from the robot's initial state");
  return out;
}

}  // namespace

void validate_scenario(const Scenario& s) {
  try {
    s.environment.validate();
  } catch (const std::invalid_argument& e) {
    throw ScenarioError("/environment", e.what());
  }
  for (const auto& [name, ts] : s.capabilities) {
    try {
      ts.validate();
    } catch (const std::invalid_argument& e) {
      throw ScenarioError("/capabilities/" + name, e.what());
    }
  }
  for (std::size_t i = 0; i < s.robots.size(); ++i) {
    const std::string path = "/robots/" + std::to_string(i);
    if (s.robots[i].id != static_cast<int>(i) + 1)
      throw ScenarioError(path + "/id",
                          "robot ids must be 1..n in listing order");
    if (s.robots[i].progress_steps < 0)
      throw ScenarioError(path + "/progress_steps", "must be >= 0");
    for (const auto& [cap, st] : s.robots[i].initial_cap_states) {
      if (std::find(s.robots[i].capabilities.begin(),
                    s.robots[i].capabilities.end(),
                    cap) == s.robots[i].capabilities.end())
        throw ScenarioError(path + "/initial/" + cap,
                            "initial state for a capability the robot lacks");
    }
  }

  // New-task set must be non-conflicting: some trace satisfies them all.
  if (!s.new_tasks.empty()) {
    ltl::Formula conj = s.new_tasks[0];
    for (std::size_t i = 1; i < s.new_tasks.size(); ++i)
      conj = ltl::land(conj, s.new_tasks[i]);
    if (!buchi::has_nonempty_language(buchi::translate(conj)))
      throw ScenarioError("/new_tasks", "conflicting new-task set");
  }

  // Each robot's current task must admit a behavior (plan_current throws a
  // ScenarioError otherwise); this also exercises compose_robot.
  synthesis::TranslationCache cache;
  for (std::size_t i = 0; i < s.robots.size(); ++i) plan_current(s, i, cache);
}

int advance_progress(const Scenario& s, int robot_id, int steps) {
  if (steps < 0) throw std::invalid_argument("steps must be >= 0");
  std::size_t index = s.robots.size();
  for (std::size_t i = 0; i < s.robots.size(); ++i)
    if (s.robots[i].id == robot_id) index = i;
  if (index == s.robots.size())
    throw std::invalid_argument("unknown robot id " + std::to_string(robot_id));
  synthesis::TranslationCache cache;
  const PlannedRobot pr = plan_current(s, index, cache);
  const int q = state_at_step(pr.plan, steps);
  return pr.plan_product.states[q].buchi_state;
}

PreparedInstance prepare_instance(const Scenario& s, bool parallel) {
  PreparedInstance out;
  out.cache = std::make_shared<synthesis::TranslationCache>();
  const std::size_t n = s.robots.size();
  out.robots.resize(n);
  out.sat.resize(n);
  out.tables.resize(n);

  auto work = [&](std::size_t i) {
    const PlannedRobot pr = plan_current(s, i, *out.cache);
    const int q = state_at_step(pr.plan, s.robots[i].progress_steps);
    const auto [robot_state, buchi_state] = pr.plan_product.states[q];
    PreparedRobot prep;
    prep.planning_model = pr.model.with_initial(robot_state);
    prep.z_state = buchi_state;
    prep.current_task = s.robots[i].current_task;
    const buchi::BuchiAutomaton& b_curr = out.cache->get(prep.current_task);
    synthesis::SatCost sc = synthesis::compute_sat_cost(
        prep.planning_model, prep.z_state, b_curr, s.new_tasks,
        out.cache.get());
    out.robots[i] = std::move(prep);
    out.sat[i] = std::move(sc.zeta);
    out.tables[i] = std::move(sc.gamma);
  };

  if (parallel && n > 1) {
    std::vector<std::future<void>> futures;
    futures.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
      futures.push_back(std::async(std::launch::async, work, i));
    for (auto& f : futures) f.get();
  } else {
    for (std::size_t i = 0; i < n; ++i) work(i);
  }
  return out;
}

AllocationReport run_pipeline(const Scenario& s, const PipelineOptions& opts) {
  using clock = std::chrono::steady_clock;
  PreparedInstance prep = prepare_instance(s, opts.parallel);
  const std::size_t m = s.new_tasks.size();

  AllocationReport rep;
  {
    const auto t0 = clock::now();
    rep.token_assignment = allocation::token_allocate(prep.sat, prep.tables, m);
    rep.token_ms = std::chrono::duration<double, std::milli>(clock::now() - t0)
                       .count();
  }
  rep.token_cost = allocation::total_cost(rep.token_assignment, prep.tables);
  rep.token_assigned = rep.token_assignment.assigned_count();

  if (opts.run_optimal) {
    const auto t0 = clock::now();
    rep.optimal_assignment =
        allocation::optimal_allocate(prep.sat, prep.tables, m);
    rep.optimal_ms =
        std::chrono::duration<double, std::milli>(clock::now() - t0).count();
    rep.optimal_cost = allocation::total_cost(*rep.optimal_assignment,
                                              prep.tables);
    rep.optimal_assigned = rep.optimal_assignment->assigned_count();
  }

  for (std::size_t i = 0; i < s.robots.size(); ++i) {
    RobotReport rr;
    rr.robot_id = s.robots[i].id;
    rr.zeta = prep.sat[i];
    rr.gamma = prep.tables[i];
    rr.assigned = rep.token_assignment.tasks_of(s.robots[i].id);

    ltl::Formula conj = ltl::tt();
    bool first = true;
    for (std::size_t j = 0; j < m; ++j) {
      if (!(rr.assigned & (synthesis::TaskSet(1) << j))) continue;
      conj = first ? s.new_tasks[j] : ltl::land(conj, s.new_tasks[j]);
      first = false;
    }

    const buchi::BuchiAutomaton& b_curr =
        prep.cache->get(prep.robots[i].current_task);
    const buchi::BuchiAutomaton restricted =
        buchi::restrict_reachable(b_curr, prep.robots[i].z_state);
    const buchi::BuchiAutomaton product =
        buchi::intersect(prep.cache->get(conj), restricted);
    const synthesis::ProductGraph graph =
        synthesis::build_product(prep.robots[i].planning_model, product);
    rr.behavior = synthesis::shortest_accepting_lasso(graph);
    for (int q : rr.behavior.prefix)
      rr.prefix_states.push_back(prep.robots[i].planning_model.state_name(
          graph.states[q].robot_state));
    for (int q : rr.behavior.suffix)
      rr.suffix_states.push_back(prep.robots[i].planning_model.state_name(
          graph.states[q].robot_state));
    rep.robots.push_back(std::move(rr));
  }
  return rep;
}

namespace {

json cost_to_json(double c) {
  if (c == synthesis::kInfiniteCost) return nullptr;
  return c;
}

json token_to_json(const allocation::AssignmentToken& t) {
  return json(t.entries());
}

}  // namespace

json report_to_json(const AllocationReport& r) {
  json j;
  j["token"] = {{"assignment", token_to_json(r.token_assignment)},
                {"cost", cost_to_json(r.token_cost)},
                {"time_ms", r.token_ms},
                {"assigned", r.token_assigned}};
  if (r.optimal_assignment) {
    j["optimal"] = {{"assignment", token_to_json(*r.optimal_assignment)},
                    {"cost", cost_to_json(r.optimal_cost)},
                    {"time_ms", r.optimal_ms},
                    {"assigned", r.optimal_assigned}};
  }
  j["complete"] = r.complete();
  json robots = json::array();
  for (const RobotReport& rr : r.robots) {
    json rj;
    rj["id"] = rr.robot_id;
    rj["zeta"] = json(rr.zeta);
    json gamma = json::array();
    for (const auto& [mask, cost] : rr.gamma.entries()) {
      json tasks = json::array();
      for (int b = 0; b < 64; ++b)
        if (mask & (synthesis::TaskSet(1) << b)) tasks.push_back(b + 1);
      gamma.push_back({{"tasks", std::move(tasks)}, {"cost", cost_to_json(cost)}});
    }
    rj["gamma"] = std::move(gamma);
    json assigned = json::array();
    for (int b = 0; b < 64; ++b)
      if (rr.assigned & (synthesis::TaskSet(1) << b)) assigned.push_back(b + 1);
    rj["assigned"] = std::move(assigned);
    rj["behavior"] = {{"cost", cost_to_json(rr.behavior.cost)},
                      {"prefix", rr.prefix_states},
                      {"suffix", rr.suffix_states}};
    robots.push_back(std::move(rj));
  }
  j["robots"] = std::move(robots);
  return j;
}

}  // namespace taskforge::harness
