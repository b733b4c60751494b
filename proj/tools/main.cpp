#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "taskforge/bench.hpp"
#include "taskforge/hoa.hpp"
#include "taskforge/ltl.hpp"
#include "taskforge/random_gen.hpp"
#include "taskforge/scenario.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitInternal = 3;

using namespace taskforge;

int cmd_check(const std::string& file) {
  harness::load_scenario(file);
  std::cout << "ok: " << file << " is a valid scenario\n";
  return kExitOk;
}

int cmd_translate(const std::string& formula_text, const std::string& hoa_out) {
  ltl::Formula f;
  try {
    f = ltl::parse_ltl(formula_text);
  } catch (const ltl::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  const std::string text = hoa::export_hoa(buchi::translate(f));
  if (hoa_out.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(hoa_out);
    if (!out) {
      std::cerr << "error: cannot open " << hoa_out << " for writing\n";
      return kExitValidation;
    }
    out << text;
    std::cout << "wrote " << hoa_out << "\n";
  }
  return kExitOk;
}

void print_behavior(const synthesis::Behavior& b,
                    const std::vector<std::string>& prefix_names,
                    const std::vector<std::string>& suffix_names) {
  std::cout << "  cost: " << b.cost << "\n";
  std::cout << "  prefix:";
  for (const std::string& s : prefix_names) std::cout << " " << s;
  std::cout << "\n  suffix:";
  for (const std::string& s : suffix_names) std::cout << " " << s;
  std::cout << "\n";
}

int cmd_plan(const std::string& file, int robot_id, const std::string& task) {
  const harness::Scenario s = harness::load_scenario(file);
  std::size_t index = s.robots.size();
  for (std::size_t i = 0; i < s.robots.size(); ++i)
    if (s.robots[i].id == robot_id) index = i;
  if (index == s.robots.size()) {
    std::cerr << "error: unknown robot id " << robot_id << "\n";
    return kExitValidation;
  }

  ltl::Formula goal;
  if (task == "all") {
    goal = ltl::tt();
    for (std::size_t j = 0; j < s.new_tasks.size(); ++j)
      goal = j == 0 ? s.new_tasks[j] : ltl::land(goal, s.new_tasks[j]);
  } else {
    int task_index = 0;
    try {
      task_index = std::stoi(task);
    } catch (...) {
      std::cerr << "error: --task expects a 1-based index or 'all'\n";
      return kExitValidation;
    }
    if (task_index < 1 ||
        task_index > static_cast<int>(s.new_tasks.size())) {
      std::cerr << "error: task index out of range (have "
                << s.new_tasks.size() << " new tasks)\n";
      return kExitValidation;
    }
    goal = s.new_tasks[task_index - 1];
  }

  harness::PreparedInstance prep = harness::prepare_instance(s);
  const harness::PreparedRobot& robot = prep.robots[index];
  const buchi::BuchiAutomaton& b_curr = prep.cache->get(robot.current_task);
  const buchi::BuchiAutomaton restricted =
      buchi::restrict_reachable(b_curr, robot.z_state);
  const buchi::BuchiAutomaton product =
      buchi::intersect(prep.cache->get(goal), restricted);
  const synthesis::ProductGraph graph =
      synthesis::build_product(robot.planning_model, product);
  const synthesis::Behavior b = synthesis::shortest_accepting_lasso(graph);
  std::cout << "robot " << robot_id << ", goal: " << goal.to_string() << "\n";
  if (b.empty()) {
    std::cout << "  infeasible (no behavior satisfies the remaining current "
                 "task and the goal)\n";
    return kExitInfeasible;
  }
  std::vector<std::string> prefix_names, suffix_names;
  for (int q : b.prefix)
    prefix_names.push_back(
        robot.planning_model.state_name(graph.states[q].robot_state));
  for (int q : b.suffix)
    suffix_names.push_back(
        robot.planning_model.state_name(graph.states[q].robot_state));
  print_behavior(b, prefix_names, suffix_names);
  return kExitOk;
}

int cmd_allocate(const std::string& file, bool skip_optimal,
                 const std::string& json_out) {
  const harness::Scenario s = harness::load_scenario(file);
  harness::PipelineOptions opts;
  opts.run_optimal = !skip_optimal;
  const harness::AllocationReport rep = harness::run_pipeline(s, opts);

  std::cout << "token assignment:  [";
  for (std::size_t j = 0; j < rep.token_assignment.size(); ++j)
    std::cout << (j ? ", " : "") << rep.token_assignment.owner(j);
  std::cout << "]  cost " << rep.token_cost << "  (" << rep.token_ms
            << " ms)\n";
  if (rep.optimal_assignment) {
    std::cout << "optimal assignment: [";
    for (std::size_t j = 0; j < rep.optimal_assignment->size(); ++j)
      std::cout << (j ? ", " : "") << rep.optimal_assignment->owner(j);
    std::cout << "]  cost " << rep.optimal_cost << "  (" << rep.optimal_ms
              << " ms)\n";
  }
  for (const harness::RobotReport& rr : rep.robots) {
    std::cout << "robot " << rr.robot_id << " tasks {";
    bool first = true;
    for (std::size_t j = 0; j < rep.token_assignment.size(); ++j) {
      if (rr.assigned & (synthesis::TaskSet(1) << j)) {
        std::cout << (first ? "" : ", ") << j + 1;
        first = false;
      }
    }
    std::cout << "}\n";
    print_behavior(rr.behavior, rr.prefix_states, rr.suffix_states);
  }
  if (!rep.complete())
    std::cout << "note: " << rep.token_assignment.size() - rep.token_assigned
              << " sub-task(s) unassigned\n";

  if (!json_out.empty()) {
    std::ofstream out(json_out);
    if (!out) {
      std::cerr << "error: cannot open " << json_out << " for writing\n";
      return kExitValidation;
    }
    out << harness::report_to_json(rep).dump(2) << "\n";
    std::cout << "wrote " << json_out << "\n";
  }
  return rep.complete() ? kExitOk : kExitInfeasible;
}

int cmd_bench(const std::string& config_file, const std::string& out_file,
              const std::string& gnuplot_dir) {
  harness::BenchConfig config = harness::load_bench_config(config_file);
  if (const char* env_seed = std::getenv("TASKFORGE_SEED")) {
    config.seed = std::stoull(env_seed);
    std::cout << "seed overridden by TASKFORGE_SEED=" << config.seed << "\n";
  }
  const harness::BenchResult result = harness::run_bench(config, &std::cout);
  std::ofstream out(out_file);
  if (!out) {
    std::cerr << "error: cannot open " << out_file << " for writing\n";
    return kExitValidation;
  }
  harness::write_csv(result, out);
  std::cout << "wrote " << out_file << "\n";
  if (!gnuplot_dir.empty()) {
    harness::write_gnuplot(result, gnuplot_dir);
    std::cout << "wrote aggregate plots to " << gnuplot_dir << "\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"LTL task planning and heterogeneous team allocation"};
  app.require_subcommand(1);

  std::string scenario_file, formula_text, hoa_out, task = "all";
  std::string json_out, config_file, csv_out, gnuplot_dir;
  int robot_id = 1;
  bool skip_optimal = false;

  CLI::App* check = app.add_subcommand("check", "validate a scenario file");
  check->add_option("file", scenario_file, "scenario JSON file")->required();

  CLI::App* translate =
      app.add_subcommand("translate", "translate an LTL formula to HOA");
  translate->add_option("formula", formula_text, "LTL formula text")
      ->required();
  translate->add_option("--hoa", hoa_out, "write HOA here instead of stdout");

  CLI::App* plan = app.add_subcommand(
      "plan", "synthesize one robot's behavior for a new sub-task");
  plan->add_option("file", scenario_file, "scenario JSON file")->required();
  plan->add_option("--robot", robot_id, "robot id")->required();
  plan->add_option("--task", task, "1-based sub-task index, or 'all'");

  CLI::App* allocate = app.add_subcommand(
      "allocate", "run the full pipeline and allocate the new tasks");
  allocate->add_option("file", scenario_file, "scenario JSON file")->required();
  allocate->add_flag("--skip-optimal", skip_optimal,
                     "skip the exhaustive baseline");
  allocate->add_option("--json", json_out, "write the full report as JSON");

  CLI::App* bench = app.add_subcommand(
      "bench", "run the token-vs-optimal benchmark sweep");
  bench->add_option("--config", config_file, "benchmark config JSON")
      ->required();
  bench->add_option("--out", csv_out, "output CSV path")->required();
  bench->add_option("--gnuplot", gnuplot_dir,
                    "also write plot-ready aggregates to this directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (check->parsed()) return cmd_check(scenario_file);
    if (translate->parsed()) return cmd_translate(formula_text, hoa_out);
    if (plan->parsed()) return cmd_plan(scenario_file, robot_id, task);
    if (allocate->parsed())
      return cmd_allocate(scenario_file, skip_optimal, json_out);
    if (bench->parsed()) return cmd_bench(config_file, csv_out, gnuplot_dir);
  } catch (const harness::ScenarioError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const ltl::ParseError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::invalid_argument& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitInternal;
}
