#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "taskforge/buchi.hpp"
#include "taskforge/ltl.hpp"
#include "taskforge/models.hpp"

namespace taskforge::synthesis {

inline constexpr double kInfiniteCost = std::numeric_limits<double>::infinity();

/// Product of a robot model and a Buchi automaton. A transition
/// (s,z) -> (s',z') exists iff (s,s') is a robot transition and the letter
/// L(s') restricted to the automaton alphabet satisfies a guard on some
/// automaton edge z -> z'. Weights are inherited from the robot model;
/// accepting states are those with an accepting automaton component.
/// Only states reachable from the initial state are materialized.
struct ProductGraph {
  struct Edge {
    int dst;
    double weight;
  };

  struct StateInfo {
    int robot_state;
    int buchi_state;
  };

  std::vector<StateInfo> states;  // id 0 is the initial state
  std::vector<std::vector<Edge>> out;
  std::vector<char> accepting;
  std::vector<ltl::Letter> labels;  // L(s) restricted to the alphabet
};

ProductGraph build_product(const models::RobotModel& robot,
                           const buchi::BuchiAutomaton& automaton);

/// Accepting lasso: prefix path to an accepting state that lies on a cycle,
/// plus a cycle through that state. Cost counts prefix edges only.
struct Behavior {
  std::vector<int> prefix;          // q0 .. ql (state ids); empty if none
  std::vector<int> suffix;          // ql .. ql cycle, length >= 2
  std::vector<ltl::Letter> prefix_labels;
  std::vector<ltl::Letter> suffix_labels;
  double cost = kInfiniteCost;

  bool empty() const { return prefix.empty(); }

  /// The word the product certifies: labels from the second state on
  /// (product edges consume the target state's label).
  ltl::LassoWord word() const;
};

/// Minimum prefix cost over accepting states on a cycle; ties prefer the
/// cheaper suffix cycle, then the smaller state id. Returns an empty
/// behavior with infinite cost when no accepting lasso exists.
Behavior shortest_accepting_lasso(const ProductGraph& g);

/// One round of the per-robot synthesis pipeline: translate the new task,
/// restrict the current-task automaton to the reachable part from z_i,
/// intersect, build the product from the robot's current state, and search
/// for the cheapest accepting lasso.
Behavior synthesize_behavior(const models::RobotModel& robot, int z_i,
                             const buchi::BuchiAutomaton& b_curr,
                             const ltl::Formula& phi_k);

/// Memoizes translate() results by printed formula; thread safe. Entries
/// are owned by the cache and stable for its lifetime.
class TranslationCache {
 public:
  const buchi::BuchiAutomaton& get(const ltl::Formula& f);

 private:
  std::mutex mutex_;
  std::map<std::string, buchi::BuchiAutomaton> entries_;
};

/// Task subsets as bitmasks: bit j set means the j-th new sub-task (0-based).
using TaskSet = std::uint64_t;

/// bits[j] = 1 iff the robot can satisfy its remaining current task together
/// with new sub-task j.
using SatVector = std::vector<std::uint8_t>;

/// Map from sub-task subsets to behavior cost. Defined for the empty set,
/// every singleton, and every combination of satisfiable sub-tasks; absent
/// subsets cost infinity.
class CostTable {
 public:
  double at(TaskSet tasks) const;
  void set(TaskSet tasks, double cost) { entries_[tasks] = cost; }
  bool contains(TaskSet tasks) const { return entries_.count(tasks) != 0; }
  const std::map<TaskSet, double>& entries() const { return entries_; }

 private:
  std::map<TaskSet, double> entries_;
};

struct SatCost {
  SatVector zeta;
  CostTable gamma;
};

/// Runs synthesize_behavior for the empty set, each sub-task, and every
/// combination of satisfiable sub-tasks (conjunction in ascending index
/// order). Pass a cache to share translations across robots.
SatCost compute_sat_cost(const models::RobotModel& robot, int z_i,
                         const buchi::BuchiAutomaton& b_curr,
                         const std::vector<ltl::Formula>& new_tasks,
                         TranslationCache* cache = nullptr);

}  // namespace taskforge::synthesis
