#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "taskforge/synthesis.hpp"

namespace taskforge::allocation {

using synthesis::CostTable;
using synthesis::SatVector;
using synthesis::TaskSet;

/// Global assignment vector: entry j is 0 when sub-task j is unassigned,
/// otherwise the 1-based index of the robot that owns it.
class AssignmentToken {
 public:
  AssignmentToken() = default;
  explicit AssignmentToken(std::size_t num_tasks) : entries_(num_tasks, 0) {}

  std::size_t size() const { return entries_.size(); }
  int owner(std::size_t task) const { return entries_.at(task); }
  void assign(std::size_t task, int robot) { entries_.at(task) = robot; }

  /// Tasks owned by the given 1-based robot index, as a bitmask.
  TaskSet tasks_of(int robot) const;
  std::size_t assigned_count() const;
  const std::vector<int>& entries() const { return entries_; }

  friend bool operator==(const AssignmentToken&,
                         const AssignmentToken&) = default;

 private:
  std::vector<int> entries_;
};

/// Sum of per-robot costs for the induced partition, including the
/// empty-set cost of unassigned robots; infinite if any entry is.
double total_cost(const AssignmentToken& alpha,
                  const std::vector<CostTable>& tables);

struct TokenStats {
  std::size_t update_calls = 0;
  std::size_t total_candidates = 0;
  std::size_t max_candidates_per_call = 0;
};

/// Pairwise conflict resolution: repartition the union of two robots'
/// assignments, keeping every task covered and every side finite-cost.
/// Robot i may take only its own tasks plus `conflicts`; robot k may take
/// only its own tasks plus those of i's it can satisfy on its own.
/// Returns the chosen (tasks for i, tasks for k); minimizes the summed
/// table costs, ties broken by fewest moved tasks, then by the
/// lexicographically smallest set for i. Throws std::invalid_argument when
/// the preconditions are violated.
std::pair<TaskSet, TaskSet> update_assignment(
    TaskSet assigned_i, TaskSet assigned_k, TaskSet satis_i, TaskSet conflicts,
    const CostTable& gamma_i, const CostTable& gamma_k,
    std::size_t* candidates_evaluated = nullptr);

/// Single-pass token allocation: robots in ascending index order self-assign
/// the unassigned sub-tasks they can hold at finite cost, then resolve
/// conflicts pairwise with each current owner at most once per round.
/// The observer, when set, is called after every change to the token.
AssignmentToken token_allocate(
    const std::vector<SatVector>& sat, const std::vector<CostTable>& tables,
    std::size_t num_tasks, TokenStats* stats = nullptr,
    const std::function<void(const AssignmentToken&)>& observer = {});

/// Exhaustive baseline: enumerates every task-to-robot mapping consistent
/// with the satisfiability vectors and finite table entries. Assignments
/// with fewer unassigned tasks dominate regardless of cost; ties broken by
/// total cost, then lexicographically on the vector.
AssignmentToken optimal_allocate(const std::vector<SatVector>& sat,
                                 const std::vector<CostTable>& tables,
                                 std::size_t num_tasks,
                                 std::size_t* mappings_examined = nullptr);

}  // namespace taskforge::allocation
