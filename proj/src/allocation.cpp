#include "taskforge/allocation.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>

namespace taskforge::allocation {

namespace {

constexpr double kInf = synthesis::kInfiniteCost;

// Subsets of `universe` in ascending bitmask order.
std::vector<TaskSet> subsets_of(TaskSet universe) {
  std::vector<TaskSet> out;
  TaskSet sub = 0;
  while (true) {
    out.push_back(sub);
    if (sub == universe) break;
    sub = (sub - universe) & universe;  // next submask in ascending order
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TaskSet AssignmentToken::tasks_of(int robot) const {
  TaskSet mask = 0;
  for (std::size_t j = 0; j < entries_.size(); ++j)
    if (entries_[j] == robot) mask |= TaskSet(1) << j;
  return mask;
}

std::size_t AssignmentToken::assigned_count() const {
  return entries_.size() -
         static_cast<std::size_t>(std::count(entries_.begin(), entries_.end(), 0));
}

double total_cost(const AssignmentToken& alpha,
                  const std::vector<CostTable>& tables) {
  double total = 0;
  for (std::size_t r = 0; r < tables.size(); ++r) {
    const double c = tables[r].at(alpha.tasks_of(static_cast<int>(r) + 1));
    if (c == kInf) return kInf;
    total += c;
  }
  return total;
}

std::pair<TaskSet, TaskSet> update_assignment(
    TaskSet assigned_i, TaskSet assigned_k, TaskSet satis_i, TaskSet conflicts,
    const CostTable& gamma_i, const CostTable& gamma_k,
    std::size_t* candidates_evaluated) {
  if (assigned_i & assigned_k)
    throw std::invalid_argument("update_assignment: assignments overlap");
  if (conflicts != (satis_i & assigned_k))
    throw std::invalid_argument(
        "update_assignment: conflicts != satis_i & assigned_k");

  TaskSet satis_k = 0;
  for (int j = 0; j < 64; ++j) {
    const TaskSet bit = TaskSet(1) << j;
    if (bit > (assigned_i | assigned_k)) break;
    if ((assigned_i & bit) && gamma_k.at(bit) < kInf) satis_k |= bit;
  }

  const TaskSet all = assigned_i | assigned_k;
  const TaskSet allowed_i = assigned_i | conflicts;
  const TaskSet allowed_k = assigned_k | (assigned_i & satis_k);

  struct Candidate {
    double cost;
    int moved;
    TaskSet take_i;
  };
  std::optional<Candidate> best;
  std::size_t evaluated = 0;
  for (TaskSet take_i : subsets_of(allowed_i)) {
    const TaskSet take_k = all & ~take_i;
    if (take_k & ~allowed_k) continue;
    ++evaluated;
    const double cost = gamma_i.at(take_i) + gamma_k.at(take_k);
    if (cost == kInf) continue;
    const int moved = std::popcount(take_i & assigned_k) +
                      std::popcount(take_k & assigned_i);
    // take_i determines the split, so the tuple below is a total order.
    if (!best || cost < best->cost ||
        (cost == best->cost &&
         (moved < best->moved ||
          (moved == best->moved && take_i < best->take_i)))) {
      best = Candidate{cost, moved, take_i};
    }
  }
  if (candidates_evaluated) *candidates_evaluated = evaluated;
  if (!best) return {assigned_i, assigned_k};  // keep the incoming split
  return {best->take_i, all & ~best->take_i};
}

AssignmentToken token_allocate(
    const std::vector<SatVector>& sat, const std::vector<CostTable>& tables,
    std::size_t num_tasks, TokenStats* stats,
    const std::function<void(const AssignmentToken&)>& observer) {
  if (sat.size() != tables.size())
    throw std::invalid_argument("sat/tables size mismatch");
  const int n = static_cast<int>(sat.size());
  AssignmentToken alpha(num_tasks);
  if (observer) observer(alpha);

  for (int i = 1; i <= n; ++i) {
    const SatVector& zeta = sat[i - 1];
    const CostTable& gamma = tables[i - 1];

    // Self-assignment; only grow the own set while it stays feasible.
    for (std::size_t j = 0; j < num_tasks; ++j) {
      if (!zeta[j] || alpha.owner(j) != 0) continue;
      const TaskSet grown = alpha.tasks_of(i) | (TaskSet(1) << j);
      if (gamma.at(grown) == kInf) continue;
      alpha.assign(j, i);
      if (observer) observer(alpha);
    }

    // Conflict resolution: one comparison per current owner.
    std::vector<char> compared(n + 1, 0);
    TaskSet satis_i = 0;
    for (std::size_t j = 0; j < num_tasks; ++j)
      if (zeta[j]) satis_i |= TaskSet(1) << j;
    for (std::size_t j = 0; j < num_tasks; ++j) {
      if (!zeta[j] || alpha.owner(j) == i) continue;
      const int k = alpha.owner(j);
      if (k == 0 || compared[k]) continue;
      const TaskSet assigned_i = alpha.tasks_of(i);
      const TaskSet assigned_k = alpha.tasks_of(k);
      const TaskSet conflicts = satis_i & assigned_k;
      std::size_t evaluated = 0;
      const auto [take_i, take_k] =
          update_assignment(assigned_i, assigned_k, satis_i, conflicts,
                            tables[i - 1], tables[k - 1], &evaluated);
      if (stats) {
        ++stats->update_calls;
        stats->total_candidates += evaluated;
        stats->max_candidates_per_call =
            std::max(stats->max_candidates_per_call, evaluated);
      }
      if (take_i != assigned_i) {
        for (std::size_t p = 0; p < num_tasks; ++p) {
          const TaskSet bit = TaskSet(1) << p;
          if (take_i & bit)
            alpha.assign(p, i);
          else if (take_k & bit)
            alpha.assign(p, k);
        }
        if (observer) observer(alpha);
      }
      compared[k] = 1;
    }
  }
  return alpha;
}

AssignmentToken optimal_allocate(const std::vector<SatVector>& sat,
                                 const std::vector<CostTable>& tables,
                                 std::size_t num_tasks,
                                 std::size_t* mappings_examined) {
  if (sat.size() != tables.size())
    throw std::invalid_argument("sat/tables size mismatch");
  const int n = static_cast<int>(sat.size());

  // Candidate owners per task: 0 (unassigned) plus each robot that can
  // satisfy the task on its own.
  std::vector<std::vector<int>> candidates(num_tasks);
  for (std::size_t j = 0; j < num_tasks; ++j) {
    candidates[j].push_back(0);
    for (int i = 1; i <= n; ++i)
      if (sat[i - 1][j]) candidates[j].push_back(i);
  }

  AssignmentToken current(num_tasks);
  std::optional<AssignmentToken> best;
  std::size_t best_unassigned = 0;
  double best_cost = kInf;
  std::size_t examined = 0;

  // Lexicographic enumeration over the candidate lists (each list is
  // ascending), so the first optimum found is the lexicographic winner.
  auto consider = [&]() {
    ++examined;
    const double cost = total_cost(current, tables);
    if (cost == kInf) return;
    const std::size_t unassigned = num_tasks - current.assigned_count();
    if (!best || unassigned < best_unassigned ||
        (unassigned == best_unassigned && cost < best_cost)) {
      best = current;
      best_unassigned = unassigned;
      best_cost = cost;
    }
  };

  std::function<void(std::size_t)> recurse = [&](std::size_t j) {
    if (j == num_tasks) {
      consider();
      return;
    }
    for (int owner : candidates[j]) {
      current.assign(j, owner);
      recurse(j + 1);
    }
    current.assign(j, 0);
  };
  recurse(0);

  if (mappings_examined) *mappings_examined = examined;
  return best.value_or(AssignmentToken(num_tasks));
}

}  // namespace taskforge::allocation
