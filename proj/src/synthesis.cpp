#include "taskforge/synthesis.hpp"

#include <algorithm>
#include <bit>
#include <cassert>
#include <deque>
#include <queue>

#include "internal/scc.hpp"

namespace taskforge::synthesis {

namespace {

// Guard cubes compiled to bitmasks over the automaton alphabet.
struct MaskCube {
  std::uint64_t pos = 0;
  std::uint64_t neg = 0;
};

struct MaskGuard {
  std::vector<MaskCube> cubes;

  bool sat(std::uint64_t letter) const {
    for (const MaskCube& c : cubes)
      if ((letter & c.pos) == c.pos && (letter & c.neg) == 0) return true;
    return false;
  }
};

}  // namespace

ProductGraph build_product(const models::RobotModel& robot,
                           const buchi::BuchiAutomaton& automaton) {
  const std::vector<std::string>& alphabet = automaton.alphabet_props();
  if (alphabet.size() > 64)
    throw std::invalid_argument("alphabet too large for product construction");
  std::map<std::string, int> ap_index;
  for (std::size_t i = 0; i < alphabet.size(); ++i)
    ap_index[alphabet[i]] = static_cast<int>(i);

  // Restricted letter per robot state, as mask and as Letter.
  std::vector<std::uint64_t> letter_mask(robot.num_states(), 0);
  std::vector<ltl::Letter> letters(robot.num_states());
  for (int s = 0; s < robot.num_states(); ++s) {
    for (const std::string& p : robot.label(s)) {
      auto it = ap_index.find(p);
      if (it != ap_index.end()) {
        letter_mask[s] |= std::uint64_t(1) << it->second;
        letters[s].props.insert(p);
      }
    }
  }

  std::vector<std::vector<std::pair<MaskGuard, int>>> buchi_out(
      automaton.num_states());
  for (int z = 0; z < automaton.num_states(); ++z) {
    for (const auto& [g, dst] : automaton.out(z)) {
      MaskGuard mg;
      for (const buchi::Guard::Cube& c : g.cubes()) {
        MaskCube mc;
        for (const std::string& p : c.pos)
          mc.pos |= std::uint64_t(1) << ap_index.at(p);
        for (const std::string& p : c.neg)
          mc.neg |= std::uint64_t(1) << ap_index.at(p);
        mg.cubes.push_back(mc);
      }
      buchi_out[z].emplace_back(std::move(mg), dst);
    }
  }

  ProductGraph g;
  std::unordered_map<std::int64_t, int> ids;
  ids.reserve(1024);
  std::deque<int> queue;
  auto intern = [&](int s, int z) {
    const std::int64_t key =
        static_cast<std::int64_t>(s) * automaton.num_states() + z;
    auto [it, inserted] = ids.emplace(key, static_cast<int>(g.states.size()));
    if (inserted) {
      g.states.push_back({s, z});
      g.accepting.push_back(automaton.is_accepting(z));
      g.labels.push_back(letters[s]);
      g.out.emplace_back();
      queue.push_back(it->second);
    }
    return it->second;
  };

  intern(robot.initial(), automaton.initial());
  while (!queue.empty()) {
    const int id = queue.front();
    queue.pop_front();
    const auto [s, z] = g.states[id];
    for (const models::RobotModel::Edge& re : robot.out(s)) {
      const std::uint64_t target_letter = letter_mask[re.dst];
      for (const auto& [mg, z2] : buchi_out[z]) {
        if (!mg.sat(target_letter)) continue;
        const int dst = intern(re.dst, z2);
        g.out[id].push_back({dst, re.weight});
      }
    }
  }
  return g;
}

namespace {

// Deterministic Dijkstra: ties popped by state id, parents set on strict
// improvement only.
struct ShortestPaths {
  std::vector<double> dist;
  std::vector<int> parent;
};

ShortestPaths dijkstra(const ProductGraph& g, int source,
                       const int* within_comp = nullptr,
                       const std::vector<int>* comp = nullptr) {
  const int n = static_cast<int>(g.states.size());
  ShortestPaths sp;
  sp.dist.assign(n, kInfiniteCost);
  sp.parent.assign(n, -1);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  sp.dist[source] = 0;
  pq.emplace(0.0, source);
  std::vector<char> done(n, 0);
  while (!pq.empty()) {
    const auto [d, v] = pq.top();
    pq.pop();
    if (done[v]) continue;
    done[v] = 1;
    for (const ProductGraph::Edge& e : g.out[v]) {
      if (within_comp && (*comp)[e.dst] != *within_comp) continue;
      const double nd = d + e.weight;
      if (nd < sp.dist[e.dst]) {
        sp.dist[e.dst] = nd;
        sp.parent[e.dst] = v;
        pq.emplace(nd, e.dst);
      }
    }
  }
  return sp;
}

std::vector<int> reconstruct_path(const ShortestPaths& sp, int source,
                                  int target) {
  std::vector<int> path;
  for (int v = target; v != -1; v = sp.parent[v]) {
    path.push_back(v);
    if (v == source) break;
  }
  std::reverse(path.begin(), path.end());
  assert(path.front() == source);
  return path;
}

}  // namespace

ltl::LassoWord Behavior::word() const {
  assert(!empty());
  const std::size_t l = prefix.size() - 1;
  const std::size_t r = suffix.size() - 1;  // cycle length
  // Infinite label sequence from position 1; states repeat with period r
  // from position max(l, 1).
  std::vector<ltl::Letter> seq = prefix_labels;
  for (int rep = 0; rep < 2; ++rep)
    seq.insert(seq.end(), suffix_labels.begin() + 1, suffix_labels.end());
  const std::size_t k = std::max<std::size_t>(l, 1);
  ltl::LassoWord w;
  w.prefix.assign(seq.begin() + 1, seq.begin() + k);
  w.loop.assign(seq.begin() + k, seq.begin() + k + r);
  return w;
}

Behavior shortest_accepting_lasso(const ProductGraph& g) {
  Behavior best;
  if (g.states.empty()) return best;
  const int n = static_cast<int>(g.states.size());

  const ShortestPaths from_init = dijkstra(g, 0);

  auto scc = internal::tarjan_scc(n, {0}, [&](int v, auto&& visit) {
    for (const ProductGraph::Edge& e : g.out[v]) visit(e.dst);
  });
  const std::vector<int> comp_sizes = scc.component_sizes();

  auto on_cycle = [&](int v) {
    const int c = scc.comp[v];
    if (c < 0) return false;
    if (comp_sizes[c] > 1) return true;
    for (const ProductGraph::Edge& e : g.out[v])
      if (e.dst == v) return true;
    return false;
  };

  // Minimum prefix cost first; only that group needs suffix-cycle costs.
  double best_dist = kInfiniteCost;
  std::vector<int> candidates;
  for (int v = 0; v < n; ++v) {
    if (!g.accepting[v] || from_init.dist[v] == kInfiniteCost || !on_cycle(v))
      continue;
    if (from_init.dist[v] < best_dist) {
      best_dist = from_init.dist[v];
      candidates.clear();
    }
    if (from_init.dist[v] == best_dist) candidates.push_back(v);
  }
  if (candidates.empty()) return best;

  double best_cycle = kInfiniteCost;
  int best_state = -1;
  int best_cycle_pred = -1;
  ShortestPaths best_from_f;
  for (int f : candidates) {
    const int fc = scc.comp[f];
    ShortestPaths from_f = dijkstra(g, f, &fc, &scc.comp);
    double cycle_cost = kInfiniteCost;
    int cycle_pred = -1;
    for (int v = 0; v < n; ++v) {
      if (scc.comp[v] != fc || from_f.dist[v] == kInfiniteCost) continue;
      for (const ProductGraph::Edge& e : g.out[v]) {
        if (e.dst != f) continue;
        const double c = from_f.dist[v] + e.weight;
        if (c < cycle_cost) {
          cycle_cost = c;
          cycle_pred = v;
        }
      }
    }
    assert(cycle_cost < kInfiniteCost);
    if (cycle_cost < best_cycle ||
        (cycle_cost == best_cycle && f < best_state)) {
      best_cycle = cycle_cost;
      best_state = f;
      best_cycle_pred = cycle_pred;
      best_from_f = std::move(from_f);
    }
  }

  best.prefix = reconstruct_path(from_init, 0, best_state);
  best.suffix = reconstruct_path(best_from_f, best_state, best_cycle_pred);
  best.suffix.push_back(best_state);
  best.cost = best_dist;
  for (int v : best.prefix) best.prefix_labels.push_back(g.labels[v]);
  for (int v : best.suffix) best.suffix_labels.push_back(g.labels[v]);
  return best;
}

namespace {

Behavior synthesize_with(const models::RobotModel& robot,
                         const buchi::BuchiAutomaton& restricted_curr,
                         const buchi::BuchiAutomaton& task_automaton) {
  const buchi::BuchiAutomaton product =
      buchi::intersect(task_automaton, restricted_curr);
  return shortest_accepting_lasso(build_product(robot, product));
}

}  // namespace

Behavior synthesize_behavior(const models::RobotModel& robot, int z_i,
                             const buchi::BuchiAutomaton& b_curr,
                             const ltl::Formula& phi_k) {
  const buchi::BuchiAutomaton b_k = buchi::translate(phi_k);
  const buchi::BuchiAutomaton restricted =
      buchi::restrict_reachable(b_curr, z_i);
  return synthesize_with(robot, restricted, b_k);
}

const buchi::BuchiAutomaton& TranslationCache::get(const ltl::Formula& f) {
  const std::string key = f.to_string();
  std::lock_guard<std::mutex> lock(mutex_);
  auto it = entries_.find(key);
  if (it == entries_.end())
    it = entries_.emplace(key, buchi::translate(f)).first;
  return it->second;
}

double CostTable::at(TaskSet tasks) const {
  auto it = entries_.find(tasks);
  return it == entries_.end() ? kInfiniteCost : it->second;
}

SatCost compute_sat_cost(const models::RobotModel& robot, int z_i,
                         const buchi::BuchiAutomaton& b_curr,
                         const std::vector<ltl::Formula>& new_tasks,
                         TranslationCache* cache) {
  const std::size_t m = new_tasks.size();
  if (m > 63) throw std::invalid_argument("too many sub-tasks");

  TranslationCache local_cache;
  TranslationCache& tc = cache ? *cache : local_cache;
  const buchi::BuchiAutomaton restricted =
      buchi::restrict_reachable(b_curr, z_i);

  SatCost result;
  result.zeta.assign(m, 0);
  result.gamma.set(0, synthesize_with(robot, restricted,
                                      tc.get(ltl::tt())).cost);

  for (std::size_t j = 0; j < m; ++j) {
    const Behavior b = synthesize_with(robot, restricted,
                                       tc.get(new_tasks[j]));
    result.gamma.set(TaskSet(1) << j, b.cost);
    if (!b.empty()) result.zeta[j] = 1;
  }

  TaskSet y_mask = 0;
  for (std::size_t j = 0; j < m; ++j)
    if (result.zeta[j]) y_mask |= TaskSet(1) << j;

  std::vector<TaskSet> combos;
  for (TaskSet sub = y_mask; sub != 0; sub = (sub - 1) & y_mask)
    if (std::popcount(sub) > 1) combos.push_back(sub);
  std::sort(combos.begin(), combos.end());

  for (TaskSet combo : combos) {
    ltl::Formula conj;
    bool first = true;
    for (std::size_t j = 0; j < m; ++j) {
      if (!(combo & (TaskSet(1) << j))) continue;
      conj = first ? new_tasks[j] : ltl::land(conj, new_tasks[j]);
      first = false;
    }
    result.gamma.set(combo, synthesize_with(robot, restricted,
                                            tc.get(conj)).cost);
  }
  return result;
}

}  // namespace taskforge::synthesis
