#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "taskforge/ltl.hpp"
#include "taskforge/synthesis.hpp"

namespace testutil {

using taskforge::ltl::Formula;
using taskforge::ltl::LassoWord;
using taskforge::ltl::Letter;

class Rand {
 public:
  explicit Rand(std::uint64_t seed) : engine_(seed) {}

  int below(int n) { return static_cast<int>(engine_() % std::uint64_t(n)); }
  bool coin() { return below(2) == 1; }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

/// Random formula over the first `num_props` of {p, q, r, s}, all operators.
inline Formula random_formula(Rand& rng, int depth, int num_props = 3) {
  namespace l = taskforge::ltl;
  static const std::vector<std::string> names{"p", "q", "r", "s"};
  if (depth == 0 || rng.below(4) == 0) {
    const int pick = rng.below(num_props + 2);
    if (pick == num_props) return l::tt();
    if (pick == num_props + 1) return l::ff();
    return l::prop(names[pick]);
  }
  switch (rng.below(10)) {
    case 0:
      return l::lnot(random_formula(rng, depth - 1, num_props));
    case 1:
      return l::land(random_formula(rng, depth - 1, num_props),
                     random_formula(rng, depth - 1, num_props));
    case 2:
      return l::lor(random_formula(rng, depth - 1, num_props),
                    random_formula(rng, depth - 1, num_props));
    case 3:
      return l::implies(random_formula(rng, depth - 1, num_props),
                        random_formula(rng, depth - 1, num_props));
    case 4:
      return l::iff(random_formula(rng, depth - 1, num_props),
                    random_formula(rng, depth - 1, num_props));
    case 5:
      return l::next(random_formula(rng, depth - 1, num_props));
    case 6:
      return l::until(random_formula(rng, depth - 1, num_props),
                      random_formula(rng, depth - 1, num_props));
    case 7:
      return l::release(random_formula(rng, depth - 1, num_props),
                        random_formula(rng, depth - 1, num_props));
    case 8:
      return l::eventually(random_formula(rng, depth - 1, num_props));
    default:
      return l::always(random_formula(rng, depth - 1, num_props));
  }
}

inline Letter random_letter(Rand& rng, const std::vector<std::string>& props) {
  Letter l;
  for (const std::string& p : props)
    if (rng.coin()) l.props.insert(p);
  return l;
}

inline LassoWord random_word(Rand& rng, const std::vector<std::string>& props,
                             int max_prefix = 4, int max_loop = 3) {
  LassoWord w;
  const int prefix_len = rng.below(max_prefix + 1);
  const int loop_len = 1 + rng.below(max_loop);
  for (int i = 0; i < prefix_len; ++i)
    w.prefix.push_back(random_letter(rng, props));
  for (int i = 0; i < loop_len; ++i)
    w.loop.push_back(random_letter(rng, props));
  return w;
}

/// Independent oracle for the accepting-lasso search: Bellman-Ford style
/// walk relaxation, bounded by |Q| edges, over the same product graph. Only
/// the optimal prefix cost is reported (infinity when no accepting state
/// with a cycle is reachable).
inline double lasso_cost_oracle(const taskforge::synthesis::ProductGraph& g) {
  using taskforge::synthesis::kInfiniteCost;
  const int n = static_cast<int>(g.states.size());
  if (n == 0) return kInfiniteCost;

  auto bounded_walk_costs = [&](int source) {
    std::vector<double> dist(n, kInfiniteCost);
    dist[source] = 0;
    for (int round = 0; round < n; ++round) {
      bool changed = false;
      for (int v = 0; v < n; ++v) {
        if (dist[v] == kInfiniteCost) continue;
        for (const auto& e : g.out[v]) {
          if (dist[v] + e.weight < dist[e.dst]) {
            dist[e.dst] = dist[v] + e.weight;
            changed = true;
          }
        }
      }
      if (!changed) break;
    }
    return dist;
  };

  const std::vector<double> from_init = bounded_walk_costs(0);
  double best = kInfiniteCost;
  for (int f = 0; f < n; ++f) {
    if (!g.accepting[f] || from_init[f] == kInfiniteCost) continue;
    // Nonempty cycle at f: min over in-edges of f of dist_f(v) + w(v, f).
    const std::vector<double> from_f = bounded_walk_costs(f);
    double cycle = kInfiniteCost;
    for (int v = 0; v < n; ++v) {
      if (from_f[v] == kInfiniteCost) continue;
      for (const auto& e : g.out[v])
        if (e.dst == f) cycle = std::min(cycle, from_f[v] + e.weight);
    }
    if (cycle < kInfiniteCost) best = std::min(best, from_init[f]);
  }
  return best;
}

/// Random product graph with integer weights for oracle comparisons.
inline taskforge::synthesis::ProductGraph random_product_graph(Rand& rng,
                                                               int max_states) {
  taskforge::synthesis::ProductGraph g;
  const int n = 2 + rng.below(max_states - 1);
  g.states.resize(n);
  g.out.resize(n);
  g.labels.resize(n);
  g.accepting.resize(n);
  for (int v = 0; v < n; ++v) {
    g.states[v] = {v, 0};
    g.accepting[v] = rng.below(4) == 0;
    const int degree = rng.below(4);  // dead ends allowed
    for (int k = 0; k < degree; ++k)
      g.out[v].push_back({rng.below(n), static_cast<double>(rng.below(10))});
  }
  return g;
}

}  // namespace testutil
