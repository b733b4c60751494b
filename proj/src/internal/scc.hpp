#pragma once

#include <algorithm>
#include <utility>
#include <vector>

namespace taskforge::internal {

struct SccResult {
  std::vector<int> comp;  // component id per node, -1 if unreached
  int count = 0;

  std::vector<int> component_sizes() const {
    std::vector<int> sizes(count, 0);
    for (int c : comp)
      if (c >= 0) ++sizes[c];
    return sizes;
  }
};

/// Iterative Tarjan over the nodes reachable from `roots`. `out(v, visit)`
/// must call visit(u) for every edge v -> u; it is invoked once per node.
template <class OutFn>
SccResult tarjan_scc(int n, const std::vector<int>& roots, OutFn&& out) {
  SccResult res;
  res.comp.assign(n, -1);
  std::vector<int> low(n, 0), disc(n, -1), stack;
  std::vector<char> on_stack(n, 0);
  std::vector<std::vector<int>> adj(n);
  std::vector<char> expanded(n, 0);
  int time = 0;

  auto expand = [&](int v) {
    if (!expanded[v]) {
      out(v, [&](int u) { adj[v].push_back(u); });
      expanded[v] = 1;
    }
  };

  struct Frame {
    int v;
    std::size_t i;
  };
  std::vector<Frame> frames;

  for (int root : roots) {
    if (disc[root] != -1) continue;
    disc[root] = low[root] = time++;
    stack.push_back(root);
    on_stack[root] = 1;
    expand(root);
    frames.push_back({root, 0});
    while (!frames.empty()) {
      Frame& f = frames.back();
      if (f.i < adj[f.v].size()) {
        const int u = adj[f.v][f.i++];
        if (disc[u] == -1) {
          disc[u] = low[u] = time++;
          stack.push_back(u);
          on_stack[u] = 1;
          expand(u);
          frames.push_back({u, 0});
        } else if (on_stack[u]) {
          low[f.v] = std::min(low[f.v], disc[u]);
        }
      } else {
        const int v = f.v;
        frames.pop_back();
        if (!frames.empty())
          low[frames.back().v] = std::min(low[frames.back().v], low[v]);
        if (low[v] == disc[v]) {
          while (true) {
            const int u = stack.back();
            stack.pop_back();
            on_stack[u] = 0;
            res.comp[u] = res.count;
            if (u == v) break;
          }
          ++res.count;
        }
      }
    }
  }
  return res;
}

}  // namespace taskforge::internal
