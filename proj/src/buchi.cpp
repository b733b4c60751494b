#include "taskforge/buchi.hpp"

#include <algorithm>
#include <cassert>
#include <deque>
#include <map>
#include <stdexcept>

#include "internal/scc.hpp"

namespace taskforge::buchi {

namespace {

std::vector<std::string> merge_sorted(const std::vector<std::string>& a,
                                      const std::vector<std::string>& b) {
  std::vector<std::string> out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(),
                 std::back_inserter(out));
  return out;
}

bool sorted_intersects(const std::vector<std::string>& a,
                       const std::vector<std::string>& b) {
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i == *j) return true;
    if (*i < *j)
      ++i;
    else
      ++j;
  }
  return false;
}

}  // namespace

Guard::Guard(std::vector<Cube> cubes) : cubes_(std::move(cubes)) {
  std::erase_if(cubes_,
                [](const Cube& c) { return sorted_intersects(c.pos, c.neg); });
  std::sort(cubes_.begin(), cubes_.end());
  cubes_.erase(std::unique(cubes_.begin(), cubes_.end()), cubes_.end());
}

Guard Guard::tt() { return Guard(std::vector<Cube>{Cube{}}); }

Guard Guard::ff() { return Guard(); }

Guard Guard::literal(const std::string& prop, bool positive) {
  Cube c;
  (positive ? c.pos : c.neg).push_back(prop);
  return Guard(std::vector<Cube>{std::move(c)});
}

Guard Guard::from_cube(Cube cube) {
  std::sort(cube.pos.begin(), cube.pos.end());
  cube.pos.erase(std::unique(cube.pos.begin(), cube.pos.end()),
                 cube.pos.end());
  std::sort(cube.neg.begin(), cube.neg.end());
  cube.neg.erase(std::unique(cube.neg.begin(), cube.neg.end()),
                 cube.neg.end());
  return Guard(std::vector<Cube>{std::move(cube)});
}

bool Guard::is_true() const {
  return cubes_.size() == 1 && cubes_[0].pos.empty() && cubes_[0].neg.empty();
}

Guard Guard::conj(const Guard& other) const {
  std::vector<Cube> out;
  out.reserve(cubes_.size() * other.cubes_.size());
  for (const Cube& a : cubes_) {
    for (const Cube& b : other.cubes_) {
      Cube m;
      m.pos = merge_sorted(a.pos, b.pos);
      m.neg = merge_sorted(a.neg, b.neg);
      out.push_back(std::move(m));
    }
  }
  return Guard(std::move(out));
}

Guard Guard::disj(const Guard& other) const {
  std::vector<Cube> out = cubes_;
  out.insert(out.end(), other.cubes_.begin(), other.cubes_.end());
  return Guard(std::move(out));
}

bool Guard::sat_by(const ltl::Letter& letter) const {
  for (const Cube& c : cubes_) {
    bool ok = true;
    for (const std::string& p : c.pos) {
      if (!letter.has(p)) {
        ok = false;
        break;
      }
    }
    if (!ok) continue;
    for (const std::string& p : c.neg) {
      if (letter.has(p)) {
        ok = false;
        break;
      }
    }
    if (ok) return true;
  }
  return false;
}

std::vector<std::string> Guard::props() const {
  std::vector<std::string> out;
  for (const Cube& c : cubes_) {
    out.insert(out.end(), c.pos.begin(), c.pos.end());
    out.insert(out.end(), c.neg.begin(), c.neg.end());
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

BuchiAutomaton::BuchiAutomaton(std::vector<std::string> alphabet_props,
                               int num_states, int initial,
                               std::vector<Transition> transitions,
                               std::vector<int> accepting)
    : alphabet_(std::move(alphabet_props)),
      num_states_(num_states),
      initial_(initial),
      transitions_(std::move(transitions)),
      accepting_(std::move(accepting)) {
  std::sort(alphabet_.begin(), alphabet_.end());
  alphabet_.erase(std::unique(alphabet_.begin(), alphabet_.end()),
                  alphabet_.end());
  if (num_states_ <= 0) throw std::invalid_argument("automaton has no states");
  if (initial_ < 0 || initial_ >= num_states_)
    throw std::invalid_argument("initial state out of range");

  // Edges with an unsatisfiable guard can never be taken.
  std::erase_if(transitions_,
                [](const Transition& t) { return t.guard.is_false(); });
  for (const Transition& t : transitions_) {
    if (t.src < 0 || t.src >= num_states_ || t.dst < 0 || t.dst >= num_states_)
      throw std::invalid_argument("transition endpoint out of range");
    for (const std::string& p : t.guard.props()) {
      if (!std::binary_search(alphabet_.begin(), alphabet_.end(), p))
        throw std::invalid_argument("guard proposition '" + p +
                                    "' not in alphabet");
    }
  }
  std::sort(transitions_.begin(), transitions_.end(),
            [](const Transition& a, const Transition& b) {
              return std::tie(a.src, a.dst, a.guard) <
                     std::tie(b.src, b.dst, b.guard);
            });
  transitions_.erase(std::unique(transitions_.begin(), transitions_.end()),
                     transitions_.end());

  std::sort(accepting_.begin(), accepting_.end());
  accepting_.erase(std::unique(accepting_.begin(), accepting_.end()),
                   accepting_.end());
  accepting_mask_.assign(num_states_, 0);
  for (int s : accepting_) {
    if (s < 0 || s >= num_states_)
      throw std::invalid_argument("accepting state out of range");
    accepting_mask_[s] = 1;
  }

  out_.assign(num_states_, {});
  for (const Transition& t : transitions_)
    out_[t.src].emplace_back(t.guard, t.dst);
}

const std::vector<std::pair<Guard, int>>& BuchiAutomaton::out(
    int state) const {
  return out_.at(state);
}

bool BuchiAutomaton::is_accepting(int state) const {
  return accepting_mask_.at(state) != 0;
}

// ---------------------------------------------------------------------------
// Translation: tableau expansion of the NNF formula into a generalized
// automaton (one acceptance set per Until subformula), then a round-robin
// counter. Guards label incoming edges with the node's literals.

namespace {

using ltl::Formula;
using ltl::FormulaSet;
using ltl::Op;

int fset_cmp(const FormulaSet& a, const FormulaSet& b) {
  auto i = a.begin();
  auto j = b.begin();
  for (; i != a.end() && j != b.end(); ++i, ++j) {
    int c = Formula::compare(*i, *j);
    if (c != 0) return c;
  }
  if (i != a.end()) return 1;
  if (j != b.end()) return -1;
  return 0;
}

struct TableauKey {
  FormulaSet olds, nexts;
};

struct TableauKeyLess {
  bool operator()(const TableauKey& a, const TableauKey& b) const {
    int c = fset_cmp(a.olds, b.olds);
    if (c != 0) return c < 0;
    return fset_cmp(a.nexts, b.nexts) < 0;
  }
};

struct PendingNode {
  std::set<int> incoming;
  FormulaSet news, olds, nexts;
};

Formula negate_literal(const Formula& f) {
  return f.op() == Op::Not ? f.left() : ltl::lnot(f);
}

struct Tableau {
  // Finalized nodes in creation order; ids start at 1, 0 is the root.
  std::map<TableauKey, int, TableauKeyLess> index;
  std::vector<TableauKey> keys;          // per node id - 1
  std::vector<std::set<int>> incoming;   // per node id - 1

  void expand(PendingNode node) {
    std::vector<PendingNode> work;
    work.push_back(std::move(node));
    while (!work.empty()) {
      PendingNode cur = std::move(work.back());
      work.pop_back();
      if (cur.news.empty()) {
        TableauKey key{std::move(cur.olds), std::move(cur.nexts)};
        auto it = index.find(key);
        if (it != index.end()) {
          incoming[it->second - 1].insert(cur.incoming.begin(),
                                          cur.incoming.end());
          continue;
        }
        const int id = static_cast<int>(keys.size()) + 1;
        index.emplace(key, id);
        keys.push_back(key);
        incoming.push_back(std::move(cur.incoming));
        PendingNode next;
        next.incoming = {id};
        next.news = key.nexts;
        work.push_back(std::move(next));
        continue;
      }
      Formula f = *cur.news.begin();
      cur.news.erase(cur.news.begin());
      switch (f.op()) {
        case Op::True:
          work.push_back(std::move(cur));
          break;
        case Op::False:
          break;  // contradiction, drop the node
        case Op::Prop:
        case Op::Not:
          if (cur.olds.count(negate_literal(f))) break;
          cur.olds.insert(f);
          work.push_back(std::move(cur));
          break;
        case Op::And:
          cur.news.insert(f.left());
          cur.news.insert(f.right());
          cur.olds.insert(f);
          work.push_back(std::move(cur));
          break;
        case Op::Or: {
          cur.olds.insert(f);
          PendingNode other = cur;
          cur.news.insert(f.left());
          other.news.insert(f.right());
          work.push_back(std::move(other));
          work.push_back(std::move(cur));
          break;
        }
        case Op::Next:
          cur.olds.insert(f);
          cur.nexts.insert(f.left());
          work.push_back(std::move(cur));
          break;
        case Op::Until: {
          cur.olds.insert(f);
          PendingNode other = cur;
          cur.news.insert(f.left());
          cur.nexts.insert(f);
          other.news.insert(f.right());
          work.push_back(std::move(other));
          work.push_back(std::move(cur));
          break;
        }
        case Op::Release: {
          cur.olds.insert(f);
          PendingNode other = cur;
          cur.news.insert(f.right());
          cur.nexts.insert(f);
          other.news.insert(f.left());
          other.news.insert(f.right());
          work.push_back(std::move(other));
          work.push_back(std::move(cur));
          break;
        }
        default:
          // NNF leaves no Implies/Iff/Eventually/Always.
          assert(false && "non-NNF operator in tableau");
          break;
      }
    }
  }
};

void collect_untils(const Formula& f, std::vector<Formula>& out,
                    FormulaSet& seen) {
  switch (ltl::arity(f.op())) {
    case 0:
      return;
    case 1:
      collect_untils(f.left(), out, seen);
      return;
    default:
      collect_untils(f.left(), out, seen);
      collect_untils(f.right(), out, seen);
      if (f.op() == Op::Until && seen.insert(f).second) out.push_back(f);
  }
}

Guard guard_of(const FormulaSet& olds) {
  Guard::Cube cube;
  for (const Formula& f : olds) {
    if (f.op() == Op::Prop)
      cube.pos.push_back(f.name());
    else if (f.op() == Op::Not)
      cube.neg.push_back(f.left().name());
  }
  return Guard::from_cube(std::move(cube));
}

struct RawAutomaton {
  int num_states = 0;
  int initial = 0;
  std::vector<Transition> transitions;
  std::vector<int> accepting;
};

RawAutomaton prune_reachable(const RawAutomaton& a) {
  std::vector<std::vector<std::pair<Guard, int>>> out(a.num_states);
  for (const Transition& t : a.transitions)
    out[t.src].emplace_back(t.guard, t.dst);
  for (auto& lst : out)
    std::sort(lst.begin(), lst.end(), [](const auto& x, const auto& y) {
      return std::tie(x.second, x.first) < std::tie(y.second, y.first);
    });

  std::vector<int> renum(a.num_states, -1);
  std::deque<int> queue{a.initial};
  renum[a.initial] = 0;
  int next_id = 1;
  std::vector<int> order{a.initial};
  while (!queue.empty()) {
    int v = queue.front();
    queue.pop_front();
    for (const auto& [g, u] : out[v]) {
      if (renum[u] == -1) {
        renum[u] = next_id++;
        order.push_back(u);
        queue.push_back(u);
      }
    }
  }

  RawAutomaton r;
  r.num_states = next_id;
  r.initial = 0;
  for (const Transition& t : a.transitions)
    if (renum[t.src] != -1 && renum[t.dst] != -1)
      r.transitions.push_back({renum[t.src], t.guard, renum[t.dst]});
  for (int s : a.accepting)
    if (renum[s] != -1) r.accepting.push_back(renum[s]);
  return r;
}

// If some other state has exactly the initial state's outgoing edges, the
// two are interchangeable as a start (the initial state has no incoming
// edges), so start there instead and let pruning drop the duplicate.
RawAutomaton merge_equivalent_initial(RawAutomaton a) {
  std::vector<std::vector<std::pair<int, Guard>>> out(a.num_states);
  for (const Transition& t : a.transitions)
    out[t.src].emplace_back(t.dst, t.guard);
  for (auto& lst : out) std::sort(lst.begin(), lst.end());
  bool initial_has_in_edges = false;
  for (const Transition& t : a.transitions)
    if (t.dst == a.initial) initial_has_in_edges = true;
  if (initial_has_in_edges) return a;
  const bool init_acc = std::binary_search(a.accepting.begin(),
                                           a.accepting.end(), a.initial);
  for (int z = 0; z < a.num_states; ++z) {
    if (z == a.initial || out[z] != out[a.initial]) continue;
    // A non-accepting initial state may merge into an accepting twin (the
    // first visit does not matter for Buchi acceptance), but not the other
    // way around unless the twin is accepting too.
    if (init_acc &&
        !std::binary_search(a.accepting.begin(), a.accepting.end(), z))
      continue;
    a.initial = z;
    return prune_reachable(a);
  }
  return a;
}

}  // namespace

BuchiAutomaton translate(const ltl::Formula& f) {
  const Formula nnf = ltl::to_nnf(f);
  const std::set<std::string> props = ltl::atomic_props(f);

  Tableau tableau;
  PendingNode root;
  root.incoming = {0};
  root.news.insert(nnf);
  tableau.expand(std::move(root));

  const int gba_states = static_cast<int>(tableau.keys.size()) + 1;

  std::vector<Formula> untils;
  {
    FormulaSet seen;
    collect_untils(nnf, untils, seen);
  }
  const int k = static_cast<int>(untils.size());

  // acc[u][q]: q promises nothing for until u, or has already delivered it.
  // A constant-true right side is delivered everywhere (it never lands in
  // olds because literal `true` is dropped during expansion).
  std::vector<std::vector<char>> acc(k, std::vector<char>(gba_states, 1));
  for (int u = 0; u < k; ++u) {
    const Formula rhs = untils[u].right();
    for (std::size_t q = 0; q < tableau.keys.size(); ++q) {
      const FormulaSet& olds = tableau.keys[q].olds;
      acc[u][q + 1] = !olds.count(untils[u]) || rhs == ltl::tt() ||
                      olds.count(rhs);
    }
  }

  struct GbaEdge {
    int src;
    Guard guard;
    int dst;
  };
  std::vector<std::vector<GbaEdge>> gba_out(gba_states);
  for (std::size_t q = 0; q < tableau.keys.size(); ++q) {
    const Guard g = guard_of(tableau.keys[q].olds);
    for (int r : tableau.incoming[q])
      gba_out[r].push_back({r, g, static_cast<int>(q) + 1});
  }
  for (auto& lst : gba_out)
    std::sort(lst.begin(), lst.end(), [](const GbaEdge& x, const GbaEdge& y) {
      return std::tie(x.dst, x.guard) < std::tie(y.dst, y.guard);
    });

  RawAutomaton raw;
  if (k == 0) {
    raw.num_states = gba_states;
    raw.initial = 0;
    for (const auto& lst : gba_out)
      for (const GbaEdge& e : lst) raw.transitions.push_back({e.src, e.guard, e.dst});
    for (int q = 0; q < gba_states; ++q) raw.accepting.push_back(q);
  } else {
    // Counter c in {0..k}: advance on entering a state accepting for set c;
    // from c == k reset to 0 unconditionally. Accepting iff c == k.
    std::map<std::pair<int, int>, int> ids;
    std::vector<std::pair<int, int>> order;
    std::deque<std::pair<int, int>> queue;
    auto intern = [&](int q, int c) {
      auto [it, inserted] = ids.emplace(std::make_pair(q, c),
                                        static_cast<int>(order.size()));
      if (inserted) {
        order.emplace_back(q, c);
        queue.emplace_back(q, c);
      }
      return it->second;
    };
    intern(0, 0);
    while (!queue.empty()) {
      auto [q, c] = queue.front();
      queue.pop_front();
      const int src = ids.at({q, c});
      for (const GbaEdge& e : gba_out[q]) {
        const int c2 = c == k ? 0 : (acc[c][e.dst] ? c + 1 : c);
        raw.transitions.push_back({src, e.guard, intern(e.dst, c2)});
      }
    }
    raw.num_states = static_cast<int>(order.size());
    raw.initial = 0;
    for (std::size_t i = 0; i < order.size(); ++i)
      if (order[i].second == k) raw.accepting.push_back(static_cast<int>(i));
  }

  raw = prune_reachable(raw);
  raw = merge_equivalent_initial(std::move(raw));

  return BuchiAutomaton(std::vector<std::string>(props.begin(), props.end()),
                        raw.num_states, raw.initial, std::move(raw.transitions),
                        std::move(raw.accepting));
}

// ---------------------------------------------------------------------------

bool accepts_lasso(const BuchiAutomaton& b, const ltl::LassoWord& w) {
  if (w.loop.empty()) throw std::invalid_argument("lasso loop is empty");
  const int pre = static_cast<int>(w.prefix.size());
  const int n = pre + static_cast<int>(w.loop.size());
  auto letter = [&](int p) -> const ltl::Letter& {
    return p < pre ? w.prefix[p] : w.loop[p - pre];
  };
  auto succ = [&](int p) { return p + 1 < n ? p + 1 : pre; };

  // Pre-evaluate each transition guard against each position's letter.
  const auto& trans = b.transitions();
  std::vector<std::vector<char>> sat(trans.size(), std::vector<char>(n));
  std::vector<std::vector<int>> out_edges(b.num_states());
  for (std::size_t e = 0; e < trans.size(); ++e) {
    out_edges[trans[e].src].push_back(static_cast<int>(e));
    for (int p = 0; p < n; ++p) sat[e][p] = trans[e].guard.sat_by(letter(p));
  }

  const int nodes = b.num_states() * n;
  auto node_id = [&](int z, int p) { return z * n + p; };
  auto scc = internal::tarjan_scc(
      nodes, {node_id(b.initial(), 0)}, [&](int v, auto&& visit) {
        const int z = v / n;
        const int p = v % n;
        for (int e : out_edges[z])
          if (sat[e][p]) visit(node_id(trans[e].dst, succ(p)));
      });

  const std::vector<int> sizes = scc.component_sizes();
  for (int z = 0; z < b.num_states(); ++z) {
    if (!b.is_accepting(z)) continue;
    for (int p = 0; p < n; ++p) {
      const int v = node_id(z, p);
      const int c = scc.comp[v];
      if (c < 0) continue;
      if (sizes[c] > 1) return true;
      if (succ(p) == p) {
        for (int e : out_edges[z])
          if (trans[e].dst == z && sat[e][p]) return true;
      }
    }
  }
  return false;
}

// ---------------------------------------------------------------------------

std::pair<BuchiAutomaton, std::vector<IntersectionState>> intersect_annotated(
    const BuchiAutomaton& b1, const BuchiAutomaton& b2) {
  const std::vector<std::string> alphabet =
      merge_sorted(b1.alphabet_props(), b2.alphabet_props());

  std::map<std::tuple<int, int, int>, int> ids;
  std::vector<IntersectionState> states;
  std::deque<int> queue;
  auto intern = [&](int l, int r, int c) {
    auto [it, inserted] =
        ids.emplace(std::make_tuple(l, r, c), static_cast<int>(states.size()));
    if (inserted) {
      states.push_back({l, r, c});
      queue.push_back(it->second);
    }
    return it->second;
  };

  std::vector<Transition> transitions;
  intern(b1.initial(), b2.initial(), 0);
  while (!queue.empty()) {
    const int src = queue.front();
    queue.pop_front();
    const IntersectionState s = states[src];
    for (const auto& [g1, l2] : b1.out(s.left)) {
      for (const auto& [g2, r2] : b2.out(s.right)) {
        const Guard g = g1.conj(g2);
        if (g.is_false()) continue;
        int c2;
        if (s.counter == 0)
          c2 = b1.is_accepting(l2) ? 1 : 0;
        else if (s.counter == 1)
          c2 = b2.is_accepting(r2) ? 2 : 1;
        else
          c2 = 0;
        transitions.push_back({src, g, intern(l2, r2, c2)});
      }
    }
  }

  std::vector<int> accepting;
  for (std::size_t i = 0; i < states.size(); ++i)
    if (states[i].counter == 2) accepting.push_back(static_cast<int>(i));

  BuchiAutomaton result(alphabet, static_cast<int>(states.size()), 0,
                        std::move(transitions), std::move(accepting));
  return {std::move(result), std::move(states)};
}

BuchiAutomaton intersect(const BuchiAutomaton& b1, const BuchiAutomaton& b2) {
  return intersect_annotated(b1, b2).first;
}

BuchiAutomaton restrict_reachable(const BuchiAutomaton& b, int state) {
  if (state < 0 || state >= b.num_states())
    throw std::out_of_range("restrict_reachable: unknown state id " +
                            std::to_string(state));
  std::vector<int> renum(b.num_states(), -1);
  std::deque<int> queue{state};
  renum[state] = 0;
  int next_id = 1;
  while (!queue.empty()) {
    const int v = queue.front();
    queue.pop_front();
    for (const auto& [g, u] : b.out(v)) {
      if (renum[u] == -1) {
        renum[u] = next_id++;
        queue.push_back(u);
      }
    }
  }
  std::vector<Transition> transitions;
  for (const Transition& t : b.transitions())
    if (renum[t.src] != -1 && renum[t.dst] != -1)
      transitions.push_back({renum[t.src], t.guard, renum[t.dst]});
  std::vector<int> accepting;
  for (int s : b.accepting())
    if (renum[s] != -1) accepting.push_back(renum[s]);
  return BuchiAutomaton(b.alphabet_props(), next_id, 0, std::move(transitions),
                        std::move(accepting));
}

bool has_nonempty_language(const BuchiAutomaton& b) {
  auto scc = internal::tarjan_scc(b.num_states(), {b.initial()},
                                  [&](int v, auto&& visit) {
                                    for (const auto& [g, u] : b.out(v))
                                      visit(u);
                                  });
  const std::vector<int> sizes = scc.component_sizes();
  for (int z : b.accepting()) {
    const int c = scc.comp[z];
    if (c < 0) continue;
    if (sizes[c] > 1) return true;
    for (const auto& [g, u] : b.out(z))
      if (u == z) return true;
  }
  return false;
}

}  // namespace taskforge::buchi
