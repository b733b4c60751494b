#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "taskforge/ltl.hpp"

namespace taskforge::buchi {

/// Propositional edge label in disjunctive normal form. The empty
/// disjunction is false; the single empty cube is true. Cubes with a
/// contradictory literal are dropped on construction, so every stored cube
/// is satisfiable.
class Guard {
 public:
  struct Cube {
    std::vector<std::string> pos;  // sorted
    std::vector<std::string> neg;  // sorted

    auto operator<=>(const Cube&) const = default;
  };

  Guard() = default;  // false

  static Guard tt();
  static Guard ff();
  static Guard literal(const std::string& prop, bool positive);
  static Guard from_cube(Cube cube);

  Guard conj(const Guard& other) const;
  Guard disj(const Guard& other) const;

  bool is_false() const { return cubes_.empty(); }
  bool is_true() const;

  /// Closed-world evaluation: propositions absent from the letter are false.
  bool sat_by(const ltl::Letter& letter) const;

  std::vector<std::string> props() const;
  const std::vector<Cube>& cubes() const { return cubes_; }

  friend bool operator==(const Guard&, const Guard&) = default;
  auto operator<=>(const Guard&) const = default;

 private:
  explicit Guard(std::vector<Cube> cubes);

  std::vector<Cube> cubes_;
};

struct Transition {
  int src;
  Guard guard;
  int dst;

  friend bool operator==(const Transition&, const Transition&) = default;
};

/// Nondeterministic Buchi automaton with guard-labeled transitions over
/// the alphabet 2^alphabet_props. Immutable after construction.
class BuchiAutomaton {
 public:
  BuchiAutomaton(std::vector<std::string> alphabet_props, int num_states,
                 int initial, std::vector<Transition> transitions,
                 std::vector<int> accepting);

  const std::vector<std::string>& alphabet_props() const { return alphabet_; }
  int num_states() const { return num_states_; }
  int initial() const { return initial_; }
  const std::vector<Transition>& transitions() const { return transitions_; }
  const std::vector<int>& accepting() const { return accepting_; }

  const std::vector<std::pair<Guard, int>>& out(int state) const;
  bool is_accepting(int state) const;

 private:
  std::vector<std::string> alphabet_;
  int num_states_;
  int initial_;
  std::vector<Transition> transitions_;
  std::vector<int> accepting_;
  std::vector<char> accepting_mask_;
  std::vector<std::vector<std::pair<Guard, int>>> out_;
};

/// Tableau translation; L(result) = { w : w satisfies f }. NNF first, then
/// expansion to a generalized automaton with one acceptance set per Until
/// subformula, then a round-robin counter. States unreachable from the
/// initial state are pruned.
BuchiAutomaton translate(const ltl::Formula& f);

/// Whether some run over prefix.loop^omega visits an accepting state
/// infinitely often, by cycle search on the (state, position) unrolling.
bool accepts_lasso(const BuchiAutomaton& b, const ltl::LassoWord& w);

/// Component states with the {0,1,2} counter that forces acceptance from
/// both operands to recur together.
struct IntersectionState {
  int left;
  int right;
  int counter;

  friend bool operator==(const IntersectionState&,
                         const IntersectionState&) = default;
};

/// Product over the union alphabet; each product edge carries the
/// conjunction of the component guards (the cross-alphabet projection).
BuchiAutomaton intersect(const BuchiAutomaton& b1, const BuchiAutomaton& b2);

/// intersect plus the per-state component annotation, for inspection.
std::pair<BuchiAutomaton, std::vector<IntersectionState>> intersect_annotated(
    const BuchiAutomaton& b1, const BuchiAutomaton& b2);

/// Forward-reachable sub-automaton rooted at the given state.
/// Throws std::out_of_range for an unknown state id.
BuchiAutomaton restrict_reachable(const BuchiAutomaton& b, int state);

/// Whether the automaton accepts at least one word (some reachable
/// accepting state lies on a cycle).
bool has_nonempty_language(const BuchiAutomaton& b);

}  // namespace taskforge::buchi
