#pragma once

#include <cstdint>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace taskforge::ltl {

enum class Op : std::uint8_t {
  True,
  False,
  Prop,
  Not,
  And,
  Or,
  Implies,
  Iff,
  Next,
  Until,
  Release,
  Eventually,
  Always,
};

/// Number of children an operator takes (0, 1 or 2).
int arity(Op op);

/// Immutable LTL formula. Copies share structure; all operations are pure.
class Formula {
 public:
  Formula() : Formula(tt()) {}

  static Formula tt();
  static Formula ff();
  static Formula prop(std::string name);
  static Formula unary(Op op, Formula f);
  static Formula binary(Op op, Formula lhs, Formula rhs);

  Op op() const { return node_->op; }
  const std::string& name() const;  // Prop nodes only
  Formula left() const;             // first child (unary operand)
  Formula right() const;            // second child

  std::string to_string() const;

  /// Total order used for formula sets; 0 iff structurally equal.
  static int compare(const Formula& a, const Formula& b);

  friend bool operator==(const Formula& a, const Formula& b) {
    return compare(a, b) == 0;
  }
  friend bool operator!=(const Formula& a, const Formula& b) {
    return compare(a, b) != 0;
  }

  const void* id() const { return node_.get(); }

 private:
  struct Node;
  explicit Formula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  struct Node {
    Op op;
    std::string prop;
    std::shared_ptr<const Node> lhs, rhs;
  };
  std::shared_ptr<const Node> node_;

  static Formula wrap(Node node);
};

struct FormulaLess {
  bool operator()(const Formula& a, const Formula& b) const {
    return Formula::compare(a, b) < 0;
  }
};

using FormulaSet = std::set<Formula, FormulaLess>;

// Builders. `and`/`or`/`not` are C++ tokens, hence the l-prefix.
inline Formula tt() { return Formula::tt(); }
inline Formula ff() { return Formula::ff(); }
inline Formula prop(std::string name) { return Formula::prop(std::move(name)); }
inline Formula lnot(Formula f) { return Formula::unary(Op::Not, std::move(f)); }
inline Formula land(Formula a, Formula b) {
  return Formula::binary(Op::And, std::move(a), std::move(b));
}
inline Formula lor(Formula a, Formula b) {
  return Formula::binary(Op::Or, std::move(a), std::move(b));
}
inline Formula implies(Formula a, Formula b) {
  return Formula::binary(Op::Implies, std::move(a), std::move(b));
}
inline Formula iff(Formula a, Formula b) {
  return Formula::binary(Op::Iff, std::move(a), std::move(b));
}
inline Formula next(Formula f) { return Formula::unary(Op::Next, std::move(f)); }
inline Formula until(Formula a, Formula b) {
  return Formula::binary(Op::Until, std::move(a), std::move(b));
}
inline Formula release(Formula a, Formula b) {
  return Formula::binary(Op::Release, std::move(a), std::move(b));
}
inline Formula eventually(Formula f) {
  return Formula::unary(Op::Eventually, std::move(f));
}
inline Formula always(Formula f) {
  return Formula::unary(Op::Always, std::move(f));
}

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t offset, const std::string& expected);
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

/// Parse the ASCII surface syntax. Precedence, loosest to tightest:
/// `<->`, `->`, `|`, `&`, `U`/`R` (right-associative), unary `!` `X` `F` `G`.
Formula parse_ltl(std::string_view text);

/// Set of proposition names occurring in the formula.
std::set<std::string> atomic_props(const Formula& f);

/// Negation normal form: Not only on propositions, no Implies/Iff/F/G.
Formula to_nnf(const Formula& f);

/// One position of a trace: the set of propositions true there.
/// Propositions not listed are false (closed world).
struct Letter {
  std::set<std::string> props;

  bool has(const std::string& p) const { return props.count(p) != 0; }
  friend bool operator==(const Letter&, const Letter&) = default;
};

/// Ultimately periodic word prefix . loop^omega; loop must be nonempty.
struct LassoWord {
  std::vector<Letter> prefix;
  std::vector<Letter> loop;

  friend bool operator==(const LassoWord&, const LassoWord&) = default;
};

/// Whether prefix.loop^omega satisfies f, by fixpoint evaluation over the
/// finite position quotient. Independent of any automaton construction.
bool eval_lasso(const Formula& f, const LassoWord& w);

}  // namespace taskforge::ltl
