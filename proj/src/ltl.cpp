#include "taskforge/ltl.hpp"

#include <algorithm>
#include <cassert>
#include <cctype>
#include <unordered_map>

namespace taskforge::ltl {

int arity(Op op) {
  switch (op) {
    case Op::True:
    case Op::False:
    case Op::Prop:
      return 0;
    case Op::Not:
    case Op::Next:
    case Op::Eventually:
    case Op::Always:
      return 1;
    default:
      return 2;
  }
}

Formula Formula::wrap(Node node) {
  return Formula(std::make_shared<const Node>(std::move(node)));
}

Formula Formula::tt() {
  static const Formula f = wrap(Node{Op::True, {}, nullptr, nullptr});
  return f;
}

Formula Formula::ff() {
  static const Formula f = wrap(Node{Op::False, {}, nullptr, nullptr});
  return f;
}

Formula Formula::prop(std::string name) {
  if (name.empty()) throw std::invalid_argument("empty proposition name");
  for (char c : name) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_')
      throw std::invalid_argument("invalid proposition name: " + name);
  }
  return wrap(Node{Op::Prop, std::move(name), nullptr, nullptr});
}

Formula Formula::unary(Op op, Formula f) {
  assert(arity(op) == 1);
  return wrap(Node{op, {}, f.node_, nullptr});
}

Formula Formula::binary(Op op, Formula lhs, Formula rhs) {
  assert(arity(op) == 2);
  return wrap(Node{op, {}, lhs.node_, rhs.node_});
}

const std::string& Formula::name() const {
  assert(op() == Op::Prop);
  return node_->prop;
}

Formula Formula::left() const {
  assert(node_->lhs);
  return Formula(node_->lhs);
}

Formula Formula::right() const {
  assert(node_->rhs);
  return Formula(node_->rhs);
}

int Formula::compare(const Formula& a, const Formula& b) {
  if (a.node_ == b.node_) return 0;
  if (a.op() != b.op()) return a.op() < b.op() ? -1 : 1;
  switch (arity(a.op())) {
    case 0:
      if (a.op() == Op::Prop) return a.node_->prop.compare(b.node_->prop);
      return 0;
    case 1:
      return compare(Formula(a.node_->lhs), Formula(b.node_->lhs));
    default: {
      int c = compare(Formula(a.node_->lhs), Formula(b.node_->lhs));
      if (c != 0) return c;
      return compare(Formula(a.node_->rhs), Formula(b.node_->rhs));
    }
  }
}

namespace {

// Precedence levels for printing/parsing; larger binds tighter.
int precedence(Op op) {
  switch (op) {
    case Op::Iff:
      return 0;
    case Op::Implies:
      return 1;
    case Op::Or:
      return 2;
    case Op::And:
      return 3;
    case Op::Until:
    case Op::Release:
      return 4;
    case Op::Not:
    case Op::Next:
    case Op::Eventually:
    case Op::Always:
      return 5;
    default:
      return 6;
  }
}

void print_rec(const Formula& f, int parent_prec, bool right_side,
               std::string& out) {
  const int prec = precedence(f.op());
  bool parens = prec < parent_prec;
  // Equal precedence: binary operators associate left except U/R, ->, <->;
  // parenthesize the side that would reparse differently.
  if (!parens && prec == parent_prec && arity(f.op()) == 2) {
    const bool right_assoc = prec == 4 || prec == 1 || prec == 0;
    parens = right_assoc ? !right_side : right_side;
  }
  if (parens) out += '(';
  switch (f.op()) {
    case Op::True:
      out += "true";
      break;
    case Op::False:
      out += "false";
      break;
    case Op::Prop:
      out += f.name();
      break;
    case Op::Not:
      out += '!';
      print_rec(f.left(), precedence(Op::Not), false, out);
      break;
    case Op::Next:
    case Op::Eventually:
    case Op::Always: {
      out += f.op() == Op::Next ? 'X' : (f.op() == Op::Eventually ? 'F' : 'G');
      out += ' ';
      print_rec(f.left(), precedence(f.op()), false, out);
      break;
    }
    default: {
      const char* sym = nullptr;
      switch (f.op()) {
        case Op::And: sym = " & "; break;
        case Op::Or: sym = " | "; break;
        case Op::Implies: sym = " -> "; break;
        case Op::Iff: sym = " <-> "; break;
        case Op::Until: sym = " U "; break;
        default: sym = " R "; break;
      }
      print_rec(f.left(), prec, false, out);
      out += sym;
      print_rec(f.right(), prec, true, out);
      break;
    }
  }
  if (parens) out += ')';
}

}  // namespace

std::string Formula::to_string() const {
  std::string out;
  print_rec(*this, 0, false, out);
  return out;
}

ParseError::ParseError(std::size_t offset, const std::string& expected)
    : std::runtime_error("syntax error at offset " + std::to_string(offset) +
                         ": " + expected),
      offset_(offset) {}

namespace {

struct Token {
  enum Kind {
    Ident,
    TrueLit,
    FalseLit,
    Bang,
    Amp,
    Pipe,
    Arrow,
    DArrow,
    NextOp,
    UntilOp,
    ReleaseOp,
    FinallyOp,
    GloballyOp,
    LParen,
    RParen,
    End,
  };
  Kind kind;
  std::string text;
  std::size_t offset;
};

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) { advance(); }

  const Token& peek() const { return current_; }
  Token take() {
    Token t = current_;
    advance();
    return t;
  }

 private:
  void advance() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
    current_.offset = pos_;
    if (pos_ >= text_.size()) {
      current_.kind = Token::End;
      current_.text.clear();
      return;
    }
    const char c = text_[pos_];
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
              text_[pos_] == '_'))
        ++pos_;
      current_.text = std::string(text_.substr(start, pos_ - start));
      if (current_.text == "true")
        current_.kind = Token::TrueLit;
      else if (current_.text == "false")
        current_.kind = Token::FalseLit;
      else if (current_.text == "X")
        current_.kind = Token::NextOp;
      else if (current_.text == "U")
        current_.kind = Token::UntilOp;
      else if (current_.text == "R")
        current_.kind = Token::ReleaseOp;
      else if (current_.text == "F")
        current_.kind = Token::FinallyOp;
      else if (current_.text == "G")
        current_.kind = Token::GloballyOp;
      else
        current_.kind = Token::Ident;
      return;
    }
    switch (c) {
      case '!':
        current_.kind = Token::Bang;
        ++pos_;
        return;
      case '&':
        current_.kind = Token::Amp;
        ++pos_;
        return;
      case '|':
        current_.kind = Token::Pipe;
        ++pos_;
        return;
      case '(':
        current_.kind = Token::LParen;
        ++pos_;
        return;
      case ')':
        current_.kind = Token::RParen;
        ++pos_;
        return;
      case '-':
        if (pos_ + 1 < text_.size() && text_[pos_ + 1] == '>') {
          current_.kind = Token::Arrow;
          pos_ += 2;
          return;
        }
        throw ParseError(pos_, "expected '->'");
      case '<':
        if (text_.size() - pos_ >= 3 && text_.substr(pos_, 3) == "<->") {
          current_.kind = Token::DArrow;
          pos_ += 3;
          return;
        }
        throw ParseError(pos_, "expected '<->'");
      default:
        throw ParseError(pos_, std::string("unexpected character '") + c + "'");
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  Token current_;
};

class Parser {
 public:
  explicit Parser(std::string_view text) : lexer_(text) {}

  Formula parse() {
    if (lexer_.peek().kind == Token::End)
      throw ParseError(0, "expected a formula, got empty input");
    Formula f = parse_iff();
    if (lexer_.peek().kind != Token::End)
      throw ParseError(lexer_.peek().offset, "expected end of input");
    return f;
  }

 private:
  Formula parse_iff() {
    Formula lhs = parse_implies();
    if (lexer_.peek().kind == Token::DArrow) {
      lexer_.take();
      return iff(std::move(lhs), parse_iff());
    }
    return lhs;
  }

  Formula parse_implies() {
    Formula lhs = parse_or();
    if (lexer_.peek().kind == Token::Arrow) {
      lexer_.take();
      return implies(std::move(lhs), parse_implies());
    }
    return lhs;
  }

  Formula parse_or() {
    Formula f = parse_and();
    while (lexer_.peek().kind == Token::Pipe) {
      lexer_.take();
      f = lor(std::move(f), parse_and());
    }
    return f;
  }

  Formula parse_and() {
    Formula f = parse_until();
    while (lexer_.peek().kind == Token::Amp) {
      lexer_.take();
      f = land(std::move(f), parse_until());
    }
    return f;
  }

  Formula parse_until() {
    Formula lhs = parse_unary();
    const Token::Kind k = lexer_.peek().kind;
    if (k == Token::UntilOp || k == Token::ReleaseOp) {
      lexer_.take();
      Formula rhs = parse_until();  // right-associative
      return k == Token::UntilOp ? until(std::move(lhs), std::move(rhs))
                                 : release(std::move(lhs), std::move(rhs));
    }
    return lhs;
  }

  Formula parse_unary() {
    const Token& t = lexer_.peek();
    switch (t.kind) {
      case Token::Bang:
        lexer_.take();
        return lnot(parse_unary());
      case Token::NextOp:
        lexer_.take();
        return next(parse_unary());
      case Token::FinallyOp:
        lexer_.take();
        return eventually(parse_unary());
      case Token::GloballyOp:
        lexer_.take();
        return always(parse_unary());
      default:
        return parse_atom();
    }
  }

  Formula parse_atom() {
    Token t = lexer_.take();
    switch (t.kind) {
      case Token::TrueLit:
        return tt();
      case Token::FalseLit:
        return ff();
      case Token::Ident:
        return prop(std::move(t.text));
      case Token::LParen: {
        Formula f = parse_iff();
        Token close = lexer_.take();
        if (close.kind != Token::RParen)
          throw ParseError(close.offset, "expected ')'");
        return f;
      }
      default:
        throw ParseError(t.offset,
                         "expected a proposition, literal, unary operator "
                         "or '('");
    }
  }

  Lexer lexer_;
};

}  // namespace

Formula parse_ltl(std::string_view text) { return Parser(text).parse(); }

std::set<std::string> atomic_props(const Formula& f) {
  std::set<std::string> out;
  std::vector<Formula> stack{f};
  while (!stack.empty()) {
    Formula g = stack.back();
    stack.pop_back();
    switch (arity(g.op())) {
      case 0:
        if (g.op() == Op::Prop) out.insert(g.name());
        break;
      case 1:
        stack.push_back(g.left());
        break;
      default:
        stack.push_back(g.left());
        stack.push_back(g.right());
        break;
    }
  }
  return out;
}

namespace {

Formula nnf_pos(const Formula& f);
Formula nnf_neg(const Formula& f);

Formula nnf_pos(const Formula& f) {
  switch (f.op()) {
    case Op::True:
    case Op::False:
    case Op::Prop:
      return f;
    case Op::Not:
      return nnf_neg(f.left());
    case Op::And:
      return land(nnf_pos(f.left()), nnf_pos(f.right()));
    case Op::Or:
      return lor(nnf_pos(f.left()), nnf_pos(f.right()));
    case Op::Implies:
      return lor(nnf_neg(f.left()), nnf_pos(f.right()));
    case Op::Iff:
      return lor(land(nnf_pos(f.left()), nnf_pos(f.right())),
                 land(nnf_neg(f.left()), nnf_neg(f.right())));
    case Op::Next:
      return next(nnf_pos(f.left()));
    case Op::Until:
      return until(nnf_pos(f.left()), nnf_pos(f.right()));
    case Op::Release:
      return release(nnf_pos(f.left()), nnf_pos(f.right()));
    case Op::Eventually:
      return until(tt(), nnf_pos(f.left()));
    default:  // Always
      return release(ff(), nnf_pos(f.left()));
  }
}

Formula nnf_neg(const Formula& f) {
  switch (f.op()) {
    case Op::True:
      return ff();
    case Op::False:
      return tt();
    case Op::Prop:
      return lnot(f);
    case Op::Not:
      return nnf_pos(f.left());
    case Op::And:
      return lor(nnf_neg(f.left()), nnf_neg(f.right()));
    case Op::Or:
      return land(nnf_neg(f.left()), nnf_neg(f.right()));
    case Op::Implies:
      return land(nnf_pos(f.left()), nnf_neg(f.right()));
    case Op::Iff:
      return lor(land(nnf_pos(f.left()), nnf_neg(f.right())),
                 land(nnf_neg(f.left()), nnf_pos(f.right())));
    case Op::Next:
      return next(nnf_neg(f.left()));
    case Op::Until:
      return release(nnf_neg(f.left()), nnf_neg(f.right()));
    case Op::Release:
      return until(nnf_neg(f.left()), nnf_neg(f.right()));
    case Op::Eventually:
      return release(ff(), nnf_neg(f.left()));
    default:  // Always
      return until(tt(), nnf_neg(f.left()));
  }
}

}  // namespace

Formula to_nnf(const Formula& f) { return nnf_pos(f); }

namespace {

// Truth vectors over the position quotient {0 .. N-1} with the loop-back
// successor; Until is a least fixpoint, Release a greatest fixpoint.
class LassoEval {
 public:
  explicit LassoEval(const LassoWord& w) : word_(w) {
    if (w.loop.empty()) throw std::invalid_argument("lasso loop is empty");
    n_ = w.prefix.size() + w.loop.size();
  }

  const std::vector<char>& eval(const Formula& f) {
    auto it = cache_.find(f.id());
    if (it != cache_.end()) return it->second;
    std::vector<char> v = compute(f);
    return cache_.emplace(f.id(), std::move(v)).first->second;
  }

 private:
  std::size_t succ(std::size_t p) const {
    return p + 1 < n_ ? p + 1 : word_.prefix.size();
  }

  const Letter& letter(std::size_t p) const {
    return p < word_.prefix.size() ? word_.prefix[p]
                                   : word_.loop[p - word_.prefix.size()];
  }

  std::vector<char> compute(const Formula& f) {
    std::vector<char> v(n_, 0);
    switch (f.op()) {
      case Op::True:
        std::fill(v.begin(), v.end(), 1);
        break;
      case Op::False:
        break;
      case Op::Prop:
        for (std::size_t p = 0; p < n_; ++p) v[p] = letter(p).has(f.name());
        break;
      case Op::Not: {
        const auto& a = eval(f.left());
        for (std::size_t p = 0; p < n_; ++p) v[p] = !a[p];
        break;
      }
      case Op::And: {
        const auto& a = eval(f.left());
        const auto& b = eval(f.right());
        for (std::size_t p = 0; p < n_; ++p) v[p] = a[p] && b[p];
        break;
      }
      case Op::Or: {
        const auto& a = eval(f.left());
        const auto& b = eval(f.right());
        for (std::size_t p = 0; p < n_; ++p) v[p] = a[p] || b[p];
        break;
      }
      case Op::Implies: {
        const auto& a = eval(f.left());
        const auto& b = eval(f.right());
        for (std::size_t p = 0; p < n_; ++p) v[p] = !a[p] || b[p];
        break;
      }
      case Op::Iff: {
        const auto& a = eval(f.left());
        const auto& b = eval(f.right());
        for (std::size_t p = 0; p < n_; ++p) v[p] = a[p] == b[p];
        break;
      }
      case Op::Next: {
        const auto& a = eval(f.left());
        for (std::size_t p = 0; p < n_; ++p) v[p] = a[succ(p)];
        break;
      }
      case Op::Until:
        v = least_fixpoint(eval(f.left()), eval(f.right()));
        break;
      case Op::Release:
        v = greatest_fixpoint(eval(f.left()), eval(f.right()));
        break;
      case Op::Eventually:
        v = least_fixpoint(std::vector<char>(n_, 1), eval(f.left()));
        break;
      default:  // Always
        v = greatest_fixpoint(std::vector<char>(n_, 0), eval(f.left()));
        break;
    }
    return v;
  }

  // v = g | (f & v o succ), from all-false upward.
  std::vector<char> least_fixpoint(const std::vector<char>& f,
                                   const std::vector<char>& g) {
    std::vector<char> v(n_, 0);
    for (bool changed = true; changed;) {
      changed = false;
      for (std::size_t i = n_; i-- > 0;) {
        char nv = g[i] || (f[i] && v[succ(i)]);
        if (nv != v[i]) {
          v[i] = nv;
          changed = true;
        }
      }
    }
    return v;
  }

  // v = g & (f | v o succ), from all-true downward.
  std::vector<char> greatest_fixpoint(const std::vector<char>& f,
                                      const std::vector<char>& g) {
    std::vector<char> v(n_, 1);
    for (bool changed = true; changed;) {
      changed = false;
      for (std::size_t i = n_; i-- > 0;) {
        char nv = g[i] && (f[i] || v[succ(i)]);
        if (nv != v[i]) {
          v[i] = nv;
          changed = true;
        }
      }
    }
    return v;
  }

  const LassoWord& word_;
  std::size_t n_;
  std::unordered_map<const void*, std::vector<char>> cache_;
};

}  // namespace

bool eval_lasso(const Formula& f, const LassoWord& w) {
  LassoEval ev(w);
  return ev.eval(f)[0] != 0;
}

}  // namespace taskforge::ltl
