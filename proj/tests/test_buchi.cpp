#include "doctest.h"
#include "taskforge/buchi.hpp"
#include "testutil.hpp"

using namespace taskforge;
using namespace taskforge::buchi;
using ltl::LassoWord;
using ltl::Letter;
using testutil::Rand;

namespace {

Letter L(std::initializer_list<const char*> props) {
  Letter l;
  for (const char* p : props) l.props.insert(p);
  return l;
}

LassoWord restrict_word(const LassoWord& w,
                        const std::vector<std::string>& alphabet) {
  auto restrict_letter = [&](const Letter& l) {
    Letter out;
    for (const std::string& p : l.props)
      if (std::find(alphabet.begin(), alphabet.end(), p) != alphabet.end())
        out.props.insert(p);
    return out;
  };
  LassoWord out;
  for (const Letter& l : w.prefix) out.prefix.push_back(restrict_letter(l));
  for (const Letter& l : w.loop) out.loop.push_back(restrict_letter(l));
  return out;
}

}  // namespace

TEST_CASE("guards") {
  const Guard a = Guard::literal("a", true);
  const Guard not_b = Guard::literal("b", false);
  CHECK(a.sat_by(L({"a"})));
  CHECK_FALSE(a.sat_by(L({})));
  CHECK(not_b.sat_by(L({"a"})));
  CHECK_FALSE(not_b.sat_by(L({"b"})));
  CHECK(Guard::tt().sat_by(L({})));
  CHECK_FALSE(Guard::ff().sat_by(L({"a"})));

  // Contradictory cubes vanish.
  CHECK(a.conj(Guard::literal("a", false)).is_false());
  const Guard both = a.conj(not_b);
  CHECK(both.sat_by(L({"a"})));
  CHECK_FALSE(both.sat_by(L({"a", "b"})));
  CHECK(a.disj(not_b).sat_by(L({"b", "a"})));
}

TEST_CASE("translate(true) is the universal single-state automaton") {
  const BuchiAutomaton b = translate(ltl::tt());
  CHECK(b.num_states() == 1);
  REQUIRE(b.transitions().size() == 1);
  CHECK(b.transitions()[0].guard.is_true());
  CHECK(b.transitions()[0].src == b.transitions()[0].dst);
  CHECK(b.is_accepting(0));
  Rand rng(5);
  for (int i = 0; i < 50; ++i)
    CHECK(accepts_lasso(b, testutil::random_word(rng, {"p", "q"})));
}

TEST_CASE("translate(F p) definitional verdicts") {
  const BuchiAutomaton b = translate(ltl::parse_ltl("F p"));
  CHECK(accepts_lasso(b, {{}, {L({"p"})}}));
  CHECK_FALSE(accepts_lasso(b, {{L({})}, {L({})}}));
  CHECK_FALSE(accepts_lasso(b, {{}, {L({})}}));
}

TEST_CASE("translate recurrence task from the three-part mission") {
  const BuchiAutomaton b =
      translate(ltl::parse_ltl("G F (room_1 & scan & use_camera)"));
  CHECK(accepts_lasso(b, {{}, {L({"room_1", "scan", "use_camera"})}}));
  CHECK_FALSE(accepts_lasso(b, {{}, {L({"room_1", "scan"})}}));
}

TEST_CASE("translate agrees with eval_lasso on random formulas") {
  Rand rng(2024);
  const std::vector<std::string> props{"p", "q", "r"};
  for (int i = 0; i < 150; ++i) {
    const ltl::Formula f = testutil::random_formula(rng, 4);
    const BuchiAutomaton b = translate(f);
    for (int k = 0; k < 60; ++k) {
      const LassoWord w = testutil::random_word(rng, props);
      CAPTURE(f.to_string());
      REQUIRE(accepts_lasso(b, w) == eval_lasso(f, w));
    }
  }
}

TEST_CASE("translate prunes unreachable states") {
  Rand rng(77);
  for (int i = 0; i < 60; ++i) {
    const BuchiAutomaton b = translate(testutil::random_formula(rng, 4));
    std::vector<char> seen(b.num_states(), 0);
    std::vector<int> stack{b.initial()};
    seen[b.initial()] = 1;
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      for (const auto& [g, u] : b.out(v)) {
        if (!seen[u]) {
          seen[u] = 1;
          stack.push_back(u);
        }
      }
    }
    CHECK(std::count(seen.begin(), seen.end(), 0) == 0);
  }
}

TEST_CASE("intersect examples") {
  const BuchiAutomaton fa = translate(ltl::parse_ltl("F a"));
  const BuchiAutomaton fb = translate(ltl::parse_ltl("F b"));
  CHECK(accepts_lasso(intersect(fa, fb), {{}, {L({"a", "b"})}}));

  const BuchiAutomaton empty =
      intersect(translate(ltl::parse_ltl("G a")),
                translate(ltl::parse_ltl("G !a")));
  CHECK_FALSE(has_nonempty_language(empty));
  Rand rng(6);
  for (int i = 0; i < 40; ++i)
    CHECK_FALSE(accepts_lasso(empty, testutil::random_word(rng, {"a"})));

  // Disjoint alphabets: the product is over the union.
  const BuchiAutomaton both = intersect(fa, fb);
  CHECK(both.alphabet_props() == std::vector<std::string>{"a", "b"});
  CHECK(accepts_lasso(both, {{L({"a"}), L({"b"})}, {L({})}}));
  CHECK(eval_lasso(ltl::parse_ltl("F a & F b"),
                   {{L({"a"}), L({"b"})}, {L({})}}));
}

TEST_CASE("intersection is the conjunction of the component languages") {
  Rand rng(9090);
  const std::vector<std::string> left_props{"a", "b"};
  const std::vector<std::string> right_props{"c", "d"};
  const std::vector<std::string> all{"a", "b", "c", "d"};
  for (int i = 0; i < 60; ++i) {
    // Half the pairs share an alphabet, half are disjoint.
    const bool disjoint = i % 2 == 0;
    const ltl::Formula f1 = testutil::random_formula(rng, 3, 2);
    ltl::Formula f2 = testutil::random_formula(rng, 3, 2);
    if (disjoint) {
      // Rename by reparsing over the other prop pool.
      std::string text = f2.to_string();
      for (char& ch : text) {
        if (ch == 'p') ch = 'c';
        if (ch == 'q') ch = 'd';
      }
      f2 = ltl::parse_ltl(text);
    }
    const ltl::Formula f1_renamed = [&] {
      std::string text = f1.to_string();
      for (char& ch : text) {
        if (ch == 'p') ch = 'a';
        if (ch == 'q') ch = 'b';
      }
      return ltl::parse_ltl(text);
    }();
    const BuchiAutomaton b1 = translate(f1_renamed);
    const BuchiAutomaton b2 = translate(f2);
    const BuchiAutomaton prod = intersect(b1, b2);
    for (int k = 0; k < 40; ++k) {
      const LassoWord w = testutil::random_word(rng, all);
      const bool lhs = accepts_lasso(prod, w);
      const bool rhs =
          accepts_lasso(b1, restrict_word(w, b1.alphabet_props())) &&
          accepts_lasso(b2, restrict_word(w, b2.alphabet_props()));
      CAPTURE(f1_renamed.to_string());
      CAPTURE(f2.to_string());
      REQUIRE(lhs == rhs);
    }
  }
}

TEST_CASE("intersection counter discipline") {
  Rand rng(555);
  for (int i = 0; i < 30; ++i) {
    const BuchiAutomaton b1 = translate(testutil::random_formula(rng, 3, 2));
    const BuchiAutomaton b2 = translate(testutil::random_formula(rng, 3, 2));
    const auto [prod, ann] = intersect_annotated(b1, b2);
    REQUIRE(ann.size() == static_cast<std::size_t>(prod.num_states()));
    CHECK(ann[prod.initial()].counter == 0);
    for (const Transition& t : prod.transitions()) {
      const IntersectionState& src = ann[t.src];
      const IntersectionState& dst = ann[t.dst];
      int expected;
      if (src.counter == 0)
        expected = b1.is_accepting(dst.left) ? 1 : 0;
      else if (src.counter == 1)
        expected = b2.is_accepting(dst.right) ? 2 : 1;
      else
        expected = 0;
      CHECK(dst.counter == expected);
    }
    for (int s = 0; s < prod.num_states(); ++s)
      CHECK(prod.is_accepting(s) == (ann[s].counter == 2));
  }
}

TEST_CASE("restrict_reachable") {
  const BuchiAutomaton b = translate(ltl::parse_ltl("F p"));
  SUBCASE("restriction to the initial state preserves the language") {
    const BuchiAutomaton r = restrict_reachable(b, b.initial());
    CHECK(r.num_states() == b.num_states());
    Rand rng(3);
    for (int i = 0; i < 60; ++i) {
      const LassoWord w = testutil::random_word(rng, {"p"});
      CHECK(accepts_lasso(r, w) == accepts_lasso(b, w));
    }
  }
  SUBCASE("unknown state id") {
    CHECK_THROWS_AS(restrict_reachable(b, b.num_states()), std::out_of_range);
    CHECK_THROWS_AS(restrict_reachable(b, -1), std::out_of_range);
  }
  SUBCASE("idempotent and never grows") {
    Rand rng(8);
    for (int i = 0; i < 40; ++i) {
      const BuchiAutomaton t = translate(testutil::random_formula(rng, 4));
      const BuchiAutomaton r1 = restrict_reachable(t, t.initial());
      const BuchiAutomaton r2 = restrict_reachable(r1, r1.initial());
      CHECK(r1.num_states() <= t.num_states());
      CHECK(r1.transitions().size() <= t.transitions().size());
      CHECK(r2.num_states() == r1.num_states());
      CHECK(r2.transitions() == r1.transitions());
      CHECK(r2.accepting() == r1.accepting());
    }
  }
}

TEST_CASE("restricting the sequenced-scan task past its until") {
  // (!(room_1 & scan) U (room_4 & scan)) & F (room_1 & scan): after the
  // until fires, the residual language is exactly F (room_1 & scan).
  const ltl::Formula curr = ltl::parse_ltl(
      "(!(room_1 & scan) U (room_4 & scan)) & F (room_1 & scan)");
  const BuchiAutomaton b = translate(curr);

  // Drive the automaton: find the successor set after the until fires.
  const Letter fire = L({"room_4", "scan"});
  std::vector<int> after;
  for (const auto& [g, dst] : b.out(b.initial()))
    if (g.sat_by(fire)) after.push_back(dst);
  REQUIRE_FALSE(after.empty());

  const ltl::Formula residual = ltl::parse_ltl("F (room_1 & scan)");
  Rand rng(21);
  const std::vector<std::string> props{"room_1", "room_4", "scan"};
  bool found_residual_state = false;
  for (int z : after) {
    const BuchiAutomaton r = restrict_reachable(b, z);
    bool matches = true;
    for (int i = 0; i < 80 && matches; ++i) {
      const LassoWord w = testutil::random_word(rng, props);
      if (accepts_lasso(r, w) != eval_lasso(residual, w)) matches = false;
    }
    if (matches) found_residual_state = true;
  }
  CHECK(found_residual_state);
}

TEST_CASE("restricting to a dead state yields the empty language") {
  // G p has a sink structure when p fails; craft an automaton directly.
  const std::vector<std::string> ap{"p"};
  const BuchiAutomaton b(
      ap, 3, 0,
      {{0, Guard::literal("p", true), 1}, {1, Guard::literal("p", true), 1},
       {0, Guard::literal("p", false), 2}, {2, Guard::tt(), 2}},
      {1});
  const BuchiAutomaton dead = restrict_reachable(b, 2);
  CHECK_FALSE(has_nonempty_language(dead));
  Rand rng(4);
  for (int i = 0; i < 40; ++i)
    CHECK_FALSE(accepts_lasso(dead, testutil::random_word(rng, ap)));
}
