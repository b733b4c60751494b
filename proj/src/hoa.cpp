#include "taskforge/hoa.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace taskforge::hoa {

namespace {

using buchi::Guard;

std::string guard_to_label(const Guard& g,
                           const std::map<std::string, int>& ap_index) {
  if (g.is_false()) return "f";
  if (g.is_true()) return "t";
  std::string out;
  const auto& cubes = g.cubes();
  for (std::size_t i = 0; i < cubes.size(); ++i) {
    if (i) out += " | ";
    const auto& c = cubes[i];
    if (c.pos.empty() && c.neg.empty()) {
      out += "t";
      continue;
    }
    std::string cube;
    for (const std::string& p : c.pos) {
      if (!cube.empty()) cube += "&";
      cube += std::to_string(ap_index.at(p));
    }
    for (const std::string& p : c.neg) {
      if (!cube.empty()) cube += "&";
      cube += "!" + std::to_string(ap_index.at(p));
    }
    if (cubes.size() > 1) {
      out += "(" + cube + ")";
    } else {
      out += cube;
    }
  }
  return out;
}

}  // namespace

std::string export_hoa(const buchi::BuchiAutomaton& b) {
  std::map<std::string, int> ap_index;
  for (std::size_t i = 0; i < b.alphabet_props().size(); ++i)
    ap_index[b.alphabet_props()[i]] = static_cast<int>(i);

  std::ostringstream out;
  out << "HOA: v1\n";
  out << "States: " << b.num_states() << "\n";
  out << "Start: " << b.initial() << "\n";
  out << "AP: " << b.alphabet_props().size();
  for (const std::string& p : b.alphabet_props()) out << " \"" << p << "\"";
  out << "\n";
  out << "acc-name: Buchi\n";
  out << "Acceptance: 1 Inf(0)\n";
  out << "properties: trans-labels explicit-labels state-acc\n";
  out << "--BODY--\n";
  for (int s = 0; s < b.num_states(); ++s) {
    out << "State: " << s;
    if (b.is_accepting(s)) out << " {0}";
    out << "\n";
    for (const auto& [g, dst] : b.out(s))
      out << "[" << guard_to_label(g, ap_index) << "] " << dst << "\n";
  }
  out << "--END--\n";
  return out.str();
}

namespace {

// Recursive-descent parser for HOA label expressions:
//   expr := term ('|' term)* ; term := factor ('&' factor)*
//   factor := '!' factor | '(' expr ')' | 't' | 'f' | <ap index>
class LabelParser {
 public:
  LabelParser(std::string_view text, const std::vector<std::string>& aps)
      : text_(text), aps_(aps) {}

  Guard parse() {
    Guard g = parse_or();
    skip_ws();
    if (pos_ != text_.size())
      throw std::runtime_error("trailing characters in label expression");
    return g;
  }

 private:
  void skip_ws() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
  }

  Guard parse_or() {
    Guard g = parse_and();
    while (true) {
      skip_ws();
      if (pos_ < text_.size() && text_[pos_] == '|') {
        ++pos_;
        g = g.disj(parse_and());
      } else {
        return g;
      }
    }
  }

  Guard parse_and() {
    Guard g = parse_factor();
    while (true) {
      skip_ws();
      if (pos_ < text_.size() && text_[pos_] == '&') {
        ++pos_;
        g = g.conj(parse_factor());
      } else {
        return g;
      }
    }
  }

  Guard parse_factor() {
    skip_ws();
    if (pos_ >= text_.size())
      throw std::runtime_error("unexpected end of label expression");
    const char c = text_[pos_];
    if (c == '!') {
      ++pos_;
      return negate(parse_factor());
    }
    if (c == '(') {
      ++pos_;
      Guard g = parse_or();
      skip_ws();
      if (pos_ >= text_.size() || text_[pos_] != ')')
        throw std::runtime_error("expected ')' in label expression");
      ++pos_;
      return g;
    }
    if (c == 't') {
      ++pos_;
      return Guard::tt();
    }
    if (c == 'f') {
      ++pos_;
      return Guard::ff();
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < text_.size() &&
             std::isdigit(static_cast<unsigned char>(text_[pos_])))
        ++pos_;
      const int idx = std::stoi(std::string(text_.substr(start, pos_ - start)));
      if (idx < 0 || idx >= static_cast<int>(aps_.size()))
        throw std::runtime_error("AP index out of range in label expression");
      return Guard::literal(aps_[idx], true);
    }
    throw std::runtime_error(std::string("unexpected character '") + c +
                             "' in label expression");
  }

  // De Morgan into DNF; labels are tiny, so the expansion is cheap.
  Guard negate(const Guard& g) {
    if (g.is_false()) return Guard::tt();
    Guard result = Guard::tt();
    for (const Guard::Cube& cube : g.cubes()) {
      Guard clause = Guard::ff();
      for (const std::string& p : cube.pos)
        clause = clause.disj(Guard::literal(p, false));
      for (const std::string& p : cube.neg)
        clause = clause.disj(Guard::literal(p, true));
      result = result.conj(clause);
    }
    return result;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  const std::vector<std::string>& aps_;
};

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

}  // namespace

buchi::BuchiAutomaton import_hoa(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;

  int num_states = -1;
  int start = -1;
  std::vector<std::string> aps;
  bool saw_hoa = false, in_body = false, saw_end = false;
  std::vector<buchi::Transition> transitions;
  std::vector<int> accepting;
  int current_state = -1;

  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty() || line.rfind("/*", 0) == 0) continue;
    if (!in_body) {
      if (line.rfind("HOA:", 0) == 0) {
        saw_hoa = true;
      } else if (line.rfind("States:", 0) == 0) {
        num_states = std::stoi(trim(line.substr(7)));
      } else if (line.rfind("Start:", 0) == 0) {
        start = std::stoi(trim(line.substr(6)));
      } else if (line.rfind("AP:", 0) == 0) {
        std::istringstream ap_in(line.substr(3));
        int count = 0;
        ap_in >> count;
        std::string rest;
        std::getline(ap_in, rest);
        std::size_t pos = 0;
        for (int i = 0; i < count; ++i) {
          std::size_t open = rest.find('"', pos);
          std::size_t close =
              open == std::string::npos ? open : rest.find('"', open + 1);
          if (close == std::string::npos)
            throw std::runtime_error("malformed AP line in HOA input");
          aps.push_back(rest.substr(open + 1, close - open - 1));
          pos = close + 1;
        }
      } else if (line.rfind("Acceptance:", 0) == 0) {
        const std::string acc = trim(line.substr(11));
        if (acc != "1 Inf(0)")
          throw std::runtime_error("unsupported acceptance: " + acc);
      } else if (line == "--BODY--") {
        in_body = true;
      }
      // acc-name:, name:, properties:, tool: are informational.
      continue;
    }
    if (line == "--END--") {
      saw_end = true;
      break;
    }
    if (line.rfind("State:", 0) == 0) {
      std::string rest = trim(line.substr(6));
      bool acc = false;
      const std::size_t brace = rest.find('{');
      if (brace != std::string::npos) {
        acc = true;
        rest = trim(rest.substr(0, brace));
      }
      // Strip an optional quoted state name.
      const std::size_t quote = rest.find('"');
      if (quote != std::string::npos) rest = trim(rest.substr(0, quote));
      current_state = std::stoi(rest);
      if (acc) accepting.push_back(current_state);
      continue;
    }
    if (line.front() == '[') {
      if (current_state < 0)
        throw std::runtime_error("edge before any State: line");
      const std::size_t close = line.find(']');
      if (close == std::string::npos)
        throw std::runtime_error("unterminated label on edge line");
      const Guard g =
          LabelParser(line.substr(1, close - 1), aps).parse();
      std::string rest = trim(line.substr(close + 1));
      const std::size_t brace = rest.find('{');
      if (brace != std::string::npos) rest = trim(rest.substr(0, brace));
      transitions.push_back({current_state, g, std::stoi(rest)});
      continue;
    }
    throw std::runtime_error("unrecognized HOA body line: " + line);
  }

  if (!saw_hoa) throw std::runtime_error("missing HOA: header");
  if (!saw_end) throw std::runtime_error("missing --END--");
  if (num_states < 0) throw std::runtime_error("missing States: header");
  if (start < 0) throw std::runtime_error("missing Start: header");

  return buchi::BuchiAutomaton(aps, num_states, start, std::move(transitions),
                               std::move(accepting));
}

}  // namespace taskforge::hoa
