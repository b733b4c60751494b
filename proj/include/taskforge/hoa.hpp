#pragma once

#include <string>
#include <string_view>

#include "taskforge/buchi.hpp"

namespace taskforge::hoa {

/// HOA v1 text for the automaton: state-based acceptance "Buchi"
/// (`Acceptance: 1 Inf(0)`), explicit labeled edges.
std::string export_hoa(const buchi::BuchiAutomaton& b);

/// Parse the subset of HOA v1 produced by export_hoa (plus arbitrary
/// boolean label expressions). Throws std::runtime_error on malformed input.
buchi::BuchiAutomaton import_hoa(std::string_view text);

}  // namespace taskforge::hoa
