#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "multipass/automaton.hpp"
#include "multipass/machine_io.hpp"

namespace mpa {

struct PdaKey {
  State state;
  InputKey input;  // nullopt: epsilon move
  Symbol top;
  friend auto operator<=>(const PdaKey&, const PdaKey&) = default;
};

/// Classical pushdown automaton accepting by final state. The stack starts
/// as the single symbol `start_symbol`; every move pops the top symbol and
/// pushes `Move::push` (last symbol on top). A configuration with an empty
/// stack has no moves.
struct PushdownAutomaton {
  Mode mode = Mode::Deterministic;
  std::vector<State> states;
  State initial;
  std::vector<Symbol> input_alphabet;
  std::vector<Symbol> stack_alphabet;
  Symbol start_symbol;
  std::set<State> final_states;
  std::map<PdaKey, std::vector<Move>> transitions;

  void add_transition(const State& from, InputKey input, const Symbol& top, const State& to, Word push);

  friend bool operator==(const PushdownAutomaton&, const PushdownAutomaton&) = default;
};

/// Problems with the automaton; empty means valid. Deterministic automata
/// may not offer an epsilon move and a letter move on the same (state, top),
/// nor two moves on one key.
std::vector<std::string> validate_pda(const PushdownAutomaton& p);

struct PdaRun {
  Verdict verdict = Verdict::Reject;  // never NoDecision
  std::uint64_t steps = 0;
  bool accepted() const { return verdict == Verdict::Accept; }
};

/// w is accepted iff some computation reads all of w and is then in a final
/// state (possibly after further epsilon moves). `budget` bounds the number
/// of configurations explored.
PdaRun pda_run(const PushdownAutomaton& p, const Word& w, std::uint64_t budget = kDefaultBudget);

/// One-pass machine with the same language and mode.
MultipassAutomaton pda_to_onepass(const PushdownAutomaton& p, std::uint64_t budget = kDefaultBudget);

/// Pushdown automaton with the same language as a one-pass machine.
PushdownAutomaton onepass_to_pda(const MultipassAutomaton& m);

Json pda_to_json(const PushdownAutomaton& p);
PushdownAutomaton pda_from_json(const Json& j);
std::string dump_pda(const PushdownAutomaton& p);
PushdownAutomaton parse_pda(std::string_view text);

}  // namespace mpa
