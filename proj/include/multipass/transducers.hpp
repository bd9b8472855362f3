#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "multipass/automaton.hpp"
#include "multipass/machine_io.hpp"

namespace mpa {

/// Deterministic finite transducer. `rules` may be partial; a word with no
/// run has no image.
struct Gsm {
  struct Step {
    Word output;
    State to;
    friend bool operator==(const Step&, const Step&) = default;
  };

  std::vector<State> states;
  State initial;
  std::vector<Symbol> input_alphabet;
  std::vector<Symbol> output_alphabet;
  std::map<std::pair<State, Symbol>, Step> rules;

  void add_rule(const State& from, const Symbol& in, Word out, const State& to);
  const Step* step(const State& from, const Symbol& in) const;

  friend bool operator==(const Gsm&, const Gsm&) = default;
};

/// Problems with the transducer; empty means valid.
std::vector<std::string> validate_gsm(const Gsm& s);

/// g(w), or nullopt when some letter has no rule. Throws PreconditionError
/// for letters outside the input alphabet.
std::optional<Word> gsm_apply(const Gsm& s, const Word& w);

/// State reached after reading w (nullopt when the run is undefined).
std::optional<State> gsm_state_after(const Gsm& s, const Word& w);

Gsm identity_gsm(const std::vector<Symbol>& alphabet);
/// One-state transducer erasing every letter outside `keep`.
Gsm projection_gsm(const std::vector<Symbol>& alphabet, const std::vector<Symbol>& keep);
/// One-state transducer x -> images.at(x); the output alphabet is
/// `output_alphabet` when given, else every symbol in the images.
Gsm homomorphism_gsm(const std::vector<Symbol>& alphabet, const std::map<Symbol, Word>& images,
                     std::optional<std::vector<Symbol>> output_alphabet = std::nullopt);
/// Two-state transducer: the first letter x becomes u x, the rest is copied.
Gsm prefix_gsm(const std::vector<Symbol>& alphabet, const Word& u);

/// Machine for g^{-1}(L(m)) over the transducer's input alphabet, with the
/// same number of passes. With `accepting_gsm_states`, a word is only
/// accepted if the transducer ends in one of those states.
MultipassAutomaton inverse_gsm(const MultipassAutomaton& m, const Gsm& s,
                               const std::optional<std::set<State>>& accepting_gsm_states = std::nullopt);

/// Words whose projection to each machine's alphabet lies in its language.
MultipassAutomaton interleaved_product(const std::vector<MultipassAutomaton>& machines);

/// K^{-1} L(m) = { w : u w in L(m) for some u in K }.
MultipassAutomaton left_quotient(const MultipassAutomaton& m, const std::vector<Word>& k_set,
                                 std::uint64_t budget = kDefaultBudget);

/// One-pass machines for {epsilon}, the empty language and all words.
MultipassAutomaton empty_word_machine(const std::vector<Symbol>& alphabet, Mode mode);
MultipassAutomaton empty_language_machine(const std::vector<Symbol>& alphabet, Mode mode);
MultipassAutomaton universal_machine(const std::vector<Symbol>& alphabet, Mode mode);

Json gsm_to_json(const Gsm& s);
Gsm gsm_from_json(const Json& j);
std::string dump_gsm(const Gsm& s);
Gsm parse_gsm(std::string_view text);

}  // namespace mpa
