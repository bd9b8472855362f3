#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "multipass/symbols.hpp"

namespace mpa {

using State = std::string;

/// nullopt stands for an epsilon move (input) or the empty stack (stack key).
using InputKey = std::optional<Symbol>;
using StackKey = std::optional<Symbol>;

enum class Mode { Deterministic, Nondeterministic };

/// Outcome of reading the end-marker on the final pass. Reject is the
/// negative verdict of deterministic machines, NoDecision that of
/// nondeterministic ones.
enum class EndVerdict { Accept, Reject, NoDecision };

enum class Verdict { Accept, Reject, NoDecision, BudgetExceeded };

std::string to_string(Mode m);
std::string to_string(EndVerdict v);
std::string to_string(Verdict v);

struct MidKey {
  int pass = 1;
  State state;
  InputKey input;
  StackKey stack;
  friend auto operator<=>(const MidKey&, const MidKey&) = default;
};

struct Move {
  State to;
  Word push;  // rightmost symbol ends up on top
  friend auto operator<=>(const Move&, const Move&) = default;
};

struct EndKey {
  int pass = 1;
  State state;
  StackKey stack;
  friend auto operator<=>(const EndKey&, const EndKey&) = default;
};

struct FinalKey {
  State state;
  StackKey stack;
  friend auto operator<=>(const FinalKey&, const FinalKey&) = default;
};

/// A k-pass pushdown automaton. Every pass starts at the beginning of the
/// input with an empty stack; the stack top is the back of the stack word.
/// A transition keyed on a symbol pops it and pushes `Move::push`; a
/// transition keyed on the empty stack pushes onto the empty stack.
struct MultipassAutomaton {
  int passes = 1;
  Mode mode = Mode::Deterministic;
  std::vector<State> states;
  State initial;
  std::vector<Symbol> input_alphabet;
  std::vector<Symbol> stack_alphabet;
  std::map<MidKey, std::vector<Move>> transitions;
  std::map<EndKey, std::vector<State>> end_nonfinal;
  std::map<FinalKey, EndVerdict> end_final;
  /// Free-form provenance lines (e.g. "completed before complementation").
  std::vector<std::string> notes;

  EndVerdict negative() const {
    return mode == Mode::Deterministic ? EndVerdict::Reject : EndVerdict::NoDecision;
  }
  bool deterministic() const { return mode == Mode::Deterministic; }

  /// The empty-stack key followed by every stack symbol.
  std::vector<StackKey> stack_keys() const;

  bool has_state(const State& q) const;
  void add_state(const State& q);
  void add_stack_symbol(const Symbol& s);
  void add_transition(int pass, const State& from, InputKey input, StackKey key, const State& to,
                      Word push);
  void add_end(int pass, const State& from, StackKey key, const State& to);
  void set_final(const State& q, StackKey key, EndVerdict v);

  /// Sets every missing final end-marker entry to the negative verdict.
  void fill_final();

  friend bool operator==(const MultipassAutomaton&, const MultipassAutomaton&) = default;
};

// --- validation -------------------------------------------------------------

struct Violation {
  std::string kind;
  std::string where;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> errors;
  /// Non-fatal findings, e.g. a deterministic machine that is not total.
  std::vector<Violation> warnings;

  bool ok() const { return errors.empty(); }
  bool has(std::string_view kind) const;
  std::string to_string() const;
};

/// `with_warnings = false` skips the (slower) totality scan.
ValidationReport validate(const MultipassAutomaton& m, bool with_warnings = true);

/// Throws PreconditionError listing the violations when `m` is invalid.
void require_valid(const MultipassAutomaton& m, std::string_view context);

// --- execution --------------------------------------------------------------

struct Configuration {
  int pass = 1;
  State state;
  std::size_t position = 0;  // index into w#, |w| means the end-marker
  Word stack;
  friend bool operator==(const Configuration&, const Configuration&) = default;
};

struct RunTrace {
  Verdict verdict = Verdict::Reject;
  std::uint64_t steps_total = 0;
  std::vector<std::uint64_t> steps_per_pass;
  /// One accepting computation, ending in the configuration that reads the
  /// final end-marker. Always present for nondeterministic accepts.
  std::optional<std::vector<Configuration>> witness;

  bool accepted() const { return verdict == Verdict::Accept; }
};

inline constexpr std::uint64_t kDefaultBudget = 1'000'000;

namespace detail {
struct CompiledMachine;
}

/// Compiles a machine once and runs it on many words. Immutable after
/// construction and safe to share between threads.
class Runner {
 public:
  explicit Runner(const MultipassAutomaton& m);

  RunTrace run(const Word& w, std::uint64_t budget = kDefaultBudget) const;
  /// Like run() for a word already mapped through encode().
  RunTrace run_encoded(std::span<const int> w, std::uint64_t budget = kDefaultBudget) const;
  bool accepts(const Word& w, std::uint64_t budget = kDefaultBudget) const;

  /// Maps input symbols to indices; throws PreconditionError on unknown symbols.
  std::vector<int> encode(const Word& w) const;

 private:
  std::shared_ptr<const detail::CompiledMachine> compiled_;
};

RunTrace run(const MultipassAutomaton& m, const Word& w, std::uint64_t budget = kDefaultBudget);

// --- epsilon behaviour and completion ----------------------------------------

struct EpsilonStart {
  int pass = 1;
  State state;
  Symbol top;
  friend auto operator<=>(const EpsilonStart&, const EpsilonStart&) = default;
};

struct EpsilonAnalysis {
  std::set<EpsilonStart> divergent;
  /// Longest epsilon run, over all convergent starts, before the starting
  /// symbol is erased or an input letter is needed.
  std::size_t max_convergent_run = 0;
};

/// Exact classification of every (pass, state, top) that has an epsilon
/// transition in a deterministic machine.
EpsilonAnalysis analyze_epsilon_runs(const MultipassAutomaton& m);
std::set<EpsilonStart> divergence_analysis(const MultipassAutomaton& m);

/// True when the deterministic machine always reads the end-marker on every
/// pass: no divergent epsilon runs and no missing transitions at the keys
/// reported by reachable_tops().
bool is_complete(const MultipassAutomaton& m);

/// Adds a rejecting sink that absorbs divergent epsilon runs and missing
/// transitions. Machines that are already complete are returned unchanged.
MultipassAutomaton make_complete(const MultipassAutomaton& m);

/// Parameters of the step bound k*C*B^2*n (+ k*C*B^2 for the end-markers).
/// C is the longest push word (at least 1). B counts one reading move plus
/// the longest convergent epsilon run that can follow it.
struct LinearBound {
  int passes = 1;
  std::size_t max_push = 1;
  std::size_t epsilon_bound = 1;

  std::uint64_t coefficient() const {
    return static_cast<std::uint64_t>(passes) * max_push * epsilon_bound * epsilon_bound;
  }
  std::uint64_t steps(std::size_t n) const { return coefficient() * (n + 1); }
};

LinearBound linear_bound(const MultipassAutomaton& m);

/// Over-approximation of the stack tops that can occur at each reachable
/// (pass, state). After a pop any symbol pushed during that pass may be
/// exposed. Completeness and totality warnings only look at these keys.
std::map<std::pair<int, State>, std::set<StackKey>> reachable_tops(const MultipassAutomaton& m);
std::set<std::pair<int, State>> reachable_pass_states(const MultipassAutomaton& m);

/// The empty-stack key plus every symbol pushed by some pass-`pass`
/// transition: the only keys that can be on top during that pass.
std::vector<StackKey> live_stack_keys(const MultipassAutomaton& m, int pass);

/// Drops states not reachable from the initial state.
MultipassAutomaton prune_unreachable(const MultipassAutomaton& m);

/// Returns a state name not used by `m`.
State fresh_state(const MultipassAutomaton& m, std::string base);

}  // namespace mpa
