#pragma once
// Hand-written fixture machines and checks shared by the unit tests. Nothing
// here calls the library's constructions; fixtures are built transition by
// transition so they can serve as independent reference points.

#include <algorithm>
#include <cstdint>
#include <map>
#include <utility>
#include <string>
#include <vector>

#include "multipass/automaton.hpp"
#include "multipass/symbols.hpp"

namespace fixture {

using namespace mpa;

/// Exponent sum of generator `g` in `w` (letters g and g^-1).
inline long exponent_sum(const Word& w, const Symbol& g) {
  const Symbol gi = g + "^-1";
  long s = 0;
  for (const auto& x : w) s += (x == g) - (x == gi);
  return s;
}

/// k-pass machine over `alphabet` whose pass j keeps |#plus - #minus| copies
/// of the dominant letter of counters[j] on the stack; accepts iff every pass
/// ends balanced.
inline MultipassAutomaton counter_machine(const std::vector<Symbol>& alphabet,
                                          const std::vector<std::pair<Symbol, Symbol>>& counters) {
  MultipassAutomaton m;
  m.passes = static_cast<int>(counters.size());
  m.states = {"ok", "bad"};
  m.initial = "ok";
  m.input_alphabet = alphabet;
  m.stack_alphabet = alphabet;
  const auto keys = m.stack_keys();
  for (int j = 1; j <= m.passes; ++j) {
    const auto& [plus, minus] = counters[j - 1];
    for (const auto& k : keys)
      for (const auto& x : alphabet) {
        Word keep = k ? Word{*k} : Word{};
        m.add_transition(j, "bad", x, k, "bad", keep);
        if (x != plus && x != minus) {
          m.add_transition(j, "ok", x, k, "ok", keep);
        } else if (!k) {
          m.add_transition(j, "ok", x, k, "ok", {x});
        } else if (*k == x) {
          m.add_transition(j, "ok", x, k, "ok", {x, x});
        } else {
          m.add_transition(j, "ok", x, k, "ok", {});
        }
      }
    if (j < m.passes)
      for (const auto& k : keys) {
        m.add_end(j, "ok", k, k ? "bad" : "ok");
        m.add_end(j, "bad", k, "bad");
      }
  }
  for (const auto& k : keys) {
    m.set_final("ok", k, k ? EndVerdict::Reject : EndVerdict::Accept);
    m.set_final("bad", k, EndVerdict::Reject);
  }
  return m;
}

/// Stackless one-pass machine: accepts iff `letter` occurs an even number of times.
inline MultipassAutomaton parity_machine(const std::vector<Symbol>& alphabet, const Symbol& letter) {
  MultipassAutomaton m;
  m.states = {"even", "odd"};
  m.initial = "even";
  m.input_alphabet = alphabet;
  m.stack_alphabet = alphabet;
  for (const auto& x : alphabet) {
    const bool flip = x == letter;
    m.add_transition(1, "even", x, std::nullopt, flip ? "odd" : "even", {});
    m.add_transition(1, "odd", x, std::nullopt, flip ? "even" : "odd", {});
  }
  m.fill_final();
  m.set_final("even", std::nullopt, EndVerdict::Accept);
  return m;
}

/// Same language, nondeterministic mode (Reject becomes NoDecision).
inline MultipassAutomaton as_nondeterministic(MultipassAutomaton m) {
  m.mode = Mode::Nondeterministic;
  for (auto& [k, v] : m.end_final)
    if (v == EndVerdict::Reject) v = EndVerdict::NoDecision;
  return m;
}

inline long count(const Word& w, const Symbol& x) { return std::count(w.begin(), w.end(), x); }

inline const std::vector<Symbol> kZ2Alphabet = {"a", "a^-1", "b", "b^-1"};

/// The two-pass WP(Z^2) machine of the introduction.
inline MultipassAutomaton z2_machine() {
  return counter_machine(kZ2Alphabet, {{"a", "a^-1"}, {"b", "b^-1"}});
}

/// One-pass DPDA-style machine for { a^n b^n : n >= 0 } over {a, b}.
inline MultipassAutomaton anbn_machine() {
  MultipassAutomaton m;
  m.states = {"A", "B", "dead"};
  m.initial = "A";
  m.input_alphabet = {"a", "b"};
  m.stack_alphabet = {"a", "b", "X"};
  for (const auto& k : m.stack_keys()) {
    Word keep = k ? Word{*k} : Word{};
    for (const auto& x : m.input_alphabet) m.add_transition(1, "dead", x, k, "dead", keep);
  }
  m.add_transition(1, "A", "a", std::nullopt, "A", {"X"});
  m.add_transition(1, "A", "a", "X", "A", {"X", "X"});
  m.add_transition(1, "A", "b", "X", "B", {});
  m.add_transition(1, "A", "b", std::nullopt, "dead", {});
  m.add_transition(1, "B", "b", "X", "B", {});
  m.add_transition(1, "B", "b", std::nullopt, "dead", {});
  m.add_transition(1, "B", "a", "X", "dead", {"X"});
  m.add_transition(1, "B", "a", std::nullopt, "dead", {});
  for (const auto& k : m.stack_keys())
    for (const auto& q : m.states) m.set_final(q, k, EndVerdict::Reject);
  m.set_final("A", std::nullopt, EndVerdict::Accept);
  m.set_final("B", std::nullopt, EndVerdict::Accept);
  return m;
}

/// Deterministic one-pass machine with epsilon moves: reading a pushes P,
/// which an epsilon move expands to X X; each b pops one X. Accepts iff
/// every prefix has #b <= 2 #a and the whole word has #b = 2 #a.
inline MultipassAutomaton doubling_machine() {
  MultipassAutomaton m;
  m.states = {"ok", "exp", "dead"};
  m.initial = "ok";
  m.input_alphabet = {"a", "b"};
  m.stack_alphabet = {"a", "b", "P", "X"};
  for (const auto& k : m.stack_keys()) {
    Word keep = k ? Word{*k} : Word{};
    for (const auto& x : m.input_alphabet) m.add_transition(1, "dead", x, k, "dead", keep);
    Word up = keep;
    up.push_back("P");
    m.add_transition(1, "ok", "a", k, "exp", up);
  }
  m.add_transition(1, "exp", std::nullopt, "P", "ok", {"X", "X"});
  m.add_transition(1, "ok", "b", "X", "ok", {});
  m.add_transition(1, "ok", "b", std::nullopt, "dead", {});
  // Only X or the empty stack can be on top when b is read; the other keys
  // get dead moves so the machine is total.
  for (const Symbol g : {"a", "b", "P"}) m.add_transition(1, "ok", "b", g, "dead", {g});
  m.fill_final();
  m.set_final("ok", std::nullopt, EndVerdict::Accept);
  return m;
}

inline bool doubling_language(const Word& w) {
  long as = 0, bs = 0;
  for (const auto& x : w) {
    (x == "a" ? as : bs) += 1;
    if (bs > 2 * as) return false;
  }
  return bs == 2 * as;
}

/// Nondeterministic one-pass machine for even palindromes over {a, b}.
inline MultipassAutomaton even_palindrome_machine() {
  MultipassAutomaton m;
  m.mode = Mode::Nondeterministic;
  m.states = {"push", "pop"};
  m.initial = "push";
  m.input_alphabet = {"a", "b"};
  m.stack_alphabet = {"a", "b"};
  for (const auto& k : m.stack_keys()) {
    Word keep = k ? Word{*k} : Word{};
    for (const auto& x : m.input_alphabet) {
      Word push = keep;
      push.push_back(x);
      m.add_transition(1, "push", x, k, "push", push);
      if (k && *k == x) m.add_transition(1, "pop", x, k, "pop", {});
    }
    if (k) m.add_transition(1, "push", std::nullopt, k, "pop", keep);
  }
  for (const auto& q : m.states)
    for (const auto& k : m.stack_keys()) m.set_final(q, k, EndVerdict::NoDecision);
  m.set_final("push", std::nullopt, EndVerdict::Accept);
  m.set_final("pop", std::nullopt, EndVerdict::Accept);
  return m;
}

inline bool is_even_palindrome(const Word& w) {
  return w.size() % 2 == 0 && std::equal(w.begin(), w.end(), w.rbegin());
}

/// Number of words of length <= n on which `m` and `pred` disagree. Budget
/// exhaustion counts as a disagreement.
template <class Pred>
std::size_t disagreements(const MultipassAutomaton& m, std::size_t n, Pred&& pred,
                          std::uint64_t budget = kDefaultBudget) {
  Runner r(m);
  std::size_t bad = 0;
  for_each_word(m.input_alphabet, n, [&](const Word& w) {
    auto tr = r.run(w, budget);
    if (tr.verdict == Verdict::BudgetExceeded || tr.accepted() != static_cast<bool>(pred(w))) ++bad;
  });
  return bad;
}

/// Checks a nondeterministic witness step by step against the transition
/// relation, without using the library's runner.
inline bool replay_witness(const MultipassAutomaton& m, const Word& w,
                           const std::vector<Configuration>& cfgs) {
  if (cfgs.empty()) return false;
  const auto& first = cfgs.front();
  if (first.pass != 1 || first.state != m.initial || first.position != 0 || !first.stack.empty())
    return false;
  auto top = [](const Word& st) -> StackKey {
    if (st.empty()) return std::nullopt;
    return st.back();
  };
  for (std::size_t i = 0; i + 1 < cfgs.size(); ++i) {
    const auto& a = cfgs[i];
    const auto& b = cfgs[i + 1];
    const StackKey k = top(a.stack);
    bool legal = false;
    if (b.pass == a.pass) {
      std::vector<InputKey> inputs{std::nullopt};
      if (a.position < w.size()) inputs.push_back(w[a.position]);
      for (const auto& in : inputs) {
        if (b.position != a.position + (in ? 1 : 0)) continue;
        auto it = m.transitions.find(MidKey{a.pass, a.state, in, k});
        if (it == m.transitions.end()) continue;
        for (const auto& mv : it->second) {
          Word st = a.stack;
          if (k) st.pop_back();
          st.insert(st.end(), mv.push.begin(), mv.push.end());
          if (mv.to == b.state && st == b.stack) legal = true;
        }
      }
    } else if (b.pass == a.pass + 1 && a.position == w.size() && b.position == 0 && b.stack.empty()) {
      auto it = m.end_nonfinal.find(EndKey{a.pass, a.state, k});
      if (it != m.end_nonfinal.end())
        legal = std::find(it->second.begin(), it->second.end(), b.state) != it->second.end();
    }
    if (!legal) return false;
  }
  const auto& last = cfgs.back();
  if (last.pass != m.passes || last.position != w.size()) return false;
  auto it = m.end_final.find(FinalKey{last.state, top(last.stack)});
  return it != m.end_final.end() && it->second == EndVerdict::Accept;
}

}  // namespace fixture
