#include "multipass/transducers.hpp"

#include <algorithm>

#include "multipass/closures.hpp"

namespace mpa {

void Gsm::add_rule(const State& from, const Symbol& in, Word out, const State& to) {
  rules[{from, in}] = Step{std::move(out), to};
}

const Gsm::Step* Gsm::step(const State& from, const Symbol& in) const {
  auto it = rules.find({from, in});
  return it == rules.end() ? nullptr : &it->second;
}

std::vector<std::string> validate_gsm(const Gsm& s) {
  std::vector<std::string> errs;
  const std::set<State> Q(s.states.begin(), s.states.end());
  const std::set<Symbol> in(s.input_alphabet.begin(), s.input_alphabet.end());
  const std::set<Symbol> out(s.output_alphabet.begin(), s.output_alphabet.end());
  if (Q.size() != s.states.size()) errs.push_back("duplicate gsm states");
  if (!Q.contains(s.initial)) errs.push_back("initial gsm state '" + s.initial + "' is not a state");
  for (const auto& [key, st] : s.rules) {
    const auto where = "rule (" + key.first + ", " + key.second + ")";
    if (!Q.contains(key.first)) errs.push_back(where + ": unknown state");
    if (!Q.contains(st.to)) errs.push_back(where + ": unknown target '" + st.to + "'");
    if (!in.contains(key.second)) errs.push_back(where + ": input symbol not in the input alphabet");
    for (const auto& x : st.output)
      if (!out.contains(x)) errs.push_back(where + ": output symbol '" + x + "' not in the output alphabet");
  }
  return errs;
}

namespace {

void require_valid_gsm(const Gsm& s, const std::string& op) {
  auto errs = validate_gsm(s);
  if (errs.empty()) return;
  std::string msg = op + ": invalid gsm";
  for (const auto& e : errs) msg += "\n  " + e;
  throw PreconditionError(msg);
}

}  // namespace

std::optional<State> gsm_state_after(const Gsm& s, const Word& w) {
  State q = s.initial;
  for (const auto& x : w) {
    if (std::find(s.input_alphabet.begin(), s.input_alphabet.end(), x) == s.input_alphabet.end())
      throw PreconditionError("gsm: symbol '" + x + "' is not in the input alphabet");
    const auto* st = s.step(q, x);
    if (!st) return std::nullopt;
    q = st->to;
  }
  return q;
}

std::optional<Word> gsm_apply(const Gsm& s, const Word& w) {
  State q = s.initial;
  Word out;
  for (const auto& x : w) {
    if (std::find(s.input_alphabet.begin(), s.input_alphabet.end(), x) == s.input_alphabet.end())
      throw PreconditionError("gsm: symbol '" + x + "' is not in the input alphabet");
    const auto* st = s.step(q, x);
    if (!st) return std::nullopt;
    out.insert(out.end(), st->output.begin(), st->output.end());
    q = st->to;
  }
  return out;
}

Gsm identity_gsm(const std::vector<Symbol>& alphabet) { return projection_gsm(alphabet, alphabet); }

Gsm projection_gsm(const std::vector<Symbol>& alphabet, const std::vector<Symbol>& keep) {
  Gsm s;
  s.states = {"s"};
  s.initial = "s";
  s.input_alphabet = alphabet;
  s.output_alphabet = keep;
  for (const auto& x : alphabet) {
    const bool kept = std::find(keep.begin(), keep.end(), x) != keep.end();
    s.add_rule("s", x, kept ? Word{x} : Word{}, "s");
  }
  return s;
}

Gsm homomorphism_gsm(const std::vector<Symbol>& alphabet, const std::map<Symbol, Word>& images,
                     std::optional<std::vector<Symbol>> output_alphabet) {
  Gsm s;
  s.states = {"s"};
  s.initial = "s";
  s.input_alphabet = alphabet;
  for (const auto& x : alphabet) {
    auto it = images.find(x);
    if (it == images.end()) throw PreconditionError("homomorphism: no image for '" + x + "'");
    s.add_rule("s", x, it->second, "s");
    if (!output_alphabet)
      for (const auto& y : it->second)
        if (std::find(s.output_alphabet.begin(), s.output_alphabet.end(), y) == s.output_alphabet.end())
          s.output_alphabet.push_back(y);
  }
  if (output_alphabet) s.output_alphabet = *output_alphabet;
  return s;
}

Gsm prefix_gsm(const std::vector<Symbol>& alphabet, const Word& u) {
  Gsm s;
  s.states = {"first", "rest"};
  s.initial = "first";
  s.input_alphabet = alphabet;
  s.output_alphabet = alphabet;
  for (const auto& x : alphabet) {
    Word out = u;
    out.push_back(x);
    s.add_rule("first", x, std::move(out), "rest");
    s.add_rule("rest", x, {x}, "rest");
  }
  return s;
}

// --- inverse gsm ------------------------------------------------------------
//
// States of the product:
//   I(q)          start of a pass, stack empty, transducer in its initial state;
//   R(s, q)       between input letters, M in q, transducer in s;
//   C(s, x, i, q) the burst u of rule (s, x) has been fed to M up to u[i].
// A fresh bottom marker stays under M's stack so that the chain states can
// use epsilon moves even when M's own stack is empty.

MultipassAutomaton inverse_gsm(const MultipassAutomaton& m, const Gsm& s,
                               const std::optional<std::set<State>>& accepting_gsm_states) {
  require_valid(m, "inverse_gsm");
  require_valid_gsm(s, "inverse_gsm");
  const std::set<Symbol> delta(m.input_alphabet.begin(), m.input_alphabet.end());
  for (const auto& y : s.output_alphabet)
    if (!delta.contains(y))
      throw PreconditionError("inverse_gsm: transducer output '" + y + "' is not an input symbol of the machine");

  std::set<Symbol> taken(m.stack_alphabet.begin(), m.stack_alphabet.end());
  taken.insert(s.input_alphabet.begin(), s.input_alphabet.end());
  const Symbol bottom = fresh_symbol("_bottom", taken);

  MultipassAutomaton out;
  out.passes = m.passes;
  out.mode = m.mode;
  out.input_alphabet = s.input_alphabet;
  out.stack_alphabet = m.stack_alphabet;
  for (const auto& x : s.input_alphabet) out.add_stack_symbol(x);
  out.add_stack_symbol(bottom);

  auto I = [](const State& q) { return "<" + q + ">"; };
  auto R = [](const State& g, const State& q) { return "<" + g + "|" + q + ">"; };
  auto C = [](const State& g, const Symbol& x, std::size_t i, const State& q) {
    return "<" + g + "|" + x + ":" + std::to_string(i) + "|" + q + ">";
  };
  auto m_key = [&](const Symbol& top) -> StackKey {
    if (top == bottom) return std::nullopt;
    return top;
  };
  // Push word replacing `top` after an M move that pushes zeta.
  auto with_bottom = [&](const Symbol& top, const Word& zeta) {
    Word w;
    if (top == bottom) w.push_back(bottom);
    w.insert(w.end(), zeta.begin(), zeta.end());
    return w;
  };

  std::vector<Symbol> tops = m.stack_alphabet;
  tops.push_back(bottom);

  for (const auto& q : m.states) {
    out.states.push_back(I(q));
    for (const auto& g : s.states) out.states.push_back(R(g, q));
    for (const auto& [rule, st] : s.rules)
      for (std::size_t i = 1; i < st.output.size(); ++i) out.states.push_back(C(rule.first, rule.second, i, q));
  }

  // Target of feeding the rest of burst (g, x) to M after position i.
  auto after = [&](const State& g, const Symbol& x, const Gsm::Step& st, std::size_t i, const State& q) {
    return i == st.output.size() ? R(st.to, q) : C(g, x, i, q);
  };

  for (int j = 1; j <= m.passes; ++j) {
    for (const auto& q : m.states)
      for (const auto& top : tops) {
        const StackKey mk = m_key(top);
        // M's own epsilon moves, available in ready and chain states.
        std::vector<Move> eps;
        if (mk) {
          auto it = m.transitions.find(MidKey{j, q, std::nullopt, mk});
          if (it != m.transitions.end()) eps = it->second;
        }
        for (const auto& g : s.states)
          for (const auto& mv : eps) out.add_transition(j, R(g, q), std::nullopt, top, R(g, mv.to), mv.push);

        // Reading a letter from a ready state (or from I(q) on the empty stack).
        if (m.deterministic() && !eps.empty()) {
          // M would move on epsilon first, so the letter is read later.
        } else {
          for (const auto& g : s.states)
            for (const auto& x : s.input_alphabet) {
              const auto* st = s.step(g, x);
              if (!st) continue;
              auto emit = [&](const State& from, const StackKey& key, bool from_start) {
                if (st->output.empty()) {
                  out.add_transition(j, from, x, key, R(st->to, q), from_start ? Word{bottom} : Word{top});
                  return;
                }
                auto it = m.transitions.find(MidKey{j, q, st->output[0], mk});
                if (it == m.transitions.end()) return;
                for (const auto& mv : it->second)
                  out.add_transition(j, from, x, key, after(g, x, *st, 1, mv.to), with_bottom(top, mv.push));
              };
              emit(R(g, q), top, false);
              if (g == s.initial && top == bottom) emit(I(q), std::nullopt, true);
            }
        }

        // Chain states: feed u[i] or follow M's epsilon moves.
        for (const auto& [rule, st] : s.rules) {
          const auto& [g, x] = rule;
          for (std::size_t i = 1; i < st.output.size(); ++i) {
            const State c = C(g, x, i, q);
            for (const auto& mv : eps) out.add_transition(j, c, std::nullopt, top, C(g, x, i, mv.to), mv.push);
            if (m.deterministic() && !eps.empty()) continue;
            auto it = m.transitions.find(MidKey{j, q, st.output[i], mk});
            if (it == m.transitions.end()) continue;
            for (const auto& mv : it->second)
              out.add_transition(j, c, std::nullopt, top, after(g, x, st, i + 1, mv.to), with_bottom(top, mv.push));
          }
        }
      }

    // End-marker.
    for (const auto& q : m.states)
      for (const auto& top : tops) {
        const StackKey mk = m_key(top);
        std::vector<std::pair<State, StackKey>> at_end;
        for (const auto& g : s.states) at_end.emplace_back(R(g, q), top);
        if (top == bottom) at_end.emplace_back(I(q), std::nullopt);
        for (const auto& [from, key] : at_end) {
          if (j < m.passes) {
            auto it = m.end_nonfinal.find(EndKey{j, q, mk});
            if (it == m.end_nonfinal.end()) continue;
            for (const auto& t : it->second) out.add_end(j, from, key, I(t));
          }
        }
      }
  }

  out.initial = I(m.initial);
  for (const auto& q : m.states)
    for (const auto& top : tops) {
      const StackKey mk = m_key(top);
      auto it = m.end_final.find(FinalKey{q, mk});
      const EndVerdict v = it == m.end_final.end() ? m.negative() : it->second;
      for (const auto& g : s.states) {
        const bool allowed = !accepting_gsm_states || accepting_gsm_states->contains(g);
        out.set_final(R(g, q), top, allowed ? v : m.negative());
      }
      if (top == bottom) {
        const bool allowed = !accepting_gsm_states || accepting_gsm_states->contains(s.initial);
        out.set_final(I(q), std::nullopt, allowed ? v : m.negative());
      }
    }
  out.fill_final();
  return prune_unreachable(out);
}

// --- products and quotients --------------------------------------------------

MultipassAutomaton interleaved_product(const std::vector<MultipassAutomaton>& machines) {
  if (machines.empty()) throw PreconditionError("interleaved_product: no machines");
  std::vector<Symbol> sigma;
  for (const auto& m : machines) {
    if (m.mode != machines.front().mode) throw PreconditionError("interleaved_product: modes differ");
    for (const auto& x : m.input_alphabet)
      if (std::find(sigma.begin(), sigma.end(), x) == sigma.end()) sigma.push_back(x);
  }
  std::optional<MultipassAutomaton> acc;
  for (const auto& m : machines) {
    auto pulled = inverse_gsm(m, projection_gsm(sigma, m.input_alphabet));
    acc = acc ? machine_intersection(*acc, pulled) : std::move(pulled);
  }
  return *acc;
}

MultipassAutomaton empty_word_machine(const std::vector<Symbol>& alphabet, Mode mode) {
  MultipassAutomaton m;
  m.mode = mode;
  m.states = {"start", "later"};
  m.initial = "start";
  m.input_alphabet = alphabet;
  m.stack_alphabet = alphabet;
  for (const auto& x : alphabet) {
    m.add_transition(1, "start", x, std::nullopt, "later", {});
    m.add_transition(1, "later", x, std::nullopt, "later", {});
  }
  m.fill_final();
  m.set_final("start", std::nullopt, EndVerdict::Accept);
  return m;
}

MultipassAutomaton universal_machine(const std::vector<Symbol>& alphabet, Mode mode) {
  MultipassAutomaton m;
  m.mode = mode;
  m.states = {"all"};
  m.initial = "all";
  m.input_alphabet = alphabet;
  m.stack_alphabet = alphabet;
  for (const auto& x : alphabet) m.add_transition(1, "all", x, std::nullopt, "all", {});
  m.fill_final();
  m.set_final("all", std::nullopt, EndVerdict::Accept);
  return m;
}

MultipassAutomaton empty_language_machine(const std::vector<Symbol>& alphabet, Mode mode) {
  auto m = universal_machine(alphabet, mode);
  m.set_final("all", std::nullopt, m.negative());
  return m;
}

namespace {

MultipassAutomaton nonempty_words_machine(const std::vector<Symbol>& alphabet, Mode mode) {
  auto m = empty_word_machine(alphabet, mode);
  m.set_final("start", std::nullopt, m.negative());
  m.set_final("later", std::nullopt, EndVerdict::Accept);
  return m;
}

}  // namespace

MultipassAutomaton left_quotient(const MultipassAutomaton& m, const std::vector<Word>& k_set,
                                 std::uint64_t budget) {
  require_valid(m, "left_quotient");
  std::set<Word> K(k_set.begin(), k_set.end());
  if (K.empty()) return empty_language_machine(m.input_alphabet, m.mode);

  Runner runner(m);
  auto member = [&](const Word& w) {
    auto tr = runner.run(w, budget);
    if (tr.verdict == Verdict::BudgetExceeded)
      throw std::runtime_error("left_quotient: budget exhausted deciding '" + format_word(w) + "'");
    return tr.accepted();
  };
  const bool eps_in_l = member({});

  std::optional<MultipassAutomaton> acc;
  for (const auto& u : K) {
    auto part = inverse_gsm(m, prefix_gsm(m.input_alphabet, u));
    // The transducer maps epsilon to epsilon, not to u: fix the empty word.
    const bool u_in_l = member(u);
    if (u_in_l && !eps_in_l)
      part = machine_union(part, empty_word_machine(m.input_alphabet, m.mode));
    else if (!u_in_l && eps_in_l)
      part = machine_intersection(part, nonempty_words_machine(m.input_alphabet, m.mode));
    acc = acc ? machine_union(*acc, part) : std::move(part);
  }
  return *acc;
}

// --- serialization -----------------------------------------------------------

Json gsm_to_json(const Gsm& s) {
  Json j;
  j["states"] = s.states;
  j["initial"] = s.initial;
  j["input_alphabet"] = s.input_alphabet;
  j["output_alphabet"] = s.output_alphabet;
  Json rules = Json::array();
  for (const auto& [key, st] : s.rules) {
    Json r;
    r["state"] = key.first;
    r["input"] = key.second;
    r["output"] = st.output;
    r["to"] = st.to;
    rules.push_back(std::move(r));
  }
  j["rules"] = std::move(rules);
  return j;
}

Gsm gsm_from_json(const Json& j) {
  using namespace io;
  const std::string root = "gsm";
  Gsm s;
  s.states = get_strings(j, "states", root);
  s.initial = get_string(j, "initial", root);
  const auto& rules = field(j, "rules", root);
  if (!rules.is_array()) throw ParseError(root + ".rules: expected an array");
  for (std::size_t i = 0; i < rules.size(); ++i) {
    const std::string where = root + ".rules[" + std::to_string(i) + "]";
    const auto& r = rules[i];
    const auto from = get_string(r, "state", where);
    const auto in = get_string(r, "input", where);
    if (s.rules.contains({from, in})) throw ParseError(where + ": second rule for (" + from + ", " + in + ")");
    s.add_rule(from, in, as_word(field(r, "output", where), where + ".output"), get_string(r, "to", where));
  }
  auto derive = [&](const char* name, bool input) {
    if (j.contains(name)) return get_strings(j, name, root);
    std::vector<Symbol> out;
    for (const auto& [key, st] : s.rules) {
      const Word from = input ? Word{key.second} : st.output;
      for (const auto& x : from)
        if (std::find(out.begin(), out.end(), x) == out.end()) out.push_back(x);
    }
    return out;
  };
  s.input_alphabet = derive("input_alphabet", true);
  s.output_alphabet = derive("output_alphabet", false);
  auto errs = validate_gsm(s);
  if (!errs.empty()) throw ParseError(root + ": " + errs.front());
  return s;
}

std::string dump_gsm(const Gsm& s) { return gsm_to_json(s).dump(2) + "\n"; }

Gsm parse_gsm(std::string_view text) { return gsm_from_json(io::parse_document(text)); }

}  // namespace mpa
