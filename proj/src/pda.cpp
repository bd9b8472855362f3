#include "multipass/pda.hpp"

#include <algorithm>
#include <tuple>

namespace mpa {

void PushdownAutomaton::add_transition(const State& from, InputKey input, const Symbol& top, const State& to,
                                       Word push) {
  auto& moves = transitions[PdaKey{from, std::move(input), top}];
  Move mv{to, std::move(push)};
  if (std::find(moves.begin(), moves.end(), mv) == moves.end()) moves.push_back(std::move(mv));
}

std::vector<std::string> validate_pda(const PushdownAutomaton& p) {
  std::vector<std::string> errs;
  const std::set<State> Q(p.states.begin(), p.states.end());
  const std::set<Symbol> Sigma(p.input_alphabet.begin(), p.input_alphabet.end());
  const std::set<Symbol> Gamma(p.stack_alphabet.begin(), p.stack_alphabet.end());
  if (Q.size() != p.states.size()) errs.push_back("duplicate states");
  if (!Q.contains(p.initial)) errs.push_back("initial state '" + p.initial + "' is not a state");
  if (!Gamma.contains(p.start_symbol)) errs.push_back("start symbol '" + p.start_symbol + "' is not a stack symbol");
  for (const auto& f : p.final_states)
    if (!Q.contains(f)) errs.push_back("final state '" + f + "' is not a state");
  for (const auto& [key, moves] : p.transitions) {
    const std::string where =
        "transition (" + key.state + ", " + key.input.value_or("eps") + ", " + key.top + ")";
    if (!Q.contains(key.state)) errs.push_back(where + ": unknown state");
    if (key.input && !Sigma.contains(*key.input)) errs.push_back(where + ": unknown input symbol");
    if (!Gamma.contains(key.top)) errs.push_back(where + ": unknown stack symbol");
    for (const auto& mv : moves) {
      if (!Q.contains(mv.to)) errs.push_back(where + ": unknown target '" + mv.to + "'");
      for (const auto& g : mv.push)
        if (!Gamma.contains(g)) errs.push_back(where + ": pushes unknown symbol '" + g + "'");
    }
    if (p.mode == Mode::Deterministic) {
      if (moves.size() > 1) errs.push_back(where + ": several moves in a deterministic automaton");
      if (key.input && p.transitions.contains(PdaKey{key.state, std::nullopt, key.top}))
        errs.push_back(where + ": competes with an epsilon move in a deterministic automaton");
    }
  }
  return errs;
}

namespace {

void require_valid_pda(const PushdownAutomaton& p, const std::string& op) {
  auto errs = validate_pda(p);
  if (errs.empty()) return;
  std::string msg = op + ": invalid pushdown automaton";
  for (const auto& e : errs) msg += "\n  " + e;
  throw PreconditionError(msg);
}

}  // namespace

PdaRun pda_run(const PushdownAutomaton& p, const Word& w, std::uint64_t budget) {
  require_valid_pda(p, "pda_run");
  for (const auto& x : w)
    if (std::find(p.input_alphabet.begin(), p.input_alphabet.end(), x) == p.input_alphabet.end())
      throw PreconditionError("pda_run: symbol '" + x + "' is not in the input alphabet");

  using Config = std::tuple<State, std::size_t, Word>;
  std::set<Config> seen;
  std::vector<Config> todo{{p.initial, 0, Word{p.start_symbol}}};
  seen.insert(todo.front());
  PdaRun out;
  while (!todo.empty()) {
    if (out.steps >= budget) {
      out.verdict = Verdict::BudgetExceeded;
      return out;
    }
    ++out.steps;
    auto [q, pos, stack] = std::move(todo.back());
    todo.pop_back();
    if (pos == w.size() && p.final_states.contains(q)) {
      out.verdict = Verdict::Accept;
      return out;
    }
    if (stack.empty()) continue;
    const Symbol top = stack.back();
    auto follow = [&](const InputKey& in, std::size_t next) {
      auto it = p.transitions.find(PdaKey{q, in, top});
      if (it == p.transitions.end()) return;
      for (const auto& mv : it->second) {
        Word st(stack.begin(), stack.end() - 1);
        st.insert(st.end(), mv.push.begin(), mv.push.end());
        Config c{mv.to, next, std::move(st)};
        if (seen.insert(c).second) todo.push_back(std::move(c));
      }
    };
    follow(std::nullopt, pos);
    if (pos < w.size()) follow(w[pos], pos + 1);
  }
  out.verdict = Verdict::Reject;
  return out;
}

// The simulating machine starts with an empty stack, so the first letter
// is read by a fresh state that pushes the start symbol and remembers the
// letter ("pending" states) until the automaton's epsilon moves let it be
// consumed. Afterwards states carry a flag telling whether a final state
// was visited since the last letter was read; the end-marker accepts on it.
MultipassAutomaton pda_to_onepass(const PushdownAutomaton& p, std::uint64_t budget) {
  require_valid_pda(p, "pda_to_onepass");
  const bool det = p.mode == Mode::Deterministic;

  MultipassAutomaton m;
  m.mode = p.mode;
  m.input_alphabet = p.input_alphabet;
  m.stack_alphabet = p.stack_alphabet;
  for (const auto& s : p.input_alphabet) m.add_stack_symbol(s);
  auto flagged = [](const State& q, bool f) { return "<" + q + (f ? ",1>" : ",0>"); };
  auto pending = [](const State& q, const Symbol& s) { return "<" + q + "|" + s + ">"; };
  const State start = "start", dead = "dead";
  m.states = {start, dead};
  for (const auto& q : p.states) {
    m.states.push_back(flagged(q, false));
    m.states.push_back(flagged(q, true));
    for (const auto& s : p.input_alphabet) m.states.push_back(pending(q, s));
  }
  m.initial = start;
  auto fin = [&](const State& q) { return p.final_states.contains(q); };

  for (const auto& s : p.input_alphabet) m.add_transition(1, start, s, std::nullopt, pending(p.initial, s), {p.start_symbol});
  for (const auto& k : m.stack_keys()) {
    Word keep = k ? Word{*k} : Word{};
    for (const auto& s : p.input_alphabet) m.add_transition(1, dead, s, k, dead, keep);
  }

  auto moves = [&](const State& q, const InputKey& in, const Symbol& g) -> const std::vector<Move>* {
    auto it = p.transitions.find(PdaKey{q, in, g});
    return it == p.transitions.end() ? nullptr : &it->second;
  };
  for (const auto& q : p.states) {
    for (const auto& s : p.input_alphabet) {
      m.add_transition(1, flagged(q, false), s, std::nullopt, dead, {});
      m.add_transition(1, flagged(q, true), s, std::nullopt, dead, {});
      m.add_transition(1, pending(q, s), s, std::nullopt, dead, {});
      for (const auto& other : p.input_alphabet)
        if (other != s) m.add_transition(1, pending(q, s), other, std::nullopt, dead, {});
    }
    m.set_final(flagged(q, true), std::nullopt, EndVerdict::Accept);

    for (const auto& g : p.stack_alphabet) {
      const auto* eps = moves(q, std::nullopt, g);
      if (eps)
        for (const auto& mv : *eps)
          for (bool f : {false, true}) m.add_transition(1, flagged(q, f), std::nullopt, g, flagged(mv.to, f || fin(mv.to)), mv.push);
      for (const auto& s : p.input_alphabet) {
        const auto* rd = moves(q, s, g);
        if (rd)
          for (const auto& mv : *rd)
            for (bool f : {false, true}) m.add_transition(1, flagged(q, f), s, g, flagged(mv.to, fin(mv.to)), mv.push);
        else if (det && !eps)
          for (bool f : {false, true}) m.add_transition(1, flagged(q, f), s, g, dead, {g});

        if (eps)
          for (const auto& mv : *eps) m.add_transition(1, pending(q, s), std::nullopt, g, pending(mv.to, s), mv.push);
        if (rd)
          for (const auto& mv : *rd) m.add_transition(1, pending(q, s), std::nullopt, g, flagged(mv.to, fin(mv.to)), mv.push);
        if (det && !eps && !rd) m.add_transition(1, pending(q, s), std::nullopt, g, dead, {g});
      }
      m.set_final(flagged(q, true), g, EndVerdict::Accept);
    }
  }

  const auto empty = pda_run(p, {}, budget);
  if (empty.verdict == Verdict::BudgetExceeded)
    throw PreconditionError("pda_to_onepass: budget exhausted deciding the empty word");
  m.fill_final();
  m.set_final(start, std::nullopt, empty.accepted() ? EndVerdict::Accept : m.negative());
  return prune_unreachable(m);
}

// States are pairs (q, top of the simulated stack), so the end-marker
// verdict becomes membership in the final states. A fresh bottom symbol
// stands for the empty stack. After a pop the new top is unknown; a "peek"
// state learns it with an epsilon move and is never final.
PushdownAutomaton onepass_to_pda(const MultipassAutomaton& m) {
  if (m.passes != 1) throw PreconditionError("onepass_to_pda: machine has " + std::to_string(m.passes) + " passes");
  require_valid(m, "onepass_to_pda");

  PushdownAutomaton p;
  p.mode = m.mode;
  p.input_alphabet = m.input_alphabet;
  p.stack_alphabet = m.stack_alphabet;
  std::set<Symbol> taken(m.stack_alphabet.begin(), m.stack_alphabet.end());
  taken.insert(m.input_alphabet.begin(), m.input_alphabet.end());
  p.start_symbol = fresh_symbol("Z0", taken);
  p.stack_alphabet.push_back(p.start_symbol);

  auto top_state = [](const State& q, const StackKey& k) { return "[" + q + (k ? "," + *k : std::string()) + "]"; };
  auto peek_state = [](const State& q) { return "[" + q + "]?"; };
  std::set<State> made;
  auto use = [&](const State& s) {
    if (made.insert(s).second) p.states.push_back(s);
    return s;
  };
  p.initial = use(top_state(m.initial, std::nullopt));

  std::set<State> peeks;
  for (const auto& [key, mvs] : m.transitions) {
    const State from = use(top_state(key.state, key.stack));
    const Symbol top = key.stack ? *key.stack : p.start_symbol;
    for (const auto& mv : mvs) {
      Word push = key.stack ? Word{} : Word{p.start_symbol};
      push.insert(push.end(), mv.push.begin(), mv.push.end());
      State to;
      if (!mv.push.empty()) {
        to = use(top_state(mv.to, mv.push.back()));
      } else if (!key.stack) {
        to = use(top_state(mv.to, std::nullopt));
      } else {
        to = use(peek_state(mv.to));
        peeks.insert(mv.to);
      }
      p.add_transition(from, key.input, top, to, std::move(push));
    }
  }
  for (const auto& q : peeks) {
    for (const auto& g : m.stack_alphabet) p.add_transition(peek_state(q), std::nullopt, g, use(top_state(q, g)), {g});
    p.add_transition(peek_state(q), std::nullopt, p.start_symbol, use(top_state(q, std::nullopt)), {p.start_symbol});
  }

  for (const auto& [key, v] : m.end_final) {
    if (v != EndVerdict::Accept) continue;
    // A deterministic machine never reads the end-marker where it can still
    // make an epsilon move.
    if (m.deterministic() && m.transitions.contains(MidKey{1, key.state, std::nullopt, key.stack})) continue;
    p.final_states.insert(use(top_state(key.state, key.stack)));
  }
  return p;
}

namespace {

Mode mode_from(const std::string& s, const std::string& where) {
  if (s == "deterministic") return Mode::Deterministic;
  if (s == "nondeterministic") return Mode::Nondeterministic;
  throw ParseError(where + ": unknown mode '" + s + "'");
}

}  // namespace

Json pda_to_json(const PushdownAutomaton& p) {
  Json j;
  j["mode"] = to_string(p.mode);
  j["states"] = p.states;
  j["initial"] = p.initial;
  j["input_alphabet"] = p.input_alphabet;
  j["stack_alphabet"] = p.stack_alphabet;
  j["push_orientation"] = std::string(kPushOrientation);
  j["start_symbol"] = p.start_symbol;
  j["final_states"] = std::vector<State>(p.final_states.begin(), p.final_states.end());
  Json tr = Json::array();
  for (const auto& [key, moves] : p.transitions)
    for (const auto& mv : moves) {
      Json t;
      t["state"] = key.state;
      t["input"] = key.input ? *key.input : std::string("eps");
      t["stack"] = key.top;
      t["to"] = mv.to;
      t["push"] = mv.push;
      tr.push_back(std::move(t));
    }
  j["transitions"] = std::move(tr);
  return j;
}

PushdownAutomaton pda_from_json(const Json& j) {
  using namespace io;
  const std::string root = "pda";
  PushdownAutomaton p;
  p.mode = mode_from(get_string(j, "mode", root), root + ".mode");
  p.states = get_strings(j, "states", root);
  p.initial = get_string(j, "initial", root);
  p.input_alphabet = get_strings(j, "input_alphabet", root);
  p.stack_alphabet = get_strings(j, "stack_alphabet", root);
  if (j.contains("push_orientation") && j["push_orientation"] != std::string(kPushOrientation))
    throw ParseError(root + ".push_orientation: only '" + std::string(kPushOrientation) + "' is supported");
  p.start_symbol = get_string(j, "start_symbol", root);
  for (const auto& f : get_strings(j, "final_states", root)) p.final_states.insert(f);
  const auto& tr = field(j, "transitions", root);
  if (!tr.is_array()) throw ParseError(root + ".transitions: expected an array");
  for (std::size_t i = 0; i < tr.size(); ++i) {
    const std::string where = root + ".transitions[" + std::to_string(i) + "]";
    const auto& t = tr[i];
    const auto in = get_string(t, "input", where);
    p.add_transition(get_string(t, "state", where), in == "eps" ? InputKey{} : InputKey{in},
                     get_string(t, "stack", where), get_string(t, "to", where),
                     as_word(field(t, "push", where), where + ".push"));
  }
  auto errs = validate_pda(p);
  if (!errs.empty()) throw ParseError(root + ": " + errs.front());
  return p;
}

std::string dump_pda(const PushdownAutomaton& p) { return pda_to_json(p).dump(2) + "\n"; }

PushdownAutomaton parse_pda(std::string_view text) { return pda_from_json(io::parse_document(text)); }

}  // namespace mpa
