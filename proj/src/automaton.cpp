#include "multipass/automaton.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>
#include <tuple>
#include <unordered_map>
#include <unordered_set>

namespace mpa {

std::string to_string(Mode m) {
  return m == Mode::Deterministic ? "deterministic" : "nondeterministic";
}

std::string to_string(EndVerdict v) {
  switch (v) {
    case EndVerdict::Accept: return "accept";
    case EndVerdict::Reject: return "reject";
    case EndVerdict::NoDecision: return "nodecision";
  }
  return "?";
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Accept: return "accept";
    case Verdict::Reject: return "reject";
    case Verdict::NoDecision: return "nodecision";
    case Verdict::BudgetExceeded: return "budget-exceeded";
  }
  return "?";
}

// --- MultipassAutomaton -----------------------------------------------------

std::vector<StackKey> MultipassAutomaton::stack_keys() const {
  std::vector<StackKey> keys;
  keys.reserve(stack_alphabet.size() + 1);
  keys.emplace_back(std::nullopt);
  for (const auto& g : stack_alphabet) keys.emplace_back(g);
  return keys;
}

bool MultipassAutomaton::has_state(const State& q) const {
  return std::find(states.begin(), states.end(), q) != states.end();
}

void MultipassAutomaton::add_state(const State& q) {
  if (!has_state(q)) states.push_back(q);
}

void MultipassAutomaton::add_stack_symbol(const Symbol& s) {
  if (std::find(stack_alphabet.begin(), stack_alphabet.end(), s) == stack_alphabet.end())
    stack_alphabet.push_back(s);
}

void MultipassAutomaton::add_transition(int pass, const State& from, InputKey input, StackKey key,
                                        const State& to, Word push) {
  auto& moves = transitions[MidKey{pass, from, std::move(input), std::move(key)}];
  Move mv{to, std::move(push)};
  if (std::find(moves.begin(), moves.end(), mv) == moves.end()) moves.push_back(std::move(mv));
}

void MultipassAutomaton::add_end(int pass, const State& from, StackKey key, const State& to) {
  auto& targets = end_nonfinal[EndKey{pass, from, std::move(key)}];
  if (std::find(targets.begin(), targets.end(), to) == targets.end()) targets.push_back(to);
}

void MultipassAutomaton::set_final(const State& q, StackKey key, EndVerdict v) {
  end_final[FinalKey{q, std::move(key)}] = v;
}

void MultipassAutomaton::fill_final() {
  const auto keys = stack_keys();
  for (const auto& q : states)
    for (const auto& k : keys) end_final.try_emplace(FinalKey{q, k}, negative());
}

std::map<std::pair<int, State>, std::set<StackKey>> reachable_tops(const MultipassAutomaton& m) {
  // A pop may expose the empty stack or any symbol that some pass-j move
  // leaves below the new top.
  std::vector<std::set<StackKey>> exposed(m.passes + 2, std::set<StackKey>{std::nullopt});
  for (const auto& [key, moves] : m.transitions)
    if (key.pass >= 1 && key.pass <= m.passes)
      for (const auto& mv : moves)
        for (std::size_t i = 0; i + 1 < mv.push.size(); ++i) exposed[key.pass].insert(mv.push[i]);

  std::map<std::pair<int, State>, std::set<StackKey>> tops;
  std::vector<std::tuple<int, State, StackKey>> todo;
  auto add = [&](int pass, const State& q, const StackKey& k) {
    if (tops[{pass, q}].insert(k).second) todo.emplace_back(pass, q, k);
  };
  add(1, m.initial, std::nullopt);
  while (!todo.empty()) {
    auto [j, q, k] = todo.back();
    todo.pop_back();
    std::vector<InputKey> inputs{std::nullopt};
    inputs.insert(inputs.end(), m.input_alphabet.begin(), m.input_alphabet.end());
    for (const auto& in : inputs) {
      auto it = m.transitions.find(MidKey{j, q, in, k});
      if (it == m.transitions.end()) continue;
      for (const auto& mv : it->second) {
        if (!mv.push.empty())
          add(j, mv.to, mv.push.back());
        else if (!k)
          add(j, mv.to, std::nullopt);
        else
          for (const auto& e : exposed[j]) add(j, mv.to, e);
      }
    }
    auto e = m.end_nonfinal.find(EndKey{j, q, k});
    if (e != m.end_nonfinal.end())
      for (const auto& t : e->second) add(j + 1, t, std::nullopt);
  }
  return tops;
}

std::set<std::pair<int, State>> reachable_pass_states(const MultipassAutomaton& m) {
  std::set<std::pair<int, State>> out;
  for (const auto& [jq, keys] : reachable_tops(m)) out.insert(jq);
  return out;
}

std::vector<StackKey> live_stack_keys(const MultipassAutomaton& m, int pass) {
  std::set<Symbol> pushed;
  for (const auto& [key, moves] : m.transitions)
    if (key.pass == pass)
      for (const auto& mv : moves) pushed.insert(mv.push.begin(), mv.push.end());
  std::vector<StackKey> keys{std::nullopt};
  for (const auto& g : m.stack_alphabet)
    if (pushed.contains(g)) keys.emplace_back(g);
  return keys;
}

State fresh_state(const MultipassAutomaton& m, std::string base) {
  std::set<State> taken(m.states.begin(), m.states.end());
  return fresh_symbol(std::move(base), taken);
}

// --- validation -------------------------------------------------------------

namespace {

std::string key_text(const StackKey& k) { return k ? *k : "empty"; }
std::string input_text(const InputKey& k) { return k ? *k : "eps"; }

std::string where_mid(const MidKey& k) {
  std::ostringstream os;
  os << "(" << k.pass << ", " << k.state << ", " << input_text(k.input) << ", "
     << key_text(k.stack) << ")";
  return os.str();
}

std::string where_triple(int pass, const State& q, const StackKey& k) {
  std::ostringstream os;
  os << "(" << pass << ", " << q << ", " << key_text(k) << ")";
  return os.str();
}

}  // namespace

bool ValidationReport::has(std::string_view kind) const {
  return std::any_of(errors.begin(), errors.end(), [&](const Violation& v) { return v.kind == kind; });
}

std::string ValidationReport::to_string() const {
  std::ostringstream os;
  for (const auto& v : errors) os << "error " << v.kind << " at " << v.where << ": " << v.message << "\n";
  for (const auto& v : warnings)
    os << "warning " << v.kind << " at " << v.where << ": " << v.message << "\n";
  return os.str();
}

ValidationReport validate(const MultipassAutomaton& m, bool with_warnings) {
  ValidationReport rep;
  auto err = [&](std::string kind, std::string where, std::string msg) {
    rep.errors.push_back({std::move(kind), std::move(where), std::move(msg)});
  };
  auto warn = [&](std::string kind, std::string where, std::string msg) {
    rep.warnings.push_back({std::move(kind), std::move(where), std::move(msg)});
  };

  const std::set<State> Q(m.states.begin(), m.states.end());
  const std::set<Symbol> Sigma(m.input_alphabet.begin(), m.input_alphabet.end());
  const std::set<Symbol> Gamma(m.stack_alphabet.begin(), m.stack_alphabet.end());
  const bool det = m.deterministic();

  if (m.passes < 1) err("pass-count", "passes", "pass count must be positive");
  if (Q.size() != m.states.size()) err("duplicate", "states", "duplicate state names");
  if (Sigma.size() != m.input_alphabet.size()) err("duplicate", "input_alphabet", "duplicate symbols");
  if (Gamma.size() != m.stack_alphabet.size()) err("duplicate", "stack_alphabet", "duplicate symbols");
  if (!Q.contains(m.initial)) err("unknown-state", "initial", "initial state '" + m.initial + "' not in Q");
  for (const auto& s : m.input_alphabet)
    if (!Gamma.contains(s)) err("alphabet", s, "input symbol missing from the stack alphabet");
  for (const auto* alpha : {&m.input_alphabet, &m.stack_alphabet})
    for (const auto& s : *alpha)
      if (s.empty() || s == "eps" || s == "empty")
        err("reserved-name", s.empty() ? "\"\"" : s, "symbol name is reserved");

  auto check_key = [&](const StackKey& k, const std::string& where) {
    if (k && !Gamma.contains(*k)) err("unknown-symbol", where, "stack key '" + *k + "' not in Gamma");
  };

  for (const auto& [key, moves] : m.transitions) {
    const auto where = where_mid(key);
    if (key.pass < 1 || key.pass > m.passes) err("bad-pass", where, "pass out of range");
    if (!Q.contains(key.state)) err("unknown-state", where, "state not in Q");
    if (key.input && !Sigma.contains(*key.input)) err("unknown-symbol", where, "input not in Sigma");
    check_key(key.stack, where);
    if (!key.input && !key.stack)
      err("empty-stack-epsilon", where, "epsilon transition keyed on the empty stack");
    if (moves.empty()) warn("empty-image", where, "transition with no targets");
    if (det && moves.size() > 1) err("determinism", where, "deterministic transition with several targets");
    for (const auto& mv : moves) {
      if (!Q.contains(mv.to)) err("unknown-state", where, "target '" + mv.to + "' not in Q");
      for (const auto& g : mv.push)
        if (!Gamma.contains(g)) err("unknown-symbol", where, "pushed symbol '" + g + "' not in Gamma");
    }
  }

  if (det) {
    // epsilon versus letter exclusivity per (pass, state, key)
    for (const auto& [key, moves] : m.transitions) {
      if (key.input) continue;
      for (const auto& s : m.input_alphabet) {
        auto it = m.transitions.find(MidKey{key.pass, key.state, s, key.stack});
        if (it != m.transitions.end() && !it->second.empty()) {
          err("determinism", where_triple(key.pass, key.state, key.stack),
              "both an epsilon transition and a transition reading '" + s + "'");
          break;
        }
      }
    }
  }

  for (const auto& [key, targets] : m.end_nonfinal) {
    const auto where = where_triple(key.pass, key.state, key.stack);
    if (key.pass < 1 || key.pass >= m.passes) err("bad-pass", where, "end-marker map on a final or invalid pass");
    if (!Q.contains(key.state)) err("unknown-state", where, "state not in Q");
    check_key(key.stack, where);
    if (det && targets.size() > 1) err("determinism", where, "end-marker map has several targets");
    for (const auto& t : targets)
      if (!Q.contains(t)) err("unknown-state", where, "target '" + t + "' not in Q");
  }

  for (const auto& [key, v] : m.end_final) {
    const auto where = "(" + key.state + ", " + key_text(key.stack) + ")";
    if (!Q.contains(key.state)) err("unknown-state", where, "state not in Q");
    check_key(key.stack, where);
    if (det && v == EndVerdict::NoDecision) err("verdict-mode", where, "nodecision in a deterministic machine");
    if (!det && v == EndVerdict::Reject) err("verdict-mode", where, "reject in a nondeterministic machine");
  }

  const auto keys = m.stack_keys();
  for (const auto& q : m.states)
    for (const auto& k : keys)
      if (!m.end_final.contains(FinalKey{q, k}))
        err("final-not-total", "(" + q + ", " + key_text(k) + ")", "final end-marker map is not total");

  if (det && with_warnings) {
    for (const auto& [jq, tops] : reachable_tops(m))
      if (jq.first >= 1 && jq.first <= m.passes && Q.contains(jq.second))
        for (const auto& k : tops) {
          const auto& [j, q] = jq;
          const bool eps = k && m.transitions.contains(MidKey{j, q, std::nullopt, k});
          if (!eps)
            for (const auto& s : m.input_alphabet)
              if (!m.transitions.contains(MidKey{j, q, s, k})) {
                warn("partial", where_triple(j, q, k), "no transition reading '" + s + "'");
                break;
              }
          if (j < m.passes && !m.end_nonfinal.contains(EndKey{j, q, k}))
            warn("partial", where_triple(j, q, k), "no end-marker transition");
        }
  }
  return rep;
}

void require_valid(const MultipassAutomaton& m, std::string_view context) {
  auto rep = validate(m, false);
  if (!rep.ok()) throw PreconditionError(std::string(context) + ": invalid machine\n" + rep.to_string());
}

// --- compiled form ----------------------------------------------------------

namespace detail {

struct Range {
  std::uint32_t begin = 0;
  std::uint32_t end = 0;
  bool empty() const { return begin == end; }
};

struct Target {
  int to = 0;
  std::uint32_t push_begin = 0;
  std::uint32_t push_len = 0;
};

struct CompiledMachine {
  int passes = 1;
  bool det = true;
  int nQ = 0, nS = 0, nG = 0;
  int initial = 0;
  std::vector<State> state_names;
  std::vector<Symbol> stack_names;
  std::unordered_map<Symbol, int> input_index;

  std::vector<Range> mid;
  std::vector<Target> targets;
  std::vector<int> push_pool;
  std::vector<Range> ends;
  std::vector<int> end_pool;
  std::vector<std::int8_t> finals;  // -1 missing, else EndVerdict

  std::size_t mid_at(int pass0, int q, int in, int key) const {
    return ((static_cast<std::size_t>(pass0) * nQ + q) * (nS + 1) + in) * (nG + 1) + key;
  }
  std::size_t end_at(int pass0, int q, int key) const {
    return (static_cast<std::size_t>(pass0) * nQ + q) * (nG + 1) + key;
  }
  std::size_t final_at(int q, int key) const { return static_cast<std::size_t>(q) * (nG + 1) + key; }

  Range mid_range(int pass0, int q, int in, int key) const { return mid[mid_at(pass0, q, in, key)]; }
  std::span<const int> push_of(const Target& t) const {
    return {push_pool.data() + t.push_begin, t.push_len};
  }
  Word stack_word(const std::vector<int>& st) const {
    Word w;
    w.reserve(st.size());
    for (int g : st) w.push_back(stack_names[g]);
    return w;
  }
};

namespace {

std::shared_ptr<const CompiledMachine> compile(const MultipassAutomaton& m) {
  auto res = validate(m, false);
  if (!res.ok()) throw PreconditionError("cannot run an invalid machine\n" + res.to_string());

  auto c = std::make_shared<CompiledMachine>();
  c->passes = m.passes;
  c->det = m.deterministic();
  c->nQ = static_cast<int>(m.states.size());
  c->nS = static_cast<int>(m.input_alphabet.size());
  c->nG = static_cast<int>(m.stack_alphabet.size());
  c->state_names = m.states;
  c->stack_names = m.stack_alphabet;

  std::unordered_map<State, int> qi;
  std::unordered_map<Symbol, int> gi;
  for (int i = 0; i < c->nQ; ++i) qi.emplace(m.states[i], i);
  for (int i = 0; i < c->nS; ++i) c->input_index.emplace(m.input_alphabet[i], i);
  for (int i = 0; i < c->nG; ++i) gi.emplace(m.stack_alphabet[i], i);
  c->initial = qi.at(m.initial);
  auto key_of = [&](const StackKey& k) { return k ? gi.at(*k) + 1 : 0; };

  const std::size_t mid_size =
      static_cast<std::size_t>(c->passes) * c->nQ * (c->nS + 1) * (c->nG + 1);
  if (mid_size > (std::size_t{1} << 31)) throw std::length_error("machine too large to compile");
  c->mid.assign(mid_size, {});
  for (const auto& [key, moves] : m.transitions) {
    Range r;
    r.begin = static_cast<std::uint32_t>(c->targets.size());
    for (const auto& mv : moves) {
      Target t;
      t.to = qi.at(mv.to);
      t.push_begin = static_cast<std::uint32_t>(c->push_pool.size());
      t.push_len = static_cast<std::uint32_t>(mv.push.size());
      for (const auto& g : mv.push) c->push_pool.push_back(gi.at(g));
      c->targets.push_back(t);
    }
    r.end = static_cast<std::uint32_t>(c->targets.size());
    const int in = key.input ? c->input_index.at(*key.input) + 1 : 0;
    c->mid[c->mid_at(key.pass - 1, qi.at(key.state), in, key_of(key.stack))] = r;
  }

  c->ends.assign(static_cast<std::size_t>(c->passes) * c->nQ * (c->nG + 1), {});
  for (const auto& [key, tg] : m.end_nonfinal) {
    Range r;
    r.begin = static_cast<std::uint32_t>(c->end_pool.size());
    for (const auto& t : tg) c->end_pool.push_back(qi.at(t));
    r.end = static_cast<std::uint32_t>(c->end_pool.size());
    c->ends[c->end_at(key.pass - 1, qi.at(key.state), key_of(key.stack))] = r;
  }

  c->finals.assign(static_cast<std::size_t>(c->nQ) * (c->nG + 1), -1);
  for (const auto& [key, v] : m.end_final)
    c->finals[c->final_at(qi.at(key.state), key_of(key.stack))] = static_cast<std::int8_t>(v);
  return c;
}

RunTrace run_deterministic(const CompiledMachine& c, std::span<const int> w, std::uint64_t budget) {
  RunTrace tr;
  tr.steps_per_pass.assign(c.passes, 0);
  std::vector<int> stack;
  stack.reserve(64);
  int q = c.initial;
  const std::size_t n = w.size();

  auto halt = [&](Verdict v) {
    tr.verdict = v;
    tr.steps_total = 0;
    for (auto s : tr.steps_per_pass) tr.steps_total += s;
    return tr;
  };
  std::uint64_t total = 0;

  for (int p = 0; p < c.passes; ++p) {
    stack.clear();
    std::size_t pos = 0;
    auto& steps = tr.steps_per_pass[p];
    while (true) {
      if (total >= budget) return halt(Verdict::BudgetExceeded);
      const int key = stack.empty() ? 0 : stack.back() + 1;
      Range r;
      bool reading = false;
      if (key != 0) r = c.mid_range(p, q, 0, key);
      if (r.empty() && pos < n) {
        r = c.mid_range(p, q, w[pos] + 1, key);
        reading = true;
      }
      if (!r.empty()) {
        const Target& t = c.targets[r.begin];
        if (key != 0) stack.pop_back();
        auto push = c.push_of(t);
        stack.insert(stack.end(), push.begin(), push.end());
        q = t.to;
        if (reading) ++pos;
        ++steps;
        ++total;
        continue;
      }
      if (pos < n) return halt(Verdict::Reject);  // undefined mid-pass
      ++steps;
      ++total;
      if (p + 1 < c.passes) {
        Range e = c.ends[c.end_at(p, q, key)];
        if (e.empty()) return halt(Verdict::Reject);
        q = c.end_pool[e.begin];
        break;
      }
      const auto v = c.finals[c.final_at(q, key)];
      return halt(v == static_cast<std::int8_t>(EndVerdict::Accept) ? Verdict::Accept : Verdict::Reject);
    }
  }
  return halt(Verdict::Reject);
}

struct CfgKey {
  int pass;
  int state;
  std::uint32_t pos;
  std::vector<int> stack;
  bool operator==(const CfgKey&) const = default;
};

struct CfgHash {
  std::size_t operator()(const CfgKey& k) const {
    std::size_t h = std::hash<int>{}(k.pass) * 1000003u ^ std::hash<int>{}(k.state);
    h = h * 1000003u ^ k.pos;
    for (int g : k.stack) h = h * 1000003u ^ static_cast<std::size_t>(g + 1);
    return h;
  }
};

RunTrace run_nondeterministic(const CompiledMachine& c, std::span<const int> w, std::uint64_t budget) {
  RunTrace tr;
  tr.steps_per_pass.assign(c.passes, 0);
  const std::uint32_t n = static_cast<std::uint32_t>(w.size());

  struct Node {
    CfgKey cfg;
    int parent;
  };
  std::vector<Node> nodes;
  std::unordered_set<CfgKey, CfgHash> seen;
  std::vector<int> todo;
  std::uint64_t total = 0;

  auto finish = [&](Verdict v) {
    tr.verdict = v;
    tr.steps_total = total;
    return tr;
  };
  auto witness_of = [&](int id) {
    std::vector<Configuration> path;
    for (int i = id; i >= 0; i = nodes[i].parent) {
      const auto& k = nodes[i].cfg;
      path.push_back({k.pass + 1, c.state_names[k.state], k.pos, c.stack_word(k.stack)});
    }
    std::reverse(path.begin(), path.end());
    return path;
  };

  CfgKey root{0, c.initial, 0, {}};
  seen.insert(root);
  nodes.push_back({root, -1});
  todo.push_back(0);

  std::vector<CfgKey> succ;
  while (!todo.empty()) {
    const int id = todo.back();
    todo.pop_back();
    const CfgKey cur = nodes[id].cfg;
    const int key = cur.stack.empty() ? 0 : cur.stack.back() + 1;
    succ.clear();

    auto apply = [&](Range r, bool reading) {
      for (auto i = r.begin; i < r.end; ++i) {
        const Target& t = c.targets[i];
        CfgKey nx{cur.pass, t.to, cur.pos + (reading ? 1u : 0u), cur.stack};
        if (key != 0) nx.stack.pop_back();
        auto push = c.push_of(t);
        nx.stack.insert(nx.stack.end(), push.begin(), push.end());
        succ.push_back(std::move(nx));
      }
    };
    if (key != 0) apply(c.mid_range(cur.pass, cur.state, 0, key), false);
    if (cur.pos < n) apply(c.mid_range(cur.pass, cur.state, w[cur.pos] + 1, key), true);
    if (cur.pos == n) {
      if (cur.pass + 1 < c.passes) {
        Range e = c.ends[c.end_at(cur.pass, cur.state, key)];
        for (auto i = e.begin; i < e.end; ++i) succ.push_back({cur.pass + 1, c.end_pool[i], 0, {}});
      } else if (c.finals[c.final_at(cur.state, key)] == static_cast<std::int8_t>(EndVerdict::Accept)) {
        ++total;
        ++tr.steps_per_pass[cur.pass];
        tr.witness = witness_of(id);
        return finish(Verdict::Accept);
      }
    }

    for (auto& nx : succ) {
      if (total >= budget) return finish(Verdict::BudgetExceeded);
      ++total;
      ++tr.steps_per_pass[cur.pass];
      if (seen.insert(nx).second) {
        nodes.push_back({std::move(nx), id});
        todo.push_back(static_cast<int>(nodes.size()) - 1);
      }
    }
  }
  return finish(Verdict::NoDecision);
}

}  // namespace
}  // namespace detail

Runner::Runner(const MultipassAutomaton& m) : compiled_(detail::compile(m)) {}

std::vector<int> Runner::encode(const Word& w) const {
  std::vector<int> out;
  out.reserve(w.size());
  for (const auto& s : w) {
    auto it = compiled_->input_index.find(s);
    if (it == compiled_->input_index.end())
      throw PreconditionError("symbol '" + s + "' is not in the input alphabet");
    out.push_back(it->second);
  }
  return out;
}

RunTrace Runner::run_encoded(std::span<const int> w, std::uint64_t budget) const {
  return compiled_->det ? detail::run_deterministic(*compiled_, w, budget)
                        : detail::run_nondeterministic(*compiled_, w, budget);
}

RunTrace Runner::run(const Word& w, std::uint64_t budget) const { return run_encoded(encode(w), budget); }

bool Runner::accepts(const Word& w, std::uint64_t budget) const {
  auto tr = run(w, budget);
  if (tr.verdict == Verdict::BudgetExceeded)
    throw std::runtime_error("step budget exhausted on '" + format_word(w) + "'");
  return tr.accepted();
}

RunTrace run(const MultipassAutomaton& m, const Word& w, std::uint64_t budget) {
  return Runner(m).run(w, budget);
}

// --- epsilon analysis -------------------------------------------------------

EpsilonAnalysis analyze_epsilon_runs(const MultipassAutomaton& m) {
  if (!m.deterministic()) throw PreconditionError("epsilon-run analysis needs a deterministic machine");
  const auto cptr = detail::compile(m);
  const auto& c = *cptr;
  EpsilonAnalysis out;

  constexpr std::uint64_t kHardCap = 50'000'000;
  std::vector<int> active_count(static_cast<std::size_t>(c.nQ) * c.nG, 0);
  struct Entry {
    std::size_t pair;
    std::size_t height;
  };
  std::vector<Entry> active;
  std::vector<int> stack;

  for (int p = 0; p < c.passes; ++p)
    for (int q0 = 0; q0 < c.nQ; ++q0)
      for (int g0 = 0; g0 < c.nG; ++g0) {
        if (c.mid_range(p, q0, 0, g0 + 1).empty()) continue;
        stack.assign(1, g0);
        int q = q0;
        std::size_t steps = 0;
        bool divergent = false;
        for (auto& e : active) active_count[e.pair] = 0;
        active.clear();
        while (!stack.empty()) {
          const int top = stack.back();
          const auto r = c.mid_range(p, q, 0, top + 1);
          if (r.empty()) break;  // needs input
          while (!active.empty() && active.back().height > stack.size()) {
            --active_count[active.back().pair];
            active.pop_back();
          }
          const std::size_t pair = static_cast<std::size_t>(q) * c.nG + top;
          if (active_count[pair] > 0) {
            divergent = true;
            break;
          }
          active.push_back({pair, stack.size()});
          ++active_count[pair];

          const auto& t = c.targets[r.begin];
          stack.pop_back();
          auto push = c.push_of(t);
          stack.insert(stack.end(), push.begin(), push.end());
          q = t.to;
          if (++steps > kHardCap) throw std::runtime_error("epsilon-run analysis did not settle");
        }
        if (divergent)
          out.divergent.insert({p + 1, c.state_names[q0], c.stack_names[g0]});
        else
          out.max_convergent_run = std::max(out.max_convergent_run, steps);
      }
  return out;
}

std::set<EpsilonStart> divergence_analysis(const MultipassAutomaton& m) {
  return analyze_epsilon_runs(m).divergent;
}

namespace {

Word keep(const StackKey& k) { return k ? Word{*k} : Word{}; }

// Adds sink transitions for divergent starts and missing keys; returns false
// when nothing had to change.
bool complete_into(const MultipassAutomaton& m, MultipassAutomaton* out) {
  const auto analysis = analyze_epsilon_runs(m);
  const auto keys = m.stack_keys();
  State sink = fresh_state(m, "sink");
  bool changed = false;
  MultipassAutomaton res = m;

  std::vector<std::vector<StackKey>> live(m.passes + 1);
  for (int j = 1; j <= m.passes; ++j) live[j] = live_stack_keys(m, j);
  for (const auto& [jq, tops] : reachable_tops(m))
    for (const auto& k : tops) {
      const auto& [j, q] = jq;
      const bool eps = k && m.transitions.contains(MidKey{j, q, std::nullopt, k});
      if (eps && analysis.divergent.contains(EpsilonStart{j, q, *k})) {
        res.transitions[MidKey{j, q, std::nullopt, k}] = {Move{sink, keep(k)}};
        changed = true;
      }
      if (!eps)
        for (const auto& s : m.input_alphabet)
          if (!m.transitions.contains(MidKey{j, q, s, k})) {
            res.transitions[MidKey{j, q, s, k}] = {Move{sink, keep(k)}};
            changed = true;
          }
      if (j < m.passes && !m.end_nonfinal.contains(EndKey{j, q, k})) {
        res.end_nonfinal[EndKey{j, q, k}] = {sink};
        changed = true;
      }
    }
  for (const auto& q : m.states)
    for (const auto& k : keys)
      if (!m.end_final.contains(FinalKey{q, k})) {
        res.end_final[FinalKey{q, k}] = EndVerdict::Reject;
        changed = true;
      }
  if (!changed) return false;

  res.states.push_back(sink);
  for (int j = 1; j <= m.passes; ++j)
    for (const auto& k : live[j]) {
      for (const auto& s : m.input_alphabet) res.transitions[MidKey{j, sink, s, k}] = {Move{sink, keep(k)}};
      if (j < m.passes) res.end_nonfinal[EndKey{j, sink, k}] = {sink};
    }
  for (const auto& k : keys) res.end_final[FinalKey{sink, k}] = EndVerdict::Reject;
  if (out) *out = std::move(res);
  return true;
}

}  // namespace

bool is_complete(const MultipassAutomaton& m) {
  return m.deterministic() && !complete_into(m, nullptr);
}

MultipassAutomaton make_complete(const MultipassAutomaton& m) {
  if (!m.deterministic()) throw PreconditionError("make_complete needs a deterministic machine");
  require_valid(m, "make_complete");
  MultipassAutomaton out;
  if (!complete_into(m, &out)) return m;
  return out;
}

LinearBound linear_bound(const MultipassAutomaton& m) {
  LinearBound b;
  b.passes = m.passes;
  for (const auto& [key, moves] : m.transitions)
    for (const auto& mv : moves) b.max_push = std::max(b.max_push, mv.push.size());
  b.epsilon_bound = 1 + analyze_epsilon_runs(m).max_convergent_run;
  return b;
}

MultipassAutomaton prune_unreachable(const MultipassAutomaton& m) {
  std::map<State, std::vector<State>> succ;
  for (const auto& [key, moves] : m.transitions)
    for (const auto& mv : moves) succ[key.state].push_back(mv.to);
  for (const auto& [key, tg] : m.end_nonfinal)
    for (const auto& t : tg) succ[key.state].push_back(t);

  std::set<State> reach{m.initial};
  std::vector<State> todo{m.initial};
  while (!todo.empty()) {
    auto q = todo.back();
    todo.pop_back();
    for (const auto& t : succ[q])
      if (reach.insert(t).second) todo.push_back(t);
  }

  MultipassAutomaton out = m;
  out.states.clear();
  for (const auto& q : m.states)
    if (reach.contains(q)) out.states.push_back(q);
  std::erase_if(out.transitions, [&](const auto& kv) { return !reach.contains(kv.first.state); });
  std::erase_if(out.end_nonfinal, [&](const auto& kv) { return !reach.contains(kv.first.state); });
  std::erase_if(out.end_final, [&](const auto& kv) { return !reach.contains(kv.first.state); });
  return out;
}

}  // namespace mpa
