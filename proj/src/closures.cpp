#include "multipass/closures.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <set>

namespace mpa {

namespace {

void require_same_interface(const MultipassAutomaton& a, const MultipassAutomaton& b, const char* op) {
  const std::set<Symbol> sa(a.input_alphabet.begin(), a.input_alphabet.end());
  const std::set<Symbol> sb(b.input_alphabet.begin(), b.input_alphabet.end());
  if (sa != sb) throw PreconditionError(std::string(op) + ": input alphabets differ");
  if (a.mode != b.mode) throw PreconditionError(std::string(op) + ": modes differ");
}

MultipassAutomaton completed(const MultipassAutomaton& m, const std::string& note,
                             std::vector<std::string>* notes) {
  if (!m.deterministic() || is_complete(m)) return m;
  notes->push_back(note);
  return make_complete(m);
}

enum class Combine { Union, Intersection };

MultipassAutomaton sequential(const MultipassAutomaton& a, const MultipassAutomaton& b, Combine how) {
  const char* op = how == Combine::Union ? "union" : "intersection";
  require_same_interface(a, b, op);
  require_valid(a, op);
  require_valid(b, op);

  MultipassAutomaton out;
  const auto m1 = completed(a, "first operand completed before " + std::string(op), &out.notes);
  const auto m2 = completed(b, "second operand completed before " + std::string(op), &out.notes);
  const int k1 = m1.passes;
  const bool det = m1.deterministic();
  const bool skip_route = !det && how == Combine::Union;

  out.passes = m1.passes + m2.passes;
  out.mode = m1.mode;
  out.input_alphabet = m1.input_alphabet;
  out.stack_alphabet = m1.stack_alphabet;
  for (const auto& g : m2.stack_alphabet)
    if (std::find(out.stack_alphabet.begin(), out.stack_alphabet.end(), g) == out.stack_alphabet.end())
      out.stack_alphabet.push_back(g);

  auto r1 = [](const State& q) { return "1." + q; };
  auto r2 = [](const State& q) { return "2." + q; };
  for (const auto& q : m1.states) out.states.push_back(r1(q));
  for (const auto& q : m2.states) out.states.push_back(r2(q));
  const State init2 = r2(m2.initial);
  const State sink = how == Combine::Union ? "$acc" : "$rej";
  out.states.push_back(sink);
  out.initial = r1(m1.initial);

  for (const auto& [key, moves] : m1.transitions)
    for (const auto& mv : moves) out.add_transition(key.pass, r1(key.state), key.input, key.stack, r1(mv.to), mv.push);
  for (const auto& [key, targets] : m1.end_nonfinal)
    for (const auto& t : targets) out.add_end(key.pass, r1(key.state), key.stack, r1(t));

  auto decide = [&](EndVerdict v) {
    const bool accepted = v == EndVerdict::Accept;
    if (how == Combine::Union) return accepted ? sink : init2;
    return accepted ? init2 : sink;
  };
  for (const auto& [key, v] : m1.end_final) out.add_end(k1, r1(key.state), key.stack, decide(v));

  for (const auto& [key, moves] : m2.transitions)
    for (const auto& mv : moves)
      out.add_transition(key.pass + k1, r2(key.state), key.input, key.stack, r2(mv.to), mv.push);
  for (const auto& [key, targets] : m2.end_nonfinal)
    for (const auto& t : targets) out.add_end(key.pass + k1, r2(key.state), key.stack, r2(t));
  for (const auto& [key, v] : m2.end_final) out.set_final(r2(key.state), key.stack, v);

  // The sink starts every pass on the empty stack and never pushes.
  for (int j = k1 + 1; j <= out.passes; ++j) {
    for (const auto& s : out.input_alphabet) out.add_transition(j, sink, s, std::nullopt, sink, {});
    if (j < out.passes) out.add_end(j, sink, std::nullopt, sink);
  }
  out.set_final(sink, std::nullopt, how == Combine::Union ? EndVerdict::Accept : out.negative());

  if (skip_route) {
    // A nondeterministic m1 may have no computation reaching the end of its
    // last pass. A fresh initial state either starts m1 or reads through
    // the first k1 passes untouched so that m2 always gets to run.
    const State init = "$init", skip = "$skip";
    out.states.push_back(init);
    out.states.push_back(skip);
    out.initial = init;
    for (const auto& s : out.input_alphabet) {
      out.add_transition(1, init, s, std::nullopt, skip, {});
      auto it = m1.transitions.find(MidKey{1, m1.initial, s, std::nullopt});
      if (it != m1.transitions.end())
        for (const auto& mv : it->second) out.add_transition(1, init, s, std::nullopt, r1(mv.to), mv.push);
    }
    if (k1 > 1) {
      out.add_end(1, init, std::nullopt, skip);
      auto it = m1.end_nonfinal.find(EndKey{1, m1.initial, std::nullopt});
      if (it != m1.end_nonfinal.end())
        for (const auto& t : it->second) out.add_end(1, init, std::nullopt, r1(t));
    } else {
      out.add_end(1, init, std::nullopt, init2);
      out.add_end(1, init, std::nullopt, decide(m1.end_final.at(FinalKey{m1.initial, std::nullopt})));
    }
    for (int j = 1; j <= k1; ++j) {
      for (const auto& s : out.input_alphabet) out.add_transition(j, skip, s, std::nullopt, skip, {});
      out.add_end(j, skip, std::nullopt, j < k1 ? skip : init2);
    }
  }
  out.fill_final();
  return out;
}

}  // namespace

MultipassAutomaton complement(const MultipassAutomaton& m) {
  if (!m.deterministic())
    throw PreconditionError("complement: only deterministic machines can be complemented");
  require_valid(m, "complement");
  MultipassAutomaton out = m;
  if (!is_complete(m)) {
    out = make_complete(m);
    out.notes.push_back("completed before complementation");
  }
  for (auto& [key, v] : out.end_final) v = v == EndVerdict::Accept ? EndVerdict::Reject : EndVerdict::Accept;
  return out;
}

MultipassAutomaton machine_union(const MultipassAutomaton& m1, const MultipassAutomaton& m2) {
  return sequential(m1, m2, Combine::Union);
}

MultipassAutomaton machine_intersection(const MultipassAutomaton& m1, const MultipassAutomaton& m2) {
  return sequential(m1, m2, Combine::Intersection);
}

std::size_t profile_candidate_bound(const MultipassAutomaton& m) {
  constexpr auto kMax = std::numeric_limits<std::size_t>::max();
  const std::size_t q = m.states.size();
  const std::size_t per = q * (m.stack_alphabet.size() + 1) * q;
  std::size_t total = 1;
  for (int j = 0; j < m.passes; ++j) {
    if (per != 0 && total > kMax / per) return kMax;
    total *= per;
  }
  return total;
}

ProfileDecomposition profile_decomposition(const MultipassAutomaton& m) {
  require_valid(m, "profile_decomposition");
  const auto keys = m.stack_keys();

  // Within-pass successor graph, one per pass.
  std::vector<std::map<State, std::set<State>>> succ(m.passes + 1);
  for (const auto& [key, moves] : m.transitions)
    for (const auto& mv : moves) succ[key.pass][key.state].insert(mv.to);
  auto reachable = [&](int pass, const State& from) {
    std::set<State> seen{from};
    std::vector<State> todo{from};
    while (!todo.empty()) {
      auto q = todo.back();
      todo.pop_back();
      auto it = succ[pass].find(q);
      if (it == succ[pass].end()) continue;
      for (const auto& t : it->second)
        if (seen.insert(t).second) todo.push_back(t);
    }
    return seen;
  };

  ProfileDecomposition out;
  std::map<std::pair<int, ProfileTriple>, std::size_t> ids;
  auto machine_id = [&](int pass, const ProfileTriple& t) {
    auto [it, fresh] = ids.try_emplace({pass, t}, out.machines.size());
    if (!fresh) return it->second;
    MultipassAutomaton one;
    one.passes = 1;
    one.mode = m.mode;
    one.states = m.states;
    one.initial = t.entry;
    one.input_alphabet = m.input_alphabet;
    one.stack_alphabet = m.stack_alphabet;
    for (const auto& [key, moves] : m.transitions)
      if (key.pass == pass) {
        auto k = key;
        k.pass = 1;
        one.transitions.emplace(k, moves);
      }
    one.fill_final();
    one.set_final(t.exit, t.top, EndVerdict::Accept);
    out.machines.push_back(prune_unreachable(one));
    return it->second;
  };

  Profile current;
  std::vector<std::size_t> current_ids;
  auto extend = [&](auto&& self, int pass, const State& entry) -> void {
    for (const auto& exit : reachable(pass, entry))
      for (const auto& top : keys) {
        ProfileTriple t{entry, top, exit};
        if (pass < m.passes) {
          auto it = m.end_nonfinal.find(EndKey{pass, exit, top});
          if (it == m.end_nonfinal.end()) continue;
          std::set<State> next(it->second.begin(), it->second.end());
          for (const auto& nx : next) {
            current.triples.push_back(t);
            current_ids.push_back(machine_id(pass, t));
            self(self, pass + 1, nx);
            current.triples.pop_back();
            current_ids.pop_back();
          }
        } else {
          auto it = m.end_final.find(FinalKey{exit, top});
          if (it == m.end_final.end() || it->second != EndVerdict::Accept) continue;
          current.triples.push_back(t);
          current_ids.push_back(machine_id(pass, t));
          out.components.push_back({current, current_ids});
          current.triples.pop_back();
          current_ids.pop_back();
        }
      }
  };
  extend(extend, 1, m.initial);
  return out;
}

}  // namespace mpa
