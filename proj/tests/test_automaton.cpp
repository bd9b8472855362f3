#include <sstream>

#include "doctest.h"
#include "multipass/automaton.hpp"
#include "multipass/machine_io.hpp"
#include "test_support.hpp"

using namespace mpa;

namespace {

MultipassAutomaton single_state_machine(Mode mode = Mode::Deterministic) {
  MultipassAutomaton m;
  m.mode = mode;
  m.states = {"q", "p"};
  m.initial = "q";
  m.input_alphabet = {"a"};
  m.stack_alphabet = {"a", "g"};
  m.fill_final();
  return m;
}

// Machine whose first letter pushes g, after which an epsilon move from
// (1, q, g) does whatever `move` says.
MultipassAutomaton epsilon_probe(Move move) {
  auto m = single_state_machine();
  m.states.push_back("r");
  m.add_transition(1, "r", "a", std::nullopt, "q", {"g"});
  m.add_transition(1, "q", std::nullopt, "g", move.to, move.push);
  m.initial = "r";
  m.fill_final();
  return m;
}

}  // namespace

TEST_CASE("validate reports determinism violations with their key") {
  auto m = single_state_machine();
  m.add_transition(1, "q", std::nullopt, "g", "q", {"g"});
  m.add_transition(1, "q", "a", "g", "q", {});
  auto rep = validate(m);
  CHECK(rep.has("determinism"));
  CHECK(rep.to_string().find("(1, q, g)") != std::string::npos);
}

TEST_CASE("validate rejects epsilon moves on the empty stack") {
  auto m = single_state_machine(Mode::Nondeterministic);
  m.add_transition(1, "q", std::nullopt, std::nullopt, "q", {"g"});
  CHECK(validate(m).has("empty-stack-epsilon"));
}

TEST_CASE("validate: structural errors") {
  SUBCASE("sigma must be contained in gamma") {
    auto m = single_state_machine();
    m.stack_alphabet = {"g"};
    CHECK(validate(m).has("alphabet"));
  }
  SUBCASE("final map must be total") {
    auto m = single_state_machine();
    m.end_final.erase(FinalKey{"q", std::nullopt});
    CHECK(validate(m).has("final-not-total"));
  }
  SUBCASE("nodecision only in nondeterministic mode") {
    auto m = single_state_machine();
    m.set_final("q", std::nullopt, EndVerdict::NoDecision);
    CHECK(validate(m).has("verdict-mode"));
  }
  SUBCASE("deterministic images are singletons") {
    auto m = single_state_machine();
    m.add_transition(1, "q", "a", std::nullopt, "q", {});
    m.add_transition(1, "q", "a", std::nullopt, "p", {});
    CHECK(validate(m).has("determinism"));
  }
  SUBCASE("end-marker map only below the last pass") {
    auto m = single_state_machine();
    m.add_end(1, "q", std::nullopt, "q");
    CHECK(validate(m).has("bad-pass"));
  }
}

TEST_CASE("partial deterministic machines get a warning, not an error") {
  auto m = single_state_machine();
  auto rep = validate(m);
  CHECK(rep.ok());
  CHECK(!rep.warnings.empty());
}

TEST_CASE("fixtures are valid") {
  CHECK(validate(fixture::z2_machine()).ok());
  CHECK(validate(fixture::z2_machine()).warnings.empty());
  CHECK(validate(fixture::anbn_machine()).ok());
  CHECK(validate(fixture::even_palindrome_machine()).ok());
}

TEST_CASE("run: Z^2 word problem") {
  const auto m = fixture::z2_machine();
  CHECK(run(m, parse_word("a b a^-1 b^-1")).verdict == Verdict::Accept);
  CHECK(run(m, {}).verdict == Verdict::Accept);
  CHECK(run(m, parse_word("a a")).verdict == Verdict::Reject);
  CHECK(run(m, parse_word("b a b^-1")).verdict == Verdict::Reject);
}

TEST_CASE("run: step accounting covers every pass") {
  const auto m = fixture::z2_machine();
  auto tr = run(m, parse_word("a b a^-1 b^-1"));
  REQUIRE(tr.steps_per_pass.size() == 2);
  CHECK(tr.steps_per_pass[0] == 5);  // four letters plus the end-marker
  CHECK(tr.steps_per_pass[1] == 5);
  CHECK(tr.steps_total == 10);
}

TEST_CASE("run: deterministic execution is a function of the word") {
  const auto m = fixture::z2_machine();
  Runner r(m);
  for_each_word(m.input_alphabet, 4, [&](const Word& w) {
    auto a = r.run(w), b = r.run(w);
    CHECK(a.verdict == b.verdict);
    CHECK(a.steps_total == b.steps_total);
    CHECK(a.steps_per_pass == b.steps_per_pass);
  });
}

TEST_CASE("run: unknown input symbols are a precondition failure") {
  CHECK_THROWS_AS(run(fixture::z2_machine(), {"c"}), PreconditionError);
}

TEST_CASE("run: nondeterministic accepts carry a replayable witness") {
  const auto m = fixture::even_palindrome_machine();
  Runner r(m);
  for_each_word(m.input_alphabet, 8, [&](const Word& w) {
    auto tr = r.run(w);
    REQUIRE(tr.verdict != Verdict::BudgetExceeded);
    CHECK(tr.accepted() == fixture::is_even_palindrome(w));
    if (tr.accepted()) {
      REQUIRE(tr.witness.has_value());
      CHECK(fixture::replay_witness(m, w, *tr.witness));
    } else {
      CHECK(tr.verdict == Verdict::NoDecision);
    }
  });
}

TEST_CASE("run: nondeterministic budget exhaustion is its own verdict") {
  // Unbounded epsilon growth: g -> g g forever.
  auto m = single_state_machine(Mode::Nondeterministic);
  m.add_transition(1, "q", "a", std::nullopt, "q", {"g"});
  m.add_transition(1, "q", std::nullopt, "g", "q", {"g", "g"});
  auto tr = run(m, {"a"}, 1000);
  CHECK(tr.verdict == Verdict::BudgetExceeded);
  CHECK(tr.steps_total == 1000);
}

TEST_CASE("run: deterministic end-marker prefers epsilon moves") {
  // After reading a, the stack holds g; at the end-marker the epsilon move
  // pops g and moves to p, which accepts on the empty stack.
  auto m = single_state_machine();
  m.add_transition(1, "q", "a", std::nullopt, "q", {"g"});
  m.add_transition(1, "q", std::nullopt, "g", "p", {});
  m.set_final("p", std::nullopt, EndVerdict::Accept);
  CHECK(run(m, {"a"}).verdict == Verdict::Accept);
  CHECK(run(m, {"a", "a"}).verdict == Verdict::Reject);  // p has no moves
}

TEST_CASE("divergence_analysis: examples") {
  SUBCASE("self loop") {
    auto m = epsilon_probe({"q", {"g"}});
    CHECK(divergence_analysis(m) == std::set<EpsilonStart>{{1, "q", "g"}});
  }
  SUBCASE("erasing move") {
    auto m = epsilon_probe({"p", {}});
    CHECK(divergence_analysis(m).empty());
  }
  SUBCASE("growing stack") {
    auto m = epsilon_probe({"q", {"g", "g"}});
    CHECK(divergence_analysis(m) == std::set<EpsilonStart>{{1, "q", "g"}});
  }
  SUBCASE("bounded oscillation is convergent") {
    // g is replaced by a, which the next epsilon move erases.
    auto m = epsilon_probe({"p", {"a"}});
    m.add_transition(1, "p", std::nullopt, "a", "p", {});
    auto an = analyze_epsilon_runs(m);
    CHECK(an.divergent.empty());
    CHECK(an.max_convergent_run == 2);
  }
}

TEST_CASE("make_complete reroutes divergent runs to a rejecting sink") {
  auto m = epsilon_probe({"q", {"g"}});
  auto tr = run(m, {"a"}, 10'000);
  CHECK(tr.verdict == Verdict::BudgetExceeded);
  auto c = make_complete(m);
  CHECK(validate(c).ok());
  CHECK(validate(c).warnings.empty());
  CHECK(is_complete(c));
  CHECK(c.states.size() == m.states.size() + 1);
  CHECK(run(c, {"a"}).verdict == Verdict::Reject);
}

TEST_CASE("make_complete preserves the language") {
  for (const auto& m : {fixture::z2_machine(), fixture::anbn_machine(), epsilon_probe({"p", {}}),
                        epsilon_probe({"q", {"g", "g"}})}) {
    auto c = make_complete(m);
    CHECK(is_complete(c));
    Runner a(m), b(c);
    for_each_word(m.input_alphabet, 8, [&](const Word& w) {
      auto ta = a.run(w, 100'000);
      auto tb = b.run(w);
      REQUIRE(tb.verdict != Verdict::BudgetExceeded);
      if (ta.verdict != Verdict::BudgetExceeded) CHECK(ta.verdict == tb.verdict);
      else CHECK(tb.verdict == Verdict::Reject);
    });
  }
}

TEST_CASE("make_complete leaves complete machines untouched") {
  const auto m = fixture::z2_machine();
  CHECK(is_complete(m));
  CHECK(make_complete(m) == m);
}

TEST_CASE("make_complete rejects nondeterministic machines") {
  CHECK_THROWS_AS(make_complete(fixture::even_palindrome_machine()), PreconditionError);
}

TEST_CASE("linear bound holds on complete fixtures") {
  for (const auto& m : {fixture::z2_machine(), make_complete(fixture::anbn_machine()),
                        make_complete(epsilon_probe({"p", {"a"}}))}) {
    const auto lb = linear_bound(m);
    Runner r(m);
    for_each_word(m.input_alphabet, 7, [&](const Word& w) {
      auto tr = r.run(w, lb.steps(w.size()));
      CHECK(tr.verdict != Verdict::BudgetExceeded);
      CHECK(tr.steps_total <= lb.steps(w.size()));
    });
  }
}

TEST_CASE("prune_unreachable drops isolated states") {
  auto m = fixture::z2_machine();
  m.add_state("island");
  m.fill_final();
  auto p = prune_unreachable(m);
  CHECK(p.states.size() == 2);
  CHECK(validate(p).ok());
}

TEST_CASE("machine JSON round trip is byte identical") {
  for (const auto& m : {fixture::z2_machine(), fixture::anbn_machine(), fixture::even_palindrome_machine()}) {
    const auto text = dump_machine(m);
    const auto back = parse_machine(text);
    CHECK(back == m);
    CHECK(dump_machine(back) == text);
  }
}

TEST_CASE("machine JSON states the push orientation") {
  CHECK(dump_machine(fixture::anbn_machine()).find("last-symbol-on-top") != std::string::npos);
}

TEST_CASE("machine JSON parse errors name the location") {
  auto j = machine_to_json(fixture::anbn_machine());
  SUBCASE("unknown push symbol") {
    j["transitions"][0]["push"] = Json::array({"nope"});
    try {
      machine_from_json(j);
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(std::string(e.what()).find("transitions[0].push[0]") != std::string::npos);
    }
  }
  SUBCASE("missing field") {
    j.erase("initial");
    CHECK_THROWS_AS(machine_from_json(j), ParseError);
  }
  SUBCASE("malformed text") { CHECK_THROWS_AS(parse_machine("{\"passes\": "), ParseError); }
}
