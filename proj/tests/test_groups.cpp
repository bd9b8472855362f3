#include <random>

#include "doctest.h"
#include "group_fixtures.hpp"
#include "multipass/oracles.hpp"
#include "test_support.hpp"

using namespace mpa;

namespace {

auto zoo() { return fixture::group_zoo(); }

}  // namespace

TEST_CASE("every machine agrees with its group oracle") {
  for (const auto& g : zoo()) {
    CAPTURE(g.name);
    CHECK(validate_group(*g.spec).empty());
    const auto m = build_wp(*g.spec);
    CHECK(validate(m).ok());
    const auto oracle = make_oracle(*g.spec);
    CHECK(m.input_alphabet == oracle.alphabet());
    CHECK(fixture::disagreements(m, g.max_len, [&](const Word& w) { return oracle.is_identity(w); }) == 0);
  }
}

TEST_CASE("free abelian examples") {
  const auto m = build_wp(*fixture::z2_squared());
  CHECK(m.passes == 2);
  CHECK(run(m, parse_word("a b a^-1 b^-1")).verdict == Verdict::Accept);
  CHECK(run(m, {"a"}).verdict == Verdict::Reject);
}

TEST_CASE("HNN examples against Britton reduction") {
  const auto klein = build_wp(*fixture::klein_bottle());
  CHECK(run(klein, parse_word("t b t^-1 b")).accepted());
  CHECK(!run(klein, parse_word("t b t^-1 b^-1")).accepted());
  const auto bs = build_wp(*fixture::bs22());
  CHECK(run(bs, parse_word("t b b t^-1 b^-1 b^-1")).accepted());
  CHECK(!run(bs, parse_word("t b t^-1 b^-1")).accepted());

  CHECK(fixture::disagreements(klein, 7, [](const Word& w) { return britton_reduce(w, 1, -1).empty(); }) == 0);
  CHECK(fixture::disagreements(bs, 7, [](const Word& w) { return britton_reduce(w, 2, 1).empty(); }) == 0);
}

TEST_CASE("HNN first pass decides t-cancellation") {
  struct Case {
    GroupPtr g;
    long d, s;
  };
  for (const auto& c : {Case{fixture::klein_bottle(), 1, -1}, Case{fixture::bs22(), 2, 1}}) {
    const auto& h = std::get<HnnSpec>(c.g->v);
    const auto first = hnn_first_pass(*h.base, h.data);
    CHECK(first.deterministic());
    CHECK(is_complete(first));
    CHECK(fixture::disagreements(first, 7, [&](const Word& w) {
            const auto r = britton_reduce(w, c.d, c.s);
            return std::none_of(r.begin(), r.end(), [](const Symbol& x) { return x == "t" || x == "t^-1"; });
          }) == 0);
  }
}

TEST_CASE("pass counts and determinism") {
  CHECK(build_wp(*fixture::klein_bottle()).passes == 2);
  CHECK(build_wp(*fixture::swap_torus()).passes == 3);
  CHECK(build_wp(*fixture::infinite_dihedral()).passes == 1);
  CHECK(build_wp(*fixture::z_times_z2()).passes == 2);
  for (const auto& g : zoo()) {
    CAPTURE(g.name);
    CHECK(build_wp(*g.spec).deterministic());
  }
}

TEST_CASE("dihedral group against its normal form") {
  const auto m = build_wp(*fixture::infinite_dihedral());
  CHECK(fixture::disagreements(m, 8, [](const Word& w) { return dihedral_normal_form(w) == "1"; }) == 0);
}

TEST_CASE("Z/3 as a finite quotient") {
  const auto m = build_wp(*fixture::z3_quotient());
  CHECK(fixture::disagreements(m, 8, fixture::z3_identity) == 0);
}

TEST_CASE("negative controls") {
  std::mt19937 rng(12345);
  for (const auto& g : zoo()) {
    CAPTURE(g.name);
    const auto m = build_wp(*g.spec);
    const auto oracle = make_oracle(*g.spec);
    Runner r(m);
    const auto& sigma = oracle.alphabet();
    std::uniform_int_distribution<std::size_t> len(1, 12), pick(0, sigma.size() - 1);
    int tested = 0, false_accepts = 0;
    while (tested < 100) {
      Word w(len(rng));
      for (auto& x : w) x = sigma[pick(rng)];
      if (oracle.is_identity(w)) continue;
      ++tested;
      if (r.accepts(w)) ++false_accepts;
    }
    CHECK(false_accepts == 0);
  }
}

TEST_CASE("invalid specs are rejected with the invariant named") {
  auto bad_j = fixture::even_subgroup_data();
  bad_j.J = {"1"};
  auto errs = validate_group(GroupSpec{HnnSpec{fixture::free_group({"b"}), bad_j}});
  REQUIRE(!errs.empty());
  CHECK(errs.front().find("identity") != std::string::npos);
  CHECK_THROWS_AS(build_wp(GroupSpec{HnnSpec{fixture::free_group({"b"}), bad_j}}), PreconditionError);

  auto wrong_order = std::get<HnnSpec>(fixture::klein_bottle()->v).data;
  wrong_order.phi_order = 1;
  errs = validate_group(GroupSpec{HnnSpec{fixture::free_group({"b"}), wrong_order}});
  REQUIRE(!errs.empty());

  auto bad_perm = std::get<FiniteExtensionSpec>(fixture::infinite_dihedral()->v);
  bad_perm.rules[3].to = 2;  // s maps both cosets to coset 2
  CHECK(!validate_group(GroupSpec{bad_perm}).empty());

  auto not_group = fixture::cyclic(3);
  not_group.table[1][1] = "1";
  CHECK(!validate_finite_group(not_group).empty());

  CHECK(!validate_group(GroupSpec{DirectProductSpec{fixture::free_group({"a"}), fixture::free_group({"a"})}}).empty());
}

TEST_CASE("wp_pullback") {
  const auto z = build_wp(*fixture::free_group({"b"}));
  const auto two = wp_pullback(z, {{"y", {"b", "b"}}});
  CHECK(fixture::disagreements(two, 8, [](const Word& w) { return fixture::exponent_sum(w, "y") == 0; }) == 0);

  const auto z2 = build_wp(*fixture::z2_squared());
  const auto same = wp_pullback(z2, {{"a", {"a"}}, {"b", {"b"}}});
  CHECK(fixture::disagreements(same, 6, [](const Word& w) {
          return fixture::exponent_sum(w, "a") == 0 && fixture::exponent_sum(w, "b") == 0;
        }) == 0);

  // a -> a b', b -> b' in new letters p (for a) and q (for b'): the word
  // has image exponents (e_p, e_p + e_q).
  const auto changed = wp_pullback(z2, {{"p", {"a", "b"}}, {"q", {"b"}}});
  CHECK(fixture::disagreements(changed, 6, [](const Word& w) {
          const long ep = fixture::exponent_sum(w, "p"), eq = fixture::exponent_sum(w, "q");
          return ep == 0 && ep + eq == 0;
        }) == 0);
}

TEST_CASE("group spec JSON round trip") {
  for (const auto& g : zoo()) {
    CAPTURE(g.name);
    const auto text = dump_group(*g.spec);
    const auto back = parse_group(text);
    CHECK(dump_group(back) == text);
    CHECK(build_wp(back) == build_wp(*g.spec));
  }
  CHECK_THROWS_AS(parse_group(R"({"type":"free_monoid"})"), ParseError);
  CHECK_THROWS_AS(parse_group(R"({"type":"hnn","base":{"type":"free","rank":1}})"), ParseError);
  const auto r = parse_group(R"({"type":"free","rank":2})");
  CHECK(generators(r) == std::vector<Symbol>{"a", "b"});
}
