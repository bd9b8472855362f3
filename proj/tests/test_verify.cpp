#include "doctest.h"

#include "multipass/closures.hpp"
#include "multipass/verify.hpp"
#include "test_support.hpp"

using namespace mpa;

namespace {

NamedOracle from(std::string id, std::function<bool(const Word&)> f) { return {std::move(id), {}, std::move(f)}; }

bool z2_trivial(const Word& w) { return fixture::exponent_sum(w, "a") == 0 && fixture::exponent_sum(w, "b") == 0; }

}  // namespace

TEST_CASE("verify counts every word and finds no disagreement on Z^2") {
  const auto rep = verify(fixture::z2_machine(), from("z2", z2_trivial), 6, 3);
  CHECK(rep.words_checked == count_words(4, 6));
  CHECK(rep.disagreement_count == 0);
  CHECK(rep.ok());
  CHECK(rep.exit_code() == 0);
  std::uint64_t hist = 0;
  for (const auto& [s, n] : rep.steps_histogram) hist += n;
  CHECK(hist == rep.words_checked);
  CHECK(rep.bound_applicable);
  CHECK(rep.bound_violations == 0);
  CHECK(rep.max_steps_per_symbol <= static_cast<double>(rep.bound_coefficient));
}

TEST_CASE("serial and parallel runs give the same report") {
  const auto m = fixture::doubling_machine();
  auto wrong = from("off-by-one", [](const Word& w) { return fixture::doubling_language(w) != (w.size() == 3); });
  const auto a = verify(m, wrong, 9, 1);
  const auto b = verify(m, wrong, 9, 7);
  CHECK(a.words_checked == b.words_checked);
  CHECK(a.disagreement_count == b.disagreement_count);
  CHECK(a.disagreement_count == 8);  // every word of length 3
  CHECK(a.steps_histogram == b.steps_histogram);
  CHECK(a.to_json() == b.to_json());
  CHECK(a.exit_code() == 1);
}

TEST_CASE("complement used as oracle disagrees on every word") {
  const auto m = fixture::anbn_machine();
  const auto c = complement(m);
  const Runner r(c);
  const auto rep = verify(m, from("complement", [&](const Word& w) { return r.accepts(w); }), 7);
  CHECK(rep.disagreement_count == rep.words_checked);
  CHECK(rep.disagreements.size() == VerifyReport::kMaxListed);
  CHECK(rep.disagreements.front().word.empty());
}

TEST_CASE("budget exhaustion is reported separately") {
  const auto rep = verify(fixture::z2_machine(), from("z2", z2_trivial), 3, 1, 5);
  CHECK(rep.budget_exceeded > 0);
  CHECK(rep.bound_violations == rep.budget_exceeded);
  CHECK(rep.exit_code() == 1);
  const auto nd = verify(fixture::even_palindrome_machine(), from("pal", fixture::is_even_palindrome), 3, 1, 5);
  CHECK_FALSE(nd.bound_applicable);
  CHECK(nd.budget_exceeded > 0);
  CHECK(nd.exit_code() == 2);
}

TEST_CASE("resolve_oracle") {
  CHECK(resolve_oracle("exponent-sum").member(parse_word("a b a^-1 b^-1")));
  CHECK_FALSE(resolve_oracle("exponent-sum").member(parse_word("a b")));
  CHECK(resolve_oracle("britton:1,-1").member(parse_word("t b t^-1 b")));
  CHECK(resolve_oracle("bs:2").member(parse_word("t b t^-1 b^-1 b^-1 b^-1 b^-1")));
  CHECK(resolve_oracle("dihedral").member(parse_word("s a s a")));
  CHECK_THROWS_AS(resolve_oracle("nonsense"), ParseError);
  CHECK_THROWS_AS(resolve_oracle("britton:x,1"), ParseError);
  CHECK_THROWS_AS(resolve_oracle("britton:0,1"), PreconditionError);
  CHECK_THROWS_AS(verify(fixture::anbn_machine(), resolve_oracle("dihedral"), 2), PreconditionError);
}
