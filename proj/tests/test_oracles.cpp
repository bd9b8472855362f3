#include <random>

#include "doctest.h"
#include "group_fixtures.hpp"
#include "multipass/oracles.hpp"

using namespace mpa;

namespace {

const std::vector<Symbol> kBT = {"b", "b^-1", "t", "t^-1"};

Word power(const Symbol& x, long n) { return Word(static_cast<std::size_t>(std::abs(n)), n >= 0 ? x : inverse_symbol(x)); }

bool bs14_rewriting(const Word& w) { return britton_reduce_pq(w, 1, 4).empty(); }
bool bs14_matrix(const Word& w) { return bs_matrix_eval(w, 2) == RationalMatrix2::identity(); }

}  // namespace

TEST_CASE("britton_reduce examples") {
  CHECK(britton_reduce(parse_word("t b t^-1 b"), 1, -1).empty());
  CHECK(britton_reduce(parse_word("t b t^-1 b^-1"), 1, -1) == parse_word("b^-1 b^-1"));
  const auto blocked = britton_reduce(parse_word("t b t^-1 b^-1"), 2, 1);
  CHECK(blocked == parse_word("t b t^-1 b^-1"));
  CHECK(bs14_rewriting(concat(parse_word("t b t^-1"), power("b", -4))));
}

TEST_CASE("britton output has no pinch") {
  std::mt19937 rng(7);
  std::uniform_int_distribution<std::size_t> len(0, 14), pick(0, 3);
  for (int i = 0; i < 2000; ++i) {
    Word w(len(rng));
    for (auto& x : w) x = kBT[pick(rng)];
    CHECK(!has_pinch(britton_reduce(w, 1, -1), 1, -1));
    CHECK(!has_pinch(britton_reduce(w, 2, 1), 2, 2));
    CHECK(!has_pinch(britton_reduce_pq(w, 1, 4), 1, 4));
  }
}

TEST_CASE("oracle invariants") {
  std::mt19937 rng(99);
  for (const auto& g : {fixture::klein_bottle(), fixture::bs22(), fixture::infinite_dihedral(), fixture::s3(),
                        fixture::z_double(), fixture::swap_torus(), fixture::z3_quotient()}) {
    const auto o = make_oracle(*g);
    CHECK(o.is_identity({}));
    std::uniform_int_distribution<std::size_t> len(0, 8), pick(0, o.alphabet().size() - 1);
    for (int i = 0; i < 200; ++i) {
      Word w(len(rng));
      for (auto& x : w) x = o.alphabet()[pick(rng)];
      CHECK(o.is_identity(concat(w, formal_inverse(w))));
      // inserting a cancelling pair does not change the element
      Word v = w;
      const auto x = o.alphabet()[pick(rng)];
      v.insert(v.begin() + static_cast<long>(v.size() / 2), {x, inverse_symbol(x)});
      CHECK(o.is_identity(concat(v, formal_inverse(w))));
    }
  }
  CHECK_THROWS_AS(make_oracle(*fixture::klein_bottle()).evaluate({"c"}), PreconditionError);
}

TEST_CASE("dihedral normal form") {
  CHECK(dihedral_normal_form(parse_word("s a s a")) == "1");
  CHECK(dihedral_normal_form(parse_word("s a s a^-1")) == "(-2,0)");
  CHECK(dihedral_normal_form(parse_word("s s^-1")) == "1");
}

TEST_CASE("parikh") {
  CHECK(parikh(parse_word("a a b"), {"a", "b"}) == ParikhVector{2, 1});
  CHECK(parikh({}, {"a", "b"}) == ParikhVector{0, 0});
  const auto w = concat(parse_word("t t b t^-1 t^-1"), power("b", -16));
  CHECK(parikh(w, kBT) == ParikhVector{1, 16, 2, 2});
  CHECK_THROWS_AS(parikh({"c"}, {"a"}), PreconditionError);

  std::mt19937 rng(3);
  std::uniform_int_distribution<std::size_t> len(0, 10), pick(0, 3);
  for (int i = 0; i < 100; ++i) {
    Word u(len(rng)), v(len(rng));
    for (auto& x : u) x = kBT[pick(rng)];
    for (auto& x : v) x = kBT[pick(rng)];
    auto pu = parikh(u, kBT), pv = parikh(v, kBT), puv = parikh(concat(u, v), kBT);
    for (std::size_t c = 0; c < 4; ++c) CHECK(puv[c] == pu[c] + pv[c]);
  }
}

TEST_CASE("semilinear membership") {
  const SemilinearSet s{{{{1, 0}, {{1, 1}}}}};
  CHECK(semilinear_member(s, {3, 2}));
  CHECK(!semilinear_member(s, {2, 3}));
  const SemilinearSet point{{{{0, 0}, {}}}};
  CHECK(semilinear_member(point, {0, 0}));
  CHECK(!semilinear_member(point, {1, 0}));
  CHECK_THROWS_AS(semilinear_member(s, {1, 2, 3}), PreconditionError);
  CHECK_THROWS_AS(semilinear_member(SemilinearSet{{{{1, 0}, {{1}}}}}, {1, 0}), PreconditionError);
}

TEST_CASE("semilinear membership agrees with naive search") {
  const std::vector<SemilinearSet> sets = {
      {{{{1, 0}, {{1, 1}}}}},
      {{{{0, 0}, {{2, 0}, {0, 3}, {0, 0}}}, {{1, 1}, {{1, 2}}}}},
      {{{{2, 1}, {{3, 1}, {1, 0}}}}},
  };
  for (const auto& s : sets) {
    // naive: enumerate every combination with coefficients up to 10
    std::set<ParikhVector> reachable;
    for (const auto& c : normalize(s).components) {
      std::vector<ParikhVector> layer{c.base};
      for (const auto& per : c.periods) {
        std::vector<ParikhVector> next;
        for (const auto& v : layer)
          for (int n = 0; n <= 10; ++n) {
            ParikhVector x = v;
            for (std::size_t i = 0; i < x.size(); ++i) x[i] += n * per[i];
            next.push_back(x);
          }
        layer = std::move(next);
      }
      reachable.insert(layer.begin(), layer.end());
    }
    for (std::int64_t a = 0; a <= 10; ++a)
      for (std::int64_t b = 0; b <= 10; ++b) CHECK(semilinear_member(s, {a, b}) == reachable.contains({a, b}));
  }
}

TEST_CASE("symbol patterns") {
  const SymbolPattern r("t+ b t^-1+ b^-1+");
  CHECK(r.matches(parse_word("t b t^-1 b^-1")));
  CHECK(r.matches(parse_word("t t b t^-1 b^-1 b^-1")));
  CHECK(!r.matches(parse_word("b t^-1 b^-1")));
  CHECK(!r.matches(parse_word("t b b t^-1 b^-1")));
  std::size_t n = 0;
  r.for_each_match(7, [&](const Word& w) {
    CHECK(r.matches(w));
    CHECK(w.size() <= 7);
    ++n;
  });
  // t^a b t^-c b^-d with a + c + d <= 6, all >= 1: C(6,3) = 20
  CHECK(n == 20);
  const SymbolPattern opt("a? b*");
  CHECK(opt.matches({}));
  CHECK(opt.matches(parse_word("a b b")));
  CHECK(!opt.matches(parse_word("a a")));
}

TEST_CASE("BS(1,n^2) matrix representation") {
  const auto tbt = bs_matrix_eval(parse_word("t b t^-1"), 2);
  CHECK(tbt == RationalMatrix2{1, 4, 0, 1});
  CHECK(tbt == bs_matrix_eval(power("b", 4), 2));
  CHECK(bs_matrix_eval(parse_word("t b t^-1"), 3) == bs_matrix_eval(power("b", 9), 3));
  CHECK(bs_matrix_eval(parse_word("b b^-1"), 2) == RationalMatrix2::identity());
  for (long l = 1; l <= 5; ++l) {
    const auto m = bs_matrix_eval(power("t^-1", l), 2);
    const Rational nl = boost::multiprecision::pow(boost::multiprecision::cpp_int(2), static_cast<unsigned>(l));
    CHECK(m == RationalMatrix2{1 / nl, 0, 0, nl});
    CHECK(m != RationalMatrix2::identity());
    CHECK(m.det() == 1);
  }
  CHECK_THROWS_AS(bs_matrix_eval({"b"}, 1), PreconditionError);
}

TEST_CASE("BS(1,4) backends agree") {
  std::size_t identities = 0;
  for_each_word(kBT, 8, [&](const Word& w) {
    const bool a = bs14_rewriting(w), b = bs14_matrix(w);
    CHECK(a == b);
    identities += a;
  });
  CHECK(identities > 1);
}

TEST_CASE("parikh images") {
  const SymbolPattern r("t+ b t^-1+ b^-1+");
  CHECK(parikh_image(bs14_rewriting, kBT, r, 12) == std::set<ParikhVector>{{1, 4, 1, 1}});
  CHECK(parikh_image(bs14_rewriting, kBT, r, 21) == std::set<ParikhVector>{{1, 4, 1, 1}, {1, 16, 2, 2}});
  CHECK(parikh_image([](const Word&) { return false; }, kBT, std::nullopt, 4).empty());

  const auto z2 = make_oracle(*fixture::z2_squared());
  const std::vector<Symbol> ab = {"a", "a^-1", "b", "b^-1"};
  const auto img = parikh_image([&](const Word& w) { return z2.is_identity(w); }, ab, std::nullopt, 4);
  std::set<ParikhVector> expected;
  for (std::int64_t i = 0; 2 * i <= 4; ++i)
    for (std::int64_t j = 0; 2 * (i + j) <= 4; ++j) expected.insert({i, i, j, j});
  CHECK(img == expected);
}
