#pragma once
// Group specs used by the unit and acceptance tests.

#include <string>
#include <vector>

#include "multipass/groups.hpp"

namespace fixture {

using namespace mpa;

inline GroupPtr free_group(std::vector<Symbol> gens) { return make_group(FreeSpec{std::move(gens)}); }

inline FiniteGroup cyclic(int n) {
  FiniteGroup g;
  for (int i = 0; i < n; ++i) g.elements.push_back(std::to_string(i));
  for (int i = 0; i < n; ++i) {
    std::vector<std::string> row;
    for (int j = 0; j < n; ++j) row.push_back(std::to_string((i + j) % n));
    g.table.push_back(row);
  }
  g.identity = "0";
  return g;
}

inline GroupPtr z2_squared() { return make_group(FreeAbelianSpec{{"a", "b"}}); }

/// <b, t | t b t^-1 = b^-1>
inline GroupPtr klein_bottle() {
  HnnData d;
  d.phi = {{"b", {"b^-1"}}};
  d.phi_order = 2;
  d.quotient = FiniteGroup{{"1"}, {{"1"}}, "1"};
  d.psi = {{"b", "1"}};
  d.phi_bar = {{"1", "1"}};
  d.J = {"1"};
  return make_group(HnnSpec{free_group({"b"}), d});
}

/// S = 2Z through psi: Z -> Z/2, J = {0}.
inline HnnData even_subgroup_data() {
  HnnData d;
  d.phi = {{"b", {"b"}}};
  d.phi_order = 1;
  d.quotient = cyclic(2);
  d.psi = {{"b", "1"}};
  d.phi_bar = {{"0", "0"}, {"1", "1"}};
  d.J = {"0"};
  return d;
}

/// <b, t | t b^2 t^-1 = b^2>
inline GroupPtr bs22() { return make_group(HnnSpec{free_group({"b"}), even_subgroup_data()}); }

/// The infinite dihedral group as Z = <a> with right cosets H, H s.
inline GroupPtr infinite_dihedral() {
  FiniteExtensionSpec f;
  f.subgroup = free_group({"a"});
  f.generators = {"a", "s"};
  f.coset_count = 2;
  f.rules = {
      {1, "a", 1, {"a"}},
      {2, "a", 2, {"a^-1"}},
      {1, "s", 2, {}},
      {2, "s", 1, {}},
      {1, "s^-1", 2, {}},
      {2, "s^-1", 1, {}},
  };
  return make_group(f);
}

/// Z/3 as Z = <b> modulo the b^3-words that fit in length-8 windows.
inline GroupPtr z3_quotient() {
  FiniteQuotientSpec f;
  f.base = free_group({"b"});
  for (int k : {-6, -3, 3, 6}) f.normal_subgroup_words.push_back(Word(std::abs(k), k > 0 ? "b" : "b^-1"));
  return make_group(f);
}

inline GroupPtr s3() {
  FiniteGroup g;
  // permutations of {0,1,2} in one-line notation; product = apply right then left
  g.elements = {"012", "120", "201", "021", "210", "102"};
  auto compose = [](const std::string& x, const std::string& y) {
    std::string r(3, ' ');
    for (int i = 0; i < 3; ++i) r[i] = x[y[i] - '0'];
    return r;
  };
  for (const auto& x : g.elements) {
    std::vector<std::string> row;
    for (const auto& y : g.elements) row.push_back(compose(x, y));
    g.table.push_back(row);
  }
  g.identity = "012";
  return make_group(FiniteSpec{g, {{"r", "120"}, {"f", "021"}}});
}

inline GroupPtr z_times_z2() {
  return make_group(DirectProductSpec{free_group({"a"}), make_group(FiniteSpec{cyclic(2), {{"s", "1"}}})});
}

/// Mapping torus of the swap a <-> b on Z^2.
inline GroupPtr swap_torus() {
  MappingTorusSpec m;
  m.base = z2_squared();
  m.phi = {{"a", {"b"}}, {"b", {"a"}}};
  m.phi_order = 2;
  return make_group(m);
}

/// Double of Z = <b> over 2Z: <b, b_bar | b^2 = b_bar^2>.
inline GroupPtr z_double() { return make_group(DoubleSpec{free_group({"b"}), even_subgroup_data(), "_bar"}); }

/// Exponent sum of b modulo 3 is zero.
inline bool z3_identity(const Word& w) {
  long e = 0;
  for (const auto& x : w) e += (x == "b") - (x == "b^-1");
  return e % 3 == 0;
}

struct NamedGroup {
  const char* name;
  GroupPtr spec;
  std::size_t max_len;  // exhaustive check length that stays fast
};

inline std::vector<NamedGroup> group_zoo() {
  return {
      {"free rank 2", free_group({"a", "b"}), 7},
      {"Z^2", z2_squared(), 7},
      {"S3", s3(), 7},
      {"Z x Z/2", z_times_z2(), 7},
      {"dihedral", infinite_dihedral(), 7},
      {"Z/3 quotient", z3_quotient(), 8},
      {"Klein bottle", klein_bottle(), 7},
      {"BS(2,2)", bs22(), 7},
      {"swap torus", swap_torus(), 5},
      {"double of Z", z_double(), 6},
  };
}

}  // namespace fixture
