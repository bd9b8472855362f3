#pragma once

#include <map>
#include <memory>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "multipass/automaton.hpp"
#include "multipass/machine_io.hpp"

namespace mpa {

/// A finite group given by its multiplication table; table[i][j] names the
/// product elements[i] * elements[j].
struct FiniteGroup {
  std::vector<std::string> elements;
  std::vector<std::vector<std::string>> table;
  std::string identity;
  friend bool operator==(const FiniteGroup&, const FiniteGroup&) = default;
};

/// Index-based view of a validated FiniteGroup.
class GroupTable {
 public:
  explicit GroupTable(const FiniteGroup& g);  // throws PreconditionError when g is not a group
  std::size_t size() const { return names_.size(); }
  int index(const std::string& name) const;  // throws on unknown names
  const std::string& name(int i) const { return names_[i]; }
  int mul(int a, int b) const { return mul_[a][b]; }
  int inv(int a) const { return inv_[a]; }
  int identity() const { return id_; }

 private:
  std::vector<std::string> names_;
  std::map<std::string, int> index_;
  std::vector<std::vector<int>> mul_;
  std::vector<int> inv_;
  int id_ = 0;
};

/// Problems with a candidate group table; empty means it is a group.
std::vector<std::string> validate_finite_group(const FiniteGroup& g);

struct GroupSpec;
using GroupPtr = std::shared_ptr<const GroupSpec>;

struct FreeSpec {
  std::vector<Symbol> generators;
  friend bool operator==(const FreeSpec&, const FreeSpec&) = default;
};

struct FreeAbelianSpec {
  std::vector<Symbol> generators;
  friend bool operator==(const FreeAbelianSpec&, const FreeAbelianSpec&) = default;
};

struct FiniteSpec {
  FiniteGroup group;
  /// Generator name and the element it denotes; x^-1 denotes the inverse.
  std::vector<std::pair<Symbol, std::string>> generators;
  friend bool operator==(const FiniteSpec&, const FiniteSpec&) = default;
};

struct DirectProductSpec {
  GroupPtr left, right;
};

/// Right-coset data for G over a finite-index subgroup H: with coset
/// representatives c_1 = 1, c_2, ..., c_k, the rule (i, x) -> (j, u) states
/// c_i x = u c_j with u a word over H's generators.
struct CosetRule {
  int coset = 1;
  Symbol letter;
  int to = 1;
  Word rewrite;
  friend bool operator==(const CosetRule&, const CosetRule&) = default;
};

struct FiniteExtensionSpec {
  GroupPtr subgroup;
  std::vector<Symbol> generators;
  int coset_count = 1;
  /// Rules for every coset and generator; rules for inverse letters are
  /// derived when absent.
  std::vector<CosetRule> rules;
};

struct FiniteQuotientSpec {
  GroupPtr base;
  std::vector<Word> normal_subgroup_words;
};

/// Data of <G, t; t s t^-1 = phi(s), s in S> with S = psi^-1(J) for an
/// epimorphism psi onto the finite group K.
struct HnnData {
  Symbol stable_letter = "t";
  std::map<Symbol, Word> phi;  // generator -> word over the base alphabet
  int phi_order = 1;
  FiniteGroup quotient;
  std::map<Symbol, std::string> psi;
  std::map<std::string, std::string> phi_bar;
  std::vector<std::string> J;
  friend bool operator==(const HnnData&, const HnnData&) = default;
};

struct HnnSpec {
  GroupPtr base;
  HnnData data;
};

struct MappingTorusSpec {
  GroupPtr base;
  Symbol stable_letter = "t";
  std::map<Symbol, Word> phi;
  int phi_order = 1;
};

/// The double G *_S Gbar with phi(s) = sbar; barred generators are named
/// x + bar_suffix.
struct DoubleSpec {
  GroupPtr base;
  HnnData data;
  std::string bar_suffix = "_bar";
};

struct GroupSpec {
  std::variant<FreeSpec, FreeAbelianSpec, FiniteSpec, DirectProductSpec, FiniteExtensionSpec, FiniteQuotientSpec,
               HnnSpec, MappingTorusSpec, DoubleSpec>
      v;
};

template <class T>
GroupPtr make_group(T spec) {
  return std::make_shared<const GroupSpec>(GroupSpec{std::move(spec)});
}

/// "free", "free_abelian", "finite", ... (the JSON tag).
std::string variant_name(const GroupSpec& g);

/// Generators X in a fixed order; the input alphabet is group_alphabet(X).
std::vector<Symbol> generators(const GroupSpec& g);
std::vector<Symbol> alphabet(const GroupSpec& g);

/// Violated invariants, each prefixed by the variant path; empty = valid.
std::vector<std::string> validate_group(const GroupSpec& g);

/// The HNN data of a mapping torus (trivial quotient).
HnnData mapping_torus_data(const MappingTorusSpec& m);

/// phi^m(x) for every generator x and inverse letter, 0 <= m < p, freely
/// reduced. Throws PreconditionError when a word exceeds `cap` symbols.
std::vector<std::map<Symbol, Word>> phi_powers(const std::vector<Symbol>& gens, const std::map<Symbol, Word>& phi,
                                               int p, std::size_t cap = 10000);

/// Complete coset table over X and X^-1, inverse rules derived.
std::map<std::pair<int, Symbol>, CosetRule> coset_table(const FiniteExtensionSpec& f);

/// Word-problem machine for the group.
MultipassAutomaton build_wp(const GroupSpec& g);

/// The one-pass machine that an HNN (or mapping torus, or double) machine
/// runs as its first pass: accepts iff every stable letter cancels.
MultipassAutomaton hnn_first_pass(const GroupSpec& base, const HnnData& d);

/// Inverse image of `m` under the monoid homomorphism y -> images[y],
/// y^-1 -> images[y]^-1.
MultipassAutomaton wp_pullback(const MultipassAutomaton& m, const std::map<Symbol, Word>& generator_images);

Json group_to_json(const GroupSpec& g);
GroupSpec group_from_json(const Json& j);
std::string dump_group(const GroupSpec& g);
GroupSpec parse_group(std::string_view text);
GroupSpec load_group(const std::string& path);

}  // namespace mpa
