#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "multipass/groups.hpp"
#include "multipass/symbols.hpp"

namespace mpa {

// --- group oracles -------------------------------------------------------------

/// Brute-force evaluation of group words, independent of any automaton.
/// evaluate() returns "1" exactly for the identity. The string is canonical
/// only for families with a genuine normal form, not for HNN-type variants.
class GroupOracle {
 public:
  using Eval = std::function<std::string(const Word&)>;
  GroupOracle(std::vector<Symbol> alphabet, Eval eval);

  const std::vector<Symbol>& alphabet() const { return alphabet_; }
  std::string evaluate(const Word& w) const;  // throws PreconditionError on unknown letters
  bool is_identity(const Word& w) const { return evaluate(w) == "1"; }

 private:
  std::vector<Symbol> alphabet_;
  std::set<Symbol> letters_;
  Eval eval_;
};

/// Oracle for the group described by `spec` (Britton reduction for the
/// HNN-type variants, table walks, integer vectors, ...).
GroupOracle make_oracle(const GroupSpec& spec);

/// Normal form b^a t^e of the infinite dihedral group <a, s | s^2, s a s = a^-1>
/// over the letters a, a^-1, s, s^-1 (s^-1 = s), written as "(a, e)".
std::string dihedral_normal_form(const Word& w);

// --- Britton reduction over Z = <b> ------------------------------------------

/// Britton reduction in <b, t | t b^p t^-1 = b^q> (p, q nonzero): pinches
/// t b^a t^-1 with p | a become b^(a q / p), t^-1 b^a t with q | a become
/// b^(a p / q). Returns the reduced word with b-runs collapsed; the word is
/// the identity iff the result is empty.
Word britton_reduce_pq(const Word& w, long p, long q);

/// Subgroup S = d Z and phi(b) = b^s with s = +1 or -1.
Word britton_reduce(const Word& w, long d, long s);

/// True when the reduced word still contains a pinch (used to check that
/// reduction is complete).
bool has_pinch(const Word& reduced, long p, long q);

// --- Parikh vectors and semilinear sets ------------------------------------------

using ParikhVector = std::vector<std::int64_t>;

ParikhVector parikh(const Word& w, const std::vector<Symbol>& ordering);

struct LinearSet {
  ParikhVector base;
  std::vector<ParikhVector> periods;
};

struct SemilinearSet {
  std::vector<LinearSet> components;
};

/// Checks dimensions and nonnegativity; drops zero periods.
SemilinearSet normalize(SemilinearSet s);

bool semilinear_member(const SemilinearSet& s, const ParikhVector& v);

/// Whitespace-separated symbol tokens, each optionally followed by
/// '+', '*' or '?', e.g. "t+ b t^-1+ b^-1+".
class SymbolPattern {
 public:
  explicit SymbolPattern(std::string_view text);
  bool matches(const Word& w) const;
  /// Every matching word of length <= max_len.
  void for_each_match(std::size_t max_len, const std::function<void(const Word&)>& fn) const;
  const std::string& text() const { return text_; }

 private:
  struct Token {
    Symbol symbol;
    std::size_t min = 1;
    bool unbounded = false;
    std::size_t max() const { return unbounded ? SIZE_MAX : 1; }
  };
  std::string text_;
  std::vector<Token> tokens_;
};

/// { parikh(w) : |w| <= max_len, w matches the pattern, member(w) }.
std::set<ParikhVector> parikh_image(const std::function<bool(const Word&)>& member,
                                    const std::vector<Symbol>& ordering,
                                    const std::optional<SymbolPattern>& pattern, std::size_t max_len);

// --- exact 2x2 matrices --------------------------------------------------------------

using Rational = boost::multiprecision::cpp_rational;

struct RationalMatrix2 {
  Rational a{1}, b{0}, c{0}, d{1};  // [[a, b], [c, d]]

  static RationalMatrix2 identity() { return {}; }
  Rational det() const { return a * d - b * c; }
  RationalMatrix2 inverse() const;
  friend RationalMatrix2 operator*(const RationalMatrix2& x, const RationalMatrix2& y);
  friend bool operator==(const RationalMatrix2&, const RationalMatrix2&) = default;
  std::string to_string() const;
};

/// Image of a word over b, b^-1, t, t^-1 under b -> [[1,1],[0,1]],
/// t -> [[n,0],[0,1/n]], a faithful representation of BS(1, n^2).
RationalMatrix2 bs_matrix_eval(const Word& w, long n);

}  // namespace mpa
