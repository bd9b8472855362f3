#pragma once

#include <cstddef>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mpa {

/// Symbols are arbitrary non-empty names; "a^-1" is a single symbol.
using Symbol = std::string;
using Word = std::vector<Symbol>;

/// Raised when an operation is called outside its documented precondition.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Suffix marking the formal inverse of a group generator.
inline constexpr std::string_view kInverseSuffix = "^-1";

bool is_inverse_name(std::string_view sym);

/// "a" <-> "a^-1".
Symbol inverse_symbol(std::string_view sym);

/// Reverses the word and inverts every letter.
Word formal_inverse(const Word& w);

/// Cancels adjacent x x^-1 pairs until none remain.
Word free_reduce(const Word& w);

/// {x, x^-1 : x in gens}, in the order x1, x1^-1, x2, x2^-1, ...
std::vector<Symbol> group_alphabet(const std::vector<Symbol>& gens);

Word concat(const Word& a, const Word& b);

/// Splits on whitespace: "a b a^-1" -> {"a","b","a^-1"}.
Word parse_word(std::string_view text);
std::string format_word(const Word& w);

/// Appends primes to `base` until the name is absent from `taken`.
Symbol fresh_symbol(std::string base, const std::set<Symbol>& taken);

/// All words over `alphabet` of length <= max_len, shortlex order, calling
/// `fn(word)` for each one.
template <class Fn>
void for_each_word(const std::vector<Symbol>& alphabet, std::size_t max_len, Fn&& fn) {
  Word w;
  std::vector<std::size_t> idx;
  fn(static_cast<const Word&>(w));
  if (alphabet.empty()) return;
  for (std::size_t len = 1; len <= max_len; ++len) {
    idx.assign(len, 0);
    w.assign(len, alphabet[0]);
    bool more = true;
    while (more) {
      fn(static_cast<const Word&>(w));
      more = false;
      for (std::size_t pos = len; pos-- > 0;) {
        if (++idx[pos] < alphabet.size()) {
          w[pos] = alphabet[idx[pos]];
          more = true;
          break;
        }
        idx[pos] = 0;
        w[pos] = alphabet[0];
      }
    }
  }
}

/// Number of words of length <= max_len over an alphabet of the given size.
std::size_t count_words(std::size_t alphabet_size, std::size_t max_len);

}  // namespace mpa
