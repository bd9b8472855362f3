#include "multipass/symbols.hpp"

#include <sstream>

namespace mpa {

bool is_inverse_name(std::string_view sym) {
  return sym.size() > kInverseSuffix.size() && sym.ends_with(kInverseSuffix);
}

Symbol inverse_symbol(std::string_view sym) {
  if (is_inverse_name(sym)) return Symbol(sym.substr(0, sym.size() - kInverseSuffix.size()));
  return Symbol(sym) + Symbol(kInverseSuffix);
}

Word formal_inverse(const Word& w) {
  Word out;
  out.reserve(w.size());
  for (auto it = w.rbegin(); it != w.rend(); ++it) out.push_back(inverse_symbol(*it));
  return out;
}

Word free_reduce(const Word& w) {
  Word out;
  out.reserve(w.size());
  for (const auto& x : w) {
    if (!out.empty() && out.back() == inverse_symbol(x))
      out.pop_back();
    else
      out.push_back(x);
  }
  return out;
}

std::vector<Symbol> group_alphabet(const std::vector<Symbol>& gens) {
  std::vector<Symbol> out;
  out.reserve(2 * gens.size());
  for (const auto& g : gens) {
    out.push_back(g);
    out.push_back(inverse_symbol(g));
  }
  return out;
}

Word concat(const Word& a, const Word& b) {
  Word out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

Word parse_word(std::string_view text) {
  std::istringstream in{std::string(text)};
  Word out;
  for (std::string tok; in >> tok;) out.push_back(tok);
  return out;
}

std::string format_word(const Word& w) {
  std::string out;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) out += ' ';
    out += w[i];
  }
  return out;
}

Symbol fresh_symbol(std::string base, const std::set<Symbol>& taken) {
  while (taken.contains(base)) base += '\'';
  return base;
}

std::size_t count_words(std::size_t alphabet_size, std::size_t max_len) {
  std::size_t total = 0, layer = 1;
  for (std::size_t len = 0; len <= max_len; ++len) {
    total += layer;
    layer *= alphabet_size;
  }
  return total;
}

}  // namespace mpa
