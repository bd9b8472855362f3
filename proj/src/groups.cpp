#include "multipass/groups.hpp"

#include <algorithm>
#include <set>

#include "multipass/closures.hpp"
#include "multipass/transducers.hpp"

namespace mpa {

// --- finite groups ------------------------------------------------------------

std::vector<std::string> validate_finite_group(const FiniteGroup& g) {
  std::vector<std::string> errs;
  const std::size_t n = g.elements.size();
  std::map<std::string, int> idx;
  for (std::size_t i = 0; i < n; ++i)
    if (!idx.emplace(g.elements[i], static_cast<int>(i)).second)
      errs.push_back("duplicate element '" + g.elements[i] + "'");
  if (n == 0) errs.push_back("no elements");
  if (!idx.contains(g.identity)) errs.push_back("identity '" + g.identity + "' is not an element");
  if (g.table.size() != n) errs.push_back("table must have one row per element");
  for (const auto& row : g.table)
    if (row.size() != n) errs.push_back("table rows must have one entry per element");
  if (!errs.empty()) return errs;

  std::vector<std::vector<int>> mul(n, std::vector<int>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      auto it = idx.find(g.table[i][j]);
      if (it == idx.end()) {
        errs.push_back("table entry '" + g.table[i][j] + "' is not an element");
        return errs;
      }
      mul[i][j] = it->second;
    }
  const int e = idx.at(g.identity);
  for (std::size_t i = 0; i < n; ++i)
    if (mul[e][i] != static_cast<int>(i) || mul[i][e] != static_cast<int>(i))
      errs.push_back("identity does not fix '" + g.elements[i] + "'");
  for (std::size_t i = 0; i < n; ++i) {
    bool found = false;
    for (std::size_t j = 0; j < n && !found; ++j) found = mul[i][j] == e && mul[j][i] == e;
    if (!found) errs.push_back("'" + g.elements[i] + "' has no inverse");
  }
  for (std::size_t a = 0; a < n && errs.empty(); ++a)
    for (std::size_t b = 0; b < n && errs.empty(); ++b)
      for (std::size_t c = 0; c < n; ++c)
        if (mul[mul[a][b]][c] != mul[a][mul[b][c]]) {
          errs.push_back("multiplication is not associative at (" + g.elements[a] + ", " + g.elements[b] + ", " +
                         g.elements[c] + ")");
          break;
        }
  return errs;
}

GroupTable::GroupTable(const FiniteGroup& g) {
  auto errs = validate_finite_group(g);
  if (!errs.empty()) throw PreconditionError("not a finite group: " + errs.front());
  names_ = g.elements;
  for (std::size_t i = 0; i < names_.size(); ++i) index_[names_[i]] = static_cast<int>(i);
  id_ = index_.at(g.identity);
  mul_.assign(names_.size(), std::vector<int>(names_.size()));
  for (std::size_t i = 0; i < names_.size(); ++i)
    for (std::size_t j = 0; j < names_.size(); ++j) mul_[i][j] = index_.at(g.table[i][j]);
  inv_.assign(names_.size(), 0);
  for (std::size_t i = 0; i < names_.size(); ++i)
    for (std::size_t j = 0; j < names_.size(); ++j)
      if (mul_[i][j] == id_) inv_[i] = static_cast<int>(j);
}

int GroupTable::index(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw PreconditionError("'" + name + "' is not a group element");
  return it->second;
}

// --- generic spec queries -------------------------------------------------------

namespace {

template <class... Fs>
struct overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
overloaded(Fs...) -> overloaded<Fs...>;

}  // namespace

HnnData mapping_torus_data(const MappingTorusSpec& m) {
  HnnData d;
  d.stable_letter = m.stable_letter;
  d.phi = m.phi;
  d.phi_order = m.phi_order;
  d.quotient = FiniteGroup{{"1"}, {{"1"}}, "1"};
  for (const auto& x : generators(*m.base)) d.psi[x] = "1";
  d.phi_bar = {{"1", "1"}};
  d.J = {"1"};
  return d;
}

std::string variant_name(const GroupSpec& g) {
  return std::visit(overloaded{
                        [](const FreeSpec&) { return std::string("free"); },
                        [](const FreeAbelianSpec&) { return std::string("free_abelian"); },
                        [](const FiniteSpec&) { return std::string("finite"); },
                        [](const DirectProductSpec&) { return std::string("direct_product"); },
                        [](const FiniteExtensionSpec&) { return std::string("finite_extension"); },
                        [](const FiniteQuotientSpec&) { return std::string("finite_quotient"); },
                        [](const HnnSpec&) { return std::string("hnn"); },
                        [](const MappingTorusSpec&) { return std::string("mapping_torus"); },
                        [](const DoubleSpec&) { return std::string("double"); },
                    },
                    g.v);
}

std::vector<Symbol> generators(const GroupSpec& g) {
  return std::visit(overloaded{
                        [](const FreeSpec& f) { return f.generators; },
                        [](const FreeAbelianSpec& f) { return f.generators; },
                        [](const FiniteSpec& f) {
                          std::vector<Symbol> out;
                          for (const auto& [x, e] : f.generators) out.push_back(x);
                          return out;
                        },
                        [](const DirectProductSpec& d) {
                          auto out = generators(*d.left);
                          auto r = generators(*d.right);
                          out.insert(out.end(), r.begin(), r.end());
                          return out;
                        },
                        [](const FiniteExtensionSpec& f) { return f.generators; },
                        [](const FiniteQuotientSpec& f) { return generators(*f.base); },
                        [](const HnnSpec& h) {
                          auto out = generators(*h.base);
                          out.push_back(h.data.stable_letter);
                          return out;
                        },
                        [](const MappingTorusSpec& m) {
                          auto out = generators(*m.base);
                          out.push_back(m.stable_letter);
                          return out;
                        },
                        [](const DoubleSpec& d) {
                          auto out = generators(*d.base);
                          const auto n = out.size();
                          for (std::size_t i = 0; i < n; ++i) out.push_back(out[i] + d.bar_suffix);
                          return out;
                        },
                    },
                    g.v);
}

std::vector<Symbol> alphabet(const GroupSpec& g) { return group_alphabet(generators(g)); }

std::vector<std::map<Symbol, Word>> phi_powers(const std::vector<Symbol>& gens, const std::map<Symbol, Word>& phi,
                                               int p, std::size_t cap) {
  if (p < 1) throw PreconditionError("phi_order must be at least 1");
  auto image = [&](const Symbol& x) -> Word {
    if (is_inverse_name(x)) return formal_inverse(phi.at(inverse_symbol(x)));
    return phi.at(x);
  };
  std::vector<std::map<Symbol, Word>> out(p);
  for (const auto& x : group_alphabet(gens)) out[0][x] = {x};
  for (int m = 1; m < p; ++m)
    for (const auto& x : group_alphabet(gens)) {
      Word w;
      for (const auto& y : out[m - 1][x]) {
        auto img = image(y);
        w.insert(w.end(), img.begin(), img.end());
        if (w.size() > cap) throw PreconditionError("phi^" + std::to_string(m) + "(" + x + ") exceeds the length cap");
      }
      out[m][x] = free_reduce(w);
    }
  return out;
}

std::map<std::pair<int, Symbol>, CosetRule> coset_table(const FiniteExtensionSpec& f) {
  std::map<std::pair<int, Symbol>, CosetRule> t;
  for (const auto& r : f.rules) t[{r.coset, r.letter}] = r;
  for (const auto& x : f.generators) {
    const auto xi = inverse_symbol(x);
    for (int i = 1; i <= f.coset_count; ++i) {
      auto it = t.find({i, x});
      if (it == t.end()) continue;
      const auto& r = it->second;
      if (!t.contains({r.to, xi})) t[{r.to, xi}] = CosetRule{r.to, xi, i, formal_inverse(r.rewrite)};
    }
  }
  return t;
}

// --- validation ---------------------------------------------------------------------

namespace {

void check_names(const std::vector<Symbol>& gens, const std::string& where, std::vector<std::string>& errs) {
  std::set<Symbol> seen;
  for (const auto& x : gens) {
    if (x.empty() || is_inverse_name(x)) errs.push_back(where + ": bad generator name '" + x + "'");
    if (!seen.insert(x).second) errs.push_back(where + ": duplicate generator '" + x + "'");
  }
}

bool over(const Word& w, const std::vector<Symbol>& alpha) {
  return std::all_of(w.begin(), w.end(),
                     [&](const Symbol& s) { return std::find(alpha.begin(), alpha.end(), s) != alpha.end(); });
}

void validate_into(const GroupSpec& g, const std::string& path, std::vector<std::string>& errs);

void validate_hnn(const GroupSpec& base, const HnnData& d, const std::string& path, std::vector<std::string>& errs) {
  const std::size_t before = errs.size();
  validate_into(base, path + ".base", errs);
  if (errs.size() != before) return;
  const auto X = generators(base);
  const auto sigma = group_alphabet(X);
  if (d.stable_letter.empty() || is_inverse_name(d.stable_letter) ||
      std::find(sigma.begin(), sigma.end(), d.stable_letter) != sigma.end())
    errs.push_back(path + ".stable_letter: '" + d.stable_letter + "' clashes with the base alphabet");
  if (d.phi_order < 1) errs.push_back(path + ".phi_order: must be at least 1");
  for (const auto& x : X) {
    auto it = d.phi.find(x);
    if (it == d.phi.end()) errs.push_back(path + ".phi: no image for '" + x + "'");
    else if (!over(it->second, sigma)) errs.push_back(path + ".phi: image of '" + x + "' leaves the base alphabet");
    if (!d.psi.contains(x)) errs.push_back(path + ".psi: no image for '" + x + "'");
  }
  for (const auto& [x, w] : d.phi)
    if (std::find(X.begin(), X.end(), x) == X.end()) errs.push_back(path + ".phi: '" + x + "' is not a generator");
  for (const auto& e : validate_finite_group(d.quotient)) errs.push_back(path + ".quotient: " + e);
  if (errs.size() != before) return;

  const GroupTable K(d.quotient);
  const std::size_t n = K.size();
  std::vector<int> pb(n, -1);
  for (const auto& [a, b] : d.phi_bar) {
    auto ia = std::find(d.quotient.elements.begin(), d.quotient.elements.end(), a);
    auto ib = std::find(d.quotient.elements.begin(), d.quotient.elements.end(), b);
    if (ia == d.quotient.elements.end() || ib == d.quotient.elements.end()) {
      errs.push_back(path + ".phi_bar: unknown element in '" + a + "' -> '" + b + "'");
      return;
    }
    pb[ia - d.quotient.elements.begin()] = static_cast<int>(ib - d.quotient.elements.begin());
  }
  for (const auto& [x, k] : d.psi)
    if (std::find(d.quotient.elements.begin(), d.quotient.elements.end(), k) == d.quotient.elements.end()) {
      errs.push_back(path + ".psi: '" + k + "' is not an element of the quotient");
      return;
    }
  if (std::count(pb.begin(), pb.end(), -1) > 0) {
    errs.push_back(path + ".phi_bar: not defined on every element");
    return;
  }
  if (std::set<int>(pb.begin(), pb.end()).size() != n) errs.push_back(path + ".phi_bar: not a bijection");
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      if (pb[K.mul(a, b)] != K.mul(pb[a], pb[b])) {
        errs.push_back(path + ".phi_bar: not a homomorphism");
        a = n;
        break;
      }
  for (std::size_t a = 0; a < n; ++a) {
    int x = static_cast<int>(a);
    for (int i = 0; i < d.phi_order; ++i) x = pb[x];
    if (x != static_cast<int>(a)) {
      errs.push_back(path + ".phi_bar: its phi_order-th power is not the identity");
      break;
    }
  }
  std::set<int> J;
  for (const auto& j : d.J) {
    if (std::find(d.quotient.elements.begin(), d.quotient.elements.end(), j) == d.quotient.elements.end()) {
      errs.push_back(path + ".J: '" + j + "' is not an element of the quotient");
      return;
    }
    J.insert(K.index(j));
  }
  if (!J.contains(K.identity())) errs.push_back(path + ".J: does not contain the identity");
  for (int a : J)
    for (int b : J)
      if (!J.contains(K.mul(a, b))) {
        errs.push_back(path + ".J: not closed under multiplication");
        goto closed;
      }
closed:
  for (int a : J)
    if (!J.contains(pb[a])) {
      errs.push_back(path + ".J: phi_bar(J) != J");
      break;
    }
  if (errs.size() != before) return;

  auto psi_of = [&](const Word& w) {
    int k = K.identity();
    for (const auto& s : w) {
      const bool inv = is_inverse_name(s);
      const int v = K.index(d.psi.at(inv ? inverse_symbol(s) : s));
      k = K.mul(k, inv ? K.inv(v) : v);
    }
    return k;
  };
  for (const auto& x : X)
    if (psi_of(d.phi.at(x)) != pb[K.index(d.psi.at(x))])
      errs.push_back(path + ": psi(phi(" + x + ")) != phi_bar(psi(" + x + "))");

  try {
    // phi^p(x) = x is checked with the base group's own machine.
    const auto pw = phi_powers(X, d.phi, d.phi_order + 1);
    Runner base_wp(build_wp(base));
    for (const auto& x : X) {
      auto w = concat(pw[d.phi_order].at(x), {inverse_symbol(x)});
      if (!base_wp.accepts(w)) errs.push_back(path + ".phi_order: phi^p(" + x + ") differs from " + x);
    }
  } catch (const PreconditionError& e) {
    errs.push_back(path + ".phi: " + e.what());
  }
}

void validate_into(const GroupSpec& g, const std::string& path, std::vector<std::string>& errs) {
  std::visit(
      overloaded{
          [&](const FreeSpec& f) { check_names(f.generators, path, errs); },
          [&](const FreeAbelianSpec& f) { check_names(f.generators, path, errs); },
          [&](const FiniteSpec& f) {
            for (const auto& e : validate_finite_group(f.group)) errs.push_back(path + ".group: " + e);
            check_names(generators(g), path, errs);
            for (const auto& [x, e] : f.generators)
              if (std::find(f.group.elements.begin(), f.group.elements.end(), e) == f.group.elements.end())
                errs.push_back(path + ".generators: '" + x + "' maps to unknown element '" + e + "'");
          },
          [&](const DirectProductSpec& d) {
            if (!d.left || !d.right) {
              errs.push_back(path + ": missing factor");
              return;
            }
            validate_into(*d.left, path + ".left", errs);
            validate_into(*d.right, path + ".right", errs);
            auto l = generators(*d.left);
            for (const auto& x : generators(*d.right))
              if (std::find(l.begin(), l.end(), x) != l.end())
                errs.push_back(path + ": generator '" + x + "' occurs in both factors");
          },
          [&](const FiniteExtensionSpec& f) {
            if (!f.subgroup) {
              errs.push_back(path + ": missing subgroup");
              return;
            }
            const std::size_t before = errs.size();
            validate_into(*f.subgroup, path + ".subgroup", errs);
            check_names(f.generators, path, errs);
            if (f.coset_count < 1) errs.push_back(path + ".coset_count: must be at least 1");
            if (errs.size() != before) return;
            const auto sigma = group_alphabet(f.generators);
            const auto sub = alphabet(*f.subgroup);
            std::set<std::pair<int, Symbol>> seen;
            for (const auto& r : f.rules) {
              const std::string where = path + ".rules(" + std::to_string(r.coset) + ", " + r.letter + ")";
              if (r.coset < 1 || r.coset > f.coset_count || r.to < 1 || r.to > f.coset_count)
                errs.push_back(where + ": coset index out of range");
              if (std::find(sigma.begin(), sigma.end(), r.letter) == sigma.end())
                errs.push_back(where + ": unknown letter");
              if (!over(r.rewrite, sub)) errs.push_back(where + ": rewrite word leaves the subgroup alphabet");
              if (!seen.insert({r.coset, r.letter}).second) errs.push_back(where + ": duplicate rule");
            }
            if (errs.size() != before) return;
            for (const auto& x : f.generators) {
              std::set<int> image;
              for (int i = 1; i <= f.coset_count; ++i) {
                if (!seen.contains({i, x})) {
                  errs.push_back(path + ".rules: no rule for (" + std::to_string(i) + ", " + x + ")");
                  continue;
                }
              }
              for (const auto& r : f.rules)
                if (r.letter == x) image.insert(r.to);
              if (static_cast<int>(image.size()) != f.coset_count)
                errs.push_back(path + ".rules: the action of '" + x + "' on cosets is not a permutation");
            }
            if (errs.size() != before) return;
            const auto table = coset_table(f);
            Runner sub_wp(build_wp(*f.subgroup));
            for (const auto& x : f.generators)
              for (int i = 1; i <= f.coset_count; ++i) {
                const auto& r = table.at({i, x});
                auto back = table.find({r.to, inverse_symbol(x)});
                if (back == table.end() || back->second.to != i) {
                  errs.push_back(path + ".rules: j(j(" + std::to_string(i) + ", " + x + "), " + inverse_symbol(x) +
                                 ") != " + std::to_string(i));
                  continue;
                }
                if (!sub_wp.accepts(concat(r.rewrite, back->second.rewrite)))
                  errs.push_back(path + ".rules: rewrite words for (" + std::to_string(i) + ", " + x +
                                 ") and its inverse do not cancel");
              }
          },
          [&](const FiniteQuotientSpec& f) {
            if (!f.base) {
              errs.push_back(path + ": missing base");
              return;
            }
            validate_into(*f.base, path + ".base", errs);
            const auto sigma = alphabet(*f.base);
            for (const auto& w : f.normal_subgroup_words)
              if (!over(w, sigma)) errs.push_back(path + ".normal_subgroup_words: '" + format_word(w) + "' leaves the alphabet");
          },
          [&](const HnnSpec& h) {
            if (!h.base) errs.push_back(path + ": missing base");
            else validate_hnn(*h.base, h.data, path, errs);
          },
          [&](const MappingTorusSpec& m) {
            if (!m.base) errs.push_back(path + ": missing base");
            else validate_hnn(*m.base, mapping_torus_data(m), path, errs);
          },
          [&](const DoubleSpec& d) {
            if (!d.base) {
              errs.push_back(path + ": missing base");
              return;
            }
            validate_hnn(*d.base, d.data, path, errs);
            if (d.bar_suffix.empty()) errs.push_back(path + ".bar_suffix: must not be empty");
            check_names(generators(g), path, errs);
          },
      },
      g.v);
}

void require_valid_group(const GroupSpec& g) {
  auto errs = validate_group(g);
  if (errs.empty()) return;
  std::string msg = "invalid group spec";
  for (const auto& e : errs) msg += "\n  " + e;
  throw PreconditionError(msg);
}

}  // namespace

std::vector<std::string> validate_group(const GroupSpec& g) {
  std::vector<std::string> errs;
  validate_into(g, variant_name(g), errs);
  return errs;
}

// --- machines -----------------------------------------------------------------------

namespace {

MultipassAutomaton free_machine(const std::vector<Symbol>& gens) {
  MultipassAutomaton m;
  m.states = {"q"};
  m.initial = "q";
  m.input_alphabet = group_alphabet(gens);
  m.stack_alphabet = m.input_alphabet;
  for (const auto& k : m.stack_keys())
    for (const auto& x : m.input_alphabet) {
      if (k && *k == inverse_symbol(x)) {
        m.add_transition(1, "q", x, k, "q", {});
      } else {
        Word push = k ? Word{*k, x} : Word{x};
        m.add_transition(1, "q", x, k, "q", push);
      }
    }
  m.fill_final();
  m.set_final("q", std::nullopt, EndVerdict::Accept);
  return m;
}

// Pass j keeps |exponent sum of generator j| copies of x_j or x_j^-1.
MultipassAutomaton free_abelian_machine(const std::vector<Symbol>& gens) {
  MultipassAutomaton m;
  m.passes = std::max<int>(1, static_cast<int>(gens.size()));
  m.states = {"q", "bad"};
  m.initial = "q";
  m.input_alphabet = group_alphabet(gens);
  m.stack_alphabet = m.input_alphabet;
  for (int j = 1; j <= static_cast<int>(gens.size()); ++j) {
    const Symbol g = gens[j - 1], gi = inverse_symbol(g);
    for (const auto& k : m.stack_keys()) {
      Word keep = k ? Word{*k} : Word{};
      for (const auto& x : m.input_alphabet) {
        m.add_transition(j, "bad", x, k, "bad", keep);
        if (x != g && x != gi) m.add_transition(j, "q", x, k, "q", keep);
        else if (!k) m.add_transition(j, "q", x, k, "q", {x});
        else if (*k == x) m.add_transition(j, "q", x, k, "q", {x, x});
        else m.add_transition(j, "q", x, k, "q", {});
      }
      if (j < m.passes) {
        m.add_end(j, "q", k, k ? "bad" : "q");
        m.add_end(j, "bad", k, "bad");
      }
    }
  }
  m.fill_final();
  m.set_final("q", std::nullopt, EndVerdict::Accept);
  return m;
}

MultipassAutomaton finite_machine(const FiniteSpec& f) {
  const GroupTable G(f.group);
  MultipassAutomaton m;
  auto st = [&](int i) { return "g:" + G.name(i); };
  for (std::size_t i = 0; i < G.size(); ++i) m.states.push_back(st(static_cast<int>(i)));
  m.initial = st(G.identity());
  std::vector<Symbol> gens;
  for (const auto& [x, e] : f.generators) gens.push_back(x);
  m.input_alphabet = group_alphabet(gens);
  m.stack_alphabet = m.input_alphabet;
  for (const auto& [x, e] : f.generators) {
    const int v = G.index(e);
    for (std::size_t i = 0; i < G.size(); ++i) {
      m.add_transition(1, st(static_cast<int>(i)), x, std::nullopt, st(G.mul(static_cast<int>(i), v)), {});
      m.add_transition(1, st(static_cast<int>(i)), inverse_symbol(x), std::nullopt,
                       st(G.mul(static_cast<int>(i), G.inv(v))), {});
    }
  }
  m.fill_final();
  m.set_final(st(G.identity()), std::nullopt, EndVerdict::Accept);
  return m;
}

MultipassAutomaton finite_extension_machine(const FiniteExtensionSpec& f) {
  const auto sub = build_wp(*f.subgroup);
  Gsm s;
  auto c = [](int i) { return "c" + std::to_string(i); };
  for (int i = 1; i <= f.coset_count; ++i) s.states.push_back(c(i));
  s.initial = c(1);
  s.input_alphabet = group_alphabet(f.generators);
  s.output_alphabet = sub.input_alphabet;
  for (const auto& [key, r] : coset_table(f)) s.add_rule(c(r.coset), r.letter, r.rewrite, c(r.to));
  return inverse_gsm(sub, s, std::set<State>{c(1)});
}

MultipassAutomaton finite_quotient_machine(const FiniteQuotientSpec& f) {
  const auto base = build_wp(*f.base);
  std::vector<Word> K;
  for (const auto& w : f.normal_subgroup_words) K.push_back(formal_inverse(w));
  return machine_union(left_quotient(base, K), base);
}

MultipassAutomaton hnn_machine(const GroupSpec& base, const HnnData& d) {
  const auto first = hnn_first_pass(base, d);
  const auto M = build_wp(base);
  const auto X = generators(base);
  const auto pw = phi_powers(X, d.phi, d.phi_order);
  const Symbol t = d.stable_letter, ti = inverse_symbol(t);
  // Substitutes phi^m(x) for each base letter x, m being the running
  // t-exponent sum mod p.
  Gsm s;
  auto st = [](int m) { return "m" + std::to_string(m); };
  for (int m = 0; m < d.phi_order; ++m) s.states.push_back(st(m));
  s.initial = st(0);
  s.input_alphabet = first.input_alphabet;
  s.output_alphabet = M.input_alphabet;
  for (int m = 0; m < d.phi_order; ++m) {
    for (const auto& x : group_alphabet(X)) s.add_rule(st(m), x, pw[m].at(x), st(m));
    s.add_rule(st(m), t, {}, st((m + 1) % d.phi_order));
    s.add_rule(st(m), ti, {}, st((m + d.phi_order - 1) % d.phi_order));
  }
  return machine_intersection(first, inverse_gsm(M, s));
}

}  // namespace

MultipassAutomaton hnn_first_pass(const GroupSpec& base, const HnnData& d) {
  const GroupTable K(d.quotient);
  const auto X = generators(base);
  const auto base_sigma = group_alphabet(X);
  const Symbol t = d.stable_letter, ti = inverse_symbol(t);
  const int p = d.phi_order;
  const int n = static_cast<int>(K.size());

  std::vector<int> pb1(n);
  for (int a = 0; a < n; ++a) pb1[a] = K.index(d.phi_bar.at(K.name(a)));
  std::vector<std::vector<int>> pb(p, std::vector<int>(n));  // pb[m] = phi_bar^m
  for (int a = 0; a < n; ++a) pb[0][a] = a;
  for (int m = 1; m < p; ++m)
    for (int a = 0; a < n; ++a) pb[m][a] = pb1[pb[m - 1][a]];
  auto psi = [&](const Symbol& x) {
    if (is_inverse_name(x)) return K.inv(K.index(d.psi.at(inverse_symbol(x))));
    return K.index(d.psi.at(x));
  };
  std::set<int> J;
  for (const auto& j : d.J) J.insert(K.index(j));

  MultipassAutomaton m;
  m.input_alphabet = base_sigma;
  m.input_alphabet.push_back(t);
  m.input_alphabet.push_back(ti);
  m.stack_alphabet = m.input_alphabet;
  auto sym = [&](const Symbol& eta, int k) { return "[" + eta + "|" + K.name(k) + "]"; };
  for (const auto& eta : {t, ti})
    for (int k = 0; k < n; ++k) m.stack_alphabet.push_back(sym(eta, k));
  // st(m, k): running count m mod p and the K-image k of the base letters
  // read since the last t-letter; fold(m, c) still has to multiply the
  // exposed stack symbol by c.
  auto st = [](int cnt, const std::string& k) { return "s" + std::to_string(cnt) + ":" + k; };
  auto fold = [](int cnt, const std::string& k) { return "f" + std::to_string(cnt) + ":" + k; };
  for (int c = 0; c < p; ++c)
    for (int k = 0; k < n; ++k) {
      m.states.push_back(st(c, K.name(k)));
      m.states.push_back(fold(c, K.name(k)));
    }
  m.initial = st(0, K.name(K.identity()));
  const int e = K.identity();

  struct Top {
    Symbol eta;
    int k;
  };
  std::vector<std::pair<StackKey, std::optional<Top>>> keys{{std::nullopt, std::nullopt}};
  for (const auto& eta : {t, ti})
    for (int k = 0; k < n; ++k) keys.push_back({sym(eta, k), Top{eta, k}});

  for (int c = 0; c < p; ++c)
    for (int acc = 0; acc < n; ++acc) {
      const State here = st(c, K.name(acc));
      for (const auto& [key, top] : keys) {
        Word keep = key ? Word{*key} : Word{};
        for (const auto& x : base_sigma) {
          const int next = top ? K.mul(acc, pb[c][psi(x)]) : e;
          m.add_transition(1, here, x, key, st(c, K.name(next)), keep);
        }
        for (const auto& eta : {t, ti}) {
          const int c2 = (c + (eta == t ? 1 : p - 1)) % p;
          if (!top) {
            m.add_transition(1, here, eta, key, st(c2, K.name(e)), {sym(eta, e)});
          } else if (eta == inverse_symbol(top->eta) && J.contains(K.mul(top->k, acc))) {
            m.add_transition(1, here, eta, key, fold(c2, K.name(K.mul(top->k, acc))), {});
          } else {
            m.add_transition(1, here, eta, key, st(c2, K.name(e)), {sym(top->eta, K.mul(top->k, acc)), sym(eta, e)});
          }
        }
      }
      // fold(c, acc) with acc read as the pending factor
      const State f = fold(c, K.name(acc));
      for (const auto& [key, top] : keys) {
        if (top) {
          m.add_transition(1, f, std::nullopt, key, st(c, K.name(e)), {sym(top->eta, K.mul(top->k, acc))});
          continue;
        }
        for (const auto& x : base_sigma) m.add_transition(1, f, x, std::nullopt, st(c, K.name(e)), {});
        for (const auto& eta : {t, ti}) {
          const int c2 = (c + (eta == t ? 1 : p - 1)) % p;
          m.add_transition(1, f, eta, std::nullopt, st(c2, K.name(e)), {sym(eta, e)});
        }
      }
      m.set_final(here, std::nullopt, EndVerdict::Accept);
      m.set_final(f, std::nullopt, EndVerdict::Accept);
    }
  m.fill_final();
  return prune_unreachable(m);
}

MultipassAutomaton build_wp(const GroupSpec& g) {
  require_valid_group(g);
  return std::visit(overloaded{
                        [](const FreeSpec& f) { return free_machine(f.generators); },
                        [](const FreeAbelianSpec& f) { return free_abelian_machine(f.generators); },
                        [](const FiniteSpec& f) { return finite_machine(f); },
                        [](const DirectProductSpec& d) {
                          return interleaved_product({build_wp(*d.left), build_wp(*d.right)});
                        },
                        [](const FiniteExtensionSpec& f) { return finite_extension_machine(f); },
                        [](const FiniteQuotientSpec& f) { return finite_quotient_machine(f); },
                        [](const HnnSpec& h) { return hnn_machine(*h.base, h.data); },
                        [](const MappingTorusSpec& m) { return hnn_machine(*m.base, mapping_torus_data(m)); },
                        [&](const DoubleSpec& d) {
                          const auto H = hnn_machine(*d.base, d.data);
                          const Symbol t = d.data.stable_letter, ti = inverse_symbol(t);
                          std::map<Symbol, Word> images;
                          for (const auto& x : generators(*d.base)) {
                            images[x] = {x};
                            images[inverse_symbol(x)] = {inverse_symbol(x)};
                            images[x + d.bar_suffix] = {t, x, ti};
                            images[inverse_symbol(x + d.bar_suffix)] = {t, inverse_symbol(x), ti};
                          }
                          return inverse_gsm(H, homomorphism_gsm(alphabet(g), images, H.input_alphabet));
                        },
                    },
                    g.v);
}

MultipassAutomaton wp_pullback(const MultipassAutomaton& m, const std::map<Symbol, Word>& generator_images) {
  std::vector<Symbol> Y;
  std::map<Symbol, Word> images;
  for (const auto& [y, w] : generator_images) {
    if (is_inverse_name(y)) throw PreconditionError("wp_pullback: give images for generators, not for '" + y + "'");
    Y.push_back(y);
    images[y] = w;
    images[inverse_symbol(y)] = formal_inverse(w);
  }
  return inverse_gsm(m, homomorphism_gsm(group_alphabet(Y), images, m.input_alphabet));
}

// --- JSON ---------------------------------------------------------------------------

namespace {

Json finite_group_json(const FiniteGroup& g) {
  Json j;
  j["elements"] = g.elements;
  j["table"] = g.table;
  j["identity"] = g.identity;
  return j;
}

FiniteGroup finite_group_from(const Json& j, const std::string& where) {
  using namespace io;
  FiniteGroup g;
  g.elements = get_strings(j, "elements", where);
  const auto& t = field(j, "table", where);
  if (!t.is_array()) throw ParseError(where + ".table: expected an array of rows");
  for (std::size_t i = 0; i < t.size(); ++i) g.table.push_back(as_word(t[i], where + ".table[" + std::to_string(i) + "]"));
  g.identity = get_string(j, "identity", where);
  return g;
}

Json word_map_json(const std::map<Symbol, Word>& m) {
  Json j = Json::object();
  for (const auto& [k, w] : m) j[k] = w;
  return j;
}

std::map<Symbol, Word> word_map_from(const Json& j, const std::string& where) {
  if (!j.is_object()) throw ParseError(where + ": expected an object");
  std::map<Symbol, Word> out;
  for (auto it = j.begin(); it != j.end(); ++it) out[it.key()] = io::as_word(it.value(), where + "." + it.key());
  return out;
}

std::map<std::string, std::string> string_map_from(const Json& j, const std::string& where) {
  if (!j.is_object()) throw ParseError(where + ": expected an object");
  std::map<std::string, std::string> out;
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!it.value().is_string()) throw ParseError(where + "." + it.key() + ": expected a string");
    out[it.key()] = it.value().get<std::string>();
  }
  return out;
}

void hnn_data_json(const HnnData& d, Json& j) {
  j["stable_letter"] = d.stable_letter;
  j["phi"] = word_map_json(d.phi);
  j["phi_order"] = d.phi_order;
  j["quotient"] = finite_group_json(d.quotient);
  Json psi = Json::object();
  for (const auto& [k, v] : d.psi) psi[k] = v;
  j["psi"] = psi;
  Json pb = Json::object();
  for (const auto& [k, v] : d.phi_bar) pb[k] = v;
  j["phi_bar"] = pb;
  j["J"] = d.J;
}

HnnData hnn_data_from(const Json& j, const std::string& where) {
  using namespace io;
  HnnData d;
  if (j.contains("stable_letter")) d.stable_letter = get_string(j, "stable_letter", where);
  d.phi = word_map_from(field(j, "phi", where), where + ".phi");
  d.phi_order = get_int(j, "phi_order", where);
  d.quotient = finite_group_from(field(j, "quotient", where), where + ".quotient");
  d.psi = string_map_from(field(j, "psi", where), where + ".psi");
  d.phi_bar = string_map_from(field(j, "phi_bar", where), where + ".phi_bar");
  d.J = get_strings(j, "J", where);
  return d;
}

std::vector<Symbol> default_generators(int rank) {
  std::vector<Symbol> out;
  for (int i = 0; i < rank; ++i)
    out.push_back(rank <= 26 ? std::string(1, static_cast<char>('a' + i)) : "x" + std::to_string(i + 1));
  return out;
}

std::vector<Symbol> gens_from(const Json& j, const std::string& where) {
  if (j.contains("generators")) return io::get_strings(j, "generators", where);
  const int r = io::get_int(j, "rank", where);
  if (r < 0) throw ParseError(where + ".rank: must be nonnegative");
  return default_generators(r);
}

GroupSpec from_json_at(const Json& j, const std::string& where);

GroupPtr child(const Json& j, const char* name, const std::string& where) {
  return std::make_shared<const GroupSpec>(from_json_at(io::field(j, name, where), where + "." + name));
}

GroupSpec from_json_at(const Json& j, const std::string& where) {
  using namespace io;
  const auto type = get_string(j, "type", where);
  if (type == "free") return {FreeSpec{gens_from(j, where)}};
  if (type == "free_abelian") return {FreeAbelianSpec{gens_from(j, where)}};
  if (type == "finite") {
    FiniteSpec f;
    f.group = finite_group_from(j, where);
    const auto& gens = field(j, "generators", where);
    if (!gens.is_object()) throw ParseError(where + ".generators: expected an object name -> element");
    for (auto it = gens.begin(); it != gens.end(); ++it) {
      if (!it.value().is_string()) throw ParseError(where + ".generators." + it.key() + ": expected a string");
      f.generators.emplace_back(it.key(), it.value().get<std::string>());
    }
    return {f};
  }
  if (type == "direct_product") return {DirectProductSpec{child(j, "left", where), child(j, "right", where)}};
  if (type == "finite_extension") {
    FiniteExtensionSpec f;
    f.subgroup = child(j, "subgroup", where);
    f.generators = get_strings(j, "generators", where);
    f.coset_count = get_int(j, "coset_count", where);
    const auto& rules = field(j, "rules", where);
    if (!rules.is_array()) throw ParseError(where + ".rules: expected an array");
    for (std::size_t i = 0; i < rules.size(); ++i) {
      const std::string w = where + ".rules[" + std::to_string(i) + "]";
      f.rules.push_back(CosetRule{get_int(rules[i], "coset", w), get_string(rules[i], "letter", w),
                                  get_int(rules[i], "to", w), as_word(field(rules[i], "rewrite", w), w + ".rewrite")});
    }
    return {f};
  }
  if (type == "finite_quotient") {
    FiniteQuotientSpec f;
    f.base = child(j, "base", where);
    const auto& ws = field(j, "normal_subgroup_words", where);
    if (!ws.is_array()) throw ParseError(where + ".normal_subgroup_words: expected an array of words");
    for (std::size_t i = 0; i < ws.size(); ++i)
      f.normal_subgroup_words.push_back(as_word(ws[i], where + ".normal_subgroup_words[" + std::to_string(i) + "]"));
    return {f};
  }
  if (type == "hnn") return {HnnSpec{child(j, "base", where), hnn_data_from(j, where)}};
  if (type == "mapping_torus") {
    MappingTorusSpec m;
    m.base = child(j, "base", where);
    if (j.contains("stable_letter")) m.stable_letter = get_string(j, "stable_letter", where);
    m.phi = word_map_from(field(j, "phi", where), where + ".phi");
    m.phi_order = get_int(j, "phi_order", where);
    return {m};
  }
  if (type == "double") {
    DoubleSpec d;
    d.base = child(j, "base", where);
    d.data = hnn_data_from(j, where);
    if (j.contains("bar_suffix")) d.bar_suffix = get_string(j, "bar_suffix", where);
    return {d};
  }
  throw ParseError(where + ".type: unknown group type '" + type + "'");
}

}  // namespace

Json group_to_json(const GroupSpec& g) {
  Json j;
  j["type"] = variant_name(g);
  std::visit(overloaded{
                 [&](const FreeSpec& f) { j["generators"] = f.generators; },
                 [&](const FreeAbelianSpec& f) { j["generators"] = f.generators; },
                 [&](const FiniteSpec& f) {
                   auto fg = finite_group_json(f.group);
                   for (auto it = fg.begin(); it != fg.end(); ++it) j[it.key()] = it.value();
                   Json gens = Json::object();
                   for (const auto& [x, e] : f.generators) gens[x] = e;
                   j["generators"] = gens;
                 },
                 [&](const DirectProductSpec& d) {
                   j["left"] = group_to_json(*d.left);
                   j["right"] = group_to_json(*d.right);
                 },
                 [&](const FiniteExtensionSpec& f) {
                   j["subgroup"] = group_to_json(*f.subgroup);
                   j["generators"] = f.generators;
                   j["coset_count"] = f.coset_count;
                   Json rules = Json::array();
                   for (const auto& r : f.rules)
                     rules.push_back(Json{{"coset", r.coset}, {"letter", r.letter}, {"to", r.to}, {"rewrite", r.rewrite}});
                   j["rules"] = rules;
                 },
                 [&](const FiniteQuotientSpec& f) {
                   j["base"] = group_to_json(*f.base);
                   j["normal_subgroup_words"] = f.normal_subgroup_words;
                 },
                 [&](const HnnSpec& h) {
                   j["base"] = group_to_json(*h.base);
                   hnn_data_json(h.data, j);
                 },
                 [&](const MappingTorusSpec& m) {
                   j["base"] = group_to_json(*m.base);
                   j["stable_letter"] = m.stable_letter;
                   j["phi"] = word_map_json(m.phi);
                   j["phi_order"] = m.phi_order;
                 },
                 [&](const DoubleSpec& d) {
                   j["base"] = group_to_json(*d.base);
                   hnn_data_json(d.data, j);
                   j["bar_suffix"] = d.bar_suffix;
                 },
             },
             g.v);
  return j;
}

GroupSpec group_from_json(const Json& j) { return from_json_at(j, "group"); }

std::string dump_group(const GroupSpec& g) { return group_to_json(g).dump(2) + "\n"; }

GroupSpec parse_group(std::string_view text) { return group_from_json(io::parse_document(text)); }

GroupSpec load_group(const std::string& path) { return parse_group(io::read_file(path)); }

}  // namespace mpa
