#include "multipass/oracles.hpp"

#include <algorithm>
#include <limits>
#include <map>

namespace mpa {

GroupOracle::GroupOracle(std::vector<Symbol> alphabet, Eval eval)
    : alphabet_(std::move(alphabet)), letters_(alphabet_.begin(), alphabet_.end()), eval_(std::move(eval)) {}

std::string GroupOracle::evaluate(const Word& w) const {
  for (const auto& x : w)
    if (!letters_.contains(x)) throw PreconditionError("oracle: '" + x + "' is not in the group alphabet");
  return eval_(w);
}

namespace {

template <class... Fs>
struct overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
overloaded(Fs...) -> overloaded<Fs...>;

std::string vector_form(const std::vector<long>& v) {
  std::string s = "(";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s + ")";
}

Word project(const Word& w, const std::vector<Symbol>& keep) {
  Word out;
  for (const auto& x : w)
    if (std::find(keep.begin(), keep.end(), x) != keep.end()) out.push_back(x);
  return out;
}

// Britton reduction in an HNN extension of a group known through its oracle.
// A word is split into base segments separated by stable letters.
struct HnnReducer {
  GroupOracle base;
  Symbol t;
  int p;
  std::vector<std::map<Symbol, Word>> pw;
  std::function<int(const Word&)> psi;
  std::set<int> J;

  struct Item {
    int t = 0;  // +1 / -1 for a stable letter, 0 for a base segment
    Word u;
  };

  std::string operator()(const Word& w) const {
    const Symbol ti = inverse_symbol(t);
    std::vector<Item> items{{0, {}}};
    for (const auto& x : w) {
      if (x == t || x == ti) {
        items.push_back({x == t ? 1 : -1, {}});
        items.push_back({0, {}});
      } else {
        items.back().u.push_back(x);
      }
    }
    // items alternate segment, letter, segment, ..., segment
    bool changed = true;
    while (changed) {
      changed = false;
      for (std::size_t i = 1; i + 2 < items.size(); i += 2) {
        const int e = items[i].t;
        if (items[i + 2].t != -e) continue;
        const Word& u = items[i + 1].u;
        if (!J.contains(psi(u))) continue;
        const auto& power = pw[e > 0 ? 1 % p : p - 1];
        Word img = items[i - 1].u;
        for (const auto& x : u) {
          const auto& y = power.at(x);
          img.insert(img.end(), y.begin(), y.end());
        }
        img.insert(img.end(), items[i + 3].u.begin(), items[i + 3].u.end());
        items[i - 1].u = free_reduce(img);
        items.erase(items.begin() + i, items.begin() + i + 4);
        changed = true;
        break;
      }
    }
    if (items.size() == 1) return base.evaluate(items[0].u);
    Word out;
    for (const auto& it : items) {
      if (it.t) out.push_back(it.t > 0 ? t : ti);
      else {
        auto r = free_reduce(it.u);
        out.insert(out.end(), r.begin(), r.end());
      }
    }
    return "hnn:" + format_word(out);
  }
};

HnnReducer hnn_reducer(const GroupSpec& base, const HnnData& d) {
  auto K = std::make_shared<GroupTable>(d.quotient);
  std::map<Symbol, int> psi;
  for (const auto& [x, k] : d.psi) {
    psi[x] = K->index(k);
    psi[inverse_symbol(x)] = K->inv(K->index(k));
  }
  std::set<int> J;
  for (const auto& j : d.J) J.insert(K->index(j));
  auto psi_fn = [K, psi](const Word& u) {
    int k = K->identity();
    for (const auto& x : u) k = K->mul(k, psi.at(x));
    return k;
  };
  return HnnReducer{make_oracle(base), d.stable_letter, d.phi_order, phi_powers(generators(base), d.phi, d.phi_order),
                    psi_fn, J};
}

}  // namespace

GroupOracle make_oracle(const GroupSpec& spec) {
  if (auto errs = validate_group(spec); !errs.empty()) throw PreconditionError("oracle: " + errs.front());
  const auto sigma = alphabet(spec);
  return std::visit(
      overloaded{
          [&](const FreeSpec&) {
            return GroupOracle(sigma, [](const Word& w) {
              auto r = free_reduce(w);
              return r.empty() ? std::string("1") : format_word(r);
            });
          },
          [&](const FreeAbelianSpec& f) {
            return GroupOracle(sigma, [gens = f.generators](const Word& w) {
              std::vector<long> v(gens.size(), 0);
              bool zero = true;
              for (std::size_t i = 0; i < gens.size(); ++i) {
                for (const auto& x : w) v[i] += (x == gens[i]) - (x == inverse_symbol(gens[i]));
                zero = zero && v[i] == 0;
              }
              return zero ? std::string("1") : vector_form(v);
            });
          },
          [&](const FiniteSpec& f) {
            auto G = std::make_shared<GroupTable>(f.group);
            std::map<Symbol, int> val;
            for (const auto& [x, e] : f.generators) {
              val[x] = G->index(e);
              val[inverse_symbol(x)] = G->inv(G->index(e));
            }
            return GroupOracle(sigma, [G, val](const Word& w) {
              int g = G->identity();
              for (const auto& x : w) g = G->mul(g, val.at(x));
              return g == G->identity() ? std::string("1") : "g:" + G->name(g);
            });
          },
          [&](const DirectProductSpec& d) {
            auto l = std::make_shared<GroupOracle>(make_oracle(*d.left));
            auto r = std::make_shared<GroupOracle>(make_oracle(*d.right));
            return GroupOracle(sigma, [l, r](const Word& w) {
              auto a = l->evaluate(project(w, l->alphabet()));
              auto b = r->evaluate(project(w, r->alphabet()));
              return a == "1" && b == "1" ? std::string("1") : "(" + a + " ; " + b + ")";
            });
          },
          [&](const FiniteExtensionSpec& f) {
            auto sub = std::make_shared<GroupOracle>(make_oracle(*f.subgroup));
            auto table = coset_table(f);
            return GroupOracle(sigma, [sub, table](const Word& w) {
              int c = 1;
              Word u;
              for (const auto& x : w) {
                const auto& r = table.at({c, x});
                u.insert(u.end(), r.rewrite.begin(), r.rewrite.end());
                c = r.to;
              }
              auto h = sub->evaluate(u);
              return c == 1 && h == "1" ? std::string("1") : h + " * c" + std::to_string(c);
            });
          },
          [&](const FiniteQuotientSpec& f) {
            auto base = std::make_shared<GroupOracle>(make_oracle(*f.base));
            auto N = f.normal_subgroup_words;
            return GroupOracle(sigma, [base, N](const Word& w) {
              std::string best = base->evaluate(w);
              for (const auto& n : N) best = std::min(best, base->evaluate(concat(w, n)), [](const auto& a, const auto& b) {
                                        // "1" sorts first so the identity coset is always reported as "1"
                                        return std::make_pair(a != "1", a) < std::make_pair(b != "1", b);
                                      });
              return best;
            });
          },
          [&](const HnnSpec& h) { return GroupOracle(sigma, hnn_reducer(*h.base, h.data)); },
          [&](const MappingTorusSpec& m) { return GroupOracle(sigma, hnn_reducer(*m.base, mapping_torus_data(m))); },
          [&](const DoubleSpec& d) {
            auto red = hnn_reducer(*d.base, d.data);
            std::map<Symbol, Word> images;
            const Symbol t = d.data.stable_letter, ti = inverse_symbol(t);
            for (const auto& x : generators(*d.base)) {
              images[x + d.bar_suffix] = {t, x, ti};
              images[inverse_symbol(x + d.bar_suffix)] = {t, inverse_symbol(x), ti};
            }
            return GroupOracle(sigma, [red, images](const Word& w) {
              Word h;
              for (const auto& x : w) {
                auto it = images.find(x);
                if (it == images.end()) h.push_back(x);
                else h.insert(h.end(), it->second.begin(), it->second.end());
              }
              return red(h);
            });
          },
      },
      spec.v);
}

std::string dihedral_normal_form(const Word& w) {
  long k = 0;
  int e = 0;
  for (const auto& x : w) {
    if (x == "a") k += e ? -1 : 1;
    else if (x == "a^-1") k += e ? 1 : -1;
    else if (x == "s" || x == "s^-1") e ^= 1;
    else throw PreconditionError("dihedral_normal_form: unexpected letter '" + x + "'");
  }
  return k == 0 && e == 0 ? "1" : "(" + std::to_string(k) + "," + std::to_string(e) + ")";
}

// --- Britton over <b> ----------------------------------------------------------------

namespace {

struct BsItem {
  int t = 0;     // +1 / -1: stable letter
  long b = 0;    // exponent of a b-run when t == 0
};

std::vector<BsItem> bs_parse(const Word& w) {
  std::vector<BsItem> items;
  for (const auto& x : w) {
    if (x == "b" || x == "b^-1") {
      const long e = x == "b" ? 1 : -1;
      if (!items.empty() && items.back().t == 0) items.back().b += e;
      else items.push_back({0, e});
    } else if (x == "t" || x == "t^-1") {
      items.push_back({x == "t" ? 1 : -1, 0});
    } else {
      throw PreconditionError("britton: unexpected letter '" + x + "'");
    }
  }
  return items;
}

// Position of the first pinch t^e b^a t^-e (i points at the first stable
// letter; `a` receives the exponent, 0 when the letters are adjacent).
std::optional<std::pair<std::size_t, long>> bs_find_pinch(const std::vector<BsItem>& it, long p, long q) {
  for (std::size_t i = 0; i < it.size(); ++i) {
    if (it[i].t == 0) continue;
    long a = 0;
    std::size_t j = i + 1;
    if (j < it.size() && it[j].t == 0) a = it[j++].b;
    if (j >= it.size() || it[j].t != -it[i].t) continue;
    const long div = it[i].t > 0 ? p : q;
    if (a % div == 0) return std::make_pair(i, a);
  }
  return std::nullopt;
}

}  // namespace

Word britton_reduce_pq(const Word& w, long p, long q) {
  if (p == 0 || q == 0) throw PreconditionError("britton_reduce: p and q must be nonzero");
  auto items = bs_parse(w);
  while (auto pinch = bs_find_pinch(items, p, q)) {
    const auto [i, a] = *pinch;
    const bool up = items[i].t > 0;
    const std::size_t len = (i + 1 < items.size() && items[i + 1].t == 0) ? 3 : 2;
    const long img = up ? a / p * q : a / q * p;
    if (std::abs(img) > 1'000'000) throw PreconditionError("britton_reduce: exponent too large");
    items.erase(items.begin() + i, items.begin() + i + len);
    items.insert(items.begin() + i, BsItem{0, img});
    // merge neighbouring b-runs and drop empty ones
    std::vector<BsItem> merged;
    for (const auto& x : items) {
      if (x.t == 0 && !merged.empty() && merged.back().t == 0) merged.back().b += x.b;
      else merged.push_back(x);
    }
    items.clear();
    for (const auto& x : merged)
      if (x.t != 0 || x.b != 0) items.push_back(x);
  }
  Word out;
  for (const auto& x : items) {
    if (x.t) out.push_back(x.t > 0 ? "t" : "t^-1");
    else out.insert(out.end(), static_cast<std::size_t>(std::abs(x.b)), x.b > 0 ? "b" : "b^-1");
  }
  return out;
}

Word britton_reduce(const Word& w, long d, long s) {
  if (d < 1 || (s != 1 && s != -1)) throw PreconditionError("britton_reduce: need d >= 1 and s = +1 or -1");
  return britton_reduce_pq(w, d, s * d);
}

bool has_pinch(const Word& reduced, long p, long q) { return bs_find_pinch(bs_parse(reduced), p, q).has_value(); }

// --- Parikh vectors and semilinear sets -----------------------------------------------

ParikhVector parikh(const Word& w, const std::vector<Symbol>& ordering) {
  std::map<Symbol, std::size_t> pos;
  for (std::size_t i = 0; i < ordering.size(); ++i) pos.emplace(ordering[i], i);
  ParikhVector v(ordering.size(), 0);
  for (const auto& x : w) {
    auto it = pos.find(x);
    if (it == pos.end()) throw PreconditionError("parikh: '" + x + "' is not in the ordering");
    ++v[it->second];
  }
  return v;
}

SemilinearSet normalize(SemilinearSet s) {
  std::optional<std::size_t> dim;
  auto check = [&](const ParikhVector& v) {
    if (!dim) dim = v.size();
    if (v.size() != *dim) throw PreconditionError("semilinear set: inconsistent dimensions");
    for (auto x : v)
      if (x < 0) throw PreconditionError("semilinear set: negative coordinate");
  };
  for (auto& c : s.components) {
    check(c.base);
    std::vector<ParikhVector> kept;
    for (const auto& per : c.periods) {
      check(per);
      if (std::any_of(per.begin(), per.end(), [](auto x) { return x != 0; }) &&
          std::find(kept.begin(), kept.end(), per) == kept.end())
        kept.push_back(per);
    }
    c.periods = std::move(kept);
  }
  return s;
}

namespace {

bool reach(const std::vector<ParikhVector>& periods, std::size_t i, ParikhVector& rest) {
  if (std::all_of(rest.begin(), rest.end(), [](auto x) { return x == 0; })) return true;
  if (i == periods.size()) return false;
  const auto& per = periods[i];
  // largest multiple that still fits
  std::int64_t most = std::numeric_limits<std::int64_t>::max();
  for (std::size_t c = 0; c < per.size(); ++c)
    if (per[c] > 0) most = std::min(most, rest[c] / per[c]);
  for (std::int64_t n = 0; n <= most; ++n) {
    if (reach(periods, i + 1, rest)) return true;
    if (n == most) break;
    for (std::size_t c = 0; c < per.size(); ++c) rest[c] -= per[c];
  }
  for (std::size_t c = 0; c < per.size(); ++c) rest[c] += most * per[c];
  return false;
}

}  // namespace

bool semilinear_member(const SemilinearSet& s, const ParikhVector& v) {
  const auto set = normalize(s);
  for (const auto& comp : set.components) {
    if (comp.base.size() != v.size()) throw PreconditionError("semilinear_member: dimension mismatch");
    ParikhVector rest(v.size());
    bool ok = true;
    for (std::size_t c = 0; c < v.size(); ++c) {
      rest[c] = v[c] - comp.base[c];
      ok = ok && rest[c] >= 0;
    }
    if (ok && reach(comp.periods, 0, rest)) return true;
  }
  return false;
}

SymbolPattern::SymbolPattern(std::string_view text) : text_(text) {
  for (auto tok : parse_word(text)) {
    Token t;
    const char last = tok.back();
    if (tok.size() > 1 && (last == '+' || last == '*' || last == '?')) {
      tok.pop_back();
      t.min = last == '+' ? 1 : 0;
      t.unbounded = last != '?';
    }
    t.symbol = tok;
    tokens_.push_back(t);
  }
}

bool SymbolPattern::matches(const Word& w) const {
  // reachable[i]: the prefix of length i can be matched by the tokens so far
  std::vector<bool> reachable(w.size() + 1, false);
  reachable[0] = true;
  for (const auto& t : tokens_) {
    std::vector<bool> next(w.size() + 1, false);
    for (std::size_t i = 0; i <= w.size(); ++i) {
      if (!reachable[i]) continue;
      std::size_t k = 0, j = i;
      while (true) {
        if (k >= t.min) next[j] = true;
        if (k == t.max() || j == w.size() || w[j] != t.symbol) break;
        ++j;
        ++k;
      }
    }
    reachable = std::move(next);
  }
  return reachable[w.size()];
}

void SymbolPattern::for_each_match(std::size_t max_len, const std::function<void(const Word&)>& fn) const {
  Word w;
  std::function<void(std::size_t)> go = [&](std::size_t i) {
    if (i == tokens_.size()) {
      fn(w);
      return;
    }
    const auto& t = tokens_[i];
    const std::size_t before = w.size();
    for (std::size_t k = 0;; ++k) {
      if (k >= t.min) go(i + 1);
      if (k == t.max() || w.size() == max_len) break;
      w.push_back(t.symbol);
    }
    w.resize(before);
  };
  if (tokens_.empty()) {
    fn(w);
    return;
  }
  go(0);
}

std::set<ParikhVector> parikh_image(const std::function<bool(const Word&)>& member,
                                    const std::vector<Symbol>& ordering,
                                    const std::optional<SymbolPattern>& pattern, std::size_t max_len) {
  std::set<ParikhVector> out;
  auto visit = [&](const Word& w) {
    if (member(w)) out.insert(parikh(w, ordering));
  };
  if (pattern) pattern->for_each_match(max_len, visit);
  else for_each_word(ordering, max_len, visit);
  return out;
}

// --- matrices ---------------------------------------------------------------------------

RationalMatrix2 operator*(const RationalMatrix2& x, const RationalMatrix2& y) {
  return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d, x.c * y.a + x.d * y.c, x.c * y.b + x.d * y.d};
}

RationalMatrix2 RationalMatrix2::inverse() const {
  const Rational D = det();
  if (D == 0) throw PreconditionError("matrix is singular");
  return {d / D, -b / D, -c / D, a / D};
}

std::string RationalMatrix2::to_string() const {
  return "[[" + a.str() + ", " + b.str() + "], [" + c.str() + ", " + d.str() + "]]";
}

RationalMatrix2 bs_matrix_eval(const Word& w, long n) {
  if (n < 2) throw PreconditionError("bs_matrix_eval: n must be at least 2");
  const RationalMatrix2 b{1, 1, 0, 1};
  const RationalMatrix2 t{Rational(n), 0, 0, Rational(1, n)};
  const RationalMatrix2 bi = b.inverse(), ti = t.inverse();
  RationalMatrix2 m;
  for (const auto& x : w) {
    if (x == "b") m = m * b;
    else if (x == "b^-1") m = m * bi;
    else if (x == "t") m = m * t;
    else if (x == "t^-1") m = m * ti;
    else throw PreconditionError("bs_matrix_eval: unexpected letter '" + x + "'");
  }
  return m;
}

}  // namespace mpa
