#include "multipass/verify.hpp"

#include <algorithm>
#include <mutex>
#include <sstream>
#include <thread>

#include "multipass/groups.hpp"
#include "multipass/oracles.hpp"
#include "multipass/pda.hpp"

namespace mpa {

namespace {

long parse_long(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    long v = std::stol(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw ParseError("oracle: bad number '" + s + "' in " + what);
}

}  // namespace

NamedOracle resolve_oracle(const std::string& spec) {
  const auto colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : spec.substr(colon + 1);
  if (kind == "group") {
    auto oracle = std::make_shared<GroupOracle>(make_oracle(load_group(arg)));
    return {spec, oracle->alphabet(), [oracle](const Word& w) { return oracle->is_identity(w); }};
  }
  if (kind == "exponent-sum") {
    return {spec, {}, [](const Word& w) {
              std::map<Symbol, long> sum;
              for (const auto& x : w) sum[is_inverse_name(x) ? inverse_symbol(x) : x] += is_inverse_name(x) ? -1 : 1;
              return std::all_of(sum.begin(), sum.end(), [](const auto& kv) { return kv.second == 0; });
            }};
  }
  if (kind == "britton") {
    const auto comma = arg.find(',');
    if (comma == std::string::npos) throw ParseError("oracle: expected britton:D,S");
    const long d = parse_long(arg.substr(0, comma), spec), s = parse_long(arg.substr(comma + 1), spec);
    britton_reduce({}, d, s);  // validates d and s
    return {spec, {"b", "b^-1", "t", "t^-1"}, [d, s](const Word& w) { return britton_reduce(w, d, s).empty(); }};
  }
  if (kind == "bs") {
    const long n = parse_long(arg, spec);
    bs_matrix_eval({}, n);
    return {spec, {"b", "b^-1", "t", "t^-1"},
            [n](const Word& w) { return bs_matrix_eval(w, n) == RationalMatrix2::identity(); }};
  }
  if (kind == "dihedral") {
    return {spec, {"a", "a^-1", "s", "s^-1"}, [](const Word& w) { return dihedral_normal_form(w) == "1"; }};
  }
  if (kind == "machine" || kind == "not-machine") {
    const auto m = load_machine(arg);
    require_valid(m, "oracle");
    auto r = std::make_shared<Runner>(m);
    const bool negate = kind == "not-machine";
    return {spec, m.input_alphabet, [r, negate](const Word& w) { return r->accepts(w) != negate; }};
  }
  if (kind == "pda") {
    auto p = std::make_shared<PushdownAutomaton>(parse_pda(io::read_file(arg)));
    return {spec, p->input_alphabet, [p](const Word& w) { return pda_run(*p, w).accepted(); }};
  }
  throw ParseError("unknown oracle '" + spec + "'");
}

int VerifyReport::exit_code() const {
  if (disagreement_count > 0 || bound_violations > 0) return 1;
  if (budget_exceeded > 0) return 2;
  return 0;
}

Json VerifyReport::to_json() const {
  Json j;
  j["machine"] = machine_id;
  j["oracle"] = oracle_id;
  j["max_len"] = max_len;
  j["words_checked"] = words_checked;
  j["disagreement_count"] = disagreement_count;
  Json d = Json::array();
  for (const auto& x : disagreements)
    d.push_back(Json{{"word", format_word(x.word)}, {"machine", x.machine_verdict}, {"oracle", x.oracle_member}});
  j["disagreements"] = d;
  j["budget_exceeded"] = budget_exceeded;
  Json h = Json::object();
  for (const auto& [steps, n] : steps_histogram) h[std::to_string(steps)] = n;
  j["steps_histogram"] = h;
  Json b;
  b["applicable"] = bound_applicable;
  b["coefficient"] = bound_coefficient;
  b["max_steps_per_symbol"] = max_steps_per_symbol;
  b["violations"] = bound_violations;
  j["linear_bound"] = b;
  return j;
}

std::string VerifyReport::summary() const {
  std::ostringstream out;
  out << "machine " << machine_id << " vs oracle " << oracle_id << ": " << words_checked << " words up to length "
      << max_len << ", " << disagreement_count << " disagreements";
  if (budget_exceeded) out << ", " << budget_exceeded << " budget-exceeded";
  if (bound_applicable)
    out << "; linear bound " << bound_coefficient << "*(n+1), max observed " << max_steps_per_symbol << " per symbol, "
        << bound_violations << " violations";
  out << "\n";
  for (const auto& d : disagreements)
    out << "  [" << format_word(d.word) << "] machine=" << d.machine_verdict
        << " oracle=" << (d.oracle_member ? "member" : "non-member") << "\n";
  if (disagreement_count > disagreements.size())
    out << "  ... " << (disagreement_count - disagreements.size()) << " more\n";
  return out.str();
}

VerifyReport verify(const MultipassAutomaton& m, const NamedOracle& oracle, std::size_t max_len, unsigned jobs,
                    std::uint64_t budget, std::string machine_id) {
  require_valid(m, "verify");
  if (!oracle.alphabet.empty()) {
    std::set<Symbol> a(m.input_alphabet.begin(), m.input_alphabet.end()), b(oracle.alphabet.begin(), oracle.alphabet.end());
    if (a != b) throw PreconditionError("verify: machine and oracle alphabets differ");
  }
  VerifyReport rep;
  rep.machine_id = std::move(machine_id);
  rep.oracle_id = oracle.id;
  rep.max_len = max_len;
  LinearBound bound;
  if (m.deterministic() && is_complete(m)) {
    bound = linear_bound(m);
    rep.bound_applicable = true;
    rep.bound_coefficient = bound.coefficient();
  }

  const Runner runner(m);
  const auto& sigma = m.input_alphabet;
  const std::size_t base = sigma.size();
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  std::mutex mu;

  for (std::size_t len = 0; len <= max_len; ++len) {
    std::uint64_t total = 1;
    for (std::size_t i = 0; i < len; ++i) total *= base;
    if (base == 0 && len > 0) break;
    auto work = [&](unsigned id, unsigned stride) {
      VerifyReport local;
      std::vector<int> enc(len);
      Word w(len);
      for (std::uint64_t idx = id; idx < total; idx += stride) {
        std::uint64_t x = idx;
        for (std::size_t p = len; p-- > 0;) {
          enc[p] = static_cast<int>(x % base);
          w[p] = sigma[enc[p]];
          x /= base;
        }
        const auto tr = runner.run_encoded(enc, budget);
        ++local.words_checked;
        ++local.steps_histogram[tr.steps_total];
        if (tr.verdict == Verdict::BudgetExceeded) {
          ++local.budget_exceeded;
          if (rep.bound_applicable) ++local.bound_violations;
          continue;
        }
        if (rep.bound_applicable) {
          local.max_steps_per_symbol =
              std::max(local.max_steps_per_symbol, static_cast<double>(tr.steps_total) / static_cast<double>(len + 1));
          if (tr.steps_total > bound.steps(len)) ++local.bound_violations;
        }
        const bool member = oracle.member(w);
        if (tr.accepted() != member) {
          ++local.disagreement_count;
          if (local.disagreements.size() < VerifyReport::kMaxListed)
            local.disagreements.push_back({w, to_string(tr.verdict), member});
        }
      }
      std::lock_guard lock(mu);
      rep.words_checked += local.words_checked;
      rep.budget_exceeded += local.budget_exceeded;
      rep.bound_violations += local.bound_violations;
      rep.disagreement_count += local.disagreement_count;
      rep.max_steps_per_symbol = std::max(rep.max_steps_per_symbol, local.max_steps_per_symbol);
      for (const auto& [s, n] : local.steps_histogram) rep.steps_histogram[s] += n;
      for (auto& d : local.disagreements)
        if (rep.disagreements.size() < VerifyReport::kMaxListed) rep.disagreements.push_back(std::move(d));
    };
    const auto used = static_cast<unsigned>(std::min<std::uint64_t>(jobs, total));
    if (used <= 1 || total < 256) {
      work(0, 1);
    } else {
      std::vector<std::thread> pool;
      for (unsigned i = 0; i < used; ++i) pool.emplace_back(work, i, used);
      for (auto& t : pool) t.join();
    }
  }
  std::sort(rep.disagreements.begin(), rep.disagreements.end(), [](const auto& a, const auto& b) {
    return a.word.size() != b.word.size() ? a.word.size() < b.word.size() : a.word < b.word;
  });
  return rep;
}

}  // namespace mpa
