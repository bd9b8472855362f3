// Command-line front end. Exit code 1 covers invalid machines and failed
// verification; 2 means a run ran out of budget and 3 rejects the input.

#include <CLI11.hpp>

#include <iostream>
#include <string>
#include <vector>

#include "multipass/closures.hpp"
#include "multipass/groups.hpp"
#include "multipass/machine_io.hpp"
#include "multipass/oracles.hpp"
#include "multipass/pda.hpp"
#include "multipass/transducers.hpp"
#include "multipass/verify.hpp"

using namespace mpa;

namespace {

constexpr int kOk = 0, kSemantic = 1, kBudget = 2, kInput = 3;

struct Options {
  std::uint64_t budget = kDefaultBudget;
  std::size_t max_len = 8;
  unsigned jobs = 0;
  std::string output;
  bool json = false;
};

void emit(const Options& o, const std::string& text) {
  if (o.output.empty() || o.output == "-")
    std::cout << text;
  else
    io::write_file(o.output, text);
}

Word join_word(const std::vector<std::string>& parts) {
  std::string joined;
  for (const auto& p : parts) joined += p + " ";
  return parse_word(joined);
}

MultipassAutomaton load_checked(const std::string& path) {
  auto m = load_machine(path);
  require_valid(m, path);
  return m;
}

Json profiles_json(const ProfileDecomposition& d) {
  Json j;
  Json machines = Json::array();
  for (const auto& m : d.machines) machines.push_back(machine_to_json(m));
  Json comps = Json::array();
  for (const auto& c : d.components) {
    Json triples = Json::array();
    for (const auto& t : c.profile.triples)
      triples.push_back(Json{{"entry", t.entry}, {"top", t.top ? Json(*t.top) : Json(nullptr)}, {"exit", t.exit}});
    comps.push_back(Json{{"profile", triples}, {"machines", c.machine_ids}});
  }
  j["components"] = comps;
  j["machines"] = machines;
  return j;
}

std::map<Symbol, Word> read_images(const std::string& path) {
  const auto j = io::parse_document(io::read_file(path));
  if (!j.is_object()) throw ParseError(path + ": expected an object mapping letters to words");
  std::map<Symbol, Word> out;
  for (const auto& [k, v] : j.items()) out[k] = v.is_string() ? parse_word(v.get<std::string>()) : io::as_word(v, path);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-pass automata toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  Options o;
  app.add_option("--budget", o.budget, "step budget per run")->capture_default_str();
  app.add_option("--max-len", o.max_len, "longest word checked by verify and oracle parikh-image")
      ->capture_default_str();
  app.add_option("--jobs", o.jobs, "worker threads for verify (0 = all cores)")->capture_default_str();
  app.add_option("-o,--output", o.output, "write the result to this file instead of stdout");
  app.add_flag("--json", o.json, "machine-readable reports");

  int code = kOk;

  // validate
  auto* validate_cmd = app.add_subcommand("validate", "check a machine against the model's rules");
  std::string validate_path;
  validate_cmd->add_option("machine", validate_path)->required();
  validate_cmd->callback([&] {
    const auto m = load_machine(validate_path);
    const auto rep = validate(m);
    if (o.json) {
      Json j;
      j["ok"] = rep.ok();
      for (auto* list : {&rep.errors, &rep.warnings}) {
        Json arr = Json::array();
        for (const auto& v : *list) arr.push_back(Json{{"kind", v.kind}, {"where", v.where}, {"message", v.message}});
        j[list == &rep.errors ? "errors" : "warnings"] = arr;
      }
      emit(o, j.dump(2) + "\n");
    } else {
      emit(o, rep.ok() && rep.warnings.empty() ? "ok\n" : rep.to_string());
    }
    code = rep.ok() ? kOk : kSemantic;
  });

  // run
  auto* run_cmd = app.add_subcommand("run", "run a machine on one word");
  std::string run_path;
  std::vector<std::string> run_word;
  run_cmd->add_option("machine", run_path)->required();
  run_cmd->add_option("word", run_word, "letters, space separated (omit for the empty word)");
  run_cmd->callback([&] {
    const auto m = load_checked(run_path);
    const auto tr = run(m, join_word(run_word), o.budget);
    if (o.json) {
      emit(o, Json{{"verdict", to_string(tr.verdict)}, {"steps", tr.steps_total}, {"steps_per_pass", tr.steps_per_pass}}
                      .dump() +
                  "\n");
    } else {
      std::string line = to_string(tr.verdict) + " steps=" + std::to_string(tr.steps_total) + " per-pass=";
      for (std::size_t i = 0; i < tr.steps_per_pass.size(); ++i)
        line += (i ? "," : "") + std::to_string(tr.steps_per_pass[i]);
      emit(o, line + "\n");
    }
    if (tr.verdict == Verdict::BudgetExceeded) code = kBudget;
  });

  // build
  auto* build = app.add_subcommand("build", "construct a machine");
  build->require_subcommand(1);
  std::vector<std::string> files;
  auto unary = [&](const char* name, const char* help, auto fn) {
    auto* c = build->add_subcommand(name, help);
    c->add_option("input", files)->required()->expected(1);
    c->callback([&, fn] { emit(o, fn(files.at(0)) + "\n"); });
    return c;
  };
  auto binary = [&](const char* name, const char* help, auto fn) {
    auto* c = build->add_subcommand(name, help);
    c->add_option("inputs", files)->required()->expected(2);
    c->callback([&, fn] { emit(o, fn(files.at(0), files.at(1)) + "\n"); });
    return c;
  };
  unary("complement", "complement of a deterministic machine",
        [](const std::string& f) { return dump_machine(complement(load_checked(f))); });
  binary("union", "union of two machines", [](const std::string& a, const std::string& b) {
    return dump_machine(machine_union(load_checked(a), load_checked(b)));
  });
  binary("intersection", "intersection of two machines", [](const std::string& a, const std::string& b) {
    return dump_machine(machine_intersection(load_checked(a), load_checked(b)));
  });
  unary("profiles", "profile decomposition into one-pass machines",
        [](const std::string& f) { return profiles_json(profile_decomposition(load_checked(f))).dump(2); });
  unary("pda2mp", "pushdown automaton to one-pass machine", [&](const std::string& f) {
    return dump_machine(pda_to_onepass(parse_pda(io::read_file(f)), o.budget));
  });
  unary("mp2pda", "one-pass machine to pushdown automaton",
        [](const std::string& f) { return dump_pda(onepass_to_pda(load_checked(f))); });
  unary("wp", "word-problem machine of a group spec",
        [](const std::string& f) { return dump_machine(build_wp(load_group(f))); });
  binary("pullback", "pull a word-problem machine back along generator images (JSON object)",
         [](const std::string& m, const std::string& images) {
           return dump_machine(wp_pullback(load_checked(m), read_images(images)));
         });

  std::vector<std::string> accepting;
  auto* invgsm = binary("invgsm", "inverse image under a transducer", [&](const std::string& m, const std::string& g) {
    std::optional<std::set<State>> acc;
    if (!accepting.empty()) acc.emplace(accepting.begin(), accepting.end());
    return dump_machine(inverse_gsm(load_checked(m), parse_gsm(io::read_file(g)), acc));
  });
  invgsm->add_option("--accepting", accepting, "transducer states in which a run may end");

  auto* interleave = build->add_subcommand("interleave", "interleaved product of machines");
  interleave->add_option("inputs", files)->required();
  interleave->callback([&] {
    std::vector<MultipassAutomaton> ms;
    for (const auto& f : files) ms.push_back(load_checked(f));
    emit(o, dump_machine(interleaved_product(ms)) + "\n");
  });

  std::vector<std::string> quotient_words;
  auto* lquot = build->add_subcommand("lquot", "left quotient by a finite set of words");
  lquot->add_option("machine", files)->required()->expected(1);
  lquot->add_option("-w,--word", quotient_words, "a word of K (repeatable; \"\" is the empty word)")->required();
  lquot->callback([&] {
    std::vector<Word> k;
    for (const auto& w : quotient_words) k.push_back(parse_word(w));
    emit(o, dump_machine(left_quotient(load_checked(files.at(0)), k, o.budget)) + "\n");
  });

  // verify
  auto* verify_cmd = app.add_subcommand("verify", "compare a machine with an oracle on all short words");
  std::string verify_machine, verify_oracle;
  verify_cmd->add_option("machine", verify_machine)->required();
  verify_cmd->add_option("oracle", verify_oracle,
                         "group:FILE | exponent-sum | britton:D,S | bs:N | dihedral | machine:FILE | "
                         "not-machine:FILE | pda:FILE")
      ->required();
  verify_cmd->callback([&] {
    const auto m = load_checked(verify_machine);
    const auto rep = verify(m, resolve_oracle(verify_oracle), o.max_len, o.jobs, o.budget, verify_machine);
    emit(o, o.json ? rep.to_json().dump(2) + "\n" : rep.summary());
    code = rep.exit_code();
  });

  // oracle
  auto* oracle = app.add_subcommand("oracle", "ground-truth helpers");
  oracle->require_subcommand(1);
  std::string group_path, oracle_spec, order_text, pattern_text;
  std::vector<std::string> oracle_word;
  auto* eval = oracle->add_subcommand("eval", "evaluate a word in a group");
  eval->add_option("group", group_path, "group spec file")->required();
  eval->add_option("word", oracle_word);
  eval->callback([&] {
    const auto g = make_oracle(load_group(group_path));
    const auto value = g.evaluate(join_word(oracle_word));
    emit(o, value + (value == "1" ? " identity\n" : " non-identity\n"));
  });
  auto* parikh_cmd = oracle->add_subcommand("parikh", "Parikh vector of a word");
  parikh_cmd->add_option("--order", order_text, "symbol ordering, space separated")->required();
  parikh_cmd->add_option("word", oracle_word);
  parikh_cmd->callback([&] {
    const auto v = parikh(join_word(oracle_word), parse_word(order_text));
    std::string line;
    for (std::size_t i = 0; i < v.size(); ++i) line += (i ? " " : "") + std::to_string(v[i]);
    emit(o, line + "\n");
  });
  auto* image = oracle->add_subcommand("parikh-image", "Parikh vectors of the short members of a language");
  image->add_option("oracle", oracle_spec, "oracle description, as for verify")->required();
  image->add_option("--order", order_text, "symbol ordering, space separated")->required();
  image->add_option("--pattern", pattern_text, "restrict to words matching e.g. \"t+ b t^-1+ b^-1+\"");
  image->callback([&] {
    const auto named = resolve_oracle(oracle_spec);
    std::optional<SymbolPattern> pat;
    if (!pattern_text.empty()) pat.emplace(pattern_text);
    std::string text;
    for (const auto& v : parikh_image(named.member, parse_word(order_text), pat, o.max_len)) {
      for (std::size_t i = 0; i < v.size(); ++i) text += (i ? " " : "") + std::to_string(v[i]);
      text += "\n";
    }
    emit(o, text);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int r = app.exit(e);
    return r == 0 ? kOk : kInput;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInput;
  } catch (const PreconditionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kSemantic;
  }
  return code;
}
