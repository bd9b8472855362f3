#include "multipass/machine_io.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace mpa {
namespace io {

Json parse_document(std::string_view text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what());
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text;
}

const Json& field(const Json& obj, std::string_view name, std::string_view where) {
  if (!obj.is_object()) throw ParseError(std::string(where) + ": expected an object");
  auto it = obj.find(std::string(name));
  if (it == obj.end()) throw ParseError(std::string(where) + ": missing field '" + std::string(name) + "'");
  return *it;
}

std::string get_string(const Json& obj, std::string_view name, std::string_view where) {
  const auto& v = field(obj, name, where);
  if (!v.is_string()) throw ParseError(std::string(where) + "." + std::string(name) + ": expected a string");
  return v.get<std::string>();
}

int get_int(const Json& obj, std::string_view name, std::string_view where) {
  const auto& v = field(obj, name, where);
  if (!v.is_number_integer()) throw ParseError(std::string(where) + "." + std::string(name) + ": expected an integer");
  return v.get<int>();
}

Word as_word(const Json& arr, std::string_view where) {
  if (!arr.is_array()) throw ParseError(std::string(where) + ": expected an array of symbols");
  Word w;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    if (!arr[i].is_string())
      throw ParseError(std::string(where) + "[" + std::to_string(i) + "]: expected a string");
    w.push_back(arr[i].get<std::string>());
  }
  return w;
}

std::vector<std::string> get_strings(const Json& obj, std::string_view name, std::string_view where) {
  return as_word(field(obj, name, where), std::string(where) + "." + std::string(name));
}

}  // namespace io

namespace {

Json key_json(const StackKey& k) { return k ? Json(*k) : Json("empty"); }

Mode parse_mode(const std::string& s, const std::string& where) {
  if (s == "deterministic") return Mode::Deterministic;
  if (s == "nondeterministic") return Mode::Nondeterministic;
  throw ParseError(where + ": unknown mode '" + s + "'");
}

EndVerdict parse_verdict(const std::string& s, const std::string& where) {
  if (s == "accept") return EndVerdict::Accept;
  if (s == "reject") return EndVerdict::Reject;
  if (s == "nodecision") return EndVerdict::NoDecision;
  throw ParseError(where + ": unknown verdict '" + s + "'");
}

}  // namespace

Json machine_to_json(const MultipassAutomaton& m) {
  Json j;
  j["passes"] = m.passes;
  j["mode"] = to_string(m.mode);
  j["states"] = m.states;
  j["initial"] = m.initial;
  j["input_alphabet"] = m.input_alphabet;
  j["stack_alphabet"] = m.stack_alphabet;
  j["push_orientation"] = std::string(kPushOrientation);
  Json tr = Json::array();
  for (const auto& [key, moves] : m.transitions)
    for (const auto& mv : moves) {
      Json t;
      t["pass"] = key.pass;
      t["state"] = key.state;
      t["input"] = key.input ? *key.input : std::string("eps");
      t["stack"] = key_json(key.stack);
      t["to"] = mv.to;
      t["push"] = mv.push;
      tr.push_back(std::move(t));
    }
  j["transitions"] = std::move(tr);
  Json en = Json::array();
  for (const auto& [key, targets] : m.end_nonfinal)
    for (const auto& to : targets) {
      Json e;
      e["pass"] = key.pass;
      e["state"] = key.state;
      e["stack"] = key_json(key.stack);
      e["to"] = to;
      en.push_back(std::move(e));
    }
  j["end_nonfinal"] = std::move(en);
  Json ef = Json::array();
  for (const auto& [key, v] : m.end_final) {
    Json e;
    e["state"] = key.state;
    e["stack"] = key_json(key.stack);
    e["verdict"] = to_string(v);
    ef.push_back(std::move(e));
  }
  j["end_final"] = std::move(ef);
  if (!m.notes.empty()) j["notes"] = m.notes;
  return j;
}

MultipassAutomaton machine_from_json(const Json& j) {
  using namespace io;
  const std::string root = "machine";
  MultipassAutomaton m;
  m.passes = get_int(j, "passes", root);
  m.mode = parse_mode(get_string(j, "mode", root), root + ".mode");
  m.states = get_strings(j, "states", root);
  m.initial = get_string(j, "initial", root);
  m.input_alphabet = get_strings(j, "input_alphabet", root);
  m.stack_alphabet = get_strings(j, "stack_alphabet", root);
  if (j.contains("push_orientation") && j["push_orientation"] != std::string(kPushOrientation))
    throw ParseError(root + ".push_orientation: only '" + std::string(kPushOrientation) + "' is supported");

  const std::set<State> Q(m.states.begin(), m.states.end());
  const std::set<Symbol> Sigma(m.input_alphabet.begin(), m.input_alphabet.end());
  const std::set<Symbol> Gamma(m.stack_alphabet.begin(), m.stack_alphabet.end());

  auto state_ref = [&](const Json& obj, const char* name, const std::string& where) {
    auto s = get_string(obj, name, where);
    if (!Q.contains(s)) throw ParseError(where + "." + name + ": unknown state '" + s + "'");
    return s;
  };
  auto stack_ref = [&](const Json& obj, const std::string& where) -> StackKey {
    auto s = get_string(obj, "stack", where);
    if (s == "empty") return std::nullopt;
    if (!Gamma.contains(s)) throw ParseError(where + ".stack: unknown stack symbol '" + s + "'");
    return s;
  };

  const auto& tr = field(j, "transitions", root);
  if (!tr.is_array()) throw ParseError(root + ".transitions: expected an array");
  for (std::size_t i = 0; i < tr.size(); ++i) {
    const std::string where = root + ".transitions[" + std::to_string(i) + "]";
    const auto& t = tr[i];
    const int pass = get_int(t, "pass", where);
    auto from = state_ref(t, "state", where);
    auto in = get_string(t, "input", where);
    InputKey input;
    if (in != "eps") {
      if (!Sigma.contains(in)) throw ParseError(where + ".input: unknown input symbol '" + in + "'");
      input = in;
    }
    auto key = stack_ref(t, where);
    auto to = state_ref(t, "to", where);
    auto push = as_word(field(t, "push", where), where + ".push");
    for (std::size_t p = 0; p < push.size(); ++p)
      if (!Gamma.contains(push[p]))
        throw ParseError(where + ".push[" + std::to_string(p) + "]: unknown stack symbol '" + push[p] + "'");
    m.add_transition(pass, from, input, key, to, std::move(push));
  }

  const auto& en = field(j, "end_nonfinal", root);
  if (!en.is_array()) throw ParseError(root + ".end_nonfinal: expected an array");
  for (std::size_t i = 0; i < en.size(); ++i) {
    const std::string where = root + ".end_nonfinal[" + std::to_string(i) + "]";
    const auto& e = en[i];
    m.add_end(get_int(e, "pass", where), state_ref(e, "state", where), stack_ref(e, where),
              state_ref(e, "to", where));
  }

  const auto& ef = field(j, "end_final", root);
  if (!ef.is_array()) throw ParseError(root + ".end_final: expected an array");
  for (std::size_t i = 0; i < ef.size(); ++i) {
    const std::string where = root + ".end_final[" + std::to_string(i) + "]";
    const auto& e = ef[i];
    m.set_final(state_ref(e, "state", where), stack_ref(e, where),
                parse_verdict(get_string(e, "verdict", where), where + ".verdict"));
  }
  if (j.contains("notes")) m.notes = get_strings(j, "notes", root);
  return m;
}

std::string dump_machine(const MultipassAutomaton& m) { return machine_to_json(m).dump(2) + "\n"; }

MultipassAutomaton parse_machine(std::string_view text) {
  return machine_from_json(io::parse_document(text));
}

MultipassAutomaton load_machine(const std::string& path) { return parse_machine(io::read_file(path)); }

void save_machine(const MultipassAutomaton& m, const std::string& path) {
  io::write_file(path, dump_machine(m));
}

}  // namespace mpa
