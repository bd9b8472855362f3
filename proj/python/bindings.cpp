#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "multipass/closures.hpp"
#include "multipass/groups.hpp"
#include "multipass/machine_io.hpp"
#include "multipass/oracles.hpp"
#include "multipass/pda.hpp"
#include "multipass/transducers.hpp"
#include "multipass/verify.hpp"

namespace py = pybind11;
using namespace mpa;

namespace {

// Words arrive either as a list of letters or as one space-separated string.
using WordArg = std::variant<std::string, std::vector<std::string>>;

Word to_word(const WordArg& w) {
  if (const auto* s = std::get_if<std::string>(&w)) return parse_word(*s);
  return std::get<std::vector<std::string>>(w);
}

py::dict trace_dict(const RunTrace& t) {
  py::dict d;
  d["verdict"] = to_string(t.verdict);
  d["accepted"] = t.accepted();
  d["steps"] = t.steps_total;
  d["steps_per_pass"] = t.steps_per_pass;
  return d;
}

py::object json_to_py(const Json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

}  // namespace

PYBIND11_MODULE(_multipass, mod) {
  mod.doc() = "Multi-pass automata: execution, closure constructions, group word problems and oracles.";

  static py::exception<ParseError> parse_error(mod, "ParseError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ParseError& e) {
      py::set_error(parse_error, e.what());
    }
  });

  py::class_<MultipassAutomaton>(mod, "Machine")
      .def_static("from_json", [](const std::string& text) { return parse_machine(text); })
      .def_static("load", &load_machine)
      .def("to_json", [](const MultipassAutomaton& m) { return dump_machine(m); })
      .def("save", [](const MultipassAutomaton& m, const std::string& path) { save_machine(m, path); })
      .def_readonly("passes", &MultipassAutomaton::passes)
      .def_property_readonly("mode", [](const MultipassAutomaton& m) { return to_string(m.mode); })
      .def_readonly("states", &MultipassAutomaton::states)
      .def_readonly("input_alphabet", &MultipassAutomaton::input_alphabet)
      .def_readonly("stack_alphabet", &MultipassAutomaton::stack_alphabet)
      .def_readonly("notes", &MultipassAutomaton::notes)
      .def(
          "run",
          [](const MultipassAutomaton& m, const WordArg& w, std::uint64_t budget) {
            return trace_dict(run(m, to_word(w), budget));
          },
          py::arg("word"), py::arg("budget") = kDefaultBudget)
      .def(
          "accepts",
          [](const MultipassAutomaton& m, const WordArg& w, std::uint64_t budget) {
            return run(m, to_word(w), budget).accepted();
          },
          py::arg("word"), py::arg("budget") = kDefaultBudget)
      .def("validate",
           [](const MultipassAutomaton& m) {
             std::vector<std::string> out;
             for (const auto& v : validate(m).errors) out.push_back(v.kind + ": " + v.where + ": " + v.message);
             return out;
           })
      .def("is_complete", [](const MultipassAutomaton& m) { return is_complete(m); })
      .def("linear_bound", [](const MultipassAutomaton& m) { return linear_bound(m).coefficient(); })
      .def("__repr__", [](const MultipassAutomaton& m) {
        return "<Machine passes=" + std::to_string(m.passes) + " mode=" + to_string(m.mode) +
               " states=" + std::to_string(m.states.size()) + ">";
      });

  mod.def("complement", &complement);
  mod.def("union", &machine_union);
  mod.def("intersection", &machine_intersection);
  mod.def("profile_decomposition", [](const MultipassAutomaton& m) {
    const auto d = profile_decomposition(m);
    py::list comps;
    for (const auto& c : d.components) {
      py::list triples, machines;
      for (const auto& t : c.profile.triples)
        triples.append(py::make_tuple(t.entry, t.top ? py::cast(*t.top) : py::none(), t.exit));
      for (auto id : c.machine_ids) machines.append(d.machines[id]);
      comps.append(py::make_tuple(triples, machines));
    }
    return comps;
  });

  mod.def("pda_run", [](const std::string& pda_json, const WordArg& w, std::uint64_t budget) {
        const auto r = pda_run(parse_pda(pda_json), to_word(w), budget);
        return to_string(r.verdict);
      },
      py::arg("pda_json"), py::arg("word"), py::arg("budget") = kDefaultBudget);
  mod.def(
      "pda_to_onepass",
      [](const std::string& pda_json, std::uint64_t budget) { return pda_to_onepass(parse_pda(pda_json), budget); },
      py::arg("pda_json"), py::arg("budget") = kDefaultBudget);
  mod.def("onepass_to_pda", [](const MultipassAutomaton& m) { return dump_pda(onepass_to_pda(m)); });

  mod.def(
      "inverse_gsm",
      [](const MultipassAutomaton& m, const std::string& gsm_json, std::optional<std::set<State>> accepting) {
        return inverse_gsm(m, parse_gsm(gsm_json), accepting);
      },
      py::arg("machine"), py::arg("gsm_json"), py::arg("accepting") = py::none());
  mod.def("interleaved_product", &interleaved_product);
  mod.def(
      "left_quotient",
      [](const MultipassAutomaton& m, const std::vector<WordArg>& ks, std::uint64_t budget) {
        std::vector<Word> k;
        for (const auto& w : ks) k.push_back(to_word(w));
        return left_quotient(m, k, budget);
      },
      py::arg("machine"), py::arg("words"), py::arg("budget") = kDefaultBudget);

  mod.def("build_wp", [](const std::string& group_json) { return build_wp(parse_group(group_json)); });
  mod.def("group_alphabet_of", [](const std::string& group_json) { return alphabet(parse_group(group_json)); });
  mod.def("wp_pullback", [](const MultipassAutomaton& m, const std::map<std::string, WordArg>& images) {
    std::map<Symbol, Word> im;
    for (const auto& [k, v] : images) im[k] = to_word(v);
    return wp_pullback(m, im);
  });

  mod.def("group_evaluate", [](const std::string& group_json, const WordArg& w) {
    return make_oracle(parse_group(group_json)).evaluate(to_word(w));
  });
  mod.def("britton_reduce", [](const WordArg& w, long d, long s) { return britton_reduce(to_word(w), d, s); });
  mod.def("dihedral_normal_form", [](const WordArg& w) { return dihedral_normal_form(to_word(w)); });
  mod.def("parikh", [](const WordArg& w, const std::vector<std::string>& order) { return parikh(to_word(w), order); });
  mod.def("bs_matrix", [](const WordArg& w, long n) {
    const auto m = bs_matrix_eval(to_word(w), n);
    return py::make_tuple(m.a.str(), m.b.str(), m.c.str(), m.d.str());
  });

  mod.def(
      "verify",
      [](const MultipassAutomaton& m, const std::variant<std::string, std::function<bool(const Word&)>>& oracle,
         std::size_t max_len, unsigned jobs, std::uint64_t budget) {
        VerifyReport rep;
        if (const auto* spec = std::get_if<std::string>(&oracle)) {
          const auto named = resolve_oracle(*spec);
          py::gil_scoped_release release;
          rep = verify(m, named, max_len, jobs, budget);
        } else {
          // Python callables run on the calling thread only.
          rep = verify(m, NamedOracle{"callable", {}, std::get<1>(oracle)}, max_len, 1, budget);
        }
        return json_to_py(rep.to_json());
      },
      py::arg("machine"), py::arg("oracle"), py::arg("max_len") = 8, py::arg("jobs") = 0,
      py::arg("budget") = kDefaultBudget);
}
