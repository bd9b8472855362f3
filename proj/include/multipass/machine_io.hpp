#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "json.hpp"
#include "multipass/automaton.hpp"

namespace mpa {

using Json = nlohmann::ordered_json;

/// Malformed input document; `what()` names the offending location.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Value of the "push_orientation" field written into every machine file.
inline constexpr std::string_view kPushOrientation = "last-symbol-on-top";

Json machine_to_json(const MultipassAutomaton& m);
MultipassAutomaton machine_from_json(const Json& j);

/// Canonical text form: fixed field order with a two-space indent.
std::string dump_machine(const MultipassAutomaton& m);
MultipassAutomaton parse_machine(std::string_view text);

MultipassAutomaton load_machine(const std::string& path);
void save_machine(const MultipassAutomaton& m, const std::string& path);

// Shared helpers for the other file formats.
namespace io {

Json parse_document(std::string_view text);
std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& text);

const Json& field(const Json& obj, std::string_view name, std::string_view where);
std::string get_string(const Json& obj, std::string_view name, std::string_view where);
int get_int(const Json& obj, std::string_view name, std::string_view where);
std::vector<std::string> get_strings(const Json& obj, std::string_view name, std::string_view where);
Word as_word(const Json& arr, std::string_view where);

}  // namespace io

}  // namespace mpa
