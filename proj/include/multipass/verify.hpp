#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "multipass/automaton.hpp"
#include "multipass/machine_io.hpp"

namespace mpa {

/// Membership predicate used as ground truth, with a printable id.
struct NamedOracle {
  std::string id;
  std::vector<Symbol> alphabet;  // empty when the oracle accepts any alphabet
  std::function<bool(const Word&)> member;
};

/// Resolves an oracle description:
///   group:FILE        identity test of the group spec in FILE
///   exponent-sum      every generator has exponent sum zero
///   britton:D,S       Britton reduction over Z with S = D Z, phi(b) = b^S
///   bs:N              exact matrices of BS(1, N^2)
///   dihedral          normal form of <a, s | s^2, s a s = a^-1>
///   machine:FILE      acceptance by another machine
///   not-machine:FILE  rejection by another machine
///   pda:FILE          acceptance by a pushdown automaton
NamedOracle resolve_oracle(const std::string& spec);

struct Disagreement {
  Word word;
  std::string machine_verdict;
  bool oracle_member = false;
};

struct VerifyReport {
  std::string machine_id;
  std::string oracle_id;
  std::size_t max_len = 0;
  std::uint64_t words_checked = 0;
  std::vector<Disagreement> disagreements;  // first `kMaxListed` only
  std::uint64_t disagreement_count = 0;
  std::uint64_t budget_exceeded = 0;
  std::map<std::uint64_t, std::uint64_t> steps_histogram;  // steps_total -> number of words

  /// Linear-bound check, applicable to complete deterministic machines.
  bool bound_applicable = false;
  std::uint64_t bound_coefficient = 0;  // k*C*B^2
  double max_steps_per_symbol = 0;      // max over words of steps_total / (|w| + 1)
  std::uint64_t bound_violations = 0;

  static constexpr std::size_t kMaxListed = 20;

  bool ok() const { return disagreement_count == 0 && bound_violations == 0 && budget_exceeded == 0; }
  /// 0 agreement, 1 disagreement or bound violation, 2 budget exhausted.
  int exit_code() const;
  Json to_json() const;
  std::string summary() const;
};

/// Compares the machine against the oracle on every word of length <=
/// max_len over the machine's input alphabet, using `jobs` threads
/// (0 = hardware concurrency).
VerifyReport verify(const MultipassAutomaton& m, const NamedOracle& oracle, std::size_t max_len,
                    unsigned jobs = 0, std::uint64_t budget = kDefaultBudget, std::string machine_id = "machine");

}  // namespace mpa
