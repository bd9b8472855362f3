#pragma once

#include <cstddef>
#include <vector>

#include "multipass/automaton.hpp"

namespace mpa {

/// Swaps the final verdicts of a deterministic machine. Incomplete inputs
/// are completed first, and a note saying so is appended to `notes`.
MultipassAutomaton complement(const MultipassAutomaton& m);

/// Sequential (k1 + k2)-pass constructions. Passes 1..k1 run `m1`, the rest
/// run `m2` or a sink that decides the outcome on its own. Both machines
/// must share their input alphabet and mode; deterministic operands are
/// completed when necessary.
MultipassAutomaton machine_union(const MultipassAutomaton& m1, const MultipassAutomaton& m2);
MultipassAutomaton machine_intersection(const MultipassAutomaton& m1, const MultipassAutomaton& m2);

struct ProfileTriple {
  State entry;
  StackKey top;
  State exit;
  friend auto operator<=>(const ProfileTriple&, const ProfileTriple&) = default;
};

/// One triple per pass: the state the pass starts in, the stack top and the
/// state when the end-marker is read.
struct Profile {
  std::vector<ProfileTriple> triples;
  friend auto operator<=>(const Profile&, const Profile&) = default;
};

struct ProfileComponent {
  Profile profile;
  /// Index into ProfileDecomposition::machines for each pass.
  std::vector<std::size_t> machine_ids;
};

/// Components share their one-pass machines: the machine for pass j only
/// depends on the j-th triple.
struct ProfileDecomposition {
  std::vector<MultipassAutomaton> machines;
  std::vector<ProfileComponent> components;

  const MultipassAutomaton& machine(std::size_t component, std::size_t pass_index) const {
    return machines[components[component].machine_ids[pass_index]];
  }
};

/// Enumerates every chain-consistent profile with an accepting last triple
/// (exit states restricted to those reachable within the pass) and the
/// one-pass machines M_{i,j} accepting exactly the words whose j-th pass
/// from the triple's entry state ends in its exit state with its top.
ProfileDecomposition profile_decomposition(const MultipassAutomaton& m);

/// (|Q| * (|Gamma| + 1) * |Q|)^k, saturating at SIZE_MAX.
std::size_t profile_candidate_bound(const MultipassAutomaton& m);

}  // namespace mpa
