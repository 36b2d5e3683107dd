#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lgplan/task.hpp"

namespace lgplan {

struct GroundingOptions {
  // Cap on visited (partial) parameter bindings across all schemas.
  uint64_t max_instantiations = 10'000'000;
};

struct GroundAction {
  int schema = 0;
  std::vector<int> binding;  // object id per schema parameter
};

// Provenance of a grounded task back to its lifted source.
struct GroundingMap {
  std::vector<GroundAction> actions;   // indexed by ground action id
  std::vector<Atom> propositions;      // indexed by proposition id
  std::vector<Atom> static_atoms;      // static atoms of init, pruned from the STRIPS task
  std::vector<bool> static_predicates;
  std::vector<std::string> warnings;

  // Lifted state corresponding to a STRIPS state: static atoms plus the
  // atoms of true propositions, in canonical (sorted) order.
  std::vector<Atom> lifted_state(const StripsState& state) const;
};

struct GroundedTask {
  StripsTask task;
  GroundingMap map;
};

// Naive Cartesian instantiation with static-predicate pruning. Proposition
// ids are assigned in first-seen order: init, goal, then actions. When a
// binding makes add and del overlap, the delete is dropped (add wins) and a
// warning is recorded; bindings that can never change a state (add ⊆ pre and
// empty del) are discarded.
//
// Throws GroundingExplosion when the binding count exceeds the cap.
GroundedTask ground(const LiftedTask& task, const GroundingOptions& options = {});

}  // namespace lgplan
