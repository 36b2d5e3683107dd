#pragma once

#include <compare>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lgplan/propset.hpp"

namespace lgplan {

// ---------------------------------------------------------------------------
// Lifted (first-order) tasks
// ---------------------------------------------------------------------------

struct Predicate {
  std::string name;
  int arity = 0;
};

// A ground atom: predicate id applied to object ids.
struct Atom {
  int predicate = 0;
  std::vector<int> args;

  friend auto operator<=>(const Atom&, const Atom&) = default;
  friend bool operator==(const Atom&, const Atom&) = default;
};

// Argument of a schema atom: either the index of a schema parameter or an
// object (constant) id.
struct Term {
  enum class Kind { kParam, kObject };
  Kind kind = Kind::kParam;
  int index = 0;

  static Term param(int i) { return {Kind::kParam, i}; }
  static Term object(int o) { return {Kind::kObject, o}; }
  bool is_param() const { return kind == Kind::kParam; }

  friend bool operator==(const Term&, const Term&) = default;
};

struct SchemaAtom {
  int predicate = 0;
  std::vector<Term> args;

  friend bool operator==(const SchemaAtom&, const SchemaAtom&) = default;
};

struct Schema {
  std::string name;
  std::vector<std::string> params;
  std::vector<SchemaAtom> pre;
  std::vector<SchemaAtom> add;
  std::vector<SchemaAtom> del;
  int cost = 1;
};

struct LiftedTask {
  std::string domain_name;
  std::string problem_name;
  std::vector<Predicate> predicates;
  std::vector<std::string> objects;
  std::vector<Schema> schemas;
  std::vector<Atom> init;
  std::vector<Atom> goal;

  int find_predicate(std::string_view name) const;  // -1 if absent
  int find_object(std::string_view name) const;     // -1 if absent
  std::string atom_name(const Atom& atom) const;    // e.g. "at(ball1,rooma)"

  // Throws ArityMismatch / UndeclaredSymbol / InvalidTask on violations.
  void validate() const;
};

// ---------------------------------------------------------------------------
// Propositional STRIPS
// ---------------------------------------------------------------------------

using StripsState = PropSet;

struct StripsAction {
  std::string name;
  std::vector<int> pre;  // sorted, unique
  std::vector<int> add;
  std::vector<int> del;
  int cost = 1;
};

struct StripsTask {
  std::vector<std::string> propositions;
  std::vector<StripsAction> actions;
  std::vector<int> init;  // sorted, unique
  std::vector<int> goal;

  size_t num_propositions() const { return propositions.size(); }
  StripsState initial_state() const { return StripsState(propositions.size(), init); }
  StripsState make_state(std::span<const int> props) const {
    return StripsState(propositions.size(), props);
  }
  bool is_goal(const StripsState& s) const { return s.contains_all(goal); }

  // Throws InvalidTask if ids are out of range or add/del overlap.
  void validate() const;
};

bool applicable(const StripsTask& task, const StripsState& state, int action);
// Successor (s \ del) ∪ add, or nullopt when pre ⊄ s.
std::optional<StripsState> apply(const StripsTask& task, const StripsState& state, int action);

// ---------------------------------------------------------------------------
// Finite-domain representation
// ---------------------------------------------------------------------------

struct Fact {
  int var = 0;
  int value = 0;

  friend auto operator<=>(const Fact&, const Fact&) = default;
  friend bool operator==(const Fact&, const Fact&) = default;
};

struct FdrVariable {
  std::string name;
  std::vector<std::string> values;
};

struct FdrAction {
  std::string name;
  std::vector<Fact> pre;  // sorted by var, at most one fact per var
  std::vector<Fact> eff;
  int cost = 1;
};

using FdrState = std::vector<int>;

struct FdrTask {
  std::vector<FdrVariable> variables;
  std::vector<FdrAction> actions;
  FdrState init;
  std::vector<Fact> goal;

  bool is_goal(const FdrState& s) const;
  size_t num_facts() const;
  void validate() const;
};

bool applicable(const FdrTask& task, const FdrState& state, int action);
std::optional<FdrState> apply(const FdrTask& task, const FdrState& state, int action);

// ---------------------------------------------------------------------------
// Plans and task transformations
// ---------------------------------------------------------------------------

struct PlanCheck {
  bool valid = false;
  int cost = 0;
  std::string reason;  // empty when valid
};

// Throws UnknownActionId for ids outside the task's action range.
PlanCheck validate_plan(const StripsTask& task, std::span<const int> plan);
PlanCheck validate_plan(const StripsTask& task, const StripsState& from, std::span<const int> plan);
PlanCheck validate_plan(const FdrTask& task, std::span<const int> plan);

// STRIPS compilation of an FDR task: one proposition per fact <v,d>; an
// effect <v,d> deletes every other value of v.
struct StripsView {
  StripsTask task;
  std::vector<std::vector<int>> fact_to_prop;  // [var][value] -> proposition id
  std::vector<Fact> prop_to_fact;

  StripsState to_strips(const FdrState& s) const;
  FdrState to_fdr(const StripsState& s) const;
};
StripsView strips_view(const FdrTask& task);

// One binary variable per proposition (value 0 = false, 1 = true).
FdrTask binary_fdr_encoding(const StripsTask& task);

// Same task with every delete list emptied.
StripsTask delete_relaxation(const StripsTask& task);

// Lifted view of a propositional task: every proposition becomes a 0-ary
// predicate and every action a parameterless schema.
LiftedTask propositional_lifting(const StripsTask& task);

}  // namespace lgplan
