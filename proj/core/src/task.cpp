#include "lgplan/task.hpp"

#include <algorithm>
#include <set>

#include "lgplan/errors.hpp"

namespace lgplan {

namespace {

bool sorted_unique(const std::vector<int>& v) {
  return std::adjacent_find(v.begin(), v.end(), std::greater_equal<>()) == v.end();
}

bool disjoint_sorted(const std::vector<int>& a, const std::vector<int>& b) {
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      return false;
    }
  }
  return true;
}

}  // namespace

// ---------------------------------------------------------------------------

int LiftedTask::find_predicate(std::string_view name) const {
  for (size_t i = 0; i < predicates.size(); ++i) {
    if (predicates[i].name == name) return static_cast<int>(i);
  }
  return -1;
}

int LiftedTask::find_object(std::string_view name) const {
  for (size_t i = 0; i < objects.size(); ++i) {
    if (objects[i] == name) return static_cast<int>(i);
  }
  return -1;
}

std::string LiftedTask::atom_name(const Atom& atom) const {
  std::string out = predicates.at(static_cast<size_t>(atom.predicate)).name + "(";
  for (size_t i = 0; i < atom.args.size(); ++i) {
    if (i) out += ",";
    out += objects.at(static_cast<size_t>(atom.args[i]));
  }
  return out + ")";
}

void LiftedTask::validate() const {
  const int num_objects = static_cast<int>(objects.size());
  auto check_ground = [&](const Atom& atom, const char* where) {
    if (atom.predicate < 0 || atom.predicate >= static_cast<int>(predicates.size())) {
      throw UndeclaredSymbol(std::string(where) + ": undeclared predicate id");
    }
    const auto& pred = predicates[static_cast<size_t>(atom.predicate)];
    if (static_cast<int>(atom.args.size()) != pred.arity) {
      throw ArityMismatch(std::string(where) + ": predicate '" + pred.name + "' expects " +
                          std::to_string(pred.arity) + " arguments, got " +
                          std::to_string(atom.args.size()));
    }
    for (int o : atom.args) {
      if (o < 0 || o >= num_objects) {
        throw UndeclaredSymbol(std::string(where) + ": undeclared object in " + pred.name);
      }
    }
  };
  for (const auto& a : init) check_ground(a, "init");
  for (const auto& a : goal) check_ground(a, "goal");

  for (const auto& schema : schemas) {
    const int num_params = static_cast<int>(schema.params.size());
    auto check_schema_atom = [&](const SchemaAtom& atom) {
      if (atom.predicate < 0 || atom.predicate >= static_cast<int>(predicates.size())) {
        throw UndeclaredSymbol("schema " + schema.name + ": undeclared predicate id");
      }
      const auto& pred = predicates[static_cast<size_t>(atom.predicate)];
      if (static_cast<int>(atom.args.size()) != pred.arity) {
        throw ArityMismatch("schema " + schema.name + ": predicate '" + pred.name +
                            "' expects " + std::to_string(pred.arity) + " arguments");
      }
      for (const auto& t : atom.args) {
        const int bound = t.is_param() ? num_params : num_objects;
        if (t.index < 0 || t.index >= bound) {
          throw UndeclaredSymbol("schema " + schema.name + ": argument out of range in " +
                                 pred.name);
        }
      }
    };
    for (const auto& a : schema.pre) check_schema_atom(a);
    for (const auto& a : schema.add) check_schema_atom(a);
    for (const auto& a : schema.del) check_schema_atom(a);
    if (schema.cost < 0) throw InvalidTask("schema " + schema.name + ": negative cost");
  }
}

// ---------------------------------------------------------------------------

void StripsTask::validate() const {
  const int n = static_cast<int>(propositions.size());
  auto check_ids = [&](const std::vector<int>& ids, const std::string& where) {
    if (!sorted_unique(ids)) throw InvalidTask(where + ": ids must be sorted and unique");
    for (int p : ids) {
      if (p < 0 || p >= n) throw InvalidTask(where + ": proposition id out of range");
    }
  };
  check_ids(init, "init");
  check_ids(goal, "goal");
  for (const auto& a : actions) {
    check_ids(a.pre, a.name + " pre");
    check_ids(a.add, a.name + " add");
    check_ids(a.del, a.name + " del");
    if (!disjoint_sorted(a.add, a.del)) throw InvalidTask(a.name + ": add and del overlap");
    if (a.cost < 0) throw InvalidTask(a.name + ": negative cost");
  }
}

bool applicable(const StripsTask& task, const StripsState& state, int action) {
  return state.contains_all(task.actions[static_cast<size_t>(action)].pre);
}

std::optional<StripsState> apply(const StripsTask& task, const StripsState& state, int action) {
  const auto& a = task.actions[static_cast<size_t>(action)];
  if (!state.contains_all(a.pre)) return std::nullopt;
  StripsState next = state;
  for (int p : a.del) next.reset(p);
  for (int p : a.add) next.set(p);
  return next;
}

// ---------------------------------------------------------------------------

bool FdrTask::is_goal(const FdrState& s) const {
  return std::all_of(goal.begin(), goal.end(), [&](const Fact& f) {
    return s[static_cast<size_t>(f.var)] == f.value;
  });
}

size_t FdrTask::num_facts() const {
  size_t n = 0;
  for (const auto& v : variables) n += v.values.size();
  return n;
}

void FdrTask::validate() const {
  auto check_partial = [&](const std::vector<Fact>& facts, const std::string& where) {
    std::set<int> seen;
    for (const auto& f : facts) {
      if (f.var < 0 || f.var >= static_cast<int>(variables.size())) {
        throw InvalidTask(where + ": variable out of range");
      }
      const auto& dom = variables[static_cast<size_t>(f.var)].values;
      if (f.value < 0 || f.value >= static_cast<int>(dom.size())) {
        throw InvalidTask(where + ": value out of domain of " +
                          variables[static_cast<size_t>(f.var)].name);
      }
      if (!seen.insert(f.var).second) {
        throw InvalidTask(where + ": variable assigned twice");
      }
    }
  };
  if (init.size() != variables.size()) throw InvalidTask("init is not a total assignment");
  for (size_t v = 0; v < variables.size(); ++v) {
    if (init[v] < 0 || init[v] >= static_cast<int>(variables[v].values.size())) {
      throw InvalidTask("init: value out of domain of " + variables[v].name);
    }
  }
  check_partial(goal, "goal");
  for (const auto& a : actions) {
    check_partial(a.pre, a.name + " pre");
    check_partial(a.eff, a.name + " eff");
    if (a.cost < 0) throw InvalidTask(a.name + ": negative cost");
  }
}

bool applicable(const FdrTask& task, const FdrState& state, int action) {
  const auto& a = task.actions[static_cast<size_t>(action)];
  return std::all_of(a.pre.begin(), a.pre.end(), [&](const Fact& f) {
    return state[static_cast<size_t>(f.var)] == f.value;
  });
}

std::optional<FdrState> apply(const FdrTask& task, const FdrState& state, int action) {
  if (!applicable(task, state, action)) return std::nullopt;
  FdrState next = state;
  for (const auto& f : task.actions[static_cast<size_t>(action)].eff) {
    next[static_cast<size_t>(f.var)] = f.value;
  }
  return next;
}

// ---------------------------------------------------------------------------

PlanCheck validate_plan(const StripsTask& task, std::span<const int> plan) {
  return validate_plan(task, task.initial_state(), plan);
}

PlanCheck validate_plan(const StripsTask& task, const StripsState& from,
                        std::span<const int> plan) {
  for (int id : plan) {
    if (id < 0 || id >= static_cast<int>(task.actions.size())) {
      throw UnknownActionId("unknown action id " + std::to_string(id));
    }
  }
  PlanCheck check;
  StripsState state = from;
  for (size_t i = 0; i < plan.size(); ++i) {
    auto next = apply(task, state, plan[i]);
    if (!next) {
      check.reason = "step " + std::to_string(i) + " (" +
                     task.actions[static_cast<size_t>(plan[i])].name + ") is not applicable";
      return check;
    }
    state = std::move(*next);
    check.cost += task.actions[static_cast<size_t>(plan[i])].cost;
  }
  if (!task.is_goal(state)) {
    check.reason = "final state does not satisfy the goal";
    return check;
  }
  check.valid = true;
  return check;
}

PlanCheck validate_plan(const FdrTask& task, std::span<const int> plan) {
  for (int id : plan) {
    if (id < 0 || id >= static_cast<int>(task.actions.size())) {
      throw UnknownActionId("unknown action id " + std::to_string(id));
    }
  }
  PlanCheck check;
  FdrState state = task.init;
  for (size_t i = 0; i < plan.size(); ++i) {
    auto next = apply(task, state, plan[i]);
    if (!next) {
      check.reason = "step " + std::to_string(i) + " is not applicable";
      return check;
    }
    state = std::move(*next);
    check.cost += task.actions[static_cast<size_t>(plan[i])].cost;
  }
  if (!task.is_goal(state)) {
    check.reason = "final state does not satisfy the goal";
    return check;
  }
  check.valid = true;
  return check;
}

// ---------------------------------------------------------------------------

StripsState StripsView::to_strips(const FdrState& s) const {
  StripsState out(task.num_propositions());
  for (size_t v = 0; v < s.size(); ++v) out.set(fact_to_prop[v][static_cast<size_t>(s[v])]);
  return out;
}

FdrState StripsView::to_fdr(const StripsState& s) const {
  FdrState out(fact_to_prop.size(), -1);
  for (int p : s.members()) {
    const Fact& f = prop_to_fact[static_cast<size_t>(p)];
    out[static_cast<size_t>(f.var)] = f.value;
  }
  return out;
}

StripsView strips_view(const FdrTask& fdr) {
  StripsView view;
  auto& task = view.task;
  view.fact_to_prop.resize(fdr.variables.size());
  for (size_t v = 0; v < fdr.variables.size(); ++v) {
    const auto& var = fdr.variables[v];
    for (size_t d = 0; d < var.values.size(); ++d) {
      view.fact_to_prop[v].push_back(static_cast<int>(task.propositions.size()));
      view.prop_to_fact.push_back({static_cast<int>(v), static_cast<int>(d)});
      task.propositions.push_back(var.values[d]);
    }
  }
  auto prop = [&](const Fact& f) {
    return view.fact_to_prop[static_cast<size_t>(f.var)][static_cast<size_t>(f.value)];
  };
  for (size_t v = 0; v < fdr.init.size(); ++v) {
    task.init.push_back(view.fact_to_prop[v][static_cast<size_t>(fdr.init[v])]);
  }
  for (const auto& f : fdr.goal) task.goal.push_back(prop(f));
  std::sort(task.init.begin(), task.init.end());
  std::sort(task.goal.begin(), task.goal.end());

  for (const auto& a : fdr.actions) {
    StripsAction sa;
    sa.name = a.name;
    sa.cost = a.cost;
    for (const auto& f : a.pre) sa.pre.push_back(prop(f));
    for (const auto& f : a.eff) {
      sa.add.push_back(prop(f));
      const auto& dom = fdr.variables[static_cast<size_t>(f.var)].values;
      for (int d = 0; d < static_cast<int>(dom.size()); ++d) {
        if (d != f.value) sa.del.push_back(prop({f.var, d}));
      }
    }
    std::sort(sa.pre.begin(), sa.pre.end());
    std::sort(sa.add.begin(), sa.add.end());
    std::sort(sa.del.begin(), sa.del.end());
    task.actions.push_back(std::move(sa));
  }
  return view;
}

FdrTask binary_fdr_encoding(const StripsTask& task) {
  FdrTask fdr;
  for (const auto& name : task.propositions) {
    fdr.variables.push_back({name, {"not " + name, name}});
  }
  fdr.init.assign(task.propositions.size(), 0);
  for (int p : task.init) fdr.init[static_cast<size_t>(p)] = 1;
  for (int p : task.goal) fdr.goal.push_back({p, 1});
  for (const auto& a : task.actions) {
    FdrAction fa;
    fa.name = a.name;
    fa.cost = a.cost;
    for (int p : a.pre) fa.pre.push_back({p, 1});
    for (int p : a.add) fa.eff.push_back({p, 1});
    for (int p : a.del) fa.eff.push_back({p, 0});
    std::sort(fa.eff.begin(), fa.eff.end());
    fdr.actions.push_back(std::move(fa));
  }
  return fdr;
}

StripsTask delete_relaxation(const StripsTask& task) {
  StripsTask relaxed = task;
  for (auto& a : relaxed.actions) a.del.clear();
  return relaxed;
}

LiftedTask propositional_lifting(const StripsTask& task) {
  LiftedTask lifted;
  lifted.domain_name = "propositional";
  lifted.problem_name = "propositional";
  for (const auto& name : task.propositions) lifted.predicates.push_back({name, 0});
  auto atoms = [](const std::vector<int>& ids) {
    std::vector<SchemaAtom> out;
    for (int p : ids) out.push_back({p, {}});
    return out;
  };
  for (const auto& a : task.actions) {
    lifted.schemas.push_back({a.name, {}, atoms(a.pre), atoms(a.add), atoms(a.del), a.cost});
  }
  for (int p : task.init) lifted.init.push_back({p, {}});
  for (int p : task.goal) lifted.goal.push_back({p, {}});
  return lifted;
}

}  // namespace lgplan
