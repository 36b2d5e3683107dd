#include "lgplan/grounding.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "lgplan/errors.hpp"

namespace lgplan {

std::vector<Atom> GroundingMap::lifted_state(const StripsState& state) const {
  std::vector<Atom> atoms = static_atoms;
  for (int p : state.members()) atoms.push_back(propositions[static_cast<size_t>(p)]);
  std::sort(atoms.begin(), atoms.end());
  atoms.erase(std::unique(atoms.begin(), atoms.end()), atoms.end());
  return atoms;
}

namespace {

Atom instantiate(const SchemaAtom& atom, const std::vector<int>& binding) {
  Atom out{atom.predicate, {}};
  out.args.reserve(atom.args.size());
  for (const auto& t : atom.args) {
    out.args.push_back(t.is_param() ? binding[static_cast<size_t>(t.index)] : t.index);
  }
  return out;
}

int max_param(const SchemaAtom& atom) {
  int m = -1;
  for (const auto& t : atom.args) {
    if (t.is_param()) m = std::max(m, t.index);
  }
  return m;
}

class Grounder {
 public:
  Grounder(const LiftedTask& lifted, const GroundingOptions& options)
      : lifted_(lifted), options_(options) {}

  GroundedTask run() {
    auto& map = out_.map;
    map.static_predicates.assign(lifted_.predicates.size(), true);
    for (const auto& s : lifted_.schemas) {
      for (const auto& a : s.add) map.static_predicates[static_cast<size_t>(a.predicate)] = false;
      for (const auto& a : s.del) map.static_predicates[static_cast<size_t>(a.predicate)] = false;
    }
    for (const auto& a : lifted_.init) {
      if (is_static(a.predicate)) {
        static_init_.insert(a);
      }
    }
    map.static_atoms.assign(static_init_.begin(), static_init_.end());

    auto& task = out_.task;
    for (const auto& a : lifted_.init) {
      if (!is_static(a.predicate)) task.init.push_back(intern(a));
    }
    for (const auto& a : lifted_.goal) {
      if (is_static(a.predicate) && static_init_.count(a)) continue;
      task.goal.push_back(intern(a));
    }
    for (size_t s = 0; s < lifted_.schemas.size(); ++s) ground_schema(static_cast<int>(s));

    std::sort(task.init.begin(), task.init.end());
    task.init.erase(std::unique(task.init.begin(), task.init.end()), task.init.end());
    std::sort(task.goal.begin(), task.goal.end());
    task.goal.erase(std::unique(task.goal.begin(), task.goal.end()), task.goal.end());
    return std::move(out_);
  }

 private:
  bool is_static(int predicate) const {
    return out_.map.static_predicates[static_cast<size_t>(predicate)];
  }

  int intern(const Atom& atom) {
    auto [it, inserted] = prop_ids_.try_emplace(atom, static_cast<int>(prop_ids_.size()));
    if (inserted) {
      out_.task.propositions.push_back(lifted_.atom_name(atom));
      out_.map.propositions.push_back(atom);
    }
    return it->second;
  }

  void ground_schema(int schema_id) {
    const Schema& schema = lifted_.schemas[static_cast<size_t>(schema_id)];
    const size_t n = schema.params.size();
    // Static preconditions checked as soon as their last parameter is bound.
    std::vector<std::vector<const SchemaAtom*>> checks(n + 1);
    for (const auto& a : schema.pre) {
      if (is_static(a.predicate)) checks[static_cast<size_t>(max_param(a) + 1)].push_back(&a);
    }
    std::vector<int> binding(n, -1);
    if (!static_ok(checks[0], binding)) return;
    conflicts_ = 0;
    noops_ = 0;
    extend(schema_id, schema, checks, binding, 0);
    if (conflicts_ > 0) {
      out_.map.warnings.push_back("schema " + schema.name + ": " + std::to_string(conflicts_) +
                                  " binding(s) with overlapping add/del; delete dropped");
    }
    if (noops_ > 0) {
      out_.map.warnings.push_back("schema " + schema.name + ": " + std::to_string(noops_) +
                                  " binding(s) without effect discarded");
    }
  }

  bool static_ok(const std::vector<const SchemaAtom*>& atoms, const std::vector<int>& binding) {
    for (const SchemaAtom* a : atoms) {
      if (!static_init_.count(instantiate(*a, binding))) return false;
    }
    return true;
  }

  void extend(int schema_id, const Schema& schema,
              const std::vector<std::vector<const SchemaAtom*>>& checks,
              std::vector<int>& binding, size_t depth) {
    if (depth == binding.size()) {
      emit(schema_id, schema, binding);
      return;
    }
    for (int o = 0; o < static_cast<int>(lifted_.objects.size()); ++o) {
      if (++visited_ > options_.max_instantiations) {
        throw GroundingExplosion("grounding exceeded " +
                                 std::to_string(options_.max_instantiations) +
                                 " bindings (schema " + schema.name + ")");
      }
      binding[depth] = o;
      if (static_ok(checks[depth + 1], binding)) {
        extend(schema_id, schema, checks, binding, depth + 1);
      }
    }
    binding[depth] = -1;
  }

  void emit(int schema_id, const Schema& schema, const std::vector<int>& binding) {
    StripsAction action;
    action.cost = 1;
    action.name = "(" + schema.name;
    for (int o : binding) action.name += " " + lifted_.objects[static_cast<size_t>(o)];
    action.name += ")";
    auto collect = [&](const std::vector<SchemaAtom>& atoms, std::vector<int>& ids) {
      for (const auto& a : atoms) {
        if (is_static(a.predicate)) continue;
        ids.push_back(intern(instantiate(a, binding)));
      }
      std::sort(ids.begin(), ids.end());
      ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    };
    collect(schema.pre, action.pre);
    collect(schema.add, action.add);
    collect(schema.del, action.del);

    std::vector<int> del;
    std::set_difference(action.del.begin(), action.del.end(), action.add.begin(),
                        action.add.end(), std::back_inserter(del));
    if (del.size() != action.del.size()) {
      ++conflicts_;
      action.del = std::move(del);
    }
    if (action.del.empty() &&
        std::includes(action.pre.begin(), action.pre.end(), action.add.begin(), action.add.end())) {
      ++noops_;
      return;
    }
    out_.task.actions.push_back(std::move(action));
    out_.map.actions.push_back({schema_id, binding});
  }

  const LiftedTask& lifted_;
  GroundingOptions options_;
  GroundedTask out_;
  std::set<Atom> static_init_;
  std::map<Atom, int> prop_ids_;
  uint64_t visited_ = 0;
  int conflicts_ = 0;
  int noops_ = 0;
};

}  // namespace

GroundedTask ground(const LiftedTask& task, const GroundingOptions& options) {
  return Grounder(task, options).run();
}

}  // namespace lgplan
