#include "lgplan/pddl.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "lgplan/errors.hpp"
#include "lgplan/io.hpp"
#include "sexpr.hpp"

namespace lgplan {

namespace {

using detail::SExpr;

[[noreturn]] void syntax(const SExpr& at, const std::string& what) {
  throw SyntaxError(what, at.line, at.column);
}

const SExpr& expect_list(const SExpr& e, const std::string& what) {
  if (!e.is_list) syntax(e, "expected " + what);
  return e;
}

const std::string& expect_symbol(const SExpr& e, const std::string& what) {
  if (!e.is_symbol()) syntax(e, "expected " + what);
  return e.symbol;
}

struct TypedName {
  std::string name;
  std::string type;
  const SExpr* where;
};

// "a b - t1 c - t2 d" -> {(a,t1), (b,t1), (c,t2), (d,object)}
std::vector<TypedName> parse_typed_list(const SExpr& list, size_t first) {
  std::vector<TypedName> out;
  std::vector<const SExpr*> pending;
  for (size_t i = first; i < list.items.size(); ++i) {
    const SExpr& item = list.items[i];
    if (item.is_symbol("-")) {
      if (pending.empty()) syntax(item, "expected a name before '-'");
      if (i + 1 >= list.items.size()) syntax(item, "expected a type after '-'");
      const SExpr& type = list.items[++i];
      if (type.head_is("either")) throw UnsupportedFeature("'either' types are not supported");
      const std::string& t = expect_symbol(type, "type name");
      for (const SExpr* p : pending) out.push_back({p->symbol, t, p});
      pending.clear();
    } else {
      expect_symbol(item, "name");
      pending.push_back(&item);
    }
  }
  for (const SExpr* p : pending) out.push_back({p->symbol, "object", p});
  return out;
}

bool is_supported_requirement(std::string_view r) {
  return r == ":strips" || r == ":typing" || r == ":action-costs";
}

class DomainBuilder {
 public:
  LiftedTask task;
  std::map<std::string, std::string> type_parent;
  std::map<std::string, int> type_predicate;
  std::vector<std::string> constant_types;  // parallel to task.objects (constants only)
  bool action_costs = false;

  void parse(const SExpr& root) {
    expect_list(root, "'(define ...)'");
    if (root.items.empty() || !root.items[0].is_symbol("define")) {
      syntax(root, "expected 'define'");
    }
    if (root.items.size() < 2 || !root.items[1].head_is("domain") ||
        root.items[1].items.size() != 2) {
      syntax(root.items.size() > 1 ? root.items[1] : root, "expected '(domain <name>)'");
    }
    task.domain_name = expect_symbol(root.items[1].items[1], "domain name");

    std::vector<const SExpr*> actions;
    for (size_t i = 2; i < root.items.size(); ++i) {
      const SExpr& section = expect_list(root.items[i], "domain section");
      if (section.items.empty() || !section.items[0].is_symbol()) {
        syntax(section, "expected a section keyword");
      }
      const std::string& key = section.items[0].symbol;
      if (key == ":requirements") {
        for (size_t j = 1; j < section.items.size(); ++j) {
          const std::string& r = expect_symbol(section.items[j], "requirement");
          if (!is_supported_requirement(r)) {
            throw UnsupportedFeature("requirement " + r + " is not supported");
          }
          if (r == ":action-costs") action_costs = true;
        }
      } else if (key == ":types") {
        for (const auto& t : parse_typed_list(section, 1)) {
          if (t.name == "object") continue;
          type_parent[t.name] = t.type;
        }
      } else if (key == ":constants") {
        for (const auto& c : parse_typed_list(section, 1)) add_object(c);
      } else if (key == ":predicates") {
        for (size_t j = 1; j < section.items.size(); ++j) {
          const SExpr& decl = expect_list(section.items[j], "predicate declaration");
          if (decl.items.empty()) syntax(decl, "expected a predicate name");
          const std::string& name = expect_symbol(decl.items[0], "predicate name");
          int arity = static_cast<int>(parse_typed_list(decl, 1).size());
          declare_predicate(name, arity, decl);
        }
      } else if (key == ":functions") {
        if (!action_costs) throw UnsupportedFeature("numeric fluents (:functions)");
      } else if (key == ":action") {
        actions.push_back(&section);
      } else if (key == ":derived") {
        throw UnsupportedFeature("derived predicates (:derived)");
      } else if (key == ":durative-action") {
        throw UnsupportedFeature("durative actions");
      } else {
        syntax(section.items[0], "unknown domain section " + key);
      }
    }
    for (const auto& [type, parent] : type_parent) {
      (void)parent;
      type_predicate_for(type);
    }
    for (const SExpr* a : actions) parse_action(*a);
  }

  int declare_predicate(const std::string& name, int arity, const SExpr& where) {
    if (int id = task.find_predicate(name); id >= 0) {
      if (task.predicates[static_cast<size_t>(id)].arity != arity) {
        syntax(where, "predicate '" + name + "' redeclared with a different arity");
      }
      return id;
    }
    task.predicates.push_back({name, arity});
    return static_cast<int>(task.predicates.size()) - 1;
  }

  int type_predicate_for(const std::string& type) {
    if (auto it = type_predicate.find(type); it != type_predicate.end()) return it->second;
    int id = task.find_predicate(type);
    if (id >= 0 && task.predicates[static_cast<size_t>(id)].arity != 1) {
      throw UnsupportedFeature("type '" + type + "' clashes with a predicate of arity " +
                               std::to_string(task.predicates[static_cast<size_t>(id)].arity));
    }
    if (id < 0) {
      task.predicates.push_back({type, 1});
      id = static_cast<int>(task.predicates.size()) - 1;
    }
    type_predicate[type] = id;
    return id;
  }

  // Type followed by its ancestors, excluding the root `object`.
  std::vector<std::string> type_chain(const std::string& type, const SExpr* where) const {
    std::vector<std::string> chain;
    std::string t = type;
    while (t != "object") {
      if (std::find(chain.begin(), chain.end(), t) != chain.end()) {
        throw InvalidTask("cyclic type hierarchy at '" + t + "'");
      }
      chain.push_back(t);
      auto it = type_parent.find(t);
      if (it == type_parent.end()) {
        if (where) syntax(*where, "undeclared type '" + t + "'");
        throw UndeclaredSymbol("undeclared type '" + t + "'");
      }
      t = it->second;
    }
    return chain;
  }

  void add_object(const TypedName& obj) {
    if (task.find_object(obj.name) >= 0) return;
    if (obj.type != "object") type_chain(obj.type, obj.where);
    task.objects.push_back(obj.name);
    constant_types.push_back(obj.type);
  }

  SchemaAtom parse_schema_atom(const SExpr& e, const std::map<std::string, int>& params) {
    const std::string& name = expect_symbol(e.items[0], "predicate name");
    int pred = task.find_predicate(name);
    if (pred < 0) throw UndeclaredSymbol("undeclared predicate '" + name + "'");
    const int arity = task.predicates[static_cast<size_t>(pred)].arity;
    if (static_cast<int>(e.items.size()) - 1 != arity) {
      throw ArityMismatch("predicate '" + name + "' expects " + std::to_string(arity) +
                          " arguments, got " + std::to_string(e.items.size() - 1));
    }
    SchemaAtom atom{pred, {}};
    for (size_t i = 1; i < e.items.size(); ++i) {
      const std::string& arg = expect_symbol(e.items[i], "argument");
      if (!arg.empty() && arg[0] == '?') {
        auto it = params.find(arg);
        if (it == params.end()) throw UndeclaredSymbol("undeclared variable '" + arg + "'");
        atom.args.push_back(Term::param(it->second));
      } else {
        int obj = task.find_object(arg);
        if (obj < 0) throw UndeclaredSymbol("undeclared constant '" + arg + "'");
        atom.args.push_back(Term::object(obj));
      }
    }
    return atom;
  }

  void parse_condition(const SExpr& e, const std::map<std::string, int>& params,
                       std::vector<SchemaAtom>& out) {
    expect_list(e, "condition");
    if (e.items.empty()) return;
    const std::string& head = expect_symbol(e.items[0], "condition keyword or predicate");
    if (head == "and") {
      for (size_t i = 1; i < e.items.size(); ++i) parse_condition(e.items[i], params, out);
    } else if (head == "not") {
      throw UnsupportedFeature("negative preconditions");
    } else if (head == "or" || head == "imply") {
      throw UnsupportedFeature("disjunctive preconditions");
    } else if (head == "exists" || head == "forall") {
      throw UnsupportedFeature("quantified preconditions");
    } else if (head == "=") {
      throw UnsupportedFeature("equality");
    } else {
      out.push_back(parse_schema_atom(e, params));
    }
  }

  void parse_effect(const SExpr& e, const std::map<std::string, int>& params, Schema& schema) {
    expect_list(e, "effect");
    if (e.items.empty()) return;
    const std::string& head = expect_symbol(e.items[0], "effect keyword or predicate");
    if (head == "and") {
      for (size_t i = 1; i < e.items.size(); ++i) parse_effect(e.items[i], params, schema);
    } else if (head == "not") {
      if (e.items.size() != 2) syntax(e, "expected '(not <atom>)'");
      schema.del.push_back(parse_schema_atom(expect_list(e.items[1], "atom"), params));
    } else if (head == "when") {
      throw UnsupportedFeature("conditional effects");
    } else if (head == "forall") {
      throw UnsupportedFeature("universal effects");
    } else if (head == "increase" || head == "decrease" || head == "assign") {
      if (!action_costs || head != "increase") throw UnsupportedFeature("numeric effects");
    } else {
      schema.add.push_back(parse_schema_atom(e, params));
    }
  }

  void parse_action(const SExpr& section) {
    if (section.items.size() < 2) syntax(section, "expected an action name");
    Schema schema;
    schema.name = expect_symbol(section.items[1], "action name");
    std::map<std::string, int> params;
    const SExpr* pre = nullptr;
    const SExpr* eff = nullptr;
    std::vector<SchemaAtom> type_pre;
    for (size_t i = 2; i < section.items.size(); i += 2) {
      const std::string& key = expect_symbol(section.items[i], "action keyword");
      if (i + 1 >= section.items.size()) syntax(section.items[i], "expected a value after " + key);
      const SExpr& value = section.items[i + 1];
      if (key == ":parameters") {
        expect_list(value, "parameter list");
        for (const auto& p : parse_typed_list(value, 0)) {
          if (p.name.empty() || p.name[0] != '?') syntax(*p.where, "expected a '?variable'");
          if (params.count(p.name)) syntax(*p.where, "duplicate parameter " + p.name);
          const int idx = static_cast<int>(schema.params.size());
          params[p.name] = idx;
          schema.params.push_back(p.name);
          if (p.type != "object") {
            type_chain(p.type, p.where);
            type_pre.push_back({type_predicate_for(p.type), {Term::param(idx)}});
          }
        }
      } else if (key == ":precondition") {
        pre = &value;
      } else if (key == ":effect") {
        eff = &value;
      } else {
        syntax(section.items[i], "unknown action keyword " + key);
      }
    }
    schema.pre = type_pre;
    if (pre) parse_condition(*pre, params, schema.pre);
    if (eff) parse_effect(*eff, params, schema);
    dedupe(schema.pre);
    dedupe(schema.add);
    dedupe(schema.del);
    task.schemas.push_back(std::move(schema));
  }

  static void dedupe(std::vector<SchemaAtom>& atoms) {
    std::vector<SchemaAtom> out;
    for (auto& a : atoms) {
      if (std::find(out.begin(), out.end(), a) == out.end()) out.push_back(std::move(a));
    }
    atoms = std::move(out);
  }

  Atom parse_ground_atom(const SExpr& e) {
    expect_list(e, "atom");
    if (e.items.empty()) syntax(e, "expected a predicate name");
    const std::string& name = expect_symbol(e.items[0], "predicate name");
    int pred = task.find_predicate(name);
    if (pred < 0) throw UndeclaredSymbol("undeclared predicate '" + name + "'");
    const int arity = task.predicates[static_cast<size_t>(pred)].arity;
    if (static_cast<int>(e.items.size()) - 1 != arity) {
      throw ArityMismatch("predicate '" + name + "' expects " + std::to_string(arity) +
                          " arguments, got " + std::to_string(e.items.size() - 1));
    }
    Atom atom{pred, {}};
    for (size_t i = 1; i < e.items.size(); ++i) {
      const std::string& arg = expect_symbol(e.items[i], "object name");
      int obj = task.find_object(arg);
      if (obj < 0) throw UndeclaredSymbol("undeclared object '" + arg + "' in " + name);
      atom.args.push_back(obj);
    }
    return atom;
  }

  void parse_goal(const SExpr& e, std::vector<Atom>& out) {
    expect_list(e, "goal condition");
    if (e.items.empty()) return;
    const std::string& head = expect_symbol(e.items[0], "goal keyword or predicate");
    if (head == "and") {
      for (size_t i = 1; i < e.items.size(); ++i) parse_goal(e.items[i], out);
    } else if (head == "not") {
      throw UnsupportedFeature("negative goals");
    } else if (head == "or" || head == "imply" || head == "exists" || head == "forall") {
      throw UnsupportedFeature("non-conjunctive goals");
    } else {
      out.push_back(parse_ground_atom(e));
    }
  }

  void parse_problem(const SExpr& root) {
    expect_list(root, "'(define ...)'");
    if (root.items.empty() || !root.items[0].is_symbol("define")) {
      syntax(root, "expected 'define'");
    }
    if (root.items.size() < 2 || !root.items[1].head_is("problem") ||
        root.items[1].items.size() != 2) {
      syntax(root.items.size() > 1 ? root.items[1] : root, "expected '(problem <name>)'");
    }
    task.problem_name = expect_symbol(root.items[1].items[1], "problem name");

    const SExpr* init = nullptr;
    const SExpr* goal = nullptr;
    for (size_t i = 2; i < root.items.size(); ++i) {
      const SExpr& section = expect_list(root.items[i], "problem section");
      if (section.items.empty()) syntax(section, "expected a section keyword");
      const std::string& key = expect_symbol(section.items[0], "section keyword");
      if (key == ":domain") {
        // Name mismatches are tolerated.
      } else if (key == ":requirements") {
        for (size_t j = 1; j < section.items.size(); ++j) {
          const std::string& r = expect_symbol(section.items[j], "requirement");
          if (!is_supported_requirement(r)) {
            throw UnsupportedFeature("requirement " + r + " is not supported");
          }
        }
      } else if (key == ":objects") {
        for (const auto& o : parse_typed_list(section, 1)) add_object(o);
      } else if (key == ":init") {
        init = &section;
      } else if (key == ":goal") {
        if (section.items.size() != 2) syntax(section, "expected exactly one goal formula");
        goal = &section.items[1];
      } else if (key == ":metric") {
        if (!action_costs) throw UnsupportedFeature("metric without :action-costs");
      } else {
        syntax(section.items[0], "unknown problem section " + key);
      }
    }
    if (!goal) syntax(root, "expected a ':goal' section");

    // Type atoms first, in object order, then the listed init atoms.
    std::set<Atom> seen;
    auto push_init = [&](Atom a) {
      if (seen.insert(a).second) task.init.push_back(std::move(a));
    };
    for (size_t o = 0; o < task.objects.size(); ++o) {
      const std::string& type = constant_types[o];
      if (type == "object") continue;
      for (const auto& t : type_chain(type, nullptr)) {
        push_init({type_predicate_for(t), {static_cast<int>(o)}});
      }
    }
    if (init) {
      for (size_t j = 1; j < init->items.size(); ++j) {
        const SExpr& e = init->items[j];
        if (e.head_is("=")) {
          if (!action_costs) throw UnsupportedFeature("numeric fluents in :init");
          continue;
        }
        if (e.head_is("not")) throw UnsupportedFeature("negative literals in :init");
        push_init(parse_ground_atom(e));
      }
    }
    std::set<Atom> goal_seen;
    std::vector<Atom> goals;
    parse_goal(*goal, goals);
    for (auto& g : goals) {
      if (goal_seen.insert(g).second) task.goal.push_back(std::move(g));
    }
  }
};

}  // namespace

LiftedTask parse_pddl(std::string_view domain_text, std::string_view problem_text) {
  DomainBuilder builder;
  builder.parse(detail::parse_sexpr(domain_text));
  builder.parse_problem(detail::parse_sexpr(problem_text));
  builder.task.validate();
  return std::move(builder.task);
}

LiftedTask parse_pddl_files(const std::filesystem::path& domain,
                            const std::filesystem::path& problem) {
  return parse_pddl(read_text_file(domain), read_text_file(problem));
}

}  // namespace lgplan
