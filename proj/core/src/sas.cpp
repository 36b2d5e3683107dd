#include "lgplan/sas.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <string>
#include <vector>

#include "lgplan/errors.hpp"

namespace lgplan {

namespace {

class SasReader {
 public:
  explicit SasReader(std::string_view text) : text_(text) {}

  std::string_view line() {
    if (pos_ >= text_.size()) fail("unexpected end of file");
    size_t end = text_.find('\n', pos_);
    if (end == std::string_view::npos) end = text_.size();
    std::string_view l = text_.substr(pos_, end - pos_);
    if (!l.empty() && l.back() == '\r') l.remove_suffix(1);
    pos_ = end + 1;
    ++line_no_;
    return l;
  }

  void expect(std::string_view word) {
    std::string_view l = trim(line());
    if (l != word) fail("expected '" + std::string(word) + "', got '" + std::string(l) + "'");
  }

  std::vector<long long> ints(size_t n) {
    std::vector<long long> out = all_ints();
    if (out.size() != n) {
      fail("expected " + std::to_string(n) + " integer(s), got " + std::to_string(out.size()));
    }
    return out;
  }

  std::vector<long long> all_ints() {
    std::string_view l = line();
    std::vector<long long> out;
    size_t i = 0;
    while (i < l.size()) {
      while (i < l.size() && (l[i] == ' ' || l[i] == '\t')) ++i;
      if (i >= l.size()) break;
      size_t j = i;
      while (j < l.size() && l[j] != ' ' && l[j] != '\t') ++j;
      long long v = 0;
      auto [ptr, ec] = std::from_chars(l.data() + i, l.data() + j, v);
      if (ec != std::errc() || ptr != l.data() + j) {
        fail_at("expected integer, got '" + std::string(l.substr(i, j - i)) + "'",
                static_cast<int>(i) + 1);
      }
      out.push_back(v);
      i = j;
    }
    return out;
  }

  long long integer() { return ints(1)[0]; }

  size_t count() {
    long long n = integer();
    if (n < 0) fail("negative count");
    return static_cast<size_t>(n);
  }

  bool at_end() const {
    return text_.find_first_not_of(" \t\r\n", pos_) == std::string_view::npos;
  }

  [[noreturn]] void fail(const std::string& what) const { fail_at(what, 1); }
  [[noreturn]] void fail_at(const std::string& what, int column) const {
    throw SyntaxError(what, line_no_, column);
  }

 private:
  static std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
  }

  std::string_view text_;
  size_t pos_ = 0;
  int line_no_ = 0;
};

}  // namespace

FdrTask parse_sas(std::string_view text) {
  SasReader r(text);
  FdrTask task;

  r.expect("begin_version");
  if (long long version = r.integer(); version != 3) {
    throw UnsupportedFeature("SAS format version " + std::to_string(version) +
                             " (only version 3 is supported)");
  }
  r.expect("end_version");
  r.expect("begin_metric");
  r.integer();
  r.expect("end_metric");

  const size_t num_vars = r.count();
  for (size_t v = 0; v < num_vars; ++v) {
    r.expect("begin_variable");
    FdrVariable var;
    var.name = std::string(r.line());
    if (long long layer = r.integer(); layer != -1) {
      throw UnsupportedFeature("derived variable " + var.name + " (axiom layer " +
                               std::to_string(layer) + ")");
    }
    const size_t dom = r.count();
    if (dom == 0) r.fail("variable " + var.name + " has an empty domain");
    for (size_t d = 0; d < dom; ++d) var.values.emplace_back(r.line());
    r.expect("end_variable");
    task.variables.push_back(std::move(var));
  }

  auto fact = [&](long long var, long long value) -> Fact {
    if (var < 0 || var >= static_cast<long long>(num_vars)) {
      r.fail("variable " + std::to_string(var) + " out of range");
    }
    const auto& dom = task.variables[static_cast<size_t>(var)].values;
    if (value < 0 || value >= static_cast<long long>(dom.size())) {
      r.fail("value " + std::to_string(value) + " out of domain of variable " +
             std::to_string(var));
    }
    return {static_cast<int>(var), static_cast<int>(value)};
  };

  const size_t num_mutex = r.count();
  for (size_t m = 0; m < num_mutex; ++m) {
    r.expect("begin_mutex_group");
    const size_t k = r.count();
    for (size_t i = 0; i < k; ++i) {
      auto f = r.ints(2);
      fact(f[0], f[1]);
    }
    r.expect("end_mutex_group");
  }

  r.expect("begin_state");
  for (size_t v = 0; v < num_vars; ++v) {
    task.init.push_back(fact(static_cast<long long>(v), r.integer()).value);
  }
  r.expect("end_state");

  r.expect("begin_goal");
  const size_t num_goals = r.count();
  for (size_t i = 0; i < num_goals; ++i) {
    auto f = r.ints(2);
    task.goal.push_back(fact(f[0], f[1]));
  }
  r.expect("end_goal");
  std::sort(task.goal.begin(), task.goal.end());

  const size_t num_ops = r.count();
  for (size_t o = 0; o < num_ops; ++o) {
    r.expect("begin_operator");
    FdrAction action;
    action.name = std::string(r.line());
    std::map<int, int> pre;
    auto add_pre = [&](const Fact& f) {
      auto [it, inserted] = pre.emplace(f.var, f.value);
      if (!inserted && it->second != f.value) {
        r.fail("operator " + action.name + " has conflicting conditions on variable " +
               std::to_string(f.var));
      }
    };
    const size_t num_prevail = r.count();
    for (size_t i = 0; i < num_prevail; ++i) {
      auto f = r.ints(2);
      add_pre(fact(f[0], f[1]));
    }
    const size_t num_effects = r.count();
    std::map<int, int> eff;
    for (size_t i = 0; i < num_effects; ++i) {
      std::vector<long long> first = r.all_ints();
      if (!first.empty() && first[0] != 0) {
        throw UnsupportedFeature("conditional effect in operator " + action.name);
      }
      if (first.size() != 4) r.fail("expected effect line '0 var pre post'");
      const long long var = first[1];
      if (first[2] != -1) add_pre(fact(var, first[2]));
      Fact post = fact(var, first[3]);
      if (!eff.emplace(post.var, post.value).second) {
        r.fail("operator " + action.name + " assigns variable " + std::to_string(var) +
               " twice");
      }
    }
    r.integer();  // cost; unit costs throughout
    r.expect("end_operator");
    for (auto [v, d] : pre) action.pre.push_back({v, d});
    for (auto [v, d] : eff) action.eff.push_back({v, d});
    action.cost = 1;
    task.actions.push_back(std::move(action));
  }

  const size_t num_axioms = r.count();
  if (num_axioms > 0) throw UnsupportedFeature("axioms (" + std::to_string(num_axioms) + ")");
  if (!r.at_end()) r.fail("trailing content after axiom section");
  return task;
}

}  // namespace lgplan
