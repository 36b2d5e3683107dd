#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace lgplan::detail {

// Parsed S-expression node. Symbols are lower-cased (PDDL is case-insensitive).
struct SExpr {
  bool is_list = false;
  std::string symbol;
  std::vector<SExpr> items;
  int line = 1;
  int column = 1;

  bool is_symbol() const { return !is_list; }
  bool is_symbol(std::string_view s) const { return !is_list && symbol == s; }
  // True for a list whose first item is the given symbol.
  bool head_is(std::string_view s) const {
    return is_list && !items.empty() && items.front().is_symbol(s);
  }
};

// Parses exactly one top-level expression; throws SyntaxError.
SExpr parse_sexpr(std::string_view text);

}  // namespace lgplan::detail
