#pragma once

#include <filesystem>
#include <string_view>

#include "lgplan/task.hpp"

namespace lgplan {

// Parses the :strips + :typing subset of PDDL. Types are flattened into unary
// predicates named after the type: every object receives an atom for its type
// and each ancestor except `object`, and every typed schema parameter receives
// the matching precondition. `:action-costs` is accepted, and its cost
// expressions are dropped (all actions cost 1).
//
// Errors: SyntaxError (with line:column), UnsupportedFeature (names the
// construct), ArityMismatch, UndeclaredSymbol.
LiftedTask parse_pddl(std::string_view domain_text, std::string_view problem_text);

LiftedTask parse_pddl_files(const std::filesystem::path& domain,
                            const std::filesystem::path& problem);

}  // namespace lgplan
