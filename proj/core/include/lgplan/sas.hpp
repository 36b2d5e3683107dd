#pragma once

#include <string_view>

#include "lgplan/task.hpp"

namespace lgplan {

// Reads translator output, format version 3. Prevail conditions and effect
// preconditions are folded into `pre`; effects become `eff`. Mutex groups are
// read and discarded. All operator costs are set to 1.
//
// Errors: SyntaxError (line:column); UnsupportedFeature for axioms, derived
// variables and conditional effects.
FdrTask parse_sas(std::string_view text);

}  // namespace lgplan
