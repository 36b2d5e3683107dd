#pragma once

#include <string>
#include <string_view>

#include "lgplan/task.hpp"

namespace lgplan {

// Line-oriented dump of a StripsTask. Grammar in docs/formats.md.
std::string write_task_dump(const StripsTask& task);

// Throws SyntaxError (line:1-based) on malformed input.
StripsTask read_task_dump(std::string_view text);

}  // namespace lgplan
