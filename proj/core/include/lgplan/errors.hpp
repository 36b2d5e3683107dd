#pragma once

#include <stdexcept>
#include <string>

namespace lgplan {

// Base of every domain error raised by the library. The CLI maps these to
// exit code 1; anything else escaping is a bug.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SyntaxError : public Error {
 public:
  SyntaxError(const std::string& what, int line, int column)
      : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}

  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

#define LGPLAN_DEFINE_ERROR(Name)   \
  class Name : public Error {       \
   public:                          \
    using Error::Error;             \
  }

LGPLAN_DEFINE_ERROR(UnsupportedFeature);
LGPLAN_DEFINE_ERROR(ArityMismatch);
LGPLAN_DEFINE_ERROR(UndeclaredSymbol);
LGPLAN_DEFINE_ERROR(GroundingExplosion);
LGPLAN_DEFINE_ERROR(UnknownActionId);
LGPLAN_DEFINE_ERROR(BudgetExceeded);
LGPLAN_DEFINE_ERROR(DimensionMismatch);
LGPLAN_DEFINE_ERROR(EmptyDataset);
LGPLAN_DEFINE_ERROR(NonFiniteLoss);
LGPLAN_DEFINE_ERROR(EmptyCandidates);
LGPLAN_DEFINE_ERROR(FormatVersionMismatch);
LGPLAN_DEFINE_ERROR(ChecksumMismatch);
LGPLAN_DEFINE_ERROR(BoundViolation);
LGPLAN_DEFINE_ERROR(InvalidPlan);
LGPLAN_DEFINE_ERROR(InvalidSize);
LGPLAN_DEFINE_ERROR(FileNotFound);
LGPLAN_DEFINE_ERROR(InvalidTask);

#undef LGPLAN_DEFINE_ERROR

}  // namespace lgplan
