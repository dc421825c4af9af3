#pragma once

#include <stdexcept>
#include <string>

namespace lsep {

// Invalid user input or configuration (CLI exit code 2).
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

// Base for every failure raised by a numerical kernel (CLI exit code 3).
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

#define LSEP_NUMERICAL_ERROR(Name)                                  \
  class Name : public NumericalError {                              \
   public:                                                          \
    explicit Name(const std::string& what) : NumericalError(what) {} \
  }

LSEP_NUMERICAL_ERROR(SingularMatrix);
LSEP_NUMERICAL_ERROR(NotConverged);
LSEP_NUMERICAL_ERROR(DefectiveMatrix);
LSEP_NUMERICAL_ERROR(StepUnderflow);
LSEP_NUMERICAL_ERROR(MaxStepsExceeded);
LSEP_NUMERICAL_ERROR(GridTooCoarse);
LSEP_NUMERICAL_ERROR(NoUniqueSteadyState);
LSEP_NUMERICAL_ERROR(FitDiverged);
LSEP_NUMERICAL_ERROR(SizeParameterOutOfRange);
LSEP_NUMERICAL_ERROR(RecurrenceUnstable);
LSEP_NUMERICAL_ERROR(EvaluationTooFarOut);
LSEP_NUMERICAL_ERROR(ZeroPoyntingVector);
LSEP_NUMERICAL_ERROR(NoMinimumFound);
LSEP_NUMERICAL_ERROR(BranchAmbiguous);

#undef LSEP_NUMERICAL_ERROR

// Argument-domain errors that are neither config nor numerical failures.
class ModeOutOfRange : public std::out_of_range {
 public:
  explicit ModeOutOfRange(const std::string& what) : std::out_of_range(what) {}
};

class BadDimension : public std::invalid_argument {
 public:
  explicit BadDimension(const std::string& what) : std::invalid_argument(what) {}
};

}  // namespace lsep
