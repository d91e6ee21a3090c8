#pragma once

#include <stdexcept>
#include <string>

namespace covercert {

/// Base class of every failure raised by the library. `name()` is the stable
/// identifier printed by the command line tool.
class Error : public std::runtime_error {
 public:
  Error(const char* name, const std::string& what)
      : std::runtime_error(what), name_(name) {}

  const char* name() const noexcept { return name_; }

 private:
  const char* name_;
};

#define COVERCERT_DEFINE_ERROR(Type)                                   \
  class Type : public Error {                                          \
   public:                                                             \
    explicit Type(const std::string& what) : Error(#Type, what) {}     \
  }

COVERCERT_DEFINE_ERROR(NotInvertible);
COVERCERT_DEFINE_ERROR(Inconsistent);
COVERCERT_DEFINE_ERROR(NotCoprime);
COVERCERT_DEFINE_ERROR(RNotLessThanP);
COVERCERT_DEFINE_ERROR(ZeroPolynomial);
COVERCERT_DEFINE_ERROR(Unsatisfiable);
COVERCERT_DEFINE_ERROR(BudgetExceeded);
COVERCERT_DEFINE_ERROR(NotFermatDivisor);
COVERCERT_DEFINE_ERROR(TableMiss);
COVERCERT_DEFINE_ERROR(CorruptTable);
COVERCERT_DEFINE_ERROR(PeriodTooLarge);
COVERCERT_DEFINE_ERROR(NoAssignment);
COVERCERT_DEFINE_ERROR(IndicesEqual);
COVERCERT_DEFINE_ERROR(ConditionUnsatisfied);
COVERCERT_DEFINE_ERROR(HypothesisFailed);
COVERCERT_DEFINE_ERROR(PartitionMissing);
COVERCERT_DEFINE_ERROR(InvalidArgument);

#undef COVERCERT_DEFINE_ERROR

/// Parse failure with a 1-based line number (0 when the input ended early).
class MalformedInput : public Error {
 public:
  MalformedInput(const char* name, std::size_t line, const std::string& what)
      : Error(name, "line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class MalformedCertificate : public MalformedInput {
 public:
  MalformedCertificate(std::size_t line, const std::string& what)
      : MalformedInput("MalformedCertificate", line, what) {}
};

class MalformedTable : public MalformedInput {
 public:
  MalformedTable(std::size_t line, const std::string& what)
      : MalformedInput("MalformedTable", line, what) {}
};

class MalformedCovering : public MalformedInput {
 public:
  MalformedCovering(std::size_t line, const std::string& what)
      : MalformedInput("MalformedCovering", line, what) {}
};

}  // namespace covercert
