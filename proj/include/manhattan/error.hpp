#pragma once

#include <stdexcept>
#include <string>

namespace manhattan {

// Every failure surfaced by the library carries the module that raised it and
// a stable kind tag, so the CLI can print "module: Kind: detail".
class Error : public std::runtime_error {
 public:
  Error(std::string module, std::string kind, const std::string& detail)
      : std::runtime_error(module + ": " + kind + ": " + detail),
        module_(std::move(module)),
        kind_(std::move(kind)) {}

  const std::string& module() const noexcept { return module_; }
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string module_;
  std::string kind_;
};

#define MANHATTAN_DEFINE_ERROR(Name, Module)                         \
  class Name : public ::manhattan::Error {                           \
   public:                                                           \
    explicit Name(const std::string& detail)                         \
        : ::manhattan::Error(Module, #Name, detail) {}               \
  }

MANHATTAN_DEFINE_ERROR(NotHyperbolic, "moebius");
MANHATTAN_DEFINE_ERROR(TrivialWord, "words");
MANHATTAN_DEFINE_ERROR(UnsupportedCurve, "words");
MANHATTAN_DEFINE_ERROR(ParseError, "words");
MANHATTAN_DEFINE_ERROR(DegenerateParameters, "reps");
MANHATTAN_DEFINE_ERROR(NotDiscernedDiscrete, "reps");
MANHATTAN_DEFINE_ERROR(BudgetExceeded, "spectrum");
MANHATTAN_DEFINE_ERROR(HorizonUnsound, "spectrum");
MANHATTAN_DEFINE_ERROR(UncertifiedRegion, "spectrum");
MANHATTAN_DEFINE_ERROR(FormatError, "spectrum");
MANHATTAN_DEFINE_ERROR(VersionError, "spectrum");
MANHATTAN_DEFINE_ERROR(InsufficientData, "manhattan");
MANHATTAN_DEFINE_ERROR(OutOfRange, "manhattan");
MANHATTAN_DEFINE_ERROR(EmptyBand, "manhattan");
MANHATTAN_DEFINE_ERROR(NotSpacelikeSeparated, "adscheck");
MANHATTAN_DEFINE_ERROR(NotHyperbolicPair, "adscheck");
MANHATTAN_DEFINE_ERROR(ConfigError, "cli");

#undef MANHATTAN_DEFINE_ERROR

}  // namespace manhattan
