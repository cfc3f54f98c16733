#ifndef SMMIMO_ERROR_HPP
#define SMMIMO_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace smmimo {

enum class Errc {
  InvalidConfig,
  InvalidArgument,
  AllBlocksFailed,
  NonConvergence,
  NoCoverage,
  InsufficientAnchors,
  DegenerateGeometry,
  InsufficientResources,
  UnknownResource,
  AntennaBusy,
  ForeignUt,
  RoleConstraintViolated,
  NoRoute,
  NumericalFailure,
  UnroutedFlow,
};

std::string_view to_string(Errc code);

/// Every failure raised by the library carries one of the codes above so
/// callers (and tests) can dispatch on the kind without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace smmimo

#endif  // SMMIMO_ERROR_HPP
