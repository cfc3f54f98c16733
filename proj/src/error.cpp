#include "smmimo/error.hpp"

namespace smmimo {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::InvalidConfig: return "InvalidConfig";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::AllBlocksFailed: return "AllBlocksFailed";
    case Errc::NonConvergence: return "NonConvergence";
    case Errc::NoCoverage: return "NoCoverage";
    case Errc::InsufficientAnchors: return "InsufficientAnchors";
    case Errc::DegenerateGeometry: return "DegenerateGeometry";
    case Errc::InsufficientResources: return "InsufficientResources";
    case Errc::UnknownResource: return "UnknownResource";
    case Errc::AntennaBusy: return "AntennaBusy";
    case Errc::ForeignUt: return "ForeignUt";
    case Errc::RoleConstraintViolated: return "RoleConstraintViolated";
    case Errc::NoRoute: return "NoRoute";
    case Errc::NumericalFailure: return "NumericalFailure";
    case Errc::UnroutedFlow: return "UnroutedFlow";
  }
  return "Unknown";
}

}  // namespace smmimo
