#include "mole2d/errors.hpp"

namespace mole2d {

const char* errc_name(Errc code) {
  switch (code) {
    case Errc::Disconnected: return "Disconnected";
    case Errc::SelfLoop: return "SelfLoop";
    case Errc::NonpositiveVariance: return "NonpositiveVariance";
    case Errc::NonFinite: return "NonFinite";
    case Errc::OutOfRange: return "OutOfRange";
    case Errc::OdometricPathMissing: return "OdometricPathMissing";
    case Errc::CanonicalizationFailure: return "CanonicalizationFailure";
    case Errc::SingularBlock: return "SingularBlock";
    case Errc::NotPositiveDefinite: return "NotPositiveDefinite";
    case Errc::CapExceeded: return "CapExceeded";
    case Errc::BudgetExceeded: return "BudgetExceeded";
    case Errc::MalformedLine: return "MalformedLine";
    case Errc::NonpositiveInformation: return "NonpositiveInformation";
  }
  return "UnknownError";
}

}  // namespace mole2d
