#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace mole2d {

enum class Errc {
  Disconnected,
  SelfLoop,
  NonpositiveVariance,
  NonFinite,
  OutOfRange,
  OdometricPathMissing,
  CanonicalizationFailure,
  SingularBlock,
  NotPositiveDefinite,
  CapExceeded,
  BudgetExceeded,
  MalformedLine,
  NonpositiveInformation,
};

const char* errc_name(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, std::string what)
      : std::runtime_error(std::move(what)), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void raise(Errc code, const std::string& what) {
  throw Error(code, std::string(errc_name(code)) + ": " + what);
}

}  // namespace mole2d
