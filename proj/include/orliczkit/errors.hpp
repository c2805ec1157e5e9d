#pragma once

#include <stdexcept>
#include <string>

namespace orliczkit {

enum class ErrorCode {
  parse_error,
  not_monotone,
  not_young,
  unbounded,
  divergent_integral,
  no_finite_gauge,
  unsupported_operator,
  divergent_alpha,
  divergent_beta,
  incompatible_forms,
  regime_unsupported,
  range_error,
  config_error,
  invalid_argument,
};

const char* to_string(ErrorCode code);

/// Base exception for every failure raised by the library. The code lets the
/// CLI and tests distinguish contract violations from numerical outcomes.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace orliczkit
