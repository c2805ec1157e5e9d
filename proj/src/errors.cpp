#include "orliczkit/errors.hpp"

namespace orliczkit {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::parse_error: return "ParseError";
    case ErrorCode::not_monotone: return "NotMonotone";
    case ErrorCode::not_young: return "NotYoung";
    case ErrorCode::unbounded: return "Unbounded";
    case ErrorCode::divergent_integral: return "DivergentIntegral";
    case ErrorCode::no_finite_gauge: return "NoFiniteGauge";
    case ErrorCode::unsupported_operator: return "UnsupportedOperator";
    case ErrorCode::divergent_alpha: return "DivergentAlpha";
    case ErrorCode::divergent_beta: return "DivergentBeta";
    case ErrorCode::incompatible_forms: return "IncompatibleForms";
    case ErrorCode::regime_unsupported: return "RegimeUnsupported";
    case ErrorCode::range_error: return "RangeError";
    case ErrorCode::config_error: return "ConfigError";
    case ErrorCode::invalid_argument: return "InvalidArgument";
  }
  return "Error";
}

}  // namespace orliczkit
