#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace kmt {

enum class ErrorCode {
  // model validation
  kWrongShape,
  kNegativeEntry,
  kNonStochastic,
  kBadParameter,
  kUnstable,
  // kernel / branch analysis
  kSingularKernel,
  kGenusZero,
  kOrderingViolated,
  kOnCut,
  kXShaped,
  // singularity search
  kMultipleZeros,
  kRecursionPole,
  kDegenerateCovariance,
  // asymptotics
  kDegenerateExponent,
  kOracleRequired,
  kNoConvergence,
  // oracle
  kNotConverged,
  kTruncationSuspect,
  kOutsideConvergence,
  kWindowTooNoisy,
  kNoOracle,
};

std::string_view to_string(ErrorCode code);

/// Validation errors map to CLI exit code 2; everything else to 3.
bool is_validation_error(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace kmt
