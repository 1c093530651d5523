#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "kmt/oracle.hpp"
#include "kmt/singularity.hpp"

namespace kmt {

enum class Provenance { kClosedForm, kNumericEstimate, kUnavailable };

std::string_view to_string(Provenance p);

/// Behaviour of a generating function at its dominant singularity:
/// (1 - x/x_dom)^alpha F(x) -> g, or the same for F' when via_derivative.
struct SingularBehavior {
  double alpha = 1.0;
  double g = std::numeric_limits<double>::quiet_NaN();
  bool via_derivative = false;
};

/// Tail c * n^power * rate^(n - offset).
struct TailForm {
  double rate = 0.0;
  double power = 0.0;
  double constant = std::numeric_limits<double>::quiet_NaN();
  Provenance provenance = Provenance::kUnavailable;
  double error_band = std::numeric_limits<double>::quiet_NaN();
  int offset = 1;
  std::string note;

  double predict(double n) const { return constant * std::pow(n, power) * std::pow(rate, n - offset); }
};

/// Singular exponent (and derivative flag) of pi1 at x_dom for cases 1..4.
SingularBehavior singular_behavior_for_case(int case_id);

/// Power of n in the coefficient tail for cases 1..4: 0, -1/2, -3/2, 1.
double tail_power_for_case(int case_id);

/// a_n ~ g / Gamma(alpha) n^(alpha-1) R^-n applied to pi1 (offset 1). The
/// derivative form picks up one extra factor of x_dom and one power of n.
/// Throws DegenerateExponent for alpha in {0, -1, -2, ...} or g = 0.
TailForm tauberian_map(const SingularBehavior& sb, double x_dom);

/// Rate and power only.
TailForm tail_shape(int case_id, double x_dom);

struct TwoDemandParams {
  double lambda = 0.0, mu1 = 0.0, mu2 = 0.0;
};

/// Closed-form constants of the two-demand model, offset 0 (theta^m).
/// Case 3 needs P2 = pi00 + y pi2(y) and its derivative from the oracle and
/// throws OracleRequired without one.
TailForm constants_2demand(const TwoDemandParams& p, const WalkAnalysis& wa,
                           const TruncatedSolution* oracle = nullptr);

struct NumericConstant {
  double g = 0.0;
  double error_band = 0.0;
  std::vector<double> samples;  ///< scaled values at x_dom (1 - 10^-k)
  std::vector<double> epsilons;
};

struct NumericConstantOptions {
  int first_k = 3;
  int depth = 4;
  double max_relative_band = 0.1;
};

/// Limit g of (1 - x/x_dom)^alpha pi1(x) (Case 3: of the derivative) from
/// the interplay formula with pi2 and pi00 taken from the oracle, with
/// Richardson extrapolation. Throws NoConvergence when the error band
/// exceeds the allowed fraction of the estimate.
NumericConstant constant_numeric(const WalkAnalysis& wa, const TruncatedSolution& ts,
                                 const NumericConstantOptions& opts = {});

/// pi1(x) from the interplay formula; x may be complex.
cplx pi1_from_interplay(const WalkAnalysis& wa, const TruncatedSolution& ts, cplx x);

/// tauberian_map of a numeric estimate, provenance numeric_estimate.
TailForm numeric_tail(const WalkAnalysis& wa, const TruncatedSolution& ts,
                      const NumericConstantOptions& opts = {});

/// Partial sum of sum_{n>=1} g/Gamma(alpha) n^(alpha-1) R^-n z^n, for the
/// transfer-theorem sanity check; stops when terms fall below 1e-18 of the sum.
double synthetic_transform(double alpha, double R, double g, double z);

}  // namespace kmt
