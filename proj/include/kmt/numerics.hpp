#pragma once

#include <functional>
#include <limits>
#include <span>
#include <vector>

namespace kmt {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Outcome of scanning a real function for a zero on the half-open interval
/// (lo, hi].
struct ZeroSearch {
  double root = kInf;         ///< +inf when no zero was found
  int sign_changes = 0;       ///< brackets seen on the grid (incl. endpoint zero)
  bool at_endpoint = false;   ///< the zero sits at hi (to endpoint tolerance)
  std::vector<double> extra_roots;  ///< further zeros when sign_changes > 1
};

struct ZeroSearchOptions {
  int grid_points = 10000;
  double rel_tol = 1e-15;          ///< bisection stopping width, relative
  double endpoint_rel_tol = 1e-10; ///< |f(hi)| <= this * scale counts as a zero
};

/// Scan f on a uniform grid over (lo, hi], bisect every sign change, and
/// report a zero at hi itself when |f(hi)| is negligible against the grid
/// scale. f(lo) is never evaluated: the kernel-method boundary functions
/// often vanish identically at the left end (x = 1 or alpha = 0).
ZeroSearch find_zeros_on_interval(const std::function<double(double)>& f,
                                  double lo, double hi,
                                  const ZeroSearchOptions& opts = {});

/// Bisection on [a, b] where f(a) and f(b) have opposite signs.
double bisect(const std::function<double(double)>& f, double a, double b,
              double rel_tol = 1e-15);

/// Repeated Richardson extrapolation on samples f(h_k) with h_{k+1} = h_k / ratio
/// and error expansion in powers h^p, h^{2p}, ... Returns the full Neville
/// tableau; tableau.back().back() is the highest-order estimate.
std::vector<std::vector<double>> richardson_tableau(std::span<const double> samples,
                                                    double ratio, double p);

/// Ordinary least squares y = intercept + slope * x.
struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  double residual_rms = 0.0;
};
LinearFit least_squares(std::span<const double> x, std::span<const double> y);

/// Relative equality |a - b| <= eps * max(|a|, |b|); two infinities compare equal.
bool rel_equal(double a, double b, double eps);

}  // namespace kmt
