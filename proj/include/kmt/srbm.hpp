#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kmt/asymptotics.hpp"
#include "kmt/model.hpp"
#include "kmt/polynomial.hpp"
#include "kmt/singularity.hpp"

namespace kmt {

/// gamma(x,y) = a y^2 + b(x) y + c(x) with a = S22/2, b = mu2 + S12 x,
/// c = S11 x^2/2 + mu1 x; the mirror system in y; boundary lines
/// gamma1 = r11 x + r21 y and gamma2 = r12 x + r22 y.
struct SrbmKernel {
  QuadraticKernel in_y;
  QuadraticKernel in_x;
  Polynomial d1, d2;
  std::array<std::array<double, 2>, 2> R{};

  double gamma1(double x, double y) const { return R[0][0] * x + R[1][0] * y; }
  double gamma2(double x, double y) const { return R[0][1] * x + R[1][1] * y; }
};

SrbmKernel build_srbm_kernel(const SrbmSpec& spec);

struct SrbmBranchPoints {
  double x1 = 0.0, x2 = 0.0;  ///< D1 > 0 on (x1, x2), x1 <= 0 < x2
  double y1 = 0.0, y2 = 0.0;
};

/// Throws DegenerateCovariance when a discriminant is not a downward parabola.
SrbmBranchPoints srbm_branch_points(const SrbmKernel& k);

/// (Y0, Y1) = (Y-, Y+) on the plane cut along (-inf, x1] and [x2, inf).
/// The square root is continued as sqrt(-L) sqrt(x - x1) sqrt(x2 - x), which
/// is analytic there and positive on (x1, x2). Throws OnCut.
std::pair<cplx, cplx> srbm_branch_eval(const SrbmKernel& k, const SrbmBranchPoints& bp, cplx x);
/// (X0, X1) = (X-, X+) in y.
std::pair<cplx, cplx> srbm_x_branch_eval(const SrbmKernel& k, const SrbmBranchPoints& bp,
                                         cplx y);

struct SrbmSingularity {
  SrbmBranchPoints bp;
  double x_star = kInf;
  std::optional<double> y_tilde;
  double x_tilde_raw = kInf;
  double x_tilde = kInf;
  double consistency_gap = 0.0;
  std::string x_tilde_note;
  CaseLabel label;
  double tau1 = kInf;
};

/// Candidates and four-case label. Throws MultipleZeros.
SrbmSingularity srbm_poles(const SrbmKernel& k, double eps_eq = kDefaultEpsEq);

struct SrbmAnalysis {
  SrbmSpec spec;
  StabilityVerdict stability;
  SrbmKernel kernel;
  SrbmSingularity sing;
  TailForm v2_tail;  ///< V2(x, inf) ~ C x^power e^{-rate x}
  bool independent_components = false;
  std::vector<std::string> warnings;
};

/// Throws Unstable when R^{-1} mu < 0 fails.
SrbmAnalysis analyze_srbm(const SrbmSpec& spec, double eps_eq = kDefaultEpsEq);

}  // namespace kmt
