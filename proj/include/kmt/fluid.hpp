#pragma once

#include <string>
#include <utility>
#include <vector>

#include "kmt/asymptotics.hpp"
#include "kmt/model.hpp"
#include "kmt/polynomial.hpp"
#include "kmt/singularity.hpp"

namespace kmt {

/// H(alpha, z) = -lambda z^2 + (-alpha r + lambda + c mu) z - c mu.
struct FluidKernel {
  double lambda = 0.0, mu = 0.0, r = 0.0;
  int c = 1;

  double a() const { return -lambda; }
  double d() const { return -c * mu; }
  cplx b(cplx alpha) const { return -alpha * r + lambda + c * mu; }
  cplx delta(cplx alpha) const { return b(alpha) * b(alpha) - 4.0 * a() * d(); }
  cplx H(cplx alpha, cplx z) const { return (a() * z + b(alpha)) * z + d(); }
  /// alpha(z) solving H(alpha, z) = 0 for z != 0.
  cplx inverse_map(cplx z) const {
    return (-lambda * z * z + (lambda + c * mu) * z - c * mu) / (z * r);
  }
  cplx H2(cplx z) const { return lambda * z * z - lambda * z - c * mu * z + c * mu; }
  cplx H1(cplx alpha, cplx z) const;
  cplx H0(cplx z) const;
};

FluidKernel build_fluid_kernel(const FluidSpec& spec);

struct FluidBranchPoints {
  double alpha1 = 0.0, alpha2 = 0.0;
};

/// alpha_{1,2} = (sqrt(c mu) -+ sqrt(lambda))^2 / r, alpha1 computed without
/// cancellation.
FluidBranchPoints fluid_branch_points(const FluidKernel& k);

/// (Z0, Z1): Z0 = Z+ when Re(alpha) <= (lambda + c mu)/r, else Z-, with the
/// principal square root. Throws OnCut inside (alpha1, alpha2).
std::pair<cplx, cplx> fluid_branches(const FluidKernel& k, const FluidBranchPoints& bp,
                                     cplx alpha);

/// A_upto(alpha) by forward recursion from A_{-1} = 0. Throws RecursionPole.
cplx continued_fraction(const FluidKernel& k, cplx alpha, int upto);

/// lambda z^c A_{c-2}(alpha) + H1(alpha, z).
cplx hat_h1(const FluidKernel& k, cplx alpha, cplx z);

struct AlphaStar {
  double alpha_star = kInf;
  int multiplicity = 0;
  bool at_branch_point = false;
};

/// Zero of alpha -> hat_h1(alpha, Z0(alpha)) on (0, alpha1]. Throws MultipleZeros.
AlphaStar find_alpha_star(const FluidKernel& k, const FluidBranchPoints& bp);

struct FluidAnalysis {
  FluidSpec spec;
  StabilityVerdict stability;
  FluidKernel kernel;
  FluidBranchPoints bp;
  AlphaStar star;
  CaseLabel label;  ///< case 1..3
  double alpha_dom = kInf;
  double z_dom = 0.0;
  TailForm density;   ///< pi_{c-1}(x) ~ C x^power e^{-rate x}
  TailForm marginal;  ///< 1 - Pi(x) ~ C x^power e^{-rate x}
  TailForm boundary;  ///< Pi_i(0) ~ d rate^{i+1}
  std::string assumption_ii;  ///< "holds", "violated" or "assumed"
  std::vector<std::string> warnings;
};

/// Throws Unstable.
FluidAnalysis analyze_fluid(const FluidSpec& spec, double eps_eq = kDefaultEpsEq);

}  // namespace kmt
