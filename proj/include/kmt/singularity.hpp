#pragma once

#include <optional>
#include <string>
#include <vector>

#include "kmt/kernel.hpp"
#include "kmt/model.hpp"
#include "kmt/numerics.hpp"

namespace kmt {

struct PoleCandidates {
  double x3 = kInf;                  ///< branch point closing the real interval
  double x_star = kInf;              ///< zero of h1(x, Y0(x)) in (1, x3], or +inf
  bool x_star_at_branch_point = false;
  std::optional<double> y_tilde;     ///< zero of h2(X0(y), y) in (1, y3]
  double x_tilde_raw = kInf;         ///< X1(y_tilde) before the consistency filter
  double x_tilde1 = kInf;            ///< accepted reflected pole, or +inf
  double consistency_gap = 0.0;      ///< |Y0(x_tilde_raw) - y_tilde|
  std::string x_tilde_note;
};

struct CaseLabel {
  int case_id = 0;
  double x_dom = kInf;
  bool pole_meets_branch = false;  ///< a pole coincides with the branch point
  bool near_degenerate = false;    ///< some candidates within 10 eps_eq of each other
  std::vector<std::string> notes;
};

inline constexpr double kDefaultEpsEq = 1e-9;

/// Four-case rule on a branch point and two pole candidates (either may be +inf).
CaseLabel classify_candidates(double branch, double pole, double reflected_pole,
                              double eps_eq = kDefaultEpsEq);

CaseLabel classify(const PoleCandidates& pc, double eps_eq = kDefaultEpsEq);

/// Zero search of x -> h1(x, Y0(x)) on (1, x3]. Throws MultipleZeros.
ZeroSearch find_x_star(const KernelSystem& ks, const BranchPoints& bp,
                       const ZeroSearchOptions& opts = {});

/// Debug cross-check: real roots in (1, x3] of a u^2 - b u v + c v^2 where
/// h1 = u(x) + y v(x), kept when they are zeros on the Y0 sheet.
std::vector<double> find_x_star_resultant(const KernelSystem& ks, const BranchPoints& bp);

/// Fills y_tilde, x_tilde_raw, x_tilde1 and the consistency diagnostics.
void find_x_tilde(const KernelSystem& ks, const BranchPoints& bp, PoleCandidates& pc,
                  const ZeroSearchOptions& opts = {});

inline constexpr double kConsistencyTol = 1e-8;

struct AnalysisOptions {
  double eps_eq = kDefaultEpsEq;
  bool resultant_check = false;
  bool assume_stable = false;  ///< proceed even if the advisory check says unstable
};

struct WalkAnalysis {
  WalkSpec spec;
  WalkClass cls;
  DriftVector drift;
  StabilityVerdict stability;
  KernelSystem ks;
  BranchPoints bp;
  PoleCandidates pc;
  CaseLabel label;
  std::vector<double> resultant_roots;
  std::vector<std::string> warnings;
};

/// Validation through classification. Throws XShaped, SingularKernel,
/// GenusZero, OrderingViolated, MultipleZeros, Unstable.
WalkAnalysis analyze_walk(const WalkSpec& spec, const AnalysisOptions& opts = {});

}  // namespace kmt
