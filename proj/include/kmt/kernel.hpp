#pragma once

#include <array>
#include <optional>
#include <vector>

#include <json.hpp>

#include "kmt/model.hpp"
#include "kmt/polynomial.hpp"

namespace kmt {

/// a(t) s^2 + b(t) s + c(t): a quadratic in s whose coefficients are
/// polynomials in t.
struct QuadraticKernel {
  Polynomial a, b, c;

  Polynomial discriminant() const { return b * b - 4.0 * (a * c); }
  cplx operator()(cplx t, cplx s) const { return (a(t) * s + b(t)) * s + c(t); }
};

/// Interior kernel h(x,y) = x y (sum p_ij x^i y^j - 1) viewed both ways, plus
/// the three boundary polynomials.
struct KernelSystem {
  QuadraticKernel in_y;  ///< h = a(x) y^2 + b(x) y + c(x)
  QuadraticKernel in_x;  ///< h = a~(y) x^2 + b~(y) x + c~(y)
  Polynomial d1;         ///< b^2 - 4ac in x
  Polynomial d2;         ///< b~^2 - 4a~c~ in y

  /// h1(x,y) = x (sum p1_ij x^i y^j - 1) = h1_0(x) + y h1_1(x)
  Polynomial h1_0, h1_1;
  /// h2(x,y) = y (sum p2_ij x^i y^j - 1) = h2_0(y) + x h2_1(y)
  Polynomial h2_0, h2_1;
  /// h0(x,y) = sum p0_ij x^i y^j - 1
  std::array<std::array<double, 2>, 2> origin{};

  cplx h(cplx x, cplx y) const { return in_y(x, y); }
  cplx h1(cplx x, cplx y) const { return h1_0(x) + y * h1_1(x); }
  cplx h2(cplx x, cplx y) const { return h2_0(y) + x * h2_1(y); }
  cplx h0(cplx x, cplx y) const {
    return origin[0][0] + origin[1][0] * x + origin[0][1] * y + origin[1][1] * x * y - 1.0;
  }
};

/// Throws SingularKernel when h is not quadratic in one of the variables.
KernelSystem build_kernel(const WalkSpec& spec);

/// Real branch points of one direction, ordered |t1| < t2 < 1 < t3 < |t4|.
struct BranchPointSet {
  std::array<double, 4> t{};      ///< t[3] = +/-inf when the discriminant is cubic
  std::vector<cplx> roots;        ///< raw discriminant roots, for diagnostics
  int degree = 0;
  bool all_real = false;
  bool multiple = false;          ///< some pair closer than 1e-8 (relative)
  bool ordered = false;           ///< the ordering above holds
  std::string diagnostic;
};

struct BranchPoints {
  BranchPointSet x;  ///< roots of D1
  BranchPointSet y;  ///< roots of D2
};

inline constexpr double kRootSeparationTol = 1e-8;

/// Roots of a discriminant of degree 3 or 4 assigned to t1..t4 by modulus.
BranchPointSet branch_point_set(const Polynomial& disc);

/// Both directions; never throws. Use require_genus_one / require_ordering
/// to turn the flags into errors.
BranchPoints branch_points(const KernelSystem& ks);

/// Throws GenusZero on coincident roots, OrderingViolated on non-real roots
/// or a broken ordering.
void require_genus_one(const BranchPointSet& s, const char* which);
void require_ordering(const BranchPointSet& s, const char* which);

/// Both roots of the kernel quadratic at one point.
struct BranchValues {
  cplx y0;                 ///< min-modulus root
  cplx y1;                 ///< the other root (meaningless if y1_infinite)
  bool y1_infinite = false;///< leading coefficient vanished: pole of the branch
  bool tie = false;        ///< |Y-| = |Y+| to rounding; resolved by the tie rule
  bool at_branch_point = false;
};

/// Per-path continuity cache for tie breaking. One session per thread.
struct BranchSession {
  std::optional<cplx> last;
};

/// Y0/Y1 (or X0/X1) on the plane cut along [t1,t2] and [t3,t4].
class AnalyticBranch {
 public:
  AnalyticBranch(QuadraticKernel q, const BranchPointSet& cuts);

  /// Throws OnCut within 1e-12 of a cut interior. Branch-point endpoints
  /// themselves are admitted and return the double root.
  BranchValues eval(cplx t) const;
  BranchValues eval(cplx t, BranchSession& session) const;

  /// Distance from t to the union of the cuts.
  double distance_to_cut(cplx t) const;
  const QuadraticKernel& kernel() const { return q_; }
  const std::array<double, 4>& cut_endpoints() const { return t_; }

 private:
  BranchValues eval_impl(cplx t, BranchSession* session) const;

  QuadraticKernel q_;
  std::array<double, 4> t_;
};

inline constexpr double kOnCutTol = 1e-12;

/// Y-branches in x and X-branches in y.
AnalyticBranch y_branch(const KernelSystem& ks, const BranchPoints& bp);
AnalyticBranch x_branch(const KernelSystem& ks, const BranchPoints& bp);

/// Convenience wrappers matching the branch evaluators.
BranchValues eval_branch(const KernelSystem& ks, const BranchPoints& bp, cplx x);
BranchValues x_branches(const KernelSystem& ks, const BranchPoints& bp, cplx y);

/// Polynomials and roots for diagnostics.
nlohmann::json dump_kernel(const KernelSystem& ks, const BranchPoints& bp);

}  // namespace kmt
