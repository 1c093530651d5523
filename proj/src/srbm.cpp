#include "kmt/srbm.hpp"

#include "kmt/errors.hpp"
#include "kmt/numerics.hpp"

#include <cmath>
#include <sstream>
#include <tuple>

namespace kmt {

SrbmKernel build_srbm_kernel(const SrbmSpec& s) {
  SrbmKernel k;
  const auto& S = s.sigma;
  k.in_y.a = Polynomial{S[1][1] / 2.0};
  k.in_y.b = Polynomial{s.mu[1], S[0][1]};
  k.in_y.c = Polynomial{0.0, s.mu[0], S[0][0] / 2.0};
  k.in_x.a = Polynomial{S[0][0] / 2.0};
  k.in_x.b = Polynomial{s.mu[0], S[0][1]};
  k.in_x.c = Polynomial{0.0, s.mu[1], S[1][1] / 2.0};
  k.d1 = k.in_y.discriminant();
  k.d2 = k.in_x.discriminant();
  k.R = s.R;
  return k;
}

namespace {

std::pair<double, double> parabola_roots(const Polynomial& d) {
  const double A = d[2], B = d[1], C = d[0];
  if (!(A < 0.0)) {
    throw Error(ErrorCode::kDegenerateCovariance, "discriminant is not a downward parabola");
  }
  const double disc = B * B - 4.0 * A * C;  // >= 0 since C = mu^2 >= 0 and A < 0
  const double s = std::sqrt(std::max(disc, 0.0));
  // Stable quadratic formula.
  const double q = -0.5 * (B + std::copysign(s, B));
  double r1, r2;
  if (q == 0.0) {
    r1 = r2 = 0.0;
  } else {
    r1 = q / A;
    r2 = C / q;
  }
  return {std::min(r1, r2), std::max(r1, r2)};
}

/// Branch pair of a quadratic with constant leading coefficient a > 0 and
/// discriminant L (t - t1)(t - t2), L < 0.
std::pair<cplx, cplx> continuous_branches(const QuadraticKernel& q, const Polynomial& d,
                                          double t1, double t2, cplx t) {
  const double tol = kOnCutTol * (1.0 + std::abs(t));
  const bool near_axis = std::abs(t.imag()) < tol;
  const double a = q.a[0];
  const cplx b = q.b(t);
  for (double e : {t1, t2}) {
    if (std::abs(t - cplx(e, 0.0)) <= kOnCutTol * (1.0 + std::abs(e))) {
      const cplx v = -b / (2.0 * a);
      return {v, v};
    }
  }
  if (near_axis && (t.real() < t1 || t.real() > t2)) {
    std::ostringstream os;
    os.precision(17);
    os << "point (" << t.real() << "," << t.imag() << ") lies on a branch cut";
    throw Error(ErrorCode::kOnCut, os.str());
  }
  const cplx root = std::sqrt(-d[2]) * std::sqrt(t - t1) * std::sqrt(t2 - t);
  return {(-b - root) / (2.0 * a), (-b + root) / (2.0 * a)};
}

}  // namespace

SrbmBranchPoints srbm_branch_points(const SrbmKernel& k) {
  SrbmBranchPoints bp;
  std::tie(bp.x1, bp.x2) = parabola_roots(k.d1);
  std::tie(bp.y1, bp.y2) = parabola_roots(k.d2);
  return bp;
}

std::pair<cplx, cplx> srbm_branch_eval(const SrbmKernel& k, const SrbmBranchPoints& bp, cplx x) {
  return continuous_branches(k.in_y, k.d1, bp.x1, bp.x2, x);
}

std::pair<cplx, cplx> srbm_x_branch_eval(const SrbmKernel& k, const SrbmBranchPoints& bp,
                                         cplx y) {
  return continuous_branches(k.in_x, k.d2, bp.y1, bp.y2, y);
}

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

void check_unique(const ZeroSearch& z, const char* what) {
  if (z.sign_changes > 1) {
    std::ostringstream os;
    os.precision(17);
    os << what << " has " << z.sign_changes << " zeros in the search interval";
    throw Error(ErrorCode::kMultipleZeros, os.str());
  }
}

}  // namespace

SrbmSingularity srbm_poles(const SrbmKernel& k, double eps_eq) {
  SrbmSingularity s;
  s.bp = srbm_branch_points(k);
  const auto& bp = s.bp;
  const auto y0 = [&](double x) { return srbm_branch_eval(k, bp, cplx(x, 0.0)).first.real(); };
  const auto x0 = [&](double y) { return srbm_x_branch_eval(k, bp, cplx(y, 0.0)).first.real(); };

  const ZeroSearch zs =
      find_zeros_on_interval([&](double x) { return k.gamma2(x, y0(x)); }, 0.0, bp.x2);
  check_unique(zs, "gamma2(x, Y0(x))");
  s.x_star = zs.root;

  const ZeroSearch zt =
      find_zeros_on_interval([&](double y) { return k.gamma1(x0(y), y); }, 0.0, bp.y2);
  check_unique(zt, "gamma1(X0(y), y)");
  if (std::isfinite(zt.root)) {
    s.y_tilde = zt.root;
    s.x_tilde_raw = srbm_x_branch_eval(k, bp, cplx(zt.root, 0.0)).second.real();
    const double xt = s.x_tilde_raw;
    if (!(xt > 0.0)) {
      s.x_tilde_note = "X1(y_tilde) = " + fmt(xt) + " is not positive";
    } else if (xt > bp.x2 * (1.0 + 1e-12)) {
      s.x_tilde_note = "X1(y_tilde) = " + fmt(xt) + " lies beyond x2";
    } else {
      const double yy = y0(std::min(xt, bp.x2));
      s.consistency_gap = std::abs(yy - zt.root);
      if (s.consistency_gap < kConsistencyTol * (1.0 + std::abs(zt.root))) {
        s.x_tilde = xt;
        s.x_tilde_note = "accepted: Y0(X1(y_tilde)) = y_tilde";
      } else {
        s.x_tilde_note = "rejected: Y0(X1(y_tilde)) = " + fmt(yy) + " differs from y_tilde = " +
                         fmt(zt.root);
      }
    }
  } else {
    s.x_tilde_note = "no zero of gamma1(X0(y), y) in (0, y2]";
  }

  s.label = classify_candidates(bp.x2, s.x_star, s.x_tilde, eps_eq);
  s.tau1 = s.label.x_dom;
  return s;
}

SrbmAnalysis analyze_srbm(const SrbmSpec& spec, double eps_eq) {
  SrbmAnalysis a;
  a.spec = validate_srbm(spec);
  a.stability = check_stability(spec);
  if (a.stability.verdict != Stability::kStable) {
    throw Error(ErrorCode::kUnstable, "SRBM is not stable: " + a.stability.reason);
  }
  a.kernel = build_srbm_kernel(spec);
  a.sing = srbm_poles(a.kernel, eps_eq);

  TailForm& t = a.v2_tail;
  t.rate = a.sing.tau1;
  t.power = tail_power_for_case(a.sing.label.case_id);
  t.offset = 0;
  t.provenance = Provenance::kUnavailable;
  t.note = "positive constant; no closed form available for this model";

  const auto& R = spec.R;
  const auto& S = spec.sigma;
  a.independent_components = R[0][1] == 0.0 && R[1][0] == 0.0 && S[0][1] == 0.0 &&
                             spec.mu[0] < 0.0 && spec.mu[1] < 0.0;
  if (a.independent_components && a.sing.label.case_id == 1) {
    // Z1 is exponential with rate 2|mu1|/S11 and Y2 grows at rate |mu2|/r22.
    t.constant = std::abs(spec.mu[1]) / R[1][1];
    t.provenance = Provenance::kClosedForm;
    t.note = "independent coordinates: V2(x, inf) = (|mu2|/r22) P(Z1 > x) per unit time";
  }
  a.warnings.push_back(
      "assumption: boundedness hypothesis of the continuous transfer theorem is not verified");
  a.warnings.push_back("pole candidates searched on the real axis only");
  if (a.sing.label.near_degenerate) a.warnings.push_back(a.sing.label.notes.back());
  return a;
}

}  // namespace kmt
