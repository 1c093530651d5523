#include "kmt/singularity.hpp"

#include "kmt/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace kmt {

namespace {

bool near(double u, double v, double eps) {
  return std::isfinite(u) && std::isfinite(v) && rel_equal(u, v, eps);
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

CaseLabel classify_candidates(double branch, double pole, double reflected_pole,
                              double eps_eq) {
  CaseLabel out;
  const double m = std::min(pole, reflected_pole);
  const bool poles_equal = near(pole, reflected_pole, eps_eq);

  if (poles_equal) {
    if (near(pole, branch, eps_eq)) {
      out.case_id = 1;
      out.pole_meets_branch = true;
      out.notes.emplace_back("both poles coincide with the branch point");
    } else if (pole < branch) {
      out.case_id = 4;
      out.notes.emplace_back("double pole: the two pole candidates coincide");
    } else {
      out.case_id = 3;
    }
  } else if (near(m, branch, eps_eq)) {
    out.case_id = 2;
    out.pole_meets_branch = true;
    out.notes.emplace_back("pole and branch point coincide");
  } else if (m < branch) {
    out.case_id = 1;
  } else {
    out.case_id = 3;
  }
  out.x_dom = (out.case_id == 3 || out.case_id == 2) ? branch : m;
  if (out.case_id == 1 && out.pole_meets_branch) out.x_dom = branch;

  const double vals[3] = {branch, pole, reflected_pole};
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j)
      if (near(vals[i], vals[j], 10.0 * eps_eq)) out.near_degenerate = true;
  if (out.near_degenerate) {
    out.notes.emplace_back("near-degenerate: candidates within 10*eps_eq (eps_eq = " +
                           fmt(eps_eq) + ")");
  }
  return out;
}

CaseLabel classify(const PoleCandidates& pc, double eps_eq) {
  return classify_candidates(pc.x3, pc.x_star, pc.x_tilde1, eps_eq);
}

namespace {

double real_branch(const AnalyticBranch& br, double t) {
  try {
    return br.eval(cplx(t, 0.0)).y0.real();
  } catch (const Error&) {
    return std::numeric_limits<double>::quiet_NaN();
  }
}

void check_unique(const ZeroSearch& z, const char* what) {
  if (z.sign_changes > 1) {
    std::ostringstream os;
    os.precision(17);
    os << what << " has " << z.sign_changes << " zeros in the search interval: " << z.root;
    for (double r : z.extra_roots) os << ", " << r;
    throw Error(ErrorCode::kMultipleZeros, os.str());
  }
}

}  // namespace

ZeroSearch find_x_star(const KernelSystem& ks, const BranchPoints& bp,
                       const ZeroSearchOptions& opts) {
  const AnalyticBranch br = y_branch(ks, bp);
  const auto f = [&](double x) { return ks.h1(cplx(x, 0.0), real_branch(br, x)).real(); };
  ZeroSearch z = find_zeros_on_interval(f, 1.0, bp.x.t[2], opts);
  check_unique(z, "h1(x, Y0(x))");
  return z;
}

std::vector<double> find_x_star_resultant(const KernelSystem& ks, const BranchPoints& bp) {
  const Polynomial& u = ks.h1_0;
  const Polynomial& v = ks.h1_1;
  const Polynomial res = ks.in_y.a * u * u - ks.in_y.b * u * v + ks.in_y.c * v * v;
  const AnalyticBranch br = y_branch(ks, bp);
  const double x3 = bp.x.t[2];
  std::vector<double> out;
  if (res.is_zero(1e-14)) return out;
  for (cplx r : polynomial_roots(res, 4)) {
    if (!is_effectively_real(r, 1e-7)) continue;
    const double x = r.real();
    if (x <= 1.0 + 1e-7 || x > x3 * (1.0 + 1e-9)) continue;
    const double xe = std::min(x, x3);
    const double vx = v(xe);
    if (std::abs(vx) < 1e-14) continue;
    const double y0 = real_branch(br, xe);
    if (std::abs(y0 + u(xe) / vx) < 1e-6 * (1.0 + std::abs(y0))) out.push_back(xe);
  }
  std::sort(out.begin(), out.end());
  return out;
}

void find_x_tilde(const KernelSystem& ks, const BranchPoints& bp, PoleCandidates& pc,
                  const ZeroSearchOptions& opts) {
  pc.x_tilde1 = kInf;
  if (!bp.y.ordered) {
    pc.x_tilde_note = "y-direction branch points not ordered; reflected pole not searched";
    return;
  }
  const AnalyticBranch xb = x_branch(ks, bp);
  const double y3 = bp.y.t[2];
  const auto g = [&](double y) { return ks.h2(real_branch(xb, y), cplx(y, 0.0)).real(); };
  const ZeroSearch z = find_zeros_on_interval(g, 1.0, y3, opts);
  check_unique(z, "h2(X0(y), y)");
  if (!std::isfinite(z.root)) {
    pc.x_tilde_note = "no zero of h2(X0(y), y) in (1, y3]";
    return;
  }
  pc.y_tilde = z.root;
  const BranchValues xv = xb.eval(cplx(z.root, 0.0));
  if (xv.y1_infinite) {
    pc.x_tilde_note = "X1(y_tilde) is infinite";
    return;
  }
  pc.x_tilde_raw = xv.y1.real();
  const double xt = pc.x_tilde_raw;
  if (!(xt > 1.0)) {
    pc.x_tilde_note = "X1(y_tilde) = " + fmt(xt) + " is not beyond 1";
    return;
  }
  if (xt > pc.x3 * (1.0 + 1e-12)) {
    pc.x_tilde_note = "X1(y_tilde) = " + fmt(xt) + " lies beyond x3";
    return;
  }
  const double y0 = real_branch(y_branch(ks, bp), std::min(xt, pc.x3));
  pc.consistency_gap = std::abs(y0 - *pc.y_tilde);
  if (pc.consistency_gap < kConsistencyTol * (1.0 + std::abs(*pc.y_tilde))) {
    pc.x_tilde1 = xt;
    pc.x_tilde_note = "accepted: Y0(X1(y_tilde)) = y_tilde";
  } else {
    pc.x_tilde_note = "rejected: Y0(X1(y_tilde)) = " + fmt(y0) + " differs from y_tilde = " +
                      fmt(*pc.y_tilde);
  }
}

WalkAnalysis analyze_walk(const WalkSpec& spec, const AnalysisOptions& opts) {
  WalkAnalysis wa;
  wa.spec = spec;
  wa.cls = classify_walk(spec);
  if (wa.cls.x_shaped) {
    throw Error(ErrorCode::kXShaped,
                "X-shaped walk: two dominant singularities with periodic tail behaviour; "
                "not covered by the single-singularity analysis");
  }
  wa.ks = build_kernel(spec);
  if (wa.cls.possibly_reducible) {
    for (const auto& n : wa.cls.notes) wa.warnings.push_back(n);
  }
  wa.drift = mean_drift(spec);
  wa.stability = check_stability(spec);
  wa.warnings.push_back("stability check is advisory (drift conditions, unverified): " +
                        std::string(to_string(wa.stability.verdict)) + ", " +
                        wa.stability.reason);
  if (wa.stability.verdict == Stability::kUnstable && !opts.assume_stable) {
    throw Error(ErrorCode::kUnstable, "walk appears unstable: " + wa.stability.reason);
  }

  wa.bp = branch_points(wa.ks);
  require_genus_one(wa.bp.x, "D1");
  require_ordering(wa.bp.x, "x branch points");

  wa.pc.x3 = wa.bp.x.t[2];
  const ZeroSearch zs = find_x_star(wa.ks, wa.bp);
  wa.pc.x_star = zs.root;
  wa.pc.x_star_at_branch_point = zs.at_endpoint;
  find_x_tilde(wa.ks, wa.bp, wa.pc);
  if (!wa.bp.y.ordered) wa.warnings.push_back(wa.pc.x_tilde_note);

  if (opts.resultant_check) {
    wa.resultant_roots = find_x_star_resultant(wa.ks, wa.bp);
    const bool found = std::isfinite(wa.pc.x_star);
    const bool agree =
        found ? std::any_of(wa.resultant_roots.begin(), wa.resultant_roots.end(),
                            [&](double r) { return std::abs(r - wa.pc.x_star) < 1e-7 * r; })
              : wa.resultant_roots.empty();
    if (!agree) wa.warnings.push_back("resultant cross-check disagrees with the grid search");
  }

  wa.label = classify(wa.pc, opts.eps_eq);
  if (wa.label.near_degenerate) wa.warnings.push_back(wa.label.notes.back());
  return wa;
}

}  // namespace kmt
