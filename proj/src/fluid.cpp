#include "kmt/fluid.hpp"

#include "kmt/errors.hpp"
#include "kmt/numerics.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace kmt {

cplx FluidKernel::H1(cplx alpha, cplx z) const {
  return (mu - alpha * r - alpha) * std::pow(z, c) - c * mu * std::pow(z, c - 1);
}

cplx FluidKernel::H0(cplx z) const {
  return mu * std::pow(z, c) - c * mu * std::pow(z, c - 1);
}

FluidKernel build_fluid_kernel(const FluidSpec& spec) {
  FluidKernel k;
  k.lambda = spec.lambda;
  k.mu = spec.mu;
  k.r = spec.r;
  k.c = spec.c;
  return k;
}

FluidBranchPoints fluid_branch_points(const FluidKernel& k) {
  FluidBranchPoints bp;
  const double s = std::sqrt(k.c * k.mu), t = std::sqrt(k.lambda);
  bp.alpha2 = (s + t) * (s + t) / k.r;
  const double diff = k.c * k.mu - k.lambda;
  bp.alpha1 = diff * diff / (k.r * k.r * bp.alpha2);
  return bp;
}

std::pair<cplx, cplx> fluid_branches(const FluidKernel& k, const FluidBranchPoints& bp,
                                     cplx alpha) {
  const double a = k.a();
  const cplx b = k.b(alpha);
  for (double e : {bp.alpha1, bp.alpha2}) {
    if (std::abs(alpha - cplx(e, 0.0)) <= kOnCutTol * (1.0 + e)) {
      const cplx v = -b / (2.0 * a);
      return {v, v};
    }
  }
  if (std::abs(alpha.imag()) < kOnCutTol * (1.0 + std::abs(alpha)) &&
      alpha.real() > bp.alpha1 && alpha.real() < bp.alpha2) {
    std::ostringstream os;
    os.precision(17);
    os << "alpha = " << alpha.real() << " lies on the cut [alpha1, alpha2]";
    throw Error(ErrorCode::kOnCut, os.str());
  }
  const cplx s = std::sqrt(k.delta(alpha));
  const cplx zp = (-b + s) / (2.0 * a), zm = (-b - s) / (2.0 * a);
  if (alpha.real() <= (k.lambda + k.c * k.mu) / k.r) return {zp, zm};
  return {zm, zp};
}

cplx continued_fraction(const FluidKernel& k, cplx alpha, int upto) {
  cplx A = 0.0;
  for (int i = 0; i <= upto; ++i) {
    const cplx den = alpha + k.lambda + static_cast<double>(i) * k.mu - k.lambda * A;
    if (std::abs(den) < 1e-14) {
      std::ostringstream os;
      os << "continued fraction denominator vanishes at index " << i;
      throw Error(ErrorCode::kRecursionPole, os.str());
    }
    A = static_cast<double>(i + 1) * k.mu / den;
  }
  return A;
}

cplx hat_h1(const FluidKernel& k, cplx alpha, cplx z) {
  const cplx A = continued_fraction(k, alpha, k.c - 2);
  return k.lambda * std::pow(z, k.c) * A + k.H1(alpha, z);
}

AlphaStar find_alpha_star(const FluidKernel& k, const FluidBranchPoints& bp) {
  const auto f = [&](double al) {
    try {
      const cplx z0 = fluid_branches(k, bp, cplx(al, 0.0)).first;
      return hat_h1(k, cplx(al, 0.0), cplx(z0.real(), 0.0)).real();
    } catch (const Error&) {
      return std::numeric_limits<double>::quiet_NaN();
    }
  };
  const ZeroSearch z = find_zeros_on_interval(f, 0.0, bp.alpha1);
  if (z.sign_changes > 1) {
    std::ostringstream os;
    os.precision(17);
    os << "hat_h1(alpha, Z0(alpha)) has " << z.sign_changes << " zeros in (0, alpha1]";
    throw Error(ErrorCode::kMultipleZeros, os.str());
  }
  AlphaStar as;
  as.alpha_star = z.root;
  as.at_branch_point = z.at_endpoint;
  if (std::isfinite(z.root)) {
    // Local vanishing order from the slope over two decades on the left.
    const double d0 = 1e-3 * z.root, d1 = d0 * 1e-2;
    const double f0 = std::abs(f(z.root - d0)), f1 = std::abs(f(z.root - d1));
    double order = 1.0;
    if (f0 > 0 && f1 > 0) order = std::log(f0 / f1) / std::log(d0 / d1);
    as.multiplicity = std::max(1, static_cast<int>(std::lround(order)));
  }
  return as;
}

namespace {

// Single-server closed forms. Z0(alpha) and the numerator of the transform
// of the density at the dominant singularity.
struct MM1 {
  const FluidKernel& k;
  const FluidBranchPoints& bp;
  double pi00() const { return 1.0 - (k.r + 1.0) * k.lambda / k.mu; }
  double z0(double al) const { return fluid_branches(k, bp, cplx(al, 0.0)).first.real(); }
  double numerator(double al) const {
    const double z = z0(al);
    return pi00() * k.lambda * z * (z - 1.0);
  }
};

}  // namespace

FluidAnalysis analyze_fluid(const FluidSpec& spec, double eps_eq) {
  FluidAnalysis a;
  a.spec = validate_fluid(spec);
  a.stability = check_stability(spec);
  if (a.stability.verdict != Stability::kStable) {
    throw Error(ErrorCode::kUnstable, "fluid queue is not stable: " + a.stability.reason);
  }
  a.kernel = build_fluid_kernel(spec);
  a.bp = fluid_branch_points(a.kernel);
  a.star = find_alpha_star(a.kernel, a.bp);
  a.label = classify_candidates(a.bp.alpha1, a.star.alpha_star, kInf, eps_eq);
  a.alpha_dom = a.label.x_dom;
  a.z_dom = spec.c * spec.mu / spec.lambda;
  if (a.label.near_degenerate) a.warnings.push_back(a.label.notes.back());

  const int cs = a.label.case_id;
  const int k = std::max(1, a.star.multiplicity);
  if (cs == 1 && k > 1) {
    a.warnings.push_back("alpha* has multiplicity " + std::to_string(k) + " > 1");
  }
  for (TailForm* t : {&a.density, &a.marginal}) {
    t->rate = a.alpha_dom;
    t->power = cs == 1 ? k - 1.0 : (cs == 2 ? -0.5 : -1.5);
    t->offset = 0;
    t->provenance = Provenance::kUnavailable;
  }
  a.boundary.rate = spec.lambda / (spec.c * spec.mu);
  a.boundary.power = 0.0;
  a.boundary.offset = -1;
  a.boundary.provenance = Provenance::kUnavailable;
  a.boundary.note = "Pi_i(0) ~ d (lambda/(c mu))^(i+1); d depends on unknown boundary data";

  if (spec.c == 1) {
    const MM1 m{a.kernel, a.bp};
    const double zs = std::isfinite(a.star.alpha_star) ? m.z0(a.star.alpha_star) : 0.0;
    a.assumption_ii =
        std::isfinite(a.star.alpha_star) && std::abs(zs * (zs - 1.0)) > 1e-10 ? "holds"
                                                                              : "violated";
    const double r = spec.r, lam = spec.lambda, mu = spec.mu;
    if (cs == 1 && k == 1) {
      const double al = a.star.alpha_star;
      const double z = m.z0(al);
      const double dz = r * z / (-2.0 * lam * z + a.kernel.b(al).real());
      const double dF = -(r + 1.0) * z + (mu - al * (r + 1.0)) * dz;
      const double c1 = std::abs(m.numerator(al) / dF);
      a.density.constant = c1;
      a.marginal.constant = (r + 1.0) * c1 / (r * al);
    } else if (cs == 2) {
      const double al = a.bp.alpha1;
      const double kappa = std::sqrt(2.0 * r * a.kernel.b(al).real()) / (2.0 * lam);
      const double c2 = std::abs(m.numerator(al) / ((mu - al * (r + 1.0)) * kappa));
      const double C2 = c2 / std::sqrt(std::numbers::pi);
      a.density.constant = C2;
      a.marginal.constant = (r + 1.0) * C2 / (r * al);
    }
    for (TailForm* t : {&a.density, &a.marginal}) {
      if (std::isfinite(t->constant)) {
        t->provenance = Provenance::kClosedForm;
        t->note = "single-server closed form";
      }
    }
  } else {
    a.assumption_ii = "assumed";
    a.warnings.push_back("assumption (ii) not checked for c >= 2");
  }
  return a;
}

}  // namespace kmt
