#include "kmt/kernel.hpp"

#include "kmt/errors.hpp"
#include "kmt/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace kmt {

KernelSystem build_kernel(const WalkSpec& s) {
  KernelSystem k;
  k.in_y.a = Polynomial{s.p(-1, 1), s.p(0, 1), s.p(1, 1)};
  k.in_y.b = Polynomial{s.p(-1, 0), -(1.0 - s.p(0, 0)), s.p(1, 0)};
  k.in_y.c = Polynomial{s.p(-1, -1), s.p(0, -1), s.p(1, -1)};
  k.in_x.a = Polynomial{s.p(1, -1), s.p(1, 0), s.p(1, 1)};
  k.in_x.b = Polynomial{s.p(0, -1), -(1.0 - s.p(0, 0)), s.p(0, 1)};
  k.in_x.c = Polynomial{s.p(-1, -1), s.p(-1, 0), s.p(-1, 1)};

  const auto require = [](const Polynomial& p, const char* what) {
    if (p.is_zero()) {
      throw Error(ErrorCode::kSingularKernel,
                  std::string("kernel is not quadratic: ") + what + " vanishes identically");
    }
  };
  require(k.in_y.a, "a(x) (no upward jumps)");
  require(k.in_y.c, "c(x) (no downward jumps)");
  require(k.in_x.a, "a~(y) (no rightward jumps)");
  require(k.in_x.c, "c~(y) (no leftward jumps)");

  k.d1 = k.in_y.discriminant();
  k.d2 = k.in_x.discriminant();

  k.h1_0 = Polynomial{s.p_h(-1, 0), s.p_h(0, 0) - 1.0, s.p_h(1, 0)};
  k.h1_1 = Polynomial{s.p_h(-1, 1), s.p_h(0, 1), s.p_h(1, 1)};
  k.h2_0 = Polynomial{s.p_v(0, -1), s.p_v(0, 0) - 1.0, s.p_v(0, 1)};
  k.h2_1 = Polynomial{s.p_v(1, -1), s.p_v(1, 0), s.p_v(1, 1)};
  k.origin = s.origin;
  return k;
}

BranchPointSet branch_point_set(const Polynomial& disc) {
  BranchPointSet out;
  const Polynomial d = disc.trimmed(1e-14);
  out.degree = d.degree();
  out.roots = polynomial_roots(d);
  out.t.fill(std::numeric_limits<double>::quiet_NaN());

  for (size_t i = 0; i < out.roots.size(); ++i)
    for (size_t j = i + 1; j < out.roots.size(); ++j) {
      const cplx ri = out.roots[i], rj = out.roots[j];
      if (std::abs(ri - rj) < kRootSeparationTol * (1.0 + std::max(std::abs(ri), std::abs(rj)))) {
        out.multiple = true;
      }
    }

  out.all_real = std::all_of(out.roots.begin(), out.roots.end(),
                             [](cplx z) { return is_effectively_real(z); });

  std::ostringstream diag;
  diag.precision(17);
  if (out.degree < 3) {
    diag << "discriminant has degree " << out.degree << " < 3";
    out.diagnostic = diag.str();
    return out;
  }
  if (!out.all_real) {
    diag << "non-real branch points:";
    for (cplx z : out.roots) diag << " (" << z.real() << "," << z.imag() << ")";
    out.diagnostic = diag.str();
    return out;
  }

  std::vector<double> re;
  for (cplx z : out.roots) re.push_back(z.real());
  std::sort(re.begin(), re.end(), [](double u, double v) {
    return std::abs(u) != std::abs(v) ? std::abs(u) < std::abs(v) : u < v;
  });
  for (size_t k = 0; k < re.size() && k < 4; ++k) out.t[k] = re[k];
  if (out.degree == 3) out.t[3] = d[3] < 0 ? kInf : -kInf;

  const auto& t = out.t;
  out.ordered = std::abs(t[0]) < t[1] && t[1] < 1.0 && 1.0 < t[2] && t[2] < std::abs(t[3]);
  if (!out.ordered) {
    diag << "ordering |t1| < t2 < 1 < t3 < |t4| violated: " << t[0] << ", " << t[1] << ", "
         << t[2] << ", " << t[3];
    out.diagnostic = diag.str();
  }
  return out;
}

BranchPoints branch_points(const KernelSystem& ks) {
  return BranchPoints{branch_point_set(ks.d1), branch_point_set(ks.d2)};
}

void require_genus_one(const BranchPointSet& s, const char* which) {
  if (s.multiple) {
    throw Error(ErrorCode::kGenusZero,
                std::string(which) + " discriminant has a repeated root (genus 0)");
  }
  if (s.degree < 3) {
    throw Error(ErrorCode::kGenusZero,
                std::string(which) + " discriminant has degree below 3 (genus 0)");
  }
}

void require_ordering(const BranchPointSet& s, const char* which) {
  if (!s.all_real || !s.ordered) {
    throw Error(ErrorCode::kOrderingViolated, std::string(which) + ": " + s.diagnostic);
  }
}

AnalyticBranch::AnalyticBranch(QuadraticKernel q, const BranchPointSet& cuts)
    : q_(std::move(q)), t_(cuts.t) {}

namespace {

double distance_to_segment(cplx z, double lo, double hi) {
  if (lo > hi) std::swap(lo, hi);
  const double x = z.real();
  if (x < lo) return std::abs(z - cplx(lo, 0.0));
  if (x > hi) return std::abs(z - cplx(hi, 0.0));
  return std::abs(z.imag());
}

}  // namespace

double AnalyticBranch::distance_to_cut(cplx t) const {
  double d = distance_to_segment(t, t_[0], t_[1]);
  if (std::isinf(t_[3]) || t_[3] > t_[2]) {
    d = std::min(d, distance_to_segment(t, t_[2], std::isinf(t_[3]) ? kInf : t_[3]));
  } else {
    // [t3, inf) together with (-inf, t4] when t4 < 0.
    d = std::min(d, distance_to_segment(t, t_[2], kInf));
    d = std::min(d, distance_to_segment(t, -kInf, t_[3]));
  }
  return d;
}

BranchValues AnalyticBranch::eval(cplx t) const { return eval_impl(t, nullptr); }

BranchValues AnalyticBranch::eval(cplx t, BranchSession& session) const {
  return eval_impl(t, &session);
}

BranchValues AnalyticBranch::eval_impl(cplx t, BranchSession* session) const {
  const cplx a = q_.a(t), b = q_.b(t), c = q_.c(t);
  BranchValues v;

  const double tol = kOnCutTol * (1.0 + std::abs(t));
  if (distance_to_cut(t) < tol) {
    for (double e : t_) {
      if (std::isfinite(e) && std::abs(t - cplx(e, 0.0)) <= kOnCutTol * (1.0 + std::abs(e))) {
        v.y0 = v.y1 = -b / (2.0 * a);
        v.at_branch_point = true;
        if (session) session->last = v.y0;
        return v;
      }
    }
    std::ostringstream os;
    os.precision(17);
    os << "point (" << t.real() << "," << t.imag() << ") lies on a branch cut";
    throw Error(ErrorCode::kOnCut, os.str());
  }

  const double scale = std::abs(a) + std::abs(b) + std::abs(c);
  if (std::abs(a) <= 1e-14 * scale) {
    v.y0 = -c / b;
    v.y1 = cplx(kInf, 0.0);
    v.y1_infinite = true;
    if (session) session->last = v.y0;
    return v;
  }

  const cplx s = std::sqrt(b * b - 4.0 * a * c);
  const cplx q = (std::real(std::conj(b) * s) >= 0.0) ? -(b + s) / 2.0 : -(b - s) / 2.0;
  cplx r1, r2;
  if (q == cplx(0.0, 0.0)) {
    r1 = r2 = 0.0;
  } else {
    r1 = q / a;
    r2 = c / q;
  }
  const double m1 = std::abs(r1), m2 = std::abs(r2);
  if (std::abs(m1 - m2) <= 1e-13 * std::max(m1, m2)) {
    v.tie = true;
    bool first = true;
    if (session && session->last) {
      first = std::abs(r1 - *session->last) <= std::abs(r2 - *session->last);
    } else {
      first = r1.real() != r2.real() ? r1.real() < r2.real() : r1.imag() <= r2.imag();
    }
    v.y0 = first ? r1 : r2;
    v.y1 = first ? r2 : r1;
  } else if (m1 < m2) {
    v.y0 = r1;
    v.y1 = r2;
  } else {
    v.y0 = r2;
    v.y1 = r1;
  }
  if (session) session->last = v.y0;
  return v;
}

AnalyticBranch y_branch(const KernelSystem& ks, const BranchPoints& bp) {
  return AnalyticBranch(ks.in_y, bp.x);
}

AnalyticBranch x_branch(const KernelSystem& ks, const BranchPoints& bp) {
  return AnalyticBranch(ks.in_x, bp.y);
}

BranchValues eval_branch(const KernelSystem& ks, const BranchPoints& bp, cplx x) {
  return y_branch(ks, bp).eval(x);
}

BranchValues x_branches(const KernelSystem& ks, const BranchPoints& bp, cplx y) {
  return x_branch(ks, bp).eval(y);
}

namespace {

// Coefficients of s with s^2 = p, when such s exists to the given tolerance.
bool is_perfect_square(const Polynomial& p, double rel_tol) {
  const Polynomial q = p.trimmed(1e-14);
  const int d = q.degree();
  if (d < 0) return true;
  if (d % 2 != 0 || q[d] <= 0) return false;
  const int m = d / 2;
  std::vector<double> s(m + 1, 0.0);
  s[m] = std::sqrt(q[d]);
  for (int k = m - 1; k >= 0; --k) {
    double acc = 0.0;
    for (int i = k + 1; i <= m; ++i) {
      const int j = m + k - i;
      if (j > k && j <= m) acc += s[i] * s[j];
    }
    s[k] = (q[m + k] - acc) / (2.0 * s[m]);
  }
  const Polynomial sq = Polynomial(s) * Polynomial(s);
  const double scale = q.max_abs_coefficient();
  for (int k = 0; k <= d; ++k) {
    if (std::abs(sq[k] - q[k]) > rel_tol * scale) return false;
  }
  return true;
}

bool share_root(const QuadraticKernel& k, double rel_tol) {
  const Polynomial* lowest = nullptr;
  for (const Polynomial* p : {&k.a, &k.b, &k.c}) {
    if (p->is_zero()) continue;
    if (!lowest || p->degree() < lowest->degree()) lowest = p;
  }
  if (!lowest || lowest->degree() < 1) return false;
  for (cplx r : polynomial_roots(*lowest)) {
    bool common = true;
    for (const Polynomial* p : {&k.a, &k.b, &k.c}) {
      double scale = 0.0;
      for (int i = 0; i <= p->degree(); ++i) scale += std::abs((*p)[i]) * std::pow(std::abs(r), i);
      if (std::abs((*p)(r)) > rel_tol * std::max(scale, 1e-300)) common = false;
    }
    if (common) return true;
  }
  return false;
}

}  // namespace

WalkClass classify_walk(const WalkSpec& spec) {
  WalkClass wc;
  wc.x_shaped = spec.p(1, 0) == 0 && spec.p(-1, 0) == 0 && spec.p(0, 1) == 0 &&
                spec.p(0, -1) == 0;
  KernelSystem ks;
  try {
    ks = build_kernel(spec);
    wc.quadratic = true;
  } catch (const Error& e) {
    wc.notes.emplace_back(e.what());
    return wc;
  }
  constexpr double tol = 1e-10;
  if (is_perfect_square(ks.d1, tol) || is_perfect_square(ks.d2, tol)) {
    wc.possibly_reducible = true;
    wc.notes.emplace_back("possibly reducible: discriminant is a perfect square");
  }
  if (share_root(ks.in_y, tol) || share_root(ks.in_x, tol)) {
    wc.possibly_reducible = true;
    wc.notes.emplace_back("possibly reducible: kernel coefficients share a root");
  }
  wc.nonsingular = !wc.possibly_reducible;
  const BranchPointSet bx = branch_point_set(ks.d1);
  wc.genus = (bx.degree >= 3 && !bx.multiple) ? 1 : 0;
  if (wc.x_shaped) wc.notes.emplace_back("X-shaped: no jumps with |i+j| = 1");
  return wc;
}

namespace {

nlohmann::json poly_json(const Polynomial& p) { return p.coefficients(); }

nlohmann::json roots_json(const std::vector<cplx>& r) {
  nlohmann::json out = nlohmann::json::array();
  for (cplx z : r) out.push_back({z.real(), z.imag()});
  return out;
}

nlohmann::json points_json(const BranchPointSet& s) {
  nlohmann::json out = nlohmann::json::array();
  for (double v : s.t) {
    if (std::isfinite(v)) out.push_back(v);
    else out.push_back(nullptr);
  }
  return out;
}

}  // namespace

nlohmann::json dump_kernel(const KernelSystem& ks, const BranchPoints& bp) {
  nlohmann::json j;
  j["a"] = poly_json(ks.in_y.a);
  j["b"] = poly_json(ks.in_y.b);
  j["c"] = poly_json(ks.in_y.c);
  j["a_tilde"] = poly_json(ks.in_x.a);
  j["b_tilde"] = poly_json(ks.in_x.b);
  j["c_tilde"] = poly_json(ks.in_x.c);
  j["D1"] = poly_json(ks.d1);
  j["D2"] = poly_json(ks.d2);
  j["h1"] = {{"y0", poly_json(ks.h1_0)}, {"y1", poly_json(ks.h1_1)}};
  j["h2"] = {{"x0", poly_json(ks.h2_0)}, {"x1", poly_json(ks.h2_1)}};
  j["D1_roots"] = roots_json(bp.x.roots);
  j["D2_roots"] = roots_json(bp.y.roots);
  j["x_branch_points"] = points_json(bp.x);
  j["y_branch_points"] = points_json(bp.y);
  j["x_ordered"] = bp.x.ordered;
  j["y_ordered"] = bp.y.ordered;
  j["x_repeated_root"] = bp.x.multiple;
  j["y_repeated_root"] = bp.y.multiple;
  return j;
}

}  // namespace kmt
