#include "kmt/asymptotics.hpp"

#include "kmt/errors.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace kmt {

std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::kClosedForm: return "closed_form";
    case Provenance::kNumericEstimate: return "numeric_estimate";
    case Provenance::kUnavailable: return "unavailable";
  }
  return "unavailable";
}

SingularBehavior singular_behavior_for_case(int case_id) {
  switch (case_id) {
    case 1: return {1.0, std::numeric_limits<double>::quiet_NaN(), false};
    case 2: return {0.5, std::numeric_limits<double>::quiet_NaN(), false};
    case 3: return {0.5, std::numeric_limits<double>::quiet_NaN(), true};
    case 4: return {2.0, std::numeric_limits<double>::quiet_NaN(), false};
    default: break;
  }
  throw Error(ErrorCode::kBadParameter, "case label must be 1..4");
}

double tail_power_for_case(int case_id) {
  const SingularBehavior sb = singular_behavior_for_case(case_id);
  return sb.alpha - 1.0 - (sb.via_derivative ? 1.0 : 0.0);
}

TailForm tauberian_map(const SingularBehavior& sb, double x_dom) {
  if (sb.alpha <= 0.0 && sb.alpha == std::floor(sb.alpha)) {
    std::ostringstream os;
    os << "exponent " << sb.alpha << " is a non-positive integer";
    throw Error(ErrorCode::kDegenerateExponent, os.str());
  }
  if (sb.g == 0.0) throw Error(ErrorCode::kDegenerateExponent, "limit constant g is zero");
  TailForm t;
  t.rate = 1.0 / x_dom;
  t.offset = 1;
  const double gam = std::tgamma(sb.alpha);
  if (sb.via_derivative) {
    t.power = sb.alpha - 2.0;
    t.constant = sb.g * x_dom / gam;
  } else {
    t.power = sb.alpha - 1.0;
    t.constant = sb.g / gam;
  }
  return t;
}

TailForm tail_shape(int case_id, double x_dom) {
  TailForm t;
  t.rate = 1.0 / x_dom;
  t.power = tail_power_for_case(case_id);
  t.offset = 1;
  t.provenance = Provenance::kUnavailable;
  return t;
}

TailForm constants_2demand(const TwoDemandParams& p, const WalkAnalysis& wa,
                           const TruncatedSolution* oracle) {
  const double xhat = p.mu1 / p.lambda;
  const double p21 = 1.0 - p.lambda / p.mu1;
  const double x1 = wa.bp.x.t[0], x2 = wa.bp.x.t[1], x3 = wa.bp.x.t[2];
  const double sqpi = std::sqrt(std::numbers::pi);
  TailForm t;
  t.offset = 0;
  switch (wa.label.case_id) {
    case 1:
      t.rate = 1.0 / xhat;
      t.power = 0.0;
      t.constant = (p.mu2 - p.lambda * xhat) * p21 / p.mu2;
      t.provenance = Provenance::kClosedForm;
      break;
    case 2:
      t.rate = 1.0 / xhat;
      t.power = -0.5;
      t.constant = p.mu1 * (xhat - 1.0) * p21 /
                   (std::sqrt(p.mu1 * p.mu2 * (xhat - x1) * (xhat - x2)) * sqpi);
      t.provenance = Provenance::kClosedForm;
      break;
    case 3: {
      t.rate = 1.0 / x3;
      t.power = -1.5;
      if (!oracle) {
        throw Error(ErrorCode::kOracleRequired,
                    "Case 3 constant needs P2 and P2' at Y0(x3) from the oracle");
      }
      const double y = (x3 - p.mu1) / (2.0 * p.lambda * x3 * x3);
      const GfValue g2 = eval_gf(*oracle, GfKind::kPi2, cplx(y, 0.0));
      const double pi00 = oracle->at(0, 0);
      const double P2 = pi00 + y * g2.value.real();
      const double dP2 = g2.value.real() + y * g2.derivative.real();
      const double pref = (x3 - 1.0) * p.mu1 *
                          std::sqrt(4.0 * p.mu2 * p.lambda * x3 * (x3 - x1) * (x3 - x2)) /
                          (4.0 * p.mu2 * p.lambda * x3 * x3 * x3 * sqpi);
      t.constant = pref * (P2 + y * (1.0 - y) * dP2) / ((y - 1.0) * (y - 1.0));
      t.error_band = std::abs(pref) * (1.0 + std::abs(y * (1.0 - y)) * oracle->N) *
                     std::abs(y) * g2.tail_bound / ((y - 1.0) * (y - 1.0));
      t.provenance = Provenance::kNumericEstimate;
      t.note = "P2(Y0(x3)) and P2'(Y0(x3)) from the truncated oracle";
      break;
    }
    default:
      t.rate = 1.0 / wa.label.x_dom;
      t.power = tail_power_for_case(wa.label.case_id);
      t.provenance = Provenance::kUnavailable;
      t.note = "no closed form for this case";
      break;
  }
  return t;
}

cplx pi1_from_interplay(const WalkAnalysis& wa, const TruncatedSolution& ts, cplx x) {
  const BranchValues bv = y_branch(wa.ks, wa.bp).eval(x);
  const cplx y0 = bv.y0;
  const cplx p2 = eval_gf(ts, GfKind::kPi2, y0).value;
  const double pi00 = ts.at(0, 0);
  return (-wa.ks.h2(x, y0) * p2 - wa.ks.h0(x, y0) * pi00) / wa.ks.h1(x, y0);
}

NumericConstant constant_numeric(const WalkAnalysis& wa, const TruncatedSolution& ts,
                                 const NumericConstantOptions& opts) {
  const int case_id = wa.label.case_id;
  const SingularBehavior sb = singular_behavior_for_case(case_id);
  const double xd = wa.label.x_dom;
  NumericConstant nc;
  for (int k = opts.first_k; k < opts.first_k + opts.depth; ++k) {
    const double eps = std::pow(10.0, -k);
    const double x = xd * (1.0 - eps);
    double v;
    if (sb.via_derivative) {
      const double h = 1e-20 * std::max(1.0, std::abs(x));
      v = pi1_from_interplay(wa, ts, cplx(x, h)).imag() / h;
    } else {
      v = pi1_from_interplay(wa, ts, cplx(x, 0.0)).real();
    }
    nc.epsilons.push_back(eps);
    nc.samples.push_back(std::pow(eps, sb.alpha) * v);
  }
  const bool half_powers = case_id == 2 || case_id == 3;
  const auto tab = richardson_tableau(nc.samples, half_powers ? std::sqrt(10.0) : 10.0, 1.0);
  nc.g = tab.back().front();
  nc.error_band = tab.size() >= 2 ? std::abs(nc.g - tab[tab.size() - 2].back()) : kInf;
  if (!std::isfinite(nc.g) || nc.error_band > opts.max_relative_band * std::abs(nc.g)) {
    std::ostringstream os;
    os.precision(6);
    os << "extrapolated constant " << nc.g << " has error band " << nc.error_band;
    throw Error(ErrorCode::kNoConvergence, os.str());
  }
  return nc;
}

TailForm numeric_tail(const WalkAnalysis& wa, const TruncatedSolution& ts,
                      const NumericConstantOptions& opts) {
  const NumericConstant nc = constant_numeric(wa, ts, opts);
  SingularBehavior sb = singular_behavior_for_case(wa.label.case_id);
  sb.g = nc.g;
  TailForm t = tauberian_map(sb, wa.label.x_dom);
  const double scale = t.constant / nc.g;
  t.error_band = std::abs(scale) * nc.error_band;
  t.provenance = Provenance::kNumericEstimate;
  t.note = "interplay formula with oracle pi2 and pi00, Richardson extrapolated";
  return t;
}

double synthetic_transform(double alpha, double R, double g, double z) {
  const double q = z / R;
  const double pre = g / std::tgamma(alpha);
  long double sum = 0.0L;
  const double min_terms = 10.0 / std::max(1e-12, 1.0 - q);
  for (long n = 1;; ++n) {
    const long double term =
        pre * std::pow(static_cast<long double>(n), static_cast<long double>(alpha - 1.0)) *
        std::pow(static_cast<long double>(q), static_cast<long double>(n));
    sum += term;
    if (n > min_terms && term < 1e-18L * sum) break;
    if (n > 100000000L) break;
  }
  return static_cast<double>(sum);
}

}  // namespace kmt
