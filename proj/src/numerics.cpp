#include "kmt/numerics.hpp"

#include "kmt/errors.hpp"

#include <algorithm>
#include <cmath>

namespace kmt {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kWrongShape: return "WrongShape";
    case ErrorCode::kNegativeEntry: return "NegativeEntry";
    case ErrorCode::kNonStochastic: return "NonStochastic";
    case ErrorCode::kBadParameter: return "BadParameter";
    case ErrorCode::kUnstable: return "Unstable";
    case ErrorCode::kSingularKernel: return "SingularKernel";
    case ErrorCode::kGenusZero: return "GenusZero";
    case ErrorCode::kOrderingViolated: return "OrderingViolated";
    case ErrorCode::kOnCut: return "OnCut";
    case ErrorCode::kXShaped: return "XShaped";
    case ErrorCode::kMultipleZeros: return "MultipleZeros";
    case ErrorCode::kRecursionPole: return "RecursionPole";
    case ErrorCode::kDegenerateCovariance: return "DegenerateCovariance";
    case ErrorCode::kDegenerateExponent: return "DegenerateExponent";
    case ErrorCode::kOracleRequired: return "OracleRequired";
    case ErrorCode::kNoConvergence: return "NoConvergence";
    case ErrorCode::kNotConverged: return "NotConverged";
    case ErrorCode::kTruncationSuspect: return "TruncationSuspect";
    case ErrorCode::kOutsideConvergence: return "OutsideConvergence";
    case ErrorCode::kWindowTooNoisy: return "WindowTooNoisy";
    case ErrorCode::kNoOracle: return "NoOracle";
  }
  return "Unknown";
}

bool is_validation_error(ErrorCode code) {
  switch (code) {
    case ErrorCode::kWrongShape:
    case ErrorCode::kNegativeEntry:
    case ErrorCode::kNonStochastic:
    case ErrorCode::kBadParameter:
    case ErrorCode::kDegenerateCovariance:
      return true;
    default:
      return false;
  }
}

double bisect(const std::function<double(double)>& f, double a, double b,
              double rel_tol) {
  double fa = f(a);
  for (int it = 0; it < 200; ++it) {
    const double m = 0.5 * (a + b);
    if (m <= a || m >= b) return m;
    if (std::abs(b - a) <= rel_tol * std::max(std::abs(a), std::abs(b))) return m;
    const double fm = f(m);
    if (fm == 0.0) return m;
    if ((fm < 0) == (fa < 0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

ZeroSearch find_zeros_on_interval(const std::function<double(double)>& f,
                                  double lo, double hi,
                                  const ZeroSearchOptions& opts) {
  ZeroSearch out;
  const int n = std::max(opts.grid_points, 2);
  const double h = (hi - lo) / n;

  std::vector<double> xs(n), fs(n);
  double scale = 0.0;
  for (int k = 0; k < n; ++k) {
    xs[k] = (k + 1 == n) ? hi : lo + h * (k + 1);
    fs[k] = f(xs[k]);
    if (std::isfinite(fs[k])) scale = std::max(scale, std::abs(fs[k]));
  }

  std::vector<double> roots;
  const bool endpoint_zero = std::abs(fs[n - 1]) <= opts.endpoint_rel_tol * scale;
  const int last = endpoint_zero ? n - 1 : n;
  for (int k = 0; k + 1 < last; ++k) {
    if (!std::isfinite(fs[k]) || !std::isfinite(fs[k + 1])) continue;
    if (fs[k] == 0.0) {
      roots.push_back(xs[k]);
      continue;
    }
    if ((fs[k] < 0) != (fs[k + 1] < 0) && fs[k + 1] != 0.0) {
      roots.push_back(bisect(f, xs[k], xs[k + 1], opts.rel_tol));
    }
  }
  if (endpoint_zero) {
    roots.push_back(hi);
    out.at_endpoint = true;
  }

  out.sign_changes = static_cast<int>(roots.size());
  if (!roots.empty()) {
    out.root = roots.front();
    out.extra_roots.assign(roots.begin() + 1, roots.end());
    if (out.at_endpoint && roots.size() > 1) out.at_endpoint = false;
  }
  return out;
}

std::vector<std::vector<double>> richardson_tableau(std::span<const double> samples,
                                                    double ratio, double p) {
  std::vector<std::vector<double>> t;
  t.emplace_back(samples.begin(), samples.end());
  for (size_t order = 1; order < samples.size(); ++order) {
    const double fac = std::pow(ratio, p * static_cast<double>(order));
    const auto& prev = t.back();
    std::vector<double> next(prev.size() - 1);
    for (size_t k = 0; k + 1 < prev.size(); ++k) {
      next[k] = (fac * prev[k + 1] - prev[k]) / (fac - 1.0);
    }
    t.push_back(std::move(next));
  }
  return t;
}

LinearFit least_squares(std::span<const double> x, std::span<const double> y) {
  const size_t n = std::min(x.size(), y.size());
  LinearFit fit;
  if (n < 2) return fit;
  double mx = 0, my = 0;
  for (size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  fit.slope = sxx > 0 ? sxy / sxx : 0.0;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0;
  for (size_t i = 0; i < n; ++i) {
    const double r = y[i] - fit.intercept - fit.slope * x[i];
    ss_res += r * r;
  }
  fit.r_squared = syy > 0 ? 1.0 - ss_res / syy : 1.0;
  fit.residual_rms = std::sqrt(ss_res / n);
  return fit;
}

bool rel_equal(double a, double b, double eps) {
  if (std::isinf(a) || std::isinf(b)) return a == b;
  return std::abs(a - b) <= eps * std::max(std::abs(a), std::abs(b));
}

}  // namespace kmt
