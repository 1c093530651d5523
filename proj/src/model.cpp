#include "kmt/model.hpp"

#include "kmt/errors.hpp"

#include <cmath>
#include <sstream>

namespace kmt {

using nlohmann::json;

double WalkSpec::p(int i, int j) const {
  if (i < -1 || i > 1 || j < -1 || j > 1) return 0.0;
  return interior[i + 1][j + 1];
}

double WalkSpec::p_h(int i, int j) const {
  if (i < -1 || i > 1 || j < 0 || j > 1) return 0.0;
  return hwall[i + 1][j];
}

double WalkSpec::p_v(int i, int j) const {
  if (i < 0 || i > 1 || j < -1 || j > 1) return 0.0;
  return vwall[i][j + 1];
}

double WalkSpec::p_o(int i, int j) const {
  if (i < 0 || i > 1 || j < 0 || j > 1) return 0.0;
  return origin[i][j];
}

namespace {

template <size_t R, size_t C>
void copy_kernel(const std::vector<std::vector<double>>& src,
                 std::array<std::array<double, C>, R>& dst, const char* name) {
  if (src.size() != R) {
    std::ostringstream os;
    os << "kernel '" << name << "' must have " << R << " rows, got " << src.size();
    throw Error(ErrorCode::kWrongShape, os.str());
  }
  double sum = 0.0;
  for (size_t r = 0; r < R; ++r) {
    if (src[r].size() != C) {
      std::ostringstream os;
      os << "kernel '" << name << "' row " << r << " must have " << C
         << " entries, got " << src[r].size();
      throw Error(ErrorCode::kWrongShape, os.str());
    }
    for (size_t c = 0; c < C; ++c) {
      const double v = src[r][c];
      if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
        std::ostringstream os;
        os.precision(17);
        os << "kernel '" << name << "' entry [" << r << "][" << c << "] = " << v
           << " is outside [0,1]";
        throw Error(ErrorCode::kNegativeEntry, os.str());
      }
      dst[r][c] = v;
      sum += v;
    }
  }
  if (std::abs(sum - 1.0) > kKernelSumTol) {
    std::ostringstream os;
    os.precision(17);
    os << "kernel '" << name << "' sums to " << sum << " (deviation " << sum - 1.0
       << ")";
    throw Error(ErrorCode::kNonStochastic, os.str());
  }
}

}  // namespace

WalkSpec validate_walk(const RawWalk& raw) {
  WalkSpec s;
  copy_kernel(raw.interior, s.interior, "interior");
  copy_kernel(raw.hwall, s.hwall, "hwall");
  copy_kernel(raw.vwall, s.vwall, "vwall");
  copy_kernel(raw.origin, s.origin, "origin");
  return s;
}

WalkSpec two_demand(double lambda, double mu1, double mu2) {
  if (!(lambda > 0 && mu1 > 0 && mu2 > 0)) {
    throw Error(ErrorCode::kBadParameter, "two-demand rates must be positive");
  }
  if (std::abs(lambda + mu1 + mu2 - 1.0) > kKernelSumTol) {
    throw Error(ErrorCode::kBadParameter,
                "two-demand rates must satisfy lambda + mu1 + mu2 = 1");
  }
  WalkSpec s;
  s.interior[2][2] = lambda;  // (1,1)
  s.interior[0][1] = mu1;     // (-1,0)
  s.interior[1][0] = mu2;     // (0,-1)
  s.hwall[2][1] = lambda;     // (1,1)
  s.hwall[0][0] = mu1;        // (-1,0)
  s.hwall[1][0] = mu2;        // (0,0)
  s.vwall[1][2] = lambda;     // (1,1)
  s.vwall[0][0] = mu2;        // (0,-1)
  s.vwall[0][1] = mu1;        // (0,0)
  s.origin[1][1] = lambda;
  s.origin[0][0] = mu1 + mu2;
  return s;
}

bool as_two_demand(const WalkSpec& spec, double& lambda, double& mu1, double& mu2) {
  const double l = spec.p(1, 1), m1 = spec.p(-1, 0), m2 = spec.p(0, -1);
  if (!(l > 0 && m1 > 0 && m2 > 0)) return false;
  const WalkSpec ref = [&] {
    WalkSpec r;
    r.interior[2][2] = l;
    r.interior[0][1] = m1;
    r.interior[1][0] = m2;
    r.hwall[2][1] = l;
    r.hwall[0][0] = m1;
    r.hwall[1][0] = m2;
    r.vwall[1][2] = l;
    r.vwall[0][0] = m2;
    r.vwall[0][1] = m1;
    r.origin[1][1] = l;
    r.origin[0][0] = m1 + m2;
    return r;
  }();
  constexpr double tol = 1e-14;
  for (int i = -1; i <= 1; ++i)
    for (int j = -1; j <= 1; ++j) {
      if (std::abs(spec.p(i, j) - ref.p(i, j)) > tol) return false;
      if (std::abs(spec.p_h(i, j) - ref.p_h(i, j)) > tol) return false;
      if (std::abs(spec.p_v(i, j) - ref.p_v(i, j)) > tol) return false;
      if (std::abs(spec.p_o(i, j) - ref.p_o(i, j)) > tol) return false;
    }
  lambda = l;
  mu1 = m1;
  mu2 = m2;
  return true;
}

DriftVector mean_drift(const WalkSpec& spec) {
  DriftVector d;
  for (int i = -1; i <= 1; ++i)
    for (int j = -1; j <= 1; ++j) {
      d.mx += i * spec.p(i, j);
      d.my += j * spec.p(i, j);
    }
  d.light_tailed = std::abs(d.mx) > 1e-14 || std::abs(d.my) > 1e-14;
  return d;
}

DriftVector hwall_drift(const WalkSpec& spec) {
  DriftVector d;
  for (int i = -1; i <= 1; ++i)
    for (int j = 0; j <= 1; ++j) {
      d.mx += i * spec.p_h(i, j);
      d.my += j * spec.p_h(i, j);
    }
  d.light_tailed = std::abs(d.mx) > 1e-14 || std::abs(d.my) > 1e-14;
  return d;
}

DriftVector vwall_drift(const WalkSpec& spec) {
  DriftVector d;
  for (int i = 0; i <= 1; ++i)
    for (int j = -1; j <= 1; ++j) {
      d.mx += i * spec.p_v(i, j);
      d.my += j * spec.p_v(i, j);
    }
  d.light_tailed = std::abs(d.mx) > 1e-14 || std::abs(d.my) > 1e-14;
  return d;
}

std::string_view to_string(Stability s) {
  switch (s) {
    case Stability::kStable: return "stable";
    case Stability::kUnstable: return "unstable";
    case Stability::kIndeterminate: return "indeterminate";
  }
  return "indeterminate";
}

StabilityVerdict check_stability(const WalkSpec& spec) {
  const DriftVector m = mean_drift(spec);
  const DriftVector mh = hwall_drift(spec);
  const DriftVector mv = vwall_drift(spec);
  StabilityVerdict v;
  v.verified = false;
  if (!m.light_tailed) {
    v.verdict = Stability::kIndeterminate;
    v.reason = "zero interior drift";
    return v;
  }
  // Drift conditions for a walk with bounded jumps in the quadrant.
  const double hcond = m.mx * mh.my - m.my * mh.mx;
  const double vcond = m.my * mv.mx - m.mx * mv.my;
  bool ok = false;
  if (m.mx < 0 && m.my < 0) {
    ok = hcond < 0 && vcond < 0;
    v.reason = ok ? "interior drift negative, both boundary conditions hold"
                  : "interior drift negative but a boundary condition fails";
  } else if (m.mx >= 0 && m.my < 0) {
    ok = hcond < 0;
    v.reason = ok ? "horizontal boundary condition holds"
                  : "horizontal boundary condition fails";
  } else if (m.mx < 0 && m.my >= 0) {
    ok = vcond < 0;
    v.reason = ok ? "vertical boundary condition holds"
                  : "vertical boundary condition fails";
  } else {
    v.reason = "interior drift nonnegative in both coordinates";
  }
  v.verdict = ok ? Stability::kStable : Stability::kUnstable;
  return v;
}

SrbmSpec validate_srbm(const SrbmSpec& spec) {
  for (double v : {spec.mu[0], spec.mu[1], spec.sigma[0][0], spec.sigma[0][1],
                   spec.sigma[1][0], spec.sigma[1][1], spec.R[0][0], spec.R[0][1],
                   spec.R[1][0], spec.R[1][1]}) {
    if (!std::isfinite(v)) throw Error(ErrorCode::kBadParameter, "non-finite SRBM parameter");
  }
  const auto& s = spec.sigma;
  const double scale = std::max(std::abs(s[0][1]), std::abs(s[1][0]));
  if (std::abs(s[0][1] - s[1][0]) > 1e-12 * std::max(1.0, scale)) {
    throw Error(ErrorCode::kDegenerateCovariance, "covariance matrix is not symmetric");
  }
  const double det = s[0][0] * s[1][1] - s[0][1] * s[1][0];
  if (!(s[0][0] > 0) || !(det > 0)) {
    throw Error(ErrorCode::kDegenerateCovariance,
                "covariance matrix is not positive definite");
  }
  return spec;
}

StabilityVerdict check_stability(const SrbmSpec& spec) {
  const auto& R = spec.R;
  const auto& mu = spec.mu;
  StabilityVerdict v;
  std::vector<std::string> fails;
  if (!(R[0][0] > 0)) fails.push_back("r11 <= 0");
  if (!(R[1][1] > 0)) fails.push_back("r22 <= 0");
  if (!(R[0][0] * R[1][1] - R[0][1] * R[1][0] > 0)) fails.push_back("det R <= 0");
  if (!(R[1][1] * mu[0] - R[0][1] * mu[1] < 0)) fails.push_back("r22*mu1 - r12*mu2 >= 0");
  if (!(R[0][0] * mu[1] - R[1][0] * mu[0] < 0)) fails.push_back("r11*mu2 - r21*mu1 >= 0");
  if (fails.empty()) {
    v.verdict = Stability::kStable;
    v.reason = "R non-singular and R^{-1} mu < 0";
  } else {
    v.verdict = Stability::kUnstable;
    for (size_t k = 0; k < fails.size(); ++k) v.reason += (k ? "; " : "") + fails[k];
  }
  return v;
}

FluidSpec validate_fluid(const FluidSpec& spec) {
  if (!(spec.lambda > 0) || !std::isfinite(spec.lambda))
    throw Error(ErrorCode::kBadParameter, "fluid lambda must be positive");
  if (!(spec.mu > 0) || !std::isfinite(spec.mu))
    throw Error(ErrorCode::kBadParameter, "fluid mu must be positive");
  if (spec.c < 1) throw Error(ErrorCode::kBadParameter, "fluid c must be >= 1");
  if (!(spec.r > 0) || !std::isfinite(spec.r))
    throw Error(ErrorCode::kBadParameter, "fluid r must be positive");
  return spec;
}

std::vector<double> mmc_stationary_head(const FluidSpec& spec) {
  // Unnormalized weights (lambda/mu)^i / i! for i <= c, tail mass analytic.
  const double rho = spec.lambda / (spec.c * spec.mu);
  std::vector<double> w(static_cast<size_t>(spec.c) + 1);
  w[0] = 1.0;
  for (int i = 1; i <= spec.c; ++i) w[i] = w[i - 1] * (spec.lambda / spec.mu) / i;
  double total = 0.0;
  for (int i = 0; i < spec.c; ++i) total += w[i];
  total += w[spec.c] / (1.0 - rho);
  for (double& x : w) x /= total;
  return w;
}

double fluid_mean_rate(const FluidSpec& spec) {
  const double rho = spec.lambda / (spec.c * spec.mu);
  if (rho >= 1.0) return spec.r;
  const auto xi = mmc_stationary_head(spec);
  double m = 0.0;
  for (int i = 0; i < spec.c; ++i) m += xi[i] * spec.rate(i);
  m += spec.r * xi[spec.c] / (1.0 - rho);
  return m;
}

StabilityVerdict check_stability(const FluidSpec& spec) {
  StabilityVerdict v;
  if (!(spec.lambda < spec.c * spec.mu)) {
    v.verdict = Stability::kUnstable;
    v.reason = "lambda >= c*mu: driving M/M/c queue is unstable";
    return v;
  }
  const double m = fluid_mean_rate(spec);
  std::ostringstream os;
  os.precision(17);
  os << "mean net rate " << m;
  if (m < 0) {
    v.verdict = Stability::kStable;
    os << " < 0";
  } else {
    v.verdict = Stability::kUnstable;
    os << " >= 0";
  }
  v.reason = os.str();
  return v;
}

std::string family_name(const ModelSpec& m) {
  switch (m.index()) {
    case 0: return "rwqp";
    case 1: return "srbm";
    default: return "fluid";
  }
}

namespace {

double get_number(const json& j, const char* key) {
  if (!j.contains(key)) {
    throw Error(ErrorCode::kWrongShape, std::string("missing field '") + key + "'");
  }
  if (!j.at(key).is_number()) {
    throw Error(ErrorCode::kWrongShape, std::string("field '") + key + "' must be a number");
  }
  return j.at(key).get<double>();
}

std::vector<std::vector<double>> get_matrix(const json& j, const char* key) {
  if (!j.contains(key)) {
    throw Error(ErrorCode::kWrongShape, std::string("missing kernel '") + key + "'");
  }
  const json& m = j.at(key);
  if (!m.is_array()) {
    throw Error(ErrorCode::kWrongShape, std::string("'") + key + "' must be an array of rows");
  }
  std::vector<std::vector<double>> out;
  for (const json& row : m) {
    if (!row.is_array()) {
      throw Error(ErrorCode::kWrongShape, std::string("'") + key + "' rows must be arrays");
    }
    std::vector<double> r;
    for (const json& v : row) {
      if (!v.is_number()) {
        throw Error(ErrorCode::kWrongShape, std::string("'") + key + "' entries must be numbers");
      }
      r.push_back(v.get<double>());
    }
    out.push_back(std::move(r));
  }
  return out;
}

template <size_t R, size_t C>
std::array<std::array<double, C>, R> get_fixed(const json& j, const char* key) {
  const auto m = get_matrix(j, key);
  std::array<std::array<double, C>, R> out{};
  if (m.size() != R) throw Error(ErrorCode::kWrongShape, std::string("'") + key + "' has wrong shape");
  for (size_t r = 0; r < R; ++r) {
    if (m[r].size() != C) throw Error(ErrorCode::kWrongShape, std::string("'") + key + "' has wrong shape");
    for (size_t c = 0; c < C; ++c) out[r][c] = m[r][c];
  }
  return out;
}

template <size_t R, size_t C>
json matrix_json(const std::array<std::array<double, C>, R>& m) {
  json out = json::array();
  for (const auto& row : m) out.push_back(json(std::vector<double>(row.begin(), row.end())));
  return out;
}

}  // namespace

ModelSpec parse_model(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::kWrongShape, "model must be a JSON object");
  if (!j.contains("family") || !j.at("family").is_string()) {
    throw Error(ErrorCode::kWrongShape, "missing string field 'family'");
  }
  const std::string fam = j.at("family").get<std::string>();
  if (fam == "rwqp") {
    if (j.contains("two_demand")) {
      const json& t = j.at("two_demand");
      return two_demand(get_number(t, "lambda"), get_number(t, "mu1"), get_number(t, "mu2"));
    }
    RawWalk raw{get_matrix(j, "interior"), get_matrix(j, "hwall"), get_matrix(j, "vwall"),
                get_matrix(j, "origin")};
    return validate_walk(raw);
  }
  if (fam == "srbm") {
    SrbmSpec s;
    if (!j.contains("mu") || !j.at("mu").is_array() || j.at("mu").size() != 2) {
      throw Error(ErrorCode::kWrongShape, "'mu' must be a 2-vector");
    }
    for (size_t k = 0; k < 2; ++k) {
      if (!j.at("mu")[k].is_number()) throw Error(ErrorCode::kWrongShape, "'mu' entries must be numbers");
      s.mu[k] = j.at("mu")[k].get<double>();
    }
    s.sigma = get_fixed<2, 2>(j, "sigma");
    s.R = get_fixed<2, 2>(j, "R");
    return validate_srbm(s);
  }
  if (fam == "fluid") {
    FluidSpec f;
    f.lambda = get_number(j, "lambda");
    f.mu = get_number(j, "mu");
    const double c = get_number(j, "c");
    if (c != std::floor(c) || c < 1 || c > 1e6) {
      throw Error(ErrorCode::kBadParameter, "fluid 'c' must be a positive integer");
    }
    f.c = static_cast<int>(c);
    f.r = get_number(j, "r");
    return validate_fluid(f);
  }
  throw Error(ErrorCode::kWrongShape, "unknown family '" + fam + "'");
}

ModelSpec parse_model_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kWrongShape, std::string("malformed JSON: ") + e.what());
  }
  return parse_model(j);
}

json to_json(const ModelSpec& m) {
  json j;
  j["family"] = family_name(m);
  if (const auto* w = std::get_if<WalkSpec>(&m)) {
    j["interior"] = matrix_json(w->interior);
    j["hwall"] = matrix_json(w->hwall);
    j["vwall"] = matrix_json(w->vwall);
    j["origin"] = matrix_json(w->origin);
  } else if (const auto* s = std::get_if<SrbmSpec>(&m)) {
    j["mu"] = {s->mu[0], s->mu[1]};
    j["sigma"] = matrix_json(s->sigma);
    j["R"] = matrix_json(s->R);
  } else if (const auto* f = std::get_if<FluidSpec>(&m)) {
    j["lambda"] = f->lambda;
    j["mu"] = f->mu;
    j["c"] = f->c;
    j["r"] = f->r;
  }
  return j;
}

}  // namespace kmt
