#pragma once

#include <array>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace kmt {

/// Validated transition law of a random walk in the quarter plane.
///
/// Storage follows the model-file layout: interior[i+1][j+1] for
/// i, j in {-1,0,1}; hwall[i+1][j] for j in {0,1} (the x-axis, n = 0);
/// vwall[i][j+1] for i in {0,1} (the y-axis, m = 0); origin[i][j].
struct WalkSpec {
  std::array<std::array<double, 3>, 3> interior{};
  std::array<std::array<double, 2>, 3> hwall{};
  std::array<std::array<double, 3>, 2> vwall{};
  std::array<std::array<double, 2>, 2> origin{};

  /// Entries with out-of-range indices read as zero.
  double p(int i, int j) const;
  double p_h(int i, int j) const;
  double p_v(int i, int j) const;
  double p_o(int i, int j) const;
};

/// Unvalidated kernels as read from a model file.
struct RawWalk {
  std::vector<std::vector<double>> interior, hwall, vwall, origin;
};

inline constexpr double kKernelSumTol = 1e-12;

/// Shape, sign and sum-to-one checks. Never renormalizes.
WalkSpec validate_walk(const RawWalk& raw);

/// Two parallel exponential servers with joint arrivals, uniformized so
/// that lambda + mu1 + mu2 = 1 (checked).
WalkSpec two_demand(double lambda, double mu1, double mu2);

/// Recover (lambda, mu1, mu2) when the walk has exactly the two-demand layout.
bool as_two_demand(const WalkSpec& spec, double& lambda, double& mu1, double& mu2);

struct DriftVector {
  double mx = 0.0;
  double my = 0.0;
  bool light_tailed = false;  ///< M != 0
};

DriftVector mean_drift(const WalkSpec& spec);
/// Mean increments on the horizontal boundary (n = 0) and vertical boundary (m = 0).
DriftVector hwall_drift(const WalkSpec& spec);
DriftVector vwall_drift(const WalkSpec& spec);

struct WalkClass {
  bool quadratic = false;          ///< quadratic in both x and y
  bool possibly_reducible = false; ///< numeric factorization test succeeded
  bool nonsingular = false;        ///< quadratic and not flagged reducible
  int genus = 0;
  bool x_shaped = false;
  std::vector<std::string> notes;
};

WalkClass classify_walk(const WalkSpec& spec);

enum class Stability { kStable, kUnstable, kIndeterminate };

struct StabilityVerdict {
  Stability verdict = Stability::kIndeterminate;
  bool verified = true;  ///< false for the advisory random-walk check
  std::string reason;
};

std::string_view to_string(Stability s);

struct SrbmSpec {
  std::array<double, 2> mu{};
  std::array<std::array<double, 2>, 2> sigma{};
  std::array<std::array<double, 2>, 2> R{};
};

/// Throws DegenerateCovariance unless sigma is symmetric positive definite.
SrbmSpec validate_srbm(const SrbmSpec& spec);

struct FluidSpec {
  double lambda = 0.0;
  double mu = 0.0;
  int c = 1;
  double r = 0.0;

  /// Net fluid rate while i servers are busy.
  double rate(int i) const { return i < c ? static_cast<double>(i - c) : r; }
};

FluidSpec validate_fluid(const FluidSpec& spec);

/// Stationary law xi of the M/M/c queue truncated where the geometric tail
/// falls below 1e-17; the tail beyond c is summed analytically by callers.
std::vector<double> mmc_stationary_head(const FluidSpec& spec);

/// Mean net fluid rate sum_i xi_i r_i (tail beyond c summed in closed form).
double fluid_mean_rate(const FluidSpec& spec);

StabilityVerdict check_stability(const WalkSpec& spec);
StabilityVerdict check_stability(const SrbmSpec& spec);
StabilityVerdict check_stability(const FluidSpec& spec);

using ModelSpec = std::variant<WalkSpec, SrbmSpec, FluidSpec>;

std::string family_name(const ModelSpec& m);

/// Parse {"family": "rwqp"|"srbm"|"fluid", ...}; validation errors throw.
ModelSpec parse_model(const nlohmann::json& j);
ModelSpec parse_model_text(const std::string& text);

/// Echo a model in the same schema parse_model accepts.
nlohmann::json to_json(const ModelSpec& m);

}  // namespace kmt
