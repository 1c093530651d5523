#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "kmt/model.hpp"
#include "kmt/polynomial.hpp"

namespace kmt {

struct SolveOptions {
  /// Above this many bytes for the per-level R matrices the solver switches
  /// to checkpointed recomputation (same arithmetic, about twice the time).
  std::size_t memory_budget = std::size_t{1} << 30;
  double max_residual = 1e-12;
  double edge_mass_limit = 1e-8;
  bool allow_truncation_suspect = false;
};

/// Stationary law of the walk restricted to {0..N}^2. Moves leaving the box
/// are dropped and the remaining row renormalized.
struct TruncatedSolution {
  int N = 0;
  std::vector<double> pi;  ///< pi[m*(N+1) + n]
  double residual = 0.0;   ///< ||pi P - pi||_1
  double mass_at_edge = 0.0;
  std::string method;

  double at(int m, int n) const { return pi[static_cast<std::size_t>(m) * (N + 1) + n]; }
};

/// Block GTH (subtraction-free level reduction). Throws NotConverged if the
/// residual check fails or the truncated chain is reducible, and
/// TruncationSuspect when mass_at_edge exceeds the limit.
TruncatedSolution solve_truncated(const WalkSpec& spec, int N, const SolveOptions& opts = {});

/// pi_{n,0} for n = 1..N (element k is n = k+1).
std::vector<double> boundary_sequence(const TruncatedSolution& ts);
/// pi_{0,n} for n = 1..N.
std::vector<double> vertical_sequence(const TruncatedSolution& ts);

enum class GfKind { kPi1, kPi2, kPi };

struct GfValue {
  cplx value;
  cplx derivative;      ///< d/dz of the same series
  double tail_bound = 0.0;
  double radius = 0.0;  ///< estimated radius of convergence (inf if finite support)
};

/// pi1(x) = sum pi_{m,0} x^{m-1}, pi2(y) = sum pi_{0,n} y^{n-1},
/// pi(x,y) = sum_{m,n>=1} pi_{m,n} x^{m-1} y^{n-1}. For kPi the derivative
/// is with respect to x. Throws OutsideConvergence beyond the fitted radius.
GfValue eval_gf(const TruncatedSolution& ts, GfKind which, cplx z, cplx w = 1.0);

struct TailFit {
  double theta_hat = 0.0;
  double alpha_hat = 0.0;
  double c_hat = 0.0;
  double r_squared = 0.0;
  double residual_rms = 0.0;
  double theta_spread = 0.0;  ///< |theta| difference between window halves
  double alpha_spread = 0.0;
  int n0 = 0, n1 = 0;
  int offset = 1;
};

/// Fit seq[n-1] ~ c n^alpha theta^(n - offset) on n in [n0, n1] by joint
/// least squares in log form. Throws WindowTooNoisy.
TailFit fit_tail(std::span<const double> seq, int n0, int n1, int offset = 1);

/// Largest n with sum_j pi_{N,j} / sum_{m>=n} sum_j pi_{m,j} < 1e-3 and a
/// representable pi_{n,0}.
int effective_truncation(const TruncatedSolution& ts);

/// Fit window as fractions of the effective truncation.
inline constexpr double kFitWindowLo = 0.5;
inline constexpr double kFitWindowHi = 0.8;

/// [0.5 N_eff, 0.8 N_eff].
std::pair<int, int> default_window(const TruncatedSolution& ts);

/// "n,pi_n0" CSV, 17 significant digits, LF endings.
void write_sequence_csv(std::ostream& os, std::span<const double> seq);

}  // namespace kmt
