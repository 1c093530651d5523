#pragma once

// Shared fixtures and random generators for the test suites.

#include <doctest.h>

#include <array>
#include <cmath>
#include <random>

#include "kmt/errors.hpp"
#include "kmt/kernel.hpp"
#include "kmt/model.hpp"

namespace kmt::test {

#define CHECK_THROWS_CODE(expr, code_)                      \
  do {                                                      \
    bool thrown_ = false;                                   \
    try {                                                   \
      (void)(expr);                                         \
    } catch (const ::kmt::Error& e_) {                      \
      thrown_ = true;                                       \
      CHECK_MESSAGE(e_.code() == (code_), e_.what());       \
    }                                                       \
    CHECK_MESSAGE(thrown_, "expected kmt::Error " #code_);  \
  } while (0)

inline WalkSpec case1_walk() { return two_demand(0.2, 0.3, 0.5); }
inline WalkSpec case2_walk() { return two_demand(0.2, 0.4, 0.4); }
inline WalkSpec case3_walk() { return two_demand(0.2, 0.5, 0.3); }

inline bool close_rel(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

/// Normalize a set of weights in place.
template <std::size_t R, std::size_t C>
void normalize(std::array<std::array<double, C>, R>& k) {
  double s = 0.0;
  for (auto& row : k)
    for (double v : row) s += v;
  for (auto& row : k)
    for (double& v : row) v /= s;
  // Absorb the rounding residue so the sum is 1 to the last bit or so.
  double t = 0.0;
  for (auto& row : k)
    for (double v : row) t += v;
  double& big = k[0][0];
  big += 1.0 - t;
}

/// Random walk with negative interior drift, all interior moves present
/// with probability `density`, and boundary kernels biased back toward the
/// origin. Stability is not guaranteed; callers filter with check_stability.
class WalkGenerator {
 public:
  explicit WalkGenerator(std::uint64_t seed) : rng_(seed) {}

  WalkSpec next() {
    WalkSpec s;
    std::uniform_real_distribution<double> u(0.05, 1.0);
    for (auto& row : s.interior)
      for (double& v : row) v = u(rng_);
    // Tilt toward the origin.
    for (int j = 0; j < 3; ++j) s.interior[0][j] *= 1.5, s.interior[j][0] *= 1.5;
    normalize(s.interior);
    for (auto& row : s.hwall)
      for (double& v : row) v = u(rng_);
    s.hwall[0][0] *= 2.0;
    normalize(s.hwall);
    for (auto& row : s.vwall)
      for (double& v : row) v = u(rng_);
    s.vwall[0][0] *= 2.0;
    normalize(s.vwall);
    for (auto& row : s.origin)
      for (double& v : row) v = u(rng_);
    normalize(s.origin);
    return s;
  }

  /// Next walk passing the drift-based stability check with genus 1.
  WalkSpec next_stable_genus1() {
    for (;;) {
      WalkSpec s = next();
      if (check_stability(s).verdict != Stability::kStable) continue;
      const KernelSystem ks = build_kernel(s);
      const BranchPoints bp = branch_points(ks);
      if (bp.x.multiple || bp.y.multiple || bp.x.degree < 3 || bp.y.degree < 3) continue;
      return s;
    }
  }

  std::mt19937_64& rng() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

/// Independent coordinates: x moves by q (q[0] left, q[1] stay, q[2] right),
/// y by r; at an axis the blocked down-move is folded into "stay".
inline WalkSpec product_walk(std::array<double, 3> q, std::array<double, 3> r) {
  const std::array<double, 2> q0{q[0] + q[1], q[2]}, r0{r[0] + r[1], r[2]};
  WalkSpec s;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) s.interior[i][j] = q[i] * r[j];
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 2; ++j) s.hwall[i][j] = q[i] * r0[j];
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 3; ++j) s.vwall[i][j] = q0[i] * r[j];
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) s.origin[i][j] = q0[i] * r0[j];
  return s;
}

}  // namespace kmt::test
