#include "support.hpp"

#include <numbers>

#include "kmt/fluid.hpp"

using namespace kmt;

namespace {

FluidSpec mm1(double r) { return FluidSpec{1.0, 4.0, 1, r}; }

/// Random stable spec; the stability sum decides.
FluidSpec random_spec(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.2, 3.0);
  std::uniform_int_distribution<int> cs(1, 5);
  for (;;) {
    FluidSpec f{u(rng), u(rng), cs(rng), u(rng)};
    if (f.lambda >= f.c * f.mu) continue;
    if (check_stability(f).verdict == Stability::kStable) return f;
  }
}

}  // namespace

TEST_CASE("fluid branches at reference points") {
  const FluidKernel k = build_fluid_kernel(mm1(1.0));
  const FluidBranchPoints bp = fluid_branch_points(k);
  SUBCASE("alpha = 0 gives {1, c mu / lambda}") {
    const auto [z0, z1] = fluid_branches(k, bp, 0.0);
    CHECK(std::abs(z0 - 1.0) < 1e-15);
    CHECK(std::abs(z1 - 4.0) < 1e-14);
  }
  SUBCASE("alpha1 = 1 is a double root at 2") {
    CHECK(bp.alpha1 == doctest::Approx(1.0).epsilon(1e-15));
    const auto [z0, z1] = fluid_branches(k, bp, bp.alpha1);
    CHECK(std::abs(z0 - 2.0) < 1e-12);
    CHECK(std::abs(z1 - 2.0) < 1e-12);
  }
  SUBCASE("cut interior") {
    CHECK_THROWS_CODE(fluid_branches(k, bp, 0.5 * (bp.alpha1 + bp.alpha2)), ErrorCode::kOnCut);
  }
}

TEST_CASE("continued fraction") {
  const FluidKernel k = build_fluid_kernel(FluidSpec{1.0, 1.0, 2, 1.0});
  CHECK(continued_fraction(k, 0.0, 0) == cplx(1.0));
  const FluidKernel k3 = build_fluid_kernel(FluidSpec{1.0, 2.0, 3, 1.0});
  const cplx a = 0.7;
  CHECK(std::abs(continued_fraction(k3, a, 0) - 2.0 / (0.7 + 1.0)) < 1e-15);
  // Denominator alpha + lambda vanishes at alpha = -lambda.
  CHECK_THROWS_CODE(continued_fraction(k3, -1.0, 0), ErrorCode::kRecursionPole);
  // c = 1 uses no continued fraction: hat H1 = H1.
  const FluidKernel k1 = build_fluid_kernel(mm1(2.0));
  CHECK(std::abs(hat_h1(k1, 0.3, 1.7) - k1.H1(0.3, 1.7)) < 1e-15);
}

TEST_CASE("M/M/1 Case 1: alpha* = mu/(r+1) - lambda") {
  const FluidAnalysis a = analyze_fluid(mm1(2.0));
  CHECK(a.bp.alpha1 == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(a.star.alpha_star == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(a.star.multiplicity == 1);
  CHECK(a.label.case_id == 1);
  CHECK(a.z_dom == 4.0);
  CHECK(a.boundary.rate == 0.25);
  CHECK(a.assumption_ii == "holds");
  CHECK(a.density.constant == doctest::Approx(5.0 / 36.0).epsilon(1e-10));
  CHECK(a.marginal.constant == doctest::Approx(5.0 / 8.0).epsilon(1e-10));
  CHECK(a.marginal.power == 0.0);
}

TEST_CASE("M/M/1 Case 2 at r = 1") {
  const FluidAnalysis a = analyze_fluid(mm1(1.0));
  CHECK(a.star.alpha_star == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(a.label.case_id == 2);
  CHECK(a.label.pole_meets_branch);
  CHECK(a.marginal.power == -0.5);
  const double c = 1.0 / (2.0 * std::numbers::sqrt2) / std::sqrt(std::numbers::pi);
  CHECK(a.density.constant == doctest::Approx(c).epsilon(1e-10));
  CHECK(a.marginal.constant == doctest::Approx(2.0 * c).epsilon(1e-10));
}

TEST_CASE("no zero in (0, alpha1] is Case 3") {
  const FluidAnalysis a = analyze_fluid(FluidSpec{1.0, 2.0, 3, 1.5});
  CHECK(std::isinf(a.star.alpha_star));
  CHECK(a.label.case_id == 3);
  CHECK(a.marginal.power == -1.5);
  CHECK(a.assumption_ii == "assumed");
  CHECK(a.marginal.provenance == Provenance::kUnavailable);
}

TEST_CASE("random fluid specs: invariants") {
  std::mt19937_64 rng(123);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int n = 0; n < 100; ++n) {
    const FluidSpec f = random_spec(rng);
    const FluidKernel k = build_fluid_kernel(f);
    const FluidBranchPoints bp = fluid_branch_points(k);
    const double cm = f.c * f.mu;
    const double a1 = (std::sqrt(cm) - std::sqrt(f.lambda)) * (std::sqrt(cm) - std::sqrt(f.lambda)) / f.r;
    const double a2 = (std::sqrt(cm) + std::sqrt(f.lambda)) * (std::sqrt(cm) + std::sqrt(f.lambda)) / f.r;
    CHECK(bp.alpha1 == doctest::Approx(a1).epsilon(1e-12));
    CHECK(bp.alpha2 == doctest::Approx(a2).epsilon(1e-12));
    CHECK(std::abs(k.delta(bp.alpha1)) < 1e-10 * (1 + cm * cm));

    for (int j = 0; j < 10; ++j) {
      const cplx al(3.0 * a2 * u(rng), a2 * u(rng));
      if (std::abs(al.imag()) < 1e-6) continue;
      const auto [z0, z1] = fluid_branches(k, bp, al);
      CHECK(std::abs(z0 * z1 - cm / f.lambda) < 1e-10 * cm / f.lambda);
      CHECK(std::abs(k.H(al, z0)) < 1e-10 * (1 + std::norm(z0)) * (f.lambda + cm));
      const cplx z(2.0 * u(rng), 2.0 * u(rng));
      CHECK(std::abs(k.H(k.inverse_map(z), z)) < 1e-10 * (1 + std::norm(z)) * (f.lambda + cm));
    }

    const FluidAnalysis a = analyze_fluid(f);
    CHECK(a.alpha_dom > 0.0);
    CHECK(a.alpha_dom <= bp.alpha1 * (1 + 1e-12));
    CHECK(a.z_dom == doctest::Approx(cm / f.lambda));
    if (f.c == 1 && f.r >= std::sqrt(f.mu / f.lambda) - 1.0) {
      const double want = f.mu / (f.r + 1) - f.lambda;
      if (want > 1e-6 && want < bp.alpha1 * (1 - 1e-6)) {
        CHECK(a.star.alpha_star == doctest::Approx(want).epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("M/M/1 r-scan: the case changes once, at r = sqrt(mu/lambda) - 1") {
  // At mu/(r+1) - lambda the zero of H1 is z = mu/(lambda (r+1)) and the other
  // root of H is r+1, so it lies on Z0 only for r >= sqrt(mu/lambda) - 1 = 1.
  // Below that there is no Z0 zero and the branch point dominates.
  int changes = 0, prev = 0;
  for (int k = 1; k <= 400; ++k) {
    const double r = 0.2 + k * 0.005;
    const FluidSpec f = mm1(r);
    if (check_stability(f).verdict != Stability::kStable) break;
    const FluidAnalysis a = analyze_fluid(f);
    const double want = 4.0 / (r + 1) - 1.0;
    CHECK(a.bp.alpha1 - want >= -1e-12);
    if (r < 1.0 - 1e-9) {
      CHECK(a.label.case_id == 3);
      CHECK(std::isinf(a.star.alpha_star));
    } else if (r > 1.0 + 1e-9) {
      CHECK(a.label.case_id == 1);
      CHECK(a.star.alpha_star == doctest::Approx(want).epsilon(1e-10));
    }
    if (prev != 0 && a.label.case_id != prev && !(r > 1.0 - 1e-9 && r < 1.0 + 1e-9)) ++changes;
    prev = a.label.case_id;
  }
  CHECK(changes == 1);
}
