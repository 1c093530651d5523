#include "support.hpp"

#include <numbers>

#include "kmt/srbm.hpp"

using namespace kmt;

namespace {

SrbmSpec reference(double mu1 = -1.0, double mu2 = -1.0) {
  SrbmSpec s;
  s.mu = {mu1, mu2};
  s.sigma = {{{1, 0}, {0, 1}}};
  s.R = {{{1, 0}, {0, 1}}};
  return s;
}

}  // namespace

TEST_CASE("reference SRBM branch points and branches") {
  const SrbmKernel k = build_srbm_kernel(reference());
  CHECK(k.d1.degree() == 2);
  CHECK(k.d1[0] == 1.0);
  CHECK(k.d1[1] == 2.0);
  CHECK(k.d1[2] == -1.0);
  const SrbmBranchPoints bp = srbm_branch_points(k);
  CHECK(std::abs(bp.x1 - (1 - std::numbers::sqrt2)) < 1e-10);
  CHECK(std::abs(bp.x2 - (1 + std::numbers::sqrt2)) < 1e-10);

  for (double x : {-0.3, 0.0, 0.5, 1.0, 2.0, 2.4}) {
    const auto [y0, y1] = srbm_branch_eval(k, bp, x);
    CHECK(std::abs(y0 - (1.0 - std::sqrt(1 + 2 * x - x * x))) < 1e-14);
    CHECK(std::abs(y0 * y1 - k.in_y.c(x) / k.in_y.a[0]) < 1e-13);
    CHECK(std::abs(k.in_y(cplx(x), y0)) < 1e-12);
    if (x > 0) CHECK(std::abs(y0) <= std::abs(y1));  // Y- is the min-modulus root here
  }
  CHECK(std::abs(srbm_branch_eval(k, bp, 0.0).first) < 1e-15);
  CHECK_THROWS_CODE(srbm_branch_eval(k, bp, 3.0), ErrorCode::kOnCut);
}

TEST_CASE("D1(0) = mu2^2 and the mu2 = 0 edge") {
  const SrbmKernel k = build_srbm_kernel(reference(-1.0, -0.7));
  CHECK(k.d1[0] == doctest::Approx(0.49));
  const SrbmBranchPoints bp0 = srbm_branch_points(build_srbm_kernel(reference(-1.0, 0.0)));
  CHECK(bp0.x1 == 0.0);
}

TEST_CASE("reference SRBM poles and classification") {
  const SrbmAnalysis a = analyze_srbm(reference());
  CHECK(a.sing.x_star == doctest::Approx(2.0).epsilon(1e-12));
  REQUIRE(a.sing.y_tilde.has_value());
  CHECK(*a.sing.y_tilde == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(std::isinf(a.sing.x_tilde));
  CHECK(a.sing.label.case_id == 1);
  CHECK(std::abs(a.sing.tau1 - 2.0) < 1e-10);
  CHECK(a.independent_components);
  CHECK(a.v2_tail.provenance == Provenance::kClosedForm);
  CHECK(a.v2_tail.power == 0.0);
}

TEST_CASE("independent components: tau1 = 2|mu1|/S11") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.2, 3.0);
  for (int k = 0; k < 50; ++k) {
    SrbmSpec s = reference(-u(rng), -u(rng));
    s.sigma[0][0] = u(rng);
    s.sigma[1][1] = u(rng);
    s.R[0][0] = u(rng);
    s.R[1][1] = u(rng);
    const SrbmAnalysis a = analyze_srbm(s);
    CHECK(a.sing.tau1 == doctest::Approx(2 * std::abs(s.mu[0]) / s.sigma[0][0]).epsilon(1e-10));
    CHECK(a.sing.label.case_id == 1);
  }
}

TEST_CASE("random SRBMs: residuals and Y- selection") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-0.4, 0.4), v(0.3, 2.0);
  int n = 0;
  while (n < 50) {
    SrbmSpec s = reference(-v(rng), -v(rng));
    s.sigma[0][0] = v(rng);
    s.sigma[1][1] = v(rng);
    s.sigma[0][1] = s.sigma[1][0] = u(rng) * std::sqrt(s.sigma[0][0] * s.sigma[1][1]);
    s.R[0][1] = u(rng);
    s.R[1][0] = u(rng);
    if (check_stability(s).verdict != Stability::kStable) continue;
    const SrbmKernel k = build_srbm_kernel(s);
    const SrbmBranchPoints bp = srbm_branch_points(k);
    CHECK(bp.x1 <= 0.0);
    CHECK(bp.x2 > 0.0);
    for (int j = 1; j < 20; ++j) {
      const double x = bp.x1 + (bp.x2 - bp.x1) * j / 20.0;
      const auto [y0, y1] = srbm_branch_eval(k, bp, x);
      CHECK(std::abs(k.in_y(cplx(x), y0)) < 1e-12 * (1 + x * x));
      CHECK(y0.real() <= y1.real());
    }
    try {
      const SrbmAnalysis a = analyze_srbm(s);
      CHECK(a.sing.tau1 > 0.0);
      CHECK(a.sing.tau1 <= bp.x2 * (1 + 1e-12));
    } catch (const Error& e) {
      FAIL_CHECK(e.what());
    }
    ++n;
  }
}

TEST_CASE("SRBM with no boundary pole is Case 3") {
  const SrbmBranchPoints bp = srbm_branch_points(build_srbm_kernel(reference()));
  const CaseLabel l = classify_candidates(bp.x2, kInf, kInf);
  CHECK(l.case_id == 3);
  CHECK(l.x_dom == bp.x2);
  CHECK(tail_power_for_case(3) == -1.5);
}

TEST_CASE("unstable SRBM is rejected") {
  CHECK_THROWS_CODE(analyze_srbm(reference(1.0, -1.0)), ErrorCode::kUnstable);
}
