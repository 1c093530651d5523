#include "support.hpp"

#include <numbers>

#include "kmt/asymptotics.hpp"
#include "kmt/oracle.hpp"

using namespace kmt;

namespace {

const double kSqrtPi = std::sqrt(std::numbers::pi);

}  // namespace

TEST_CASE("case to exponent lookup") {
  const double powers[] = {0.0, -0.5, -1.5, 1.0};
  const double alphas[] = {1.0, 0.5, 0.5, 2.0};
  for (int c = 1; c <= 4; ++c) {
    CHECK(tail_power_for_case(c) == powers[c - 1]);
    const SingularBehavior sb = singular_behavior_for_case(c);
    CHECK(sb.alpha == alphas[c - 1]);
    CHECK(sb.via_derivative == (c == 3));
  }
}

TEST_CASE("Tauberian map constants") {
  SUBCASE("alpha = 1 is pure geometric") {
    const TailForm t = tauberian_map({1.0, 0.7, false}, 2.0);
    CHECK(t.constant == doctest::Approx(0.7));
    CHECK(t.power == 0.0);
    CHECK(t.rate == 0.5);
    CHECK(t.offset == 1);
  }
  SUBCASE("alpha = 1/2 divides by sqrt(pi)") {
    const TailForm t = tauberian_map({0.5, 1.0, false}, 2.0);
    CHECK(t.constant == doctest::Approx(1.0 / kSqrtPi).epsilon(1e-15));
    CHECK(t.power == -0.5);
  }
  SUBCASE("alpha = 2 gives n^1 with Gamma(2) = 1") {
    const TailForm t = tauberian_map({2.0, 0.3, false}, 1.5);
    CHECK(t.constant == doctest::Approx(0.3));
    CHECK(t.power == 1.0);
  }
  SUBCASE("derivative form carries x_dom") {
    const TailForm t = tauberian_map({0.5, 1.0, true}, 3.0);
    CHECK(t.constant == doctest::Approx(3.0 / kSqrtPi).epsilon(1e-15));
    CHECK(t.power == -1.5);
  }
  SUBCASE("degenerate exponents") {
    CHECK_THROWS_CODE(tauberian_map({0.0, 1.0, false}, 2.0), ErrorCode::kDegenerateExponent);
    CHECK_THROWS_CODE(tauberian_map({-1.0, 1.0, false}, 2.0), ErrorCode::kDegenerateExponent);
    CHECK_THROWS_CODE(tauberian_map({1.0, 0.0, false}, 2.0), ErrorCode::kDegenerateExponent);
  }
}

TEST_CASE("synthetic transforms approach g") {
  // Integer alpha: the error is O(eps).
  const double eps = 1e-4;
  CHECK(std::abs(synthetic_transform(1.0, 2.0, 1.0, 2.0 * (1 - eps)) * eps - 1.0) < 1e-3);
  CHECK(std::abs(synthetic_transform(2.0, 1.5, 0.7, 1.5 * (1 - eps)) * eps * eps - 0.7) < 1e-3);
  // alpha = 1/2: leading correction zeta(1/2)/sqrt(pi) sqrt(eps).
  const double zeta_half = -1.4603545088095868;
  const double dev = synthetic_transform(0.5, 2.0, 1.0, 2.0 * (1 - eps)) * std::sqrt(eps) - 1.0;
  CHECK(dev == doctest::Approx(zeta_half / kSqrtPi * std::sqrt(eps)).epsilon(0.01));
  // Shrinks like sqrt(eps).
  const double eps2 = 1e-6;
  const double dev2 = synthetic_transform(0.5, 2.0, 1.0, 2.0 * (1 - eps2)) * std::sqrt(eps2) - 1.0;
  CHECK(std::abs(dev2) < 1e-3);
}

TEST_CASE("two-demand closed-form constants") {
  SUBCASE("Case 1: c1 = 2/15") {
    const WalkAnalysis a = analyze_walk(test::case1_walk());
    const TailForm t = constants_2demand({0.2, 0.3, 0.5}, a);
    CHECK(t.constant == doctest::Approx(2.0 / 15.0).epsilon(1e-14));
    CHECK(t.rate == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(std::abs(t.rate - 2.0 / 3.0) < 1e-12);
    CHECK(t.power == 0.0);
    CHECK(t.offset == 0);
    CHECK(t.provenance == Provenance::kClosedForm);
  }
  SUBCASE("Case 2: c2 from the other roots of D1") {
    const WalkAnalysis a = analyze_walk(test::case2_walk());
    const TailForm t = constants_2demand({0.2, 0.4, 0.4}, a);
    const double x1 = a.bp.x.t[0], x2 = a.bp.x.t[1];
    const double want = 0.4 * 1.0 * 0.5 / (std::sqrt(0.16 * (2 - x1) * (2 - x2)) * kSqrtPi);
    CHECK(t.constant == doctest::Approx(want).epsilon(1e-13));
    CHECK(t.constant == doctest::Approx(0.19947114020071635).epsilon(1e-12));
    CHECK(t.power == -0.5);
  }
  SUBCASE("Case 3 needs the oracle") {
    const WalkAnalysis a = analyze_walk(test::case3_walk());
    CHECK_THROWS_CODE(constants_2demand({0.2, 0.5, 0.3}, a), ErrorCode::kOracleRequired);
    const TruncatedSolution ts = solve_truncated(test::case3_walk(), 150);
    const TailForm t = constants_2demand({0.2, 0.5, 0.3}, a, &ts);
    CHECK(t.provenance == Provenance::kNumericEstimate);
    CHECK(t.power == -1.5);
    CHECK(t.constant > 0.0);
  }
}

TEST_CASE("numeric constant from the interplay formula") {
  SUBCASE("Case 1 agrees with 2/15 within 2%") {
    const WalkAnalysis a = analyze_walk(test::case1_walk());
    const TruncatedSolution ts = solve_truncated(test::case1_walk(), 200);
    const TailForm t = numeric_tail(a, ts);
    CHECK(t.provenance == Provenance::kNumericEstimate);
    CHECK(t.offset == 1);
    // Offset-1 constant times x_dom is the offset-0 constant.
    CHECK(t.constant * a.label.x_dom == doctest::Approx(2.0 / 15.0).epsilon(0.02));
    CHECK(t.error_band < 0.1 * t.constant);
  }
  SUBCASE("Case 2 agrees with the closed form within 2%") {
    const WalkAnalysis a = analyze_walk(test::case2_walk());
    const TruncatedSolution ts = solve_truncated(test::case2_walk(), 200);
    const TailForm t = numeric_tail(a, ts);
    CHECK(t.constant * 2.0 == doctest::Approx(0.19947114020071635).epsilon(0.02));
  }
  SUBCASE("Case 3 derivative estimate agrees with the c3 formula") {
    const WalkAnalysis a = analyze_walk(test::case3_walk());
    const TruncatedSolution ts = solve_truncated(test::case3_walk(), 200);
    const TailForm n = numeric_tail(a, ts);
    const TailForm c = constants_2demand({0.2, 0.5, 0.3}, a, &ts);
    CHECK(n.constant * a.label.x_dom == doctest::Approx(c.constant).epsilon(0.02));
  }
}

TEST_CASE("interplay pi1 matches the direct series inside the disk") {
  const WalkAnalysis a = analyze_walk(test::case1_walk());
  const TruncatedSolution ts = solve_truncated(test::case1_walk(), 200);
  // Points off the cut [t1, t2] and far enough inside x_dom = 1.5 that the
  // truncated series tail is negligible.
  for (double x : {-0.5, 0.1, 0.7, 0.9, 1.2, 1.3}) {
    const cplx direct = eval_gf(ts, GfKind::kPi1, x).value;
    const cplx via = pi1_from_interplay(a, ts, x);
    CHECK(std::abs(direct - via) < 1e-10 * std::abs(direct));
  }
  const cplx z(0.7, 0.6);
  CHECK(std::abs(eval_gf(ts, GfKind::kPi1, z).value - pi1_from_interplay(a, ts, z)) < 1e-10);
}
