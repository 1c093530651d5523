#include "support.hpp"

#include "kmt/numerics.hpp"

using namespace kmt;
using kmt::test::close_rel;

namespace {

bool poly_eq(const Polynomial& p, std::initializer_list<double> want, double tol = 1e-15) {
  int k = 0;
  for (double w : want) {
    if (std::abs(p[k] - w) > tol) return false;
    ++k;
  }
  return p.degree() < k;
}

}  // namespace

TEST_CASE("kernel coefficients") {
  SUBCASE("two-demand") {
    const KernelSystem ks = build_kernel(two_demand(0.2, 0.3, 0.5));
    CHECK(poly_eq(ks.in_y.a, {0, 0, 0.2}));
    CHECK(poly_eq(ks.in_y.b, {0.3, -1}));
    CHECK(poly_eq(ks.in_y.c, {0, 0.5}));
  }
  SUBCASE("uniform interior") {
    WalkSpec s = two_demand(0.2, 0.3, 0.5);
    for (auto& row : s.interior) row.fill(1.0 / 9.0);
    const KernelSystem ks = build_kernel(s);
    const double n = 1.0 / 9.0;
    CHECK(poly_eq(ks.in_y.a, {n, n, n}));
    CHECK(poly_eq(ks.in_y.b, {n, -8 * n, n}));
    CHECK(poly_eq(ks.in_y.c, {n, n, n}));
  }
  SUBCASE("only upward moves") {
    WalkSpec s = two_demand(0.2, 0.3, 0.5);
    s.interior = {};
    s.interior[1][2] = 1.0;
    CHECK_THROWS_CODE(build_kernel(s), ErrorCode::kSingularKernel);
  }
}

TEST_CASE("expanding the kernel recovers every interior probability") {
  test::WalkGenerator gen(21);
  for (int k = 0; k < 50; ++k) {
    const WalkSpec s = gen.next();
    const KernelSystem ks = build_kernel(s);
    const Polynomial* rows[3] = {&ks.in_y.c, &ks.in_y.b, &ks.in_y.a};  // y^0, y^1, y^2
    for (int j = -1; j <= 1; ++j) {
      for (int i = -1; i <= 1; ++i) {
        double want = s.p(i, j);
        if (i == 0 && j == 0) want -= 1.0;
        CHECK((*rows[j + 1])[i + 1] == doctest::Approx(want).epsilon(1e-15));
      }
    }
    // Boundary polynomials.
    CHECK(ks.h1_1[2] == s.p_h(1, 1));
    CHECK(ks.h1_0[1] == doctest::Approx(s.p_h(0, 0) - 1.0));
    CHECK(ks.h2_1[0] == s.p_v(1, -1));
  }
}

TEST_CASE("branch points of the two-demand family") {
  SUBCASE("Case 3 instance: D1 cubic and x3 in (2.819, 2.8205)") {
    const KernelSystem ks = build_kernel(test::case3_walk());
    CHECK(poly_eq(ks.d1, {0.25, -1, 1, -0.24}, 1e-15));
    const BranchPoints bp = branch_points(ks);
    CHECK(bp.x.degree == 3);
    CHECK(bp.x.ordered);
    CHECK(bp.x.t[2] > 2.819);
    CHECK(bp.x.t[2] < 2.8205);
    CHECK(std::isinf(bp.x.t[3]));
    CHECK(ks.d1(bp.x.t[2]) == doctest::Approx(0.0).epsilon(1e-14));
    // Certified bracket: D1 changes sign across it.
    CHECK(ks.d1(2.819) * ks.d1(2.821) < 0.0);
  }
  SUBCASE("degree 3 always") {
    for (double l : {0.1, 0.2, 0.3}) {
      const BranchPoints bp = branch_points(build_kernel(two_demand(l, 0.4, 0.6 - l)));
      CHECK(bp.x.degree == 3);
      CHECK(bp.y.degree == 3);
    }
  }
  SUBCASE("double root is genus 0") {
    // (x - 1/2)^2 (x - 3) has a double root.
    const BranchPointSet s = branch_point_set(Polynomial{-0.75, 3.25, -4, 1});
    CHECK(s.multiple);
    CHECK_THROWS_CODE(require_genus_one(s, "x"), ErrorCode::kGenusZero);
  }
  SUBCASE("complex roots violate the ordering") {
    const BranchPointSet s = branch_point_set(Polynomial{1, 0, 1, 0, 1});
    CHECK_FALSE(s.ordered);
    CHECK_THROWS_CODE(require_ordering(s, "x"), ErrorCode::kOrderingViolated);
  }
}

TEST_CASE("branch evaluation at reference points") {
  const KernelSystem ks = build_kernel(test::case1_walk());
  const BranchPoints bp = branch_points(ks);
  SUBCASE("x = 1 gives {1, 2.5}") {
    const BranchValues v = eval_branch(ks, bp, 1.0);
    CHECK(std::abs(v.y0 - 1.0) < 1e-14);
    CHECK(std::abs(v.y1 - 2.5) < 1e-14);
  }
  SUBCASE("x between x2 and x3 has two real branches") {
    const double x = 0.5 * (bp.x.t[1] + bp.x.t[2]);
    const BranchValues v = eval_branch(ks, bp, x);
    CHECK(ks.d1(x) > 0.0);
    CHECK(std::abs(v.y0.imag()) < 1e-15);
    CHECK(std::abs(v.y1.imag()) < 1e-15);
    CHECK(std::abs(v.y0) <= std::abs(v.y1));
  }
  SUBCASE("x3 is a double root") {
    const double x3 = bp.x.t[2];
    const BranchValues v = eval_branch(ks, bp, x3);
    const double want = -ks.in_y.b(x3) / (2.0 * ks.in_y.a(x3));
    CHECK(v.y0.real() == doctest::Approx(want).epsilon(1e-12));
    CHECK(v.y1.real() == doctest::Approx(want).epsilon(1e-12));
  }
  SUBCASE("cut interior throws") {
    CHECK_THROWS_CODE(eval_branch(ks, bp, bp.x.t[2] + 1.0), ErrorCode::kOnCut);
    CHECK_THROWS_CODE(eval_branch(ks, bp, 0.5 * (bp.x.t[0] + bp.x.t[1])), ErrorCode::kOnCut);
    CHECK_NOTHROW(eval_branch(ks, bp, cplx(bp.x.t[2] + 1.0, 1e-6)));
  }
  SUBCASE("y-direction: X0(1) = 1 and X1(1) = mu1/lambda") {
    const BranchValues v = x_branches(ks, bp, 1.0);
    CHECK(std::abs(v.y0 - 1.0) < 1e-14);
    CHECK(std::abs(v.y1 - 1.5) < 1e-14);
    const double y3 = bp.y.t[2];
    const BranchValues w = x_branches(ks, bp, y3);
    CHECK(std::abs(w.y0 - w.y1) < 1e-6);
  }
  SUBCASE("Vieta on |y| = 1.1") {
    for (int k = 0; k < 64; ++k) {
      const cplx y = std::polar(1.1, 2.0 * M_PI * (k + 0.5) / 64.0);
      const BranchValues v = x_branches(ks, bp, y);
      const cplx want = ks.in_x.c(y) / ks.in_x.a(y);
      CHECK(std::abs(v.y0 * v.y1 - want) < 1e-12 * (1.0 + std::abs(want)));
    }
  }
}

TEST_CASE("random stable genus-1 walks") {
  test::WalkGenerator gen(2024);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  int checked = 0;
  for (int w = 0; w < 200; ++w) {
    const WalkSpec s = gen.next_stable_genus1();
    const KernelSystem ks = build_kernel(s);
    const BranchPoints bp = branch_points(ks);
    ++checked;

    CHECK_MESSAGE(bp.x.ordered, bp.x.diagnostic);
    CHECK_MESSAGE(bp.y.ordered, bp.y.diagnostic);

    // Vieta for the discriminant roots.
    for (const BranchPointSet* set : {&bp.x, &bp.y}) {
      const Polynomial& d = set == &bp.x ? ks.d1 : ks.d2;
      const int n = d.degree(1e-14);
      cplx sum = 0.0, prod = 1.0;
      for (cplx r : set->roots) sum += r, prod *= r;
      const double lead = d[n];
      CHECK(std::abs(sum + d[n - 1] / lead) < 1e-10 * (1.0 + std::abs(d[n - 1] / lead)));
      const double p0 = (n % 2 == 0 ? 1.0 : -1.0) * d[0] / lead;
      CHECK(std::abs(prod - p0) < 1e-10 * (1.0 + std::abs(p0)));
    }

    // Kernel residual and min-modulus selection, 5 points per walk.
    const AnalyticBranch yb = y_branch(ks, bp);
    for (int k = 0; k < 5; ++k) {
      const cplx x(2.0 * u(gen.rng()), 2.0 * u(gen.rng()));
      if (yb.distance_to_cut(x) < 1e-6) continue;
      const BranchValues v = yb.eval(x);
      CHECK(std::abs(ks.h(x, v.y0)) / (1.0 + std::norm(x)) < 1e-10);
      if (!v.y1_infinite) {
        CHECK(std::abs(ks.h(x, v.y1)) / (1.0 + std::norm(x)) < 1e-10);
        CHECK(std::abs(v.y0) <= std::abs(v.y1) * (1.0 + 1e-12));
      }
    }
  }
  CHECK(checked == 200);
}

TEST_CASE("kernel residual on 1000 points of the cut plane") {
  const KernelSystem ks = build_kernel(test::case3_walk());
  const BranchPoints bp = branch_points(ks);
  const AnalyticBranch yb = y_branch(ks, bp);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-4.0, 4.0);
  int n = 0;
  double worst = 0.0;
  while (n < 1000) {
    const cplx x(u(rng), u(rng));
    if (yb.distance_to_cut(x) < 1e-8) continue;
    const BranchValues v = yb.eval(x);
    worst = std::max(worst, std::abs(ks.h(x, v.y0)) / (1.0 + std::norm(x)));
    ++n;
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("Y0 is continuous along a path in the cut plane") {
  const KernelSystem ks = build_kernel(test::case2_walk());
  const BranchPoints bp = branch_points(ks);
  const AnalyticBranch yb = y_branch(ks, bp);
  BranchSession session;
  // Circle of radius 1.3: it passes between [x1, x2] and [x3, inf).
  const int m = 4000;
  cplx prev = yb.eval(cplx(1.3, 0.0), session).y0;
  double worst = 0.0;
  for (int k = 1; k <= m; ++k) {
    const cplx x = std::polar(1.3, 2.0 * M_PI * k / m);
    const cplx y = yb.eval(x, session).y0;
    worst = std::max(worst, std::abs(y - prev));
    prev = y;
  }
  // Path step is 1.3 * 2 pi / 4000 ~ 2e-3; |Y0'| stays well below 10 here.
  CHECK(worst < 2e-2);
}

TEST_CASE("kernel dump is machine readable") {
  const KernelSystem ks = build_kernel(test::case1_walk());
  const nlohmann::json j = dump_kernel(ks, branch_points(ks));
  CHECK(j.contains("D1"));
  CHECK(j.dump().find("inf") == std::string::npos);
}
