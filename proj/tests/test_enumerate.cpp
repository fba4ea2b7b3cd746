#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "helpers.hpp"
#include "tangency.hpp"
#include "wall.hpp"

using namespace refinv;
using namespace refinv::fixtures;
using doctest::Approx;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

Errc code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return Errc::Ok;
}

// Max log-scale mismatch between the curve's boundary data and the target.
double roundtrip_error(const DegreeContext& ctx, const BoundaryConstraint& w,
                       const RationalCurve& c) {
  BoundaryConstraint got = boundary_data(ctx, c);
  double worst = 0.0;
  for (std::size_t i = 0; i < w.xi.size(); ++i)
    worst = std::max(worst, std::fabs(std::log(got.xi[i]) - std::log(w.xi[i])));
  return worst;
}

}  // namespace

TEST_SUITE("enumerate") {

TEST_CASE("conic system shape and closed-form solution") {
  DegreeContext ctx = make_context(conic_raw());
  for (auto [u, v] : {std::pair{2.0, 3.0}, std::pair{0.7, 1.9}, std::pair{5.0, 0.3}}) {
    CAPTURE(u);
    CAPTURE(v);
    BoundaryConstraint w;
    w.xi = {kNaN, u, v};
    w = complete(ctx, w);

    TangencySystem sys = build_system(ctx, w);
    CHECK(sys.comp_slot == 0);
    CHECK(sys.pin0 == 1);
    CHECK(sys.pin1 == 2);
    CHECK(sys.free_slots.empty());
    CHECK(sys.unknowns() == 2);
    CHECK(sys.eq_slots == std::vector<int>{1, 2});

    std::vector<RationalCurve> sols = solve_all(sys, 7);
    REQUIRE(sols.size() == 1);
    const RationalCurve& c = sols[0];
    // In this gauge x = a t^2, y = b (t-1)^2, so xi_bottom = a and
    // xi_left = 1/b pin the coefficients directly.
    CHECK(c.a == Approx(v).epsilon(1e-10));
    CHECK(c.b == Approx(1.0 / u).epsilon(1e-10));
    CHECK(c.points[0].at_inf);
    CHECK(c.points[1].t == Approx(0.0));
    CHECK(c.points[2].t == Approx(1.0));
    CHECK(roundtrip_error(ctx, w, c) < 1e-10);

    VerifyReport rep = verify_solution(sys, c);
    CHECK(rep.ok);
    CHECK(rep.reasons.empty());
    CHECK(rep.max_residual < 1e-10);
    CHECK(rep.heldout_residual < 1e-10);
    CHECK(rep.node_count == 0);
    CHECK(rep.node_target == 0);
    CHECK(rep.qi_certified);
  }
}

TEST_CASE("solve_all is deterministic in the seed") {
  DegreeContext ctx = make_context(quartic_mixed_raw());
  BoundaryConstraint w = sample_chamber(ctx, 21);
  TangencySystem sys = build_system(ctx, w);
  CHECK(sys.unknowns() == 3);

  std::vector<RationalCurve> a = solve_all(sys, 1);
  std::vector<RationalCurve> b = solve_all(sys, 1);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].a == b[i].a);  // bitwise: same seed, same multistart stream
    CHECK(a[i].b == b[i].b);
    REQUIRE(a[i].points.size() == b[i].points.size());
    for (std::size_t j = 0; j < a[i].points.size(); ++j) {
      CHECK(a[i].points[j].at_inf == b[i].points[j].at_inf);
      CHECK(a[i].points[j].t == b[i].points[j].t);
    }
  }

  // A different seed explores differently but lands on the same curves.
  std::vector<RationalCurve> c = solve_all(sys, 99);
  REQUIRE(c.size() == a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(c[i].a == Approx(a[i].a).epsilon(1e-8));
    CHECK(c[i].b == Approx(a[i].b).epsilon(1e-8));
  }
}

TEST_CASE("mixed quartic: two real curves through a sampled constraint") {
  DegreeContext ctx = make_context(quartic_mixed_raw());
  BoundaryConstraint w = sample_chamber(ctx, 21);
  TangencySystem sys = build_system(ctx, w);

  std::vector<RationalCurve> sols = solve_all(sys, 1);
  REQUIRE(sols.size() == 2);

  // The free marked point separates the two solutions.
  double t3_a = sols[0].points[3].t, t3_b = sols[1].points[3].t;
  CHECK(std::fabs(t3_a - t3_b) > 1e-3);

  for (const RationalCurve& c : sols) {
    CHECK(roundtrip_error(ctx, w, c) < 1e-9);
    VerifyReport rep = verify_solution(sys, c);
    CHECK(rep.ok);
    CHECK(rep.node_count == 3);  // every curve carries its full node budget
    CHECK(rep.node_target == 3);
    CHECK(rep.qi_certified);
    CHECK(find_nodes(ctx, c).size() == 3);
  }
}

TEST_CASE("square: two real curves; quartic: one") {
  DegreeContext sq = make_context(square_raw());
  BoundaryConstraint wsq = sample_chamber(sq, 5);
  TangencySystem sys_sq = build_system(sq, wsq);
  std::vector<RationalCurve> sols_sq = solve_all(sys_sq, 1);
  REQUIRE(sols_sq.size() == 2);
  for (const RationalCurve& c : sols_sq) {
    CHECK(roundtrip_error(sq, wsq, c) < 1e-9);
    CHECK(verify_solution(sys_sq, c).ok);
    CHECK(find_nodes(sq, c).size() == 1);
  }

  DegreeContext qu = make_context(quartic_raw());
  BoundaryConstraint wqu = sample_chamber(qu, 11);
  TangencySystem sys_qu = build_system(qu, wqu);
  std::vector<RationalCurve> sols_qu = solve_all(sys_qu, 1);
  REQUIRE(sols_qu.size() == 1);
  CHECK(roundtrip_error(qu, wqu, sols_qu[0]) < 1e-9);
  CHECK(verify_solution(sys_qu, sols_qu[0]).ok);
  CHECK(find_nodes(qu, sols_qu[0]).size() == 3);
}

TEST_CASE("newton_correct polishes a perturbed solution") {
  DegreeContext ctx = make_context(quartic_mixed_raw());
  BoundaryConstraint w = sample_chamber(ctx, 21);
  TangencySystem sys = build_system(ctx, w);
  std::vector<RationalCurve> sols = solve_all(sys, 1);
  REQUIRE(sols.size() == 2);

  RationalCurve guess = sols[0];
  guess.a *= 1.02;
  guess.b *= 0.98;
  guess.points[3].t += 0.005;
  auto corrected = newton_correct(sys, guess, {});
  REQUIRE(corrected.has_value());
  CHECK(corrected->a == Approx(sols[0].a).epsilon(1e-8));
  CHECK(corrected->b == Approx(sols[0].b).epsilon(1e-8));
  CHECK(corrected->points[3].t == Approx(sols[0].points[3].t).epsilon(1e-8));
}

TEST_CASE("verify_solution reports structured failures") {
  DegreeContext ctx = make_context(conic_raw());
  BoundaryConstraint w;
  w.xi = {kNaN, 2.0, 3.0};
  w = complete(ctx, w);
  TangencySystem sys = build_system(ctx, w);
  std::vector<RationalCurve> sols = solve_all(sys, 7);
  REQUIRE(sols.size() == 1);

  RationalCurve off = sols[0];
  off.a *= 1.001;  // violate the bottom-slot equation
  VerifyReport bad = verify_solution(sys, off);
  CHECK_FALSE(bad.ok);
  CHECK_FALSE(bad.reasons.empty());
  CHECK(bad.max_residual > 1e-9);

  // Colliding marked points are flagged as a failed gap check rather than a
  // crash.
  DegreeContext mixed = make_context(quartic_mixed_raw());
  BoundaryConstraint wm = sample_chamber(mixed, 21);
  TangencySystem sysm = build_system(mixed, wm);
  std::vector<RationalCurve> ms = solve_all(sysm, 1);
  REQUIRE(ms.size() == 2);
  RationalCurve squeezed = ms[0];
  squeezed.points[3].t = 1.0 + 1e-9;  // nearly on the pinned slot at t = 1
  VerifyReport gap = verify_solution(sysm, squeezed);
  CHECK_FALSE(gap.ok);
  CHECK(gap.min_param_gap <= 1e-8);
}

TEST_CASE("convergence tolerance scales with the equation size near walls") {
  // Crossing the chamber wall between the seed-21 and seed-22 constraints,
  // one branch's coefficient log grows to about 49, so residual terms reach
  // the hundreds and an absolute 1e-12 stopping rule can never be met.  The
  // solver has to keep finding both curves right next to the wall.
  DegreeContext ctx = make_context(quartic_mixed_raw());
  BoundaryConstraint from = sample_chamber(ctx, 21);
  BoundaryConstraint to = sample_chamber(ctx, 22);
  ConstraintPath path = make_path(ctx, from, to);

  for (double s : {0.1005, 0.1015, 0.1025}) {
    CAPTURE(s);
    TangencySystem sys = build_system(ctx, path.at(s));
    std::vector<RationalCurve> sols = solve_all(sys, 3);
    CHECK(sols.size() == 2);
    for (const RationalCurve& c : sols)
      CHECK(roundtrip_error(ctx, path.at(s), c) < 1e-8);
  }
}

TEST_CASE("solver budget validation") {
  DegreeContext ctx = make_context(conic_raw());
  BoundaryConstraint w;
  w.xi = {kNaN, 2.0, 3.0};
  w = complete(ctx, w);
  TangencySystem sys = build_system(ctx, w);
  SolveOptions opts;
  opts.starts = -5;
  CHECK(code_of([&] { solve_all(sys, 1, opts); }) == Errc::BudgetExceeded);
}

}  // TEST_SUITE
