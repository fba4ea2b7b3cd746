#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include "curve.hpp"
#include "helpers.hpp"

using namespace refinv;
using namespace refinv::fixtures;
using doctest::Approx;

namespace {

bool close(cplx got, cplx want, double tol = 1e-9) {
  return std::abs(got - want) <= tol * (1.0 + std::abs(want));
}

RationalCurve conic_curve(double a, double b) {
  RationalCurve c;
  c.a = a;
  c.b = b;
  c.points = {{0.0, true}, {0.0, false}, {1.0, false}};
  return c;
}

RationalCurve quartic_curve(double a, double b) { return conic_curve(a, b); }

// Mixed quartic: x(t) = a (t-t2)^4 / t^2, y(t) = b (t-t3)^4 / t^2.
RationalCurve mixed_curve(double a, double b, double t2, double t3) {
  RationalCurve c;
  c.a = a;
  c.b = b;
  c.points = {{0.0, false}, {0.0, true}, {t2, false}, {t3, false}};
  return c;
}

std::vector<NodeRecord> sorted_nodes(std::vector<NodeRecord> nodes) {
  std::sort(nodes.begin(), nodes.end(), [](const NodeRecord& p, const NodeRecord& q) {
    cplx ep = p.s + p.t, eq = q.s + q.t;
    if (ep.real() != eq.real()) return ep.real() < eq.real();
    return (p.s * p.t).real() < (q.s * q.t).real();
  });
  return nodes;
}

// Every reported node must actually solve x(s) = x(t), y(s) = y(t) with the
// stored common image.
void check_node_residual(const DegreeContext& ctx, const RationalCurve& c,
                         const NodeRecord& n) {
  auto [xs, ys] = evaluate(ctx, c, n.s);
  auto [xt, yt] = evaluate(ctx, c, n.t);
  CHECK(std::abs(xs - xt) <= 1e-7 * (1.0 + std::abs(xs)));
  CHECK(std::abs(ys - yt) <= 1e-7 * (1.0 + std::abs(ys)));
  CHECK(std::abs(n.s - n.t) > 1e-8);
  CHECK(close(xs, n.x, 1e-7));
  CHECK(close(ys, n.y, 1e-7));
}

struct ENode {
  double e1, e2;
};

// Bijective match of found nodes against expected symmetric-function pairs;
// sorting is unstable when several nodes share an e1 value up to noise.
void match_enodes(const std::vector<NodeRecord>& nodes, std::vector<ENode> want,
                  double tol = 1e-8) {
  REQUIRE(nodes.size() == want.size());
  std::vector<bool> used(want.size(), false);
  for (const NodeRecord& n : nodes) {
    cplx e1 = n.s + n.t, e2 = n.s * n.t;
    bool found = false;
    for (std::size_t i = 0; i < want.size() && !found; ++i) {
      if (used[i]) continue;
      if (std::abs(e1 - want[i].e1) <= tol * (1.0 + std::abs(want[i].e1)) &&
          std::abs(e2 - want[i].e2) <= tol * (1.0 + std::abs(want[i].e2))) {
        used[i] = true;
        found = true;
      }
    }
    CAPTURE(e1.real());
    CAPTURE(e2.real());
    CHECK(found);
  }
}

// Closed-form node set of the mixed quartic, eliminated by hand.  Writing
// x(s) = x(t) as ((s-t2)^2/s)^2 = ((t-t2)^2/t)^2 splits into a sign choice
// eps_x, and likewise for y; (eps_x, eps_y) = (+,+) forces s = t, while the
// other three sign patterns give one node each in e1 = s+t, e2 = st:
//   (+,-): e2 = t3^2 scaled ... with t2 = 1 the three nodes are
//   (4 t3/(1+t3^2), 1), (4 t3^2/(1+t3^2), t3^2), (4 t3/(1+t3), t3).
std::vector<ENode> mixed_node_oracle(double t3) {
  std::vector<ENode> v{{4.0 * t3 / (1.0 + t3 * t3), 1.0},
                       {4.0 * t3 * t3 / (1.0 + t3 * t3), t3 * t3},
                       {4.0 * t3 / (1.0 + t3), t3}};
  std::sort(v.begin(), v.end(), [](ENode a, ENode b) {
    return a.e1 != b.e1 ? a.e1 < b.e1 : a.e2 < b.e2;
  });
  return v;
}

}  // namespace

TEST_SUITE("nodes") {

TEST_CASE("the conic is embedded: no double points") {
  DegreeContext ctx = make_context(conic_raw());
  CHECK(find_nodes(ctx, conic_curve(3.0, 0.5)).empty());
  CHECK(find_nodes(ctx, conic_curve(1.0, 1.0)).empty());
}

TEST_CASE("quartic: three isolated real double points, frozen values") {
  DegreeContext ctx = make_context(quartic_raw());
  for (auto [a, b] : {std::pair{1.0, 1.0}, std::pair{3.0, 0.5}}) {
    RationalCurve c = quartic_curve(a, b);
    std::vector<NodeRecord> nodes = sorted_nodes(find_nodes(ctx, c));
    REQUIRE(nodes.size() == 3);

    // Symmetric functions of the parameter pairs, eliminated by hand from
    // s^4 = t^4, (s-1)^4 = (t-1)^4.
    const double e1[3] = {0.0, 1.0, 2.0};
    const double e2[3] = {1.0, 0.5, 2.0};
    const cplx img_x[3] = {a, -a / 4.0, -4.0 * a};
    const cplx img_y[3] = {-4.0 * b, -b / 4.0, b};
    const int quadrant[3] = {3, 2, 1};  // (+,-), (-,-), (-,+)

    for (int i = 0; i < 3; ++i) {
      const NodeRecord& n = nodes[static_cast<std::size_t>(i)];
      CHECK(n.kind == NodeKind::Elliptic);
      CHECK(close(n.s + n.t, e1[i], 1e-9));
      CHECK(close(n.s * n.t, e2[i], 1e-9));
      // Isolated real double point: conjugate parameter pair, real image.
      CHECK(std::abs(n.s - std::conj(n.t)) < 1e-8);
      CHECK(std::abs(n.x.imag()) < 1e-8);
      CHECK(std::abs(n.y.imag()) < 1e-8);
      CHECK(close(n.x, img_x[i], 1e-9));
      CHECK(close(n.y, img_y[i], 1e-9));
      CHECK(n.quadrant == quadrant[i]);
      check_node_residual(ctx, c, n);
    }
  }
}

TEST_CASE("square: the single node crosses from hyperbolic to elliptic at t_B = 1") {
  DegreeContext ctx = make_context(square_raw());
  // Gauge: x(t) = a (t-1)^2, y(t) = b (t-t_B)^2 / t^2.  Eliminating gives the
  // lone node e1 = 2, e2 = t_B, real crossing iff t_B < 1.
  auto square_curve = [](double a, double b, double tb) {
    RationalCurve c;
    c.a = a;
    c.b = b;
    c.points = {{0.0, true}, {0.0, false}, {1.0, false}, {tb, false}};
    return c;
  };

  {
    RationalCurve c = square_curve(2.0, 3.0, 0.5);
    std::vector<NodeRecord> nodes = find_nodes(ctx, c);
    REQUIRE(nodes.size() == 1);
    const NodeRecord& n = nodes[0];
    CHECK(n.kind == NodeKind::Hyperbolic);
    CHECK(close(n.s + n.t, 2.0, 1e-9));
    CHECK(close(n.s * n.t, 0.5, 1e-9));
    CHECK(std::abs(n.s.imag()) < 1e-9);  // both parameters real
    CHECK(std::abs(n.t.imag()) < 1e-9);
    // Even exponents keep the positive branch positive: a real crossing of
    // the branch with itself lives in the (+,+) quadrant.
    CHECK(n.quadrant == 0);
    CHECK(close(n.x, 2.0 * (1.0 - 0.5), 1e-9));  // x = a (1 - t_B)
    check_node_residual(ctx, c, n);
  }

  {
    RationalCurve c = square_curve(2.0, 3.0, 1.5);
    std::vector<NodeRecord> nodes = find_nodes(ctx, c);
    REQUIRE(nodes.size() == 1);
    const NodeRecord& n = nodes[0];
    CHECK(n.kind == NodeKind::Elliptic);
    CHECK(close(n.s + n.t, 2.0, 1e-9));
    CHECK(close(n.s * n.t, 1.5, 1e-9));
    CHECK(std::abs(n.s - std::conj(n.t)) < 1e-8);
    // x = a (1 - t_B) = -a/2 < 0, y = -b/2 < 0.
    CHECK(n.quadrant == 2);
    CHECK(close(n.x, -1.0, 1e-9));
    CHECK(close(n.y, -1.5, 1e-9));
    check_node_residual(ctx, c, n);
  }
}

TEST_CASE("mixed quartic against the hand elimination") {
  DegreeContext ctx = make_context(quartic_mixed_raw());
  for (double t3 : {2.0, 0.5, -2.0, 0.9357}) {
    CAPTURE(t3);
    RationalCurve c = mixed_curve(1.3, 0.7, 1.0, t3);
    std::vector<NodeRecord> nodes = sorted_nodes(find_nodes(ctx, c));
    std::vector<ENode> want = mixed_node_oracle(t3);
    REQUIRE(nodes.size() == want.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      CHECK(close(nodes[i].s + nodes[i].t, want[i].e1, 1e-8));
      CHECK(close(nodes[i].s * nodes[i].t, want[i].e2, 1e-8));
      double disc = want[i].e1 * want[i].e1 - 4.0 * want[i].e2;
      CHECK(nodes[i].kind == (disc > 0 ? NodeKind::Hyperbolic : NodeKind::Elliptic));
      check_node_residual(ctx, c, nodes[i]);
    }
  }

  // t3 = -2 produces the one genuinely hyperbolic case of the family
  // (e1 = 8, e2 = -2), with both branches on the positive quadrant.
  RationalCurve c = mixed_curve(1.0, 1.0, 1.0, -2.0);
  std::vector<NodeRecord> nodes = sorted_nodes(find_nodes(ctx, c));
  REQUIRE(nodes.size() == 3);
  CHECK(nodes[2].kind == NodeKind::Hyperbolic);
  CHECK(nodes[2].quadrant == 0);
  CHECK(nodes[0].kind == NodeKind::Elliptic);
  CHECK(nodes[1].kind == NodeKind::Elliptic);
}

TEST_CASE("poles and marked points do not fake double points") {
  // Clearing denominators makes every same-type pair of marked parameters a
  // root of the eliminated system; the solver has to screen those artifacts
  // out.  This configuration (double pole at t = 0 shared by x and y) used to
  // surface a junk candidate near e1 = e2 = 0 and abort as a degenerate
  // curve.
  DegreeContext ctx = make_context(quartic_mixed_raw());
  RationalCurve c = mixed_curve(1.0, 1.0, 1.0, 0.9357);
  std::vector<NodeRecord> nodes = find_nodes(ctx, c);
  REQUIRE(nodes.size() == 3);  // exactly the oracle set, no duplicates
  for (const NodeRecord& n : nodes) {
    CHECK(n.kind == NodeKind::Elliptic);
    // No node parameter may sit on a marked point or pole.
    for (const CurvePoint& p : c.points) {
      if (p.at_inf) continue;
      CHECK(std::abs(n.s - cplx(p.t)) > 1e-4);
      CHECK(std::abs(n.t - cplx(p.t)) > 1e-4);
    }
  }

  // Conjugate near-real copies must merge: re-running over a small grid of
  // t3 never yields more than the three true nodes.
  for (double t3 : {0.93, 0.9357, 0.94, 1.07}) {
    CHECK(find_nodes(ctx, mixed_curve(1.0, 1.0, 1.0, t3)).size() == 3);
  }
}

TEST_CASE("sextic: ten isolated double points from the root-of-unity oracle") {
  // x = a t^6, y = b (t-1)^6: here s^6 = t^6 and (s-1)^6 = (t-1)^6 solve in
  // closed form: s = zeta t, s - 1 = mu (t - 1) with zeta, mu nontrivial 6th
  // roots of unity, zeta != mu, modulo the swap (zeta, mu) -> (1/zeta, 1/mu).
  DegreeContext ctx = make_context({{6, 6}, {-6, 0}, {0, -6}});
  CHECK(ctx.metrics.interior == 10);

  RationalCurve c;
  c.a = 1.0;
  c.b = 1.0;
  c.points = {{0.0, true}, {0.0, false}, {1.0, false}};

  std::vector<ENode> want;
  constexpr double kPi = 3.14159265358979323846;
  for (int j = 1; j < 6; ++j) {
    for (int m = 1; m < 6; ++m) {
      if (j == m) continue;
      if (std::make_pair((6 - j) % 6, (6 - m) % 6) < std::make_pair(j, m))
        continue;  // swap representative
      cplx zeta = std::polar(1.0, 2.0 * kPi * j / 6.0);
      cplx mu = std::polar(1.0, 2.0 * kPi * m / 6.0);
      cplx t = (1.0 - mu) / (zeta - mu);
      cplx s = zeta * t;
      want.push_back({(s + t).real(), (s * t).real()});
      CHECK(std::abs((s + t).imag()) < 1e-12);  // all ten nodes are real here
    }
  }
  REQUIRE(want.size() == 10);

  std::vector<NodeRecord> nodes = find_nodes(ctx, c);
  match_enodes(nodes, want, 1e-7);
  for (const NodeRecord& n : nodes) check_node_residual(ctx, c, n);
}

TEST_CASE("complex conjugate pairs are recorded once") {
  // Large square degree: x = a (t-1)^4, y = b (t-t_B)^4 / t^4 has nine double
  // points; for generic t_B some have non-real images and come in conjugate
  // parameter pairs.
  DegreeContext ctx = make_context({{4, 0}, {0, 4}, {-4, 0}, {0, -4}});
  CHECK(ctx.metrics.interior == 9);

  RationalCurve c;
  c.a = 1.0;
  c.b = 1.0;
  c.points = {{0.0, true}, {0.0, false}, {1.0, false}, {0.7, false}};

  std::vector<NodeRecord> nodes = find_nodes(ctx, c);
  int real_nodes = 0, complex_pairs = 0;
  for (const NodeRecord& n : nodes) {
    check_node_residual(ctx, c, n);
    if (n.kind == NodeKind::ComplexPair) {
      ++complex_pairs;
      // Non-real image, no quadrant label.
      CHECK(std::max(std::abs(n.x.imag()), std::abs(n.y.imag())) > 1e-9);
      CHECK(n.quadrant == -1);
    } else {
      ++real_nodes;
      CHECK(std::abs(n.x.imag()) < 1e-8);
      CHECK(std::abs(n.y.imag()) < 1e-8);
      CHECK(n.quadrant >= 0);
    }
  }
  // Conjugate pairs count twice in the double-point budget.
  CHECK(real_nodes + 2 * complex_pairs == 9);
  CHECK(complex_pairs > 0);
}

}  // TEST_SUITE
