#include "curve.hpp"

#include <cmath>

namespace refinv {

namespace {

cplx ipow(cplx base, i64 e) {
  if (e < 0) return 1.0 / ipow(base, -e);
  cplx r = 1.0;
  while (e > 0) {
    if (e & 1) r *= base;
    base *= base;
    e >>= 1;
  }
  return r;
}

double ipow(double base, i64 e) {
  if (e < 0) return 1.0 / ipow(base, -e);
  double r = 1.0;
  while (e > 0) {
    if (e & 1) r *= base;
    base *= base;
    e >>= 1;
  }
  return r;
}

void check_curve(const DegreeContext& ctx, const RationalCurve& curve) {
  if (curve.points.size() != ctx.slots.size())
    fail(Errc::SlotMismatch,
         "curve has " + std::to_string(curve.points.size()) + " boundary points for " +
             std::to_string(ctx.slots.size()) + " slots");
}

// Exponent of the factor (t - t_j) inside the side coordinate of slot i:
// the side direction paired with minus the degree entry of slot j.
i64 side_exponent(const DegreeContext& ctx, int slot_i, int slot_j) {
  IVec d = ctx.poly.sides[static_cast<std::size_t>(ctx.slots[static_cast<std::size_t>(slot_i)].side)].dir;
  IVec a = ctx.degree.entries[static_cast<std::size_t>(ctx.slots[static_cast<std::size_t>(slot_j)].entry)].a;
  return -dot(d, a);
}

}  // namespace

std::pair<cplx, cplx> evaluate(const DegreeContext& ctx, const RationalCurve& curve,
                               cplx t) {
  check_curve(ctx, curve);
  cplx x = curve.a, y = curve.b;
  for (std::size_t i = 0; i < curve.points.size(); ++i) {
    if (curve.points[i].at_inf) continue;
    const IVec a = ctx.degree.entries[static_cast<std::size_t>(ctx.slots[i].entry)].a;
    cplx f = t - curve.points[i].t;
    x *= ipow(f, -a.x);
    y *= ipow(f, -a.y);
  }
  return {x, y};
}

BoundaryConstraint boundary_data(const DegreeContext& ctx, const RationalCurve& curve) {
  check_curve(ctx, curve);
  if (!(curve.a > 0.0) || !(curve.b > 0.0))
    fail(Errc::NotPositive, "boundary data is defined for the positive branch (a, b > 0)");
  const double la = std::log(curve.a), lb = std::log(curve.b);

  BoundaryConstraint w;
  w.xi.assign(ctx.slots.size(), 0.0);
  for (std::size_t i = 0; i < ctx.slots.size(); ++i) {
    IVec d = ctx.poly.sides[static_cast<std::size_t>(ctx.slots[i].side)].dir;
    double lxi = static_cast<double>(d.x) * la + static_cast<double>(d.y) * lb;
    if (!curve.points[i].at_inf) {
      for (std::size_t j = 0; j < ctx.slots.size(); ++j) {
        if (j == i || curve.points[j].at_inf) continue;
        double gap = curve.points[i].t - curve.points[j].t;
        if (gap == 0.0)
          fail(Errc::ChartDegenerate,
               "marked points of slots " + std::to_string(i) + " and " + std::to_string(j) +
                   " coincide; boundary limits degenerate");
        // The factor (t - t_i) itself enters with exponent d.(-A_i) = 0, so
        // the limit is the product over the remaining factors.
        lxi += static_cast<double>(side_exponent(ctx, static_cast<int>(i), static_cast<int>(j))) *
               std::log(std::fabs(gap));
      }
    }
    // At t = infinity the finite factors contribute t^(sum of exponents) with
    // exponent sum 0, so only the coefficient monomial survives.
    w.xi[i] = std::exp(lxi);
  }
  return w;
}

int orientation_sign(const DegreeContext& ctx, const RationalCurve& curve, int slot,
                     Half half) {
  check_curve(ctx, curve);
  if (!(curve.a > 0.0) || !(curve.b > 0.0))
    fail(Errc::BranchOutsidePositiveQuadrant,
         "orientation signs are defined for the positive branch (a, b > 0)");
  if (slot < 0 || slot >= static_cast<int>(ctx.slots.size()))
    fail(Errc::SlotMismatch, "slot " + std::to_string(slot) + " out of range");

  const std::size_t i = static_cast<std::size_t>(slot);
  double v = 0.0;
  if (curve.points[i].at_inf) {
    // In the chart s = 1/t the derivative of log xi at s = 0 is
    // -sum_j c_j t_j; the upper-boundary orientation reverses under the chart
    // flip, so the +dt walk direction is +sum_j c_j t_j.
    for (std::size_t j = 0; j < ctx.slots.size(); ++j) {
      if (j == i || curve.points[j].at_inf) continue;
      v += static_cast<double>(side_exponent(ctx, slot, static_cast<int>(j))) * curve.points[j].t;
    }
  } else {
    for (std::size_t j = 0; j < ctx.slots.size(); ++j) {
      if (j == i || curve.points[j].at_inf) continue;
      v += static_cast<double>(side_exponent(ctx, slot, static_cast<int>(j))) /
           (curve.points[i].t - curve.points[j].t);
    }
  }
  if (v == 0.0)
    fail(Errc::DegenerateCurve, "boundary point of slot " + std::to_string(slot) +
                                    " is critical; orientation sign undefined");
  int sign = v > 0.0 ? 1 : -1;
  return half == Half::Upper ? sign : -sign;
}

SignProducts sign_products(const DegreeContext& ctx, const RationalCurve& curve,
                           const std::vector<NodeRecord>& nodes, Half half) {
  SignProducts out;
  for (std::size_t i = 0; i < ctx.slots.size(); ++i) {
    int s = orientation_sign(ctx, curve, static_cast<int>(i), half);
    out.prod_all *= s;
    if (ctx.degree.entries[static_cast<std::size_t>(ctx.slots[i].entry)].k % 2 == 0)
      out.prod_even *= s;
  }
  for (const NodeRecord& n : nodes) {
    if (n.kind == NodeKind::ComplexPair) continue;
    if (n.quadrant < 0 || n.quadrant > 3)
      fail(Errc::Internal, "real node without quadrant information");
    if (n.kind == NodeKind::Elliptic) {
      out.e += 1;
      out.ell_by_quadrant[static_cast<std::size_t>(n.quadrant)] += 1;
      if (n.quadrant == 0) out.e_plus += 1;
    } else {
      out.hyp_by_quadrant[static_cast<std::size_t>(n.quadrant)] += 1;
    }
  }
  return out;
}

RationalCurve regauge(const DegreeContext& ctx, const RationalCurve& curve,
                      double p, double q, double r, double s) {
  check_curve(ctx, curve);
  double det = p * s - q * r;
  if (!(det > 0.0))
    fail(Errc::ChartDegenerate,
         "reparameterization must have positive determinant to preserve the halves");

  RationalCurve out;
  out.points.resize(curve.points.size());
  for (std::size_t i = 0; i < curve.points.size(); ++i) {
    if (curve.points[i].at_inf) {
      if (r == 0.0) {
        out.points[i].at_inf = true;
      } else {
        out.points[i] = {-s / r, false};
      }
    } else {
      double den = p - r * curve.points[i].t;
      if (den == 0.0) {
        out.points[i].at_inf = true;
      } else {
        out.points[i] = {(s * curve.points[i].t - q) / den, false};
      }
    }
  }

  // Refit the coefficients at a test parameter kept away from marked points
  // (and from the pole of the map), then verify the fit at a second one.
  auto pick = [&](double seed_val) {
    double u = seed_val;
    for (int guard = 0; guard < 64; ++guard) {
      bool ok = true;
      if (r != 0.0 && std::fabs(u + s / r) < 1e-2) ok = false;
      for (const CurvePoint& cp : out.points)
        if (!cp.at_inf && std::fabs(u - cp.t) < 1e-2) ok = false;
      if (ok) return u;
      u += 0.37441;
    }
    fail(Errc::Internal, "could not find a test parameter away from marked points");
  };
  auto map = [&](double u) { return (p * u + q) / (r * u + s); };

  for (int attempt = 0; attempt < 2; ++attempt) {
    double u1 = pick(attempt == 0 ? 0.31831 : 2.08060);
    auto [x1, y1] = evaluate(ctx, curve, map(u1));
    double px = 1.0, py = 1.0;
    for (std::size_t j = 0; j < out.points.size(); ++j) {
      if (out.points[j].at_inf) continue;
      IVec a = ctx.degree.entries[static_cast<std::size_t>(ctx.slots[j].entry)].a;
      px *= ipow(u1 - out.points[j].t, -a.x);
      py *= ipow(u1 - out.points[j].t, -a.y);
    }
    out.a = x1.real() / px;
    out.b = y1.real() / py;

    double u2 = pick(1.14159);
    auto [xo, yo] = evaluate(ctx, curve, map(u2));
    auto [xn, yn] = evaluate(ctx, out, u2);
    double rel = std::abs(xn - xo) / (1.0 + std::abs(xo)) + std::abs(yn - yo) / (1.0 + std::abs(yo));
    if (rel < 1e-8) return out;
  }
  fail(Errc::Internal, "reparameterized curve failed the consistency check");
}

}  // namespace refinv
