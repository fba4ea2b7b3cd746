#include "tangency.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "rng.hpp"

namespace refinv {

namespace {

i64 side_exp(const DegreeContext& ctx, int slot_i, int slot_j) {
  IVec d = ctx.poly.sides[static_cast<std::size_t>(ctx.slots[static_cast<std::size_t>(slot_i)].side)].dir;
  IVec a = ctx.degree.entries[static_cast<std::size_t>(ctx.slots[static_cast<std::size_t>(slot_j)].entry)].a;
  return -dot(d, a);
}

IVec side_dir(const DegreeContext& ctx, int slot) {
  return ctx.poly.sides[static_cast<std::size_t>(ctx.slots[static_cast<std::size_t>(slot)].side)].dir;
}

}  // namespace

TangencySystem build_system(const DegreeContext& ctx, const BoundaryConstraint& w) {
  if (w.xi.size() != ctx.slots.size())
    fail(Errc::SlotMismatch,
         "constraint has " + std::to_string(w.xi.size()) + " values for " +
             std::to_string(ctx.slots.size()) + " slots");
  if (!w.is_complete())
    fail(Errc::IncompleteConstraint, "enumeration needs a complete constraint");
  ResidualReport rr = menelaus_residual(ctx, w);
  if (std::fabs(rr.residual) > 1e-6)
    fail(Errc::IncompleteConstraint,
         "constraint violates the product relation (residual " +
             std::to_string(rr.residual) + "); complete it first");

  TangencySystem sys;
  sys.ctx = &ctx;
  sys.target = w;
  sys.comp_slot = (w.completion_slot >= 0 && w.completion_slot < static_cast<int>(ctx.slots.size()))
                      ? w.completion_slot
                      : default_completion_slot(ctx);
  for (int i = 0; i < static_cast<int>(ctx.slots.size()); ++i) {
    if (i == sys.comp_slot) continue;
    sys.eq_slots.push_back(i);
    if (sys.pin0 < 0)
      sys.pin0 = i;
    else if (sys.pin1 < 0)
      sys.pin1 = i;
    else
      sys.free_slots.push_back(i);
  }
  if (sys.pin0 < 0 || sys.pin1 < 0)
    fail(Errc::SlotMismatch, "a degree needs at least three tangency slots");
  return sys;
}

RationalCurve curve_from_unknowns(const TangencySystem& sys, const std::vector<double>& u) {
  const DegreeContext& ctx = *sys.ctx;
  if (u.size() != static_cast<std::size_t>(sys.unknowns()))
    fail(Errc::SlotMismatch, "unknown vector has the wrong length");
  RationalCurve c;
  c.points.resize(ctx.slots.size());
  c.points[static_cast<std::size_t>(sys.comp_slot)] = {0.0, true};
  c.points[static_cast<std::size_t>(sys.pin0)] = {0.0, false};
  c.points[static_cast<std::size_t>(sys.pin1)] = {1.0, false};
  for (std::size_t f = 0; f < sys.free_slots.size(); ++f)
    c.points[static_cast<std::size_t>(sys.free_slots[f])] = {u[f], false};
  c.a = std::exp(u[u.size() - 2]);
  c.b = std::exp(u[u.size() - 1]);
  return c;
}

std::vector<double> unknowns_from_curve(const TangencySystem& sys, const RationalCurve& curve) {
  std::vector<double> u(static_cast<std::size_t>(sys.unknowns()), 0.0);
  for (std::size_t f = 0; f < sys.free_slots.size(); ++f) {
    const CurvePoint& p = curve.points[static_cast<std::size_t>(sys.free_slots[f])];
    if (p.at_inf) fail(Errc::SlotMismatch, "free marked point sits at infinity");
    u[f] = p.t;
  }
  u[u.size() - 2] = std::log(curve.a);
  u[u.size() - 1] = std::log(curve.b);
  return u;
}

bool system_residual(const TangencySystem& sys, const std::vector<double>& u,
                     std::vector<double>* resid, std::vector<double>* jac,
                     std::vector<double>* scale) {
  const DegreeContext& ctx = *sys.ctx;
  const int n = sys.unknowns();
  const int nfree = static_cast<int>(sys.free_slots.size());
  const double la = u[static_cast<std::size_t>(n - 2)], lb = u[static_cast<std::size_t>(n - 1)];
  if (!std::isfinite(la) || !std::isfinite(lb) || std::fabs(la) > 600.0 || std::fabs(lb) > 600.0)
    return false;

  // Finite marked point of each equation slot (the completion slot is the
  // only one at infinity and carries no equation).
  auto t_of = [&](int slot) -> double {
    if (slot == sys.pin0) return 0.0;
    if (slot == sys.pin1) return 1.0;
    for (int f = 0; f < nfree; ++f)
      if (sys.free_slots[static_cast<std::size_t>(f)] == slot) return u[static_cast<std::size_t>(f)];
    fail(Errc::Internal, "slot has no finite parameter");
  };
  auto col_of = [&](int slot) -> int {  // unknown column of a slot, -1 if pinned
    for (int f = 0; f < nfree; ++f)
      if (sys.free_slots[static_cast<std::size_t>(f)] == slot) return f;
    return -1;
  };

  if (resid) resid->assign(static_cast<std::size_t>(n), 0.0);
  if (jac) jac->assign(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 0.0);
  if (scale) scale->assign(static_cast<std::size_t>(n), 0.0);

  for (std::size_t r = 0; r < sys.eq_slots.size(); ++r) {
    int i = sys.eq_slots[r];
    double ti = t_of(i);
    IVec d = side_dir(ctx, i);
    double lxi = std::log(sys.target.xi[static_cast<std::size_t>(i)]);
    double val = static_cast<double>(d.x) * la + static_cast<double>(d.y) * lb - lxi;
    double mag = std::fabs(static_cast<double>(d.x) * la) +
                 std::fabs(static_cast<double>(d.y) * lb) + std::fabs(lxi);
    double diag = 0.0;
    for (int j : sys.eq_slots) {
      if (j == i) continue;
      double tj = t_of(j);
      double gap = ti - tj;
      if (std::fabs(gap) < 1e-12) return false;  // colliding marked points
      double cij = static_cast<double>(side_exp(ctx, i, j));
      val += cij * std::log(std::fabs(gap));
      mag += std::fabs(cij * std::log(std::fabs(gap)));
      diag += cij / gap;
      if (jac) {
        int cj = col_of(j);
        if (cj >= 0)
          (*jac)[r * static_cast<std::size_t>(n) + static_cast<std::size_t>(cj)] -= cij / gap;
      }
    }
    if (!std::isfinite(val)) return false;
    if (resid) (*resid)[r] = val;
    if (scale) (*scale)[r] = mag;
    if (jac) {
      int ci = col_of(i);
      if (ci >= 0) (*jac)[r * static_cast<std::size_t>(n) + static_cast<std::size_t>(ci)] += diag;
      (*jac)[r * static_cast<std::size_t>(n) + static_cast<std::size_t>(n - 2)] =
          static_cast<double>(d.x);
      (*jac)[r * static_cast<std::size_t>(n) + static_cast<std::size_t>(n - 1)] =
          static_cast<double>(d.y);
    }
  }
  return true;
}

namespace {

double sq_norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return s;
}

// Damped Newton with simple backtracking on |E|^2.  Returns true on
// convergence to opts.tol (relative to the magnitude of the terms entering
// each equation, which grow near walls) and leaves the solution in u.
bool newton_run(const TangencySystem& sys, std::vector<double>& u, const SolveOptions& opts) {
  const int n = sys.unknowns();
  std::vector<double> resid, jac, scale, trial;
  auto converged = [&] {
    for (std::size_t i = 0; i < resid.size(); ++i)
      if (std::fabs(resid[i]) >= opts.tol * (1.0 + scale[i])) return false;
    return true;
  };
  if (!system_residual(sys, u, &resid, &jac, &scale)) return false;
  for (int it = 0; it < opts.newton_iters; ++it) {
    if (converged()) return true;
    Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> J(
        jac.data(), n, n);
    Eigen::Map<Eigen::VectorXd> R(resid.data(), n);
    Eigen::VectorXd step = J.partialPivLu().solve(R);
    if (!step.allFinite()) return false;
    double base = sq_norm(resid);
    double lambda = 1.0;
    bool moved = false;
    for (int bt = 0; bt < 30; ++bt) {
      trial = u;
      for (int k = 0; k < n; ++k) trial[static_cast<std::size_t>(k)] -= lambda * step(k);
      std::vector<double> r2;
      if (system_residual(sys, trial, &r2, nullptr) &&
          (sq_norm(r2) < base * (1.0 - 1e-4 * lambda) || sq_norm(r2) < opts.tol * opts.tol)) {
        u = trial;
        moved = true;
        break;
      }
      lambda *= 0.5;
    }
    if (!moved) return false;
    if (!system_residual(sys, u, &resid, &jac, &scale)) return false;
  }
  return converged();
}

bool admissible_solution(const TangencySystem& sys, const std::vector<double>& u,
                         double min_gap) {
  // Marked points must stay pairwise distinct (including the pins at 0, 1).
  std::vector<double> ts{0.0, 1.0};
  for (std::size_t f = 0; f < sys.free_slots.size(); ++f) {
    double t = u[f];
    if (!std::isfinite(t) || std::fabs(t) > 1e9) return false;
    ts.push_back(t);
  }
  for (std::size_t i = 0; i < ts.size(); ++i)
    for (std::size_t j = i + 1; j < ts.size(); ++j)
      if (std::fabs(ts[i] - ts[j]) < min_gap) return false;
  return true;
}

}  // namespace

std::vector<RationalCurve> solve_all(const TangencySystem& sys, std::uint64_t seed,
                                     const SolveOptions& opts) {
  const int n = sys.unknowns();
  int starts = opts.starts == 0 ? 200 * n : opts.starts;
  if (starts < 1) fail(Errc::BudgetExceeded, "start budget must be at least 1");

  Rng rng(seed);
  std::vector<std::vector<double>> found;
  for (int s = 0; s < starts; ++s) {
    std::vector<double> u(static_cast<std::size_t>(n), 0.0);
    // Free marked points are drawn by the circle-uniform heavy-tail map
    // tan(pi (q - 1/2)), so starts cover the whole parameter line; the
    // coefficient logs are drawn uniformly in a wide box.
    for (std::size_t f = 0; f + 2 < u.size(); ++f)
      u[f] = std::tan(3.14159265358979323846 * (rng.next_double() - 0.5));
    u[u.size() - 2] = rng.uniform(-4.0, 4.0);
    u[u.size() - 1] = rng.uniform(-4.0, 4.0);
    if (!newton_run(sys, u, opts)) continue;
    if (!admissible_solution(sys, u, opts.min_param_gap)) continue;
    bool dup = false;
    for (const auto& v : found) {
      double worst = 0.0;
      for (std::size_t k = 0; k < v.size(); ++k)
        worst = std::max(worst, std::fabs(v[k] - u[k]) / (1.0 + std::fabs(v[k])));
      if (worst < opts.dedup_tol) {
        dup = true;
        break;
      }
    }
    if (!dup) found.push_back(u);
  }
  std::sort(found.begin(), found.end());
  std::vector<RationalCurve> out;
  out.reserve(found.size());
  for (const auto& u : found) out.push_back(curve_from_unknowns(sys, u));
  return out;
}

std::optional<RationalCurve> newton_correct(const TangencySystem& sys,
                                            const RationalCurve& guess,
                                            const SolveOptions& opts) {
  std::vector<double> u = unknowns_from_curve(sys, guess);
  if (!newton_run(sys, u, opts)) return std::nullopt;
  if (!admissible_solution(sys, u, opts.min_param_gap)) return std::nullopt;
  return curve_from_unknowns(sys, u);
}

VerifyReport verify_solution(const TangencySystem& sys, const RationalCurve& curve,
                             const VerifyOptions& opts) {
  const DegreeContext& ctx = *sys.ctx;
  VerifyReport rep;
  rep.node_target = ctx.metrics.interior;
  try {
    BoundaryConstraint have = boundary_data(ctx, curve);
    for (int i : sys.eq_slots)
      rep.max_residual = std::max(
          rep.max_residual, std::fabs(std::log(have.xi[static_cast<std::size_t>(i)]) -
                                      std::log(sys.target.xi[static_cast<std::size_t>(i)])));
    if (rep.max_residual > opts.resid_tol)
      rep.reasons.push_back("boundary residual " + std::to_string(rep.max_residual) +
                            " exceeds tolerance");
    rep.heldout_residual =
        std::fabs(std::log(have.xi[static_cast<std::size_t>(sys.comp_slot)]) -
                  std::log(sys.target.xi[static_cast<std::size_t>(sys.comp_slot)]));
    if (rep.heldout_residual > opts.resid_tol)
      rep.reasons.push_back("held-out completion equation off by " +
                            std::to_string(rep.heldout_residual));

    rep.min_param_gap = 1e300;
    for (std::size_t i = 0; i < curve.points.size(); ++i)
      for (std::size_t j = i + 1; j < curve.points.size(); ++j) {
        if (curve.points[i].at_inf || curve.points[j].at_inf) continue;
        rep.min_param_gap =
            std::min(rep.min_param_gap, std::fabs(curve.points[i].t - curve.points[j].t));
      }
    if (rep.min_param_gap < opts.param_gap)
      rep.reasons.push_back("marked points collide (gap " + std::to_string(rep.min_param_gap) + ")");
    else if (rep.min_param_gap < opts.near_wall_gap)
      rep.flags.push_back("NearWall:marked-points");

    if (opts.check_nodes) {
      std::vector<NodeRecord> nodes = find_nodes(ctx, curve);
      rep.node_count = 0;
      double node_marked_gap = 1e300;
      for (const NodeRecord& nd : nodes) {
        rep.node_count += nd.kind == NodeKind::ComplexPair ? 2 : 1;
        for (const CurvePoint& p : curve.points) {
          if (p.at_inf) continue;
          node_marked_gap = std::min(node_marked_gap,
                                     std::min(std::abs(nd.s - p.t), std::abs(nd.t - p.t)));
        }
      }
      if (rep.node_count != rep.node_target)
        rep.reasons.push_back("found " + std::to_string(rep.node_count) + " nodes, expected " +
                              std::to_string(rep.node_target));
      if (node_marked_gap < opts.near_wall_gap && !nodes.empty())
        rep.flags.push_back("NearWall:node-at-boundary");
    }

    if (opts.check_qi) {
      QiResult qi = compute_qi(ctx, curve, Half::Upper, opts.qi);
      rep.qi_certified = qi.certified;
      rep.kappa_raw = qi.raw;
      double area = 0.5 * static_cast<double>(ctx.metrics.dbl_area);
      if (std::fabs(qi.raw) > area + 1e-6)
        rep.reasons.push_back("quantum index " + std::to_string(qi.raw) +
                              " exceeds the area bound " + std::to_string(area));
    }
  } catch (const Error& e) {
    rep.reasons.push_back(std::string(errc_name(e.code())) + ": " + e.what());
  }
  rep.ok = rep.reasons.empty();
  return rep;
}

}  // namespace refinv
