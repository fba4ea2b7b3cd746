#include "wall.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace refinv {

namespace {

std::string table_to_string(const InvariantTable& t) {
  std::ostringstream os;
  os << "{";
  bool first = true;
  for (const auto& [k, v] : t.rows) {
    if (!first) os << ", ";
    first = false;
    os << k << ": (" << v.first << ", " << v.second << ")";
  }
  os << "}";
  return os.str();
}

bool same_curve(const RationalCurve& a, const RationalCurve& b) {
  if (a.points.size() != b.points.size()) return false;
  double worst = std::fabs(std::log(a.a) - std::log(b.a)) +
                 std::fabs(std::log(a.b) - std::log(b.b));
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    if (a.points[i].at_inf != b.points[i].at_inf) return false;
    if (!a.points[i].at_inf)
      worst = std::max(worst, std::fabs(a.points[i].t - b.points[i].t) /
                                  (1.0 + std::fabs(a.points[i].t)));
  }
  return worst < 1e-7;
}

void dedup_curves(std::vector<RationalCurve>& curves) {
  std::vector<RationalCurve> out;
  for (const RationalCurve& c : curves) {
    bool dup = false;
    for (const RationalCurve& k : out) dup = dup || same_curve(c, k);
    if (!dup) out.push_back(c);
  }
  curves = std::move(out);
}

struct GapPair {
  int a, b;  // slot indices on a shared side
};

std::vector<GapPair> same_side_pairs(const DegreeContext& ctx) {
  std::vector<GapPair> out;
  for (std::size_t i = 0; i < ctx.slots.size(); ++i)
    for (std::size_t j = i + 1; j < ctx.slots.size(); ++j)
      if (ctx.slots[i].side == ctx.slots[j].side)
        out.push_back({static_cast<int>(i), static_cast<int>(j)});
  return out;
}

}  // namespace

const char* event_kind_name(EventKind k) {
  switch (k) {
    case EventKind::PointCollision: return "PointCollision";
    case EventKind::BoundaryA2m: return "BoundaryA2m";
    case EventKind::SingularBranch: return "SingularBranch";
    case EventKind::Reducible: return "Reducible";
    case EventKind::Unknown: return "Unknown";
  }
  return "Unknown";
}

BoundaryConstraint ConstraintPath::at(double s) const {
  BoundaryConstraint w;
  w.completion_slot = completion_slot;
  w.xi.resize(lxi0.size());
  for (std::size_t i = 0; i < lxi0.size(); ++i)
    w.xi[i] = std::exp((1.0 - s) * lxi0[i] + s * lxi1[i]);
  return w;
}

ConstraintPath make_path(const DegreeContext& ctx, const BoundaryConstraint& from,
                         const BoundaryConstraint& to) {
  BoundaryConstraint f = from.is_complete() ? from : complete(ctx, from);
  BoundaryConstraint t = to.is_complete() ? to : complete(ctx, to);
  // Both endpoints sit on the product-relation hyperplane in log
  // coordinates, so the straight segment between them stays on it.
  for (const BoundaryConstraint* w : {&f, &t})
    if (std::fabs(menelaus_residual(ctx, *w).residual) > 1e-9)
      fail(Errc::IncompleteConstraint, "path endpoint violates the product relation");

  ConstraintPath path;
  path.ctx = &ctx;
  path.completion_slot = f.completion_slot >= 0 ? f.completion_slot : default_completion_slot(ctx);
  path.lxi0.resize(f.xi.size());
  path.lxi1.resize(t.xi.size());
  for (std::size_t i = 0; i < f.xi.size(); ++i) {
    path.lxi0[i] = std::log(f.xi[i]);
    path.lxi1[i] = std::log(t.xi[i]);
  }
  return path;
}

EventKind classify_event(const EventWitness& w, const ClassifyOptions& opts) {
  if (w.gap_sign_change) return EventKind::PointCollision;
  if (w.min_node_boundary_dist < opts.boundary_tol) return EventKind::BoundaryA2m;
  if (w.min_node_pair_dist < opts.pair_tol || w.min_node_disc < opts.pair_tol)
    return EventKind::SingularBranch;
  if (w.max_coeff_log > opts.blowup_log) return EventKind::Reducible;
  return EventKind::Unknown;
}

namespace {

// Observables of the tracked family near a suspected event.
EventWitness probe_witness(const DegreeContext& ctx, const ConstraintPath& path, double s,
                           const std::vector<RationalCurve>& guesses,
                           const SolveOptions& solve_opts) {
  EventWitness w;
  TangencySystem sys = build_system(ctx, path.at(s));
  for (const RationalCurve& g : guesses) {
    auto corrected = newton_correct(sys, g, solve_opts);
    if (!corrected) continue;
    const RationalCurve& c = *corrected;
    w.max_coeff_log = std::max({w.max_coeff_log, std::fabs(std::log(c.a)),
                                std::fabs(std::log(c.b))});
    try {
      std::vector<NodeRecord> nodes = find_nodes(ctx, c);
      for (std::size_t i = 0; i < nodes.size(); ++i) {
        for (const CurvePoint& p : c.points) {
          if (p.at_inf) continue;
          w.min_node_boundary_dist =
              std::min({w.min_node_boundary_dist, std::abs(nodes[i].s - p.t),
                        std::abs(nodes[i].t - p.t)});
        }
        if (nodes[i].kind != NodeKind::ComplexPair) {
          cplx e1 = nodes[i].s + nodes[i].t, e2 = nodes[i].s * nodes[i].t;
          w.min_node_disc = std::min(w.min_node_disc, std::abs(e1 * e1 - 4.0 * e2));
        }
        for (std::size_t j = i + 1; j < nodes.size(); ++j) {
          double d = std::min(std::abs(nodes[i].s - nodes[j].s) + std::abs(nodes[i].t - nodes[j].t),
                              std::abs(nodes[i].s - nodes[j].t) + std::abs(nodes[i].t - nodes[j].s));
          w.min_node_pair_dist = std::min(w.min_node_pair_dist, d);
        }
      }
    } catch (const Error&) {
      // A degenerate node configuration this close to the event is itself
      // evidence; leave the distances at their current minima.
      w.min_node_disc = 0.0;
    }
  }
  BoundaryConstraint here = path.at(s);
  for (const GapPair& p : same_side_pairs(ctx))
    w.min_constraint_gap =
        std::min(w.min_constraint_gap,
                 std::fabs(std::log(here.xi[static_cast<std::size_t>(p.a)]) -
                           std::log(here.xi[static_cast<std::size_t>(p.b)])));
  return w;
}

}  // namespace

TraceRecord track(const ConstraintPath& path, std::uint64_t seed, const TrackOptions& opts) {
  const DegreeContext& ctx = *path.ctx;
  TraceRecord trace;
  std::vector<GapPair> pairs = same_side_pairs(ctx);

  auto gap_at = [&](const GapPair& p, double s) {
    return ((1.0 - s) * path.lxi0[static_cast<std::size_t>(p.a)] +
            s * path.lxi1[static_cast<std::size_t>(p.a)]) -
           ((1.0 - s) * path.lxi0[static_cast<std::size_t>(p.b)] +
            s * path.lxi1[static_cast<std::size_t>(p.b)]);
  };
  auto min_gap_at = [&](double s) {
    double m = 1e300;
    for (const GapPair& p : pairs) m = std::min(m, std::fabs(gap_at(p, s)));
    return m;
  };

  TangencySystem sys0 = build_system(ctx, path.at(0.0));
  std::vector<RationalCurve> sols = solve_all(sys0, seed, opts.solve);
  trace.table_from = assemble_w0(ctx, sols, opts.qi);

  auto record_step = [&](double s, const std::vector<RationalCurve>& curves) {
    StepRecord rec;
    rec.s = s;
    rec.n_solutions = static_cast<int>(curves.size());
    rec.min_gap = min_gap_at(s);
    if (opts.per_step_tables) {
      try {
        rec.table = assemble_w0(ctx, curves, opts.qi);
      } catch (const Error&) {
        // A step landing too close to a wall cannot be scored; the step
        // record then carries an empty table, which downstream readers treat
        // as "not scored".
      }
    }
    trace.steps.push_back(std::move(rec));
  };
  record_step(0.0, sols);

  double s = 0.0, dt = opts.dt0;
  std::uint64_t reseed_salt = 1;
  // Secant predictor state: unknown vectors of `sols` at the previous
  // position, aligned index-by-index, and the step that led here.  Cleared
  // whenever the solution set is rebuilt, so it never crosses a re-seed.
  std::vector<std::vector<double>> prev_u;
  double prev_dt = 0.0;
  while (s < 1.0 - 1e-15) {
    double s_next = std::min(s + dt, 1.0);

    bool crossed = false;
    for (const GapPair& p : pairs) {
      double g0 = gap_at(p, s), g1 = gap_at(p, s_next);
      if (g0 == 0.0 || (g0 > 0.0) == (g1 > 0.0)) continue;
      // Localize the collision by bisection on the (linear) gap function.
      double lo = s, hi = s_next, glo = g0;
      for (int it = 0; it < 80; ++it) {
        double mid = 0.5 * (lo + hi);
        double gm = gap_at(p, mid);
        if (gm == 0.0) {
          lo = hi = mid;
          break;
        }
        if ((gm > 0.0) == (glo > 0.0)) {
          lo = mid;
          glo = gm;
        } else {
          hi = mid;
        }
      }
      WallEvent ev;
      ev.s = 0.5 * (lo + hi);
      double probe = std::max(s, ev.s - opts.event_probe_offset);
      ev.witness = probe_witness(ctx, path, probe, sols, opts.solve);
      ev.witness.gap_sign_change = true;
      ev.witness.gap_slot_a = p.a;
      ev.witness.gap_slot_b = p.b;
      ev.kind = classify_event(ev.witness);
      ev.note = "constraint points of slots " + std::to_string(p.a) + " and " +
                std::to_string(p.b) + " collide";
      trace.events.push_back(std::move(ev));
      crossed = true;
    }

    TangencySystem sys_next = build_system(ctx, path.at(s_next));
    std::vector<RationalCurve> corrected;
    std::vector<std::vector<double>> cur_u;
    std::size_t lost = 0;
    bool predictable = prev_u.size() == sols.size() && prev_dt > 0.0;
    for (std::size_t i = 0; i < sols.size(); ++i) {
      std::vector<double> u = unknowns_from_curve(sys_next, sols[i]);
      cur_u.push_back(u);
      std::optional<RationalCurve> nc;
      if (predictable) {
        // Secant prediction keeps up with branches that move fast near walls.
        std::vector<double> up = u;
        double f = (s_next - s) / prev_dt;
        for (std::size_t k = 0; k < up.size(); ++k) up[k] += f * (u[k] - prev_u[i][k]);
        nc = newton_correct(sys_next, curve_from_unknowns(sys_next, up), opts.solve);
      }
      if (!nc) nc = newton_correct(sys_next, sols[i], opts.solve);
      if (nc)
        corrected.push_back(*nc);
      else
        ++lost;
    }
    if (lost > 0 && dt >= opts.branch_tol) {
      // Maybe the step was just too long.  Do not record the detected
      // crossings yet to come: retry shorter.
      while (crossed && !trace.events.empty() && trace.events.back().s > s)
        trace.events.pop_back();
      dt *= 0.5;
      if (dt < opts.dt_floor)
        fail(Errc::TrackingStalled,
             "continuation step fell below the floor near s = " + std::to_string(s));
      continue;
    }
    std::size_t count_before = sols.size();
    std::size_t before = corrected.size();
    dedup_curves(corrected);
    bool rebuilt = crossed || lost > 0 || corrected.size() != before;
    if (rebuilt) {
      // Re-seed on the far side so branches that appear, die or relabel
      // across the wall are picked up, then merge with the tracked set.
      std::vector<RationalCurve> fresh =
          solve_all(sys_next, seed ^ (0x9E3779B97F4A7C15ull * reseed_salt++), opts.solve);
      for (const RationalCurve& f : fresh) corrected.push_back(f);
      dedup_curves(corrected);
    }
    if (rebuilt && corrected.size() != count_before) {
      // A recovery that does not restore the solution set is a genuine
      // branch event; a silent recovery is not a wall.  Witness it from the
      // near side, where the dying branches still exist.
      WallEvent ev;
      ev.s = s_next;
      ev.witness = probe_witness(ctx, path, s, sols, opts.solve);
      ev.kind = classify_event(ev.witness);
      ev.note = "solution count changed from " + std::to_string(count_before) + " to " +
                std::to_string(corrected.size());
      trace.events.push_back(std::move(ev));
    }
    sols = std::move(corrected);
    double step_len = s_next - s;
    s = s_next;
    record_step(s, sols);
    dt = std::min(opts.dt0, dt * 2.0);
    if (rebuilt) {
      prev_u.clear();
      prev_dt = 0.0;
    } else {
      prev_u = std::move(cur_u);
      prev_dt = step_len;
    }
  }

  trace.table_to = assemble_w0(ctx, sols, opts.qi);
  trace.tables_equal = trace.table_from == trace.table_to;
  return trace;
}

InvarianceReport invariance_report(const DegreeContext& ctx,
                                   const std::vector<std::uint64_t>& seeds,
                                   const SampleOptions& sample, const SolveOptions& solve,
                                   const QiOptions& qi) {
  if (seeds.empty()) fail(Errc::ParseError, "invariance report needs at least one seed");
  InvarianceReport rep;
  for (std::uint64_t sd : seeds) {
    BoundaryConstraint w = sample_chamber(ctx, sd, sample);
    TangencySystem sys = build_system(ctx, w);
    std::vector<RationalCurve> sols = solve_all(sys, sd ^ 0x5eedULL, solve);
    rep.tables.push_back(assemble_w0(ctx, sols, qi));
  }
  for (std::size_t i = 1; i < rep.tables.size(); ++i) {
    if (rep.tables[i] == rep.tables[0]) continue;
    rep.all_equal = false;
    std::ostringstream os;
    os << "table from seed " << seeds[i] << " " << table_to_string(rep.tables[i])
       << " differs from table from seed " << seeds[0] << " "
       << table_to_string(rep.tables[0]);
    rep.diff = os.str();
    fail(Errc::InvarianceViolation, rep.diff);
  }
  return rep;
}

}  // namespace refinv
