#include "menelaus.hpp"

#include <cmath>
#include <limits>

namespace refinv {

namespace {

bool missing(double v) { return std::isnan(v); }

void check_sized(const DegreeContext& ctx, const BoundaryConstraint& w) {
  if (w.xi.size() != ctx.slots.size())
    fail(Errc::SlotMismatch,
         "constraint has " + std::to_string(w.xi.size()) + " values for " +
             std::to_string(ctx.slots.size()) + " slots");
}

IVec default_lambda(const DegreeContext& ctx) {
  i64 xlo = ctx.poly.vertices[0].x, xhi = xlo;
  for (IVec v : ctx.poly.vertices) {
    xlo = std::min(xlo, v.x);
    xhi = std::max(xhi, v.x);
  }
  // (1, N) with N larger than the horizontal extent pairs nonzero with every
  // primitive direction that can occur as a side of this polygon.
  return IVec{1, xhi - xlo + 1};
}

}  // namespace

bool BoundaryConstraint::is_complete() const {
  for (double v : xi)
    if (missing(v)) return false;
  return true;
}

double moment_margin(double xi, i64 side_length) {
  double L = static_cast<double>(side_length);
  double mu = L * xi / (1.0 + xi);
  return std::min(mu, L - mu);
}

ResidualReport menelaus_residual(const DegreeContext& ctx,
                                 const BoundaryConstraint& w, IVec lambda) {
  check_sized(ctx, w);
  if (!w.is_complete())
    fail(Errc::IncompleteConstraint, "residual needs a value in every slot");
  for (std::size_t i = 0; i < w.xi.size(); ++i)
    if (!(w.xi[i] > 0.0))
      fail(Errc::NotPositive, "xi at slot " + std::to_string(i) + " is not positive");

  ResidualReport rep;
  rep.k0 = ctx.k0;
  rep.lambda = (lambda == IVec{0, 0}) ? default_lambda(ctx) : lambda;

  for (std::size_t s = 0; s < ctx.poly.sides.size(); ++s) {
    i64 pairing = dot(rep.lambda, ctx.poly.sides[s].dir);
    if (pairing == 0)
      fail(Errc::ChartDegenerate,
           "lambda " + format_ivec(rep.lambda) + " is constant on side " + std::to_string(s));
    (pairing > 0 ? rep.ascending_sides : rep.descending_sides).push_back(static_cast<int>(s));
  }

  // Walk the B' / B'' decomposition literally: on descending sides the
  // lambda-oriented coordinate is 1/xi and the product enters inverted, so
  // each slot contributes +(k/k0) log xi either way.
  double asc = 0.0, desc = 0.0;
  for (std::size_t i = 0; i < ctx.slots.size(); ++i) {
    const Slot& slot = ctx.slots[i];
    double kk = static_cast<double>(ctx.degree.entries[static_cast<std::size_t>(slot.entry)].k) /
                static_cast<double>(ctx.k0);
    bool ascending = dot(rep.lambda, ctx.poly.sides[static_cast<std::size_t>(slot.side)].dir) > 0;
    if (ascending)
      asc += kk * std::log(w.xi[i]);
    else
      desc += kk * std::log(1.0 / w.xi[i]);
  }
  rep.residual = asc - desc;
  return rep;
}

int default_completion_slot(const DegreeContext& ctx) {
  std::size_t best_side = 0;
  for (std::size_t s = 1; s < ctx.poly.sides.size(); ++s)
    if (ctx.poly.sides[s].length > ctx.poly.sides[best_side].length) best_side = s;
  int slot = -1;
  for (std::size_t i = 0; i < ctx.slots.size(); ++i)
    if (ctx.slots[i].side == static_cast<int>(best_side)) slot = static_cast<int>(i);
  if (slot < 0) fail(Errc::Internal, "side without slots");
  return slot;
}

BoundaryConstraint complete(const DegreeContext& ctx, BoundaryConstraint w) {
  check_sized(ctx, w);
  int miss = -1;
  for (std::size_t i = 0; i < w.xi.size(); ++i) {
    if (missing(w.xi[i])) {
      if (miss >= 0)
        fail(Errc::IncompleteConstraint,
             "completion needs exactly one unspecified value, found several");
      miss = static_cast<int>(i);
    } else if (!(w.xi[i] > 0.0)) {
      fail(Errc::NotPositive, "xi at slot " + std::to_string(i) + " is not positive");
    }
  }
  if (miss < 0) {
    miss = (w.completion_slot >= 0 &&
            w.completion_slot < static_cast<int>(w.xi.size()))
               ? w.completion_slot
               : default_completion_slot(ctx);
    w.xi[static_cast<std::size_t>(miss)] = std::numeric_limits<double>::quiet_NaN();
  }

  double acc = 0.0;
  for (std::size_t i = 0; i < w.xi.size(); ++i) {
    if (static_cast<int>(i) == miss) continue;
    i64 k = ctx.degree.entries[static_cast<std::size_t>(ctx.slots[i].entry)].k;
    acc += static_cast<double>(k) * std::log(w.xi[i]);
  }
  i64 k_miss = ctx.degree.entries[static_cast<std::size_t>(ctx.slots[static_cast<std::size_t>(miss)].entry)].k;
  w.xi[static_cast<std::size_t>(miss)] = std::exp(-acc / static_cast<double>(k_miss));
  w.completion_slot = miss;
  return w;
}

BoundaryConstraint sample_chamber(const DegreeContext& ctx, std::uint64_t seed,
                                  const SampleOptions& opts) {
  if (!(opts.log_lo <= opts.log_hi))
    fail(Errc::EmptyChamberBox, "sampling box is empty (lo > hi)");
  Rng rng(seed);
  int comp = default_completion_slot(ctx);
  for (int attempt = 0; attempt < opts.max_tries; ++attempt) {
    BoundaryConstraint w;
    w.xi.assign(ctx.slots.size(), std::numeric_limits<double>::quiet_NaN());
    for (std::size_t i = 0; i < ctx.slots.size(); ++i)
      if (static_cast<int>(i) != comp)
        w.xi[i] = std::exp(rng.uniform(opts.log_lo, opts.log_hi));
    w = complete(ctx, w);

    bool ok = true;
    for (std::size_t i = 0; i < ctx.slots.size() && ok; ++i) {
      i64 L = ctx.poly.sides[static_cast<std::size_t>(ctx.slots[i].side)].length;
      ok = moment_margin(w.xi[i], L) >= opts.rho;
    }
    for (std::size_t i = 0; i < ctx.slots.size() && ok; ++i)
      for (std::size_t j = i + 1; j < ctx.slots.size() && ok; ++j)
        if (ctx.slots[i].side == ctx.slots[j].side)
          ok = std::fabs(std::log(w.xi[i]) - std::log(w.xi[j])) >= opts.min_log_gap;
    if (ok) return w;
  }
  fail(Errc::EmptyChamberBox,
       "no admissible constraint found in the sampling box after " +
           std::to_string(opts.max_tries) + " tries");
}

}  // namespace refinv
