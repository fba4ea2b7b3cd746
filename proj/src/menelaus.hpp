#pragma once

#include <cstdint>
#include <vector>

#include "lattice.hpp"
#include "rng.hpp"

namespace refinv {

// Boundary constraint: one positive divisor coordinate xi per tangency slot,
// in canonical slot order.  A quiet-NaN entry marks a value left to be
// determined by the product relation (at most one may be missing).
struct BoundaryConstraint {
  std::vector<double> xi;
  int completion_slot = -1;  // slot whose value was (or will be) derived

  bool is_complete() const;
};

// Multiplicative boundary relation, reported additively.  The residual is
//   sum_i (k_i / k0) * log xi_i
// over all slots; a constraint is realizable only if this vanishes.  The two
// broken lines B' / B'' are the sides on which the reference linear form
// lambda increases resp. decreases along the counterclockwise walk; with
// side charts re-oriented by lambda the relation reads
//   prod_{B'} xi = prod_{B''} xi,
// and converting each side back to its counterclockwise chart turns that
// into the single signed sum above, independent of the choice of lambda.
struct ResidualReport {
  double residual = 0.0;
  i64 k0 = 1;
  IVec lambda;
  std::vector<int> ascending_sides;   // B'
  std::vector<int> descending_sides;  // B''
};

// `lambda` must pair nonzero with every side direction; {0,0} selects the
// default (1, N) with N exceeding the polygon width.  Requires a complete,
// positive constraint.
ResidualReport menelaus_residual(const DegreeContext& ctx,
                                 const BoundaryConstraint& w,
                                 IVec lambda = IVec{0, 0});

// Default slot for completion: the last slot of the side of maximal lattice
// length (first such side in canonical order on ties).
int default_completion_slot(const DegreeContext& ctx);

// Fills the single missing value of `w` so the residual vanishes.  If no
// value is missing, the designated completion slot is recomputed (allowing
// callers to re-project a perturbed constraint back onto the relation).
BoundaryConstraint complete(const DegreeContext& ctx, BoundaryConstraint w);

struct SampleOptions {
  double log_lo = -2.0;      // sampling box for log xi
  double log_hi = 2.0;
  double rho = 0.15;         // admissibility margin, in moment-chart distance
  double min_log_gap = 0.05; // minimal |log xi_i - log xi_j| on a shared side
  int max_tries = 2000;
};

// Rejection-samples a complete, admissible constraint: every point stays at
// moment-chart distance >= rho from the side ends, and same-side points keep
// a minimal logarithmic gap.  Throws EmptyChamberBox when the box (after
// completion) cannot satisfy the margins within the retry budget.
BoundaryConstraint sample_chamber(const DegreeContext& ctx, std::uint64_t seed,
                                  const SampleOptions& opts = {});

// Admissibility of a single value on a side of lattice length L: distance of
// the moment image L*xi/(1+xi) from {0, L}.
double moment_margin(double xi, i64 side_length);

}  // namespace refinv
