#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "curve.hpp"
#include "qindex.hpp"

namespace refinv {

// Square system cutting out the curves through a complete boundary
// constraint, in the gauge that sends the completion slot to t = infinity and
// the first two remaining canonical slots to t = 0 and t = 1.  Unknowns are
// the free marked points plus (log a, log b); equations match log xi against
// the target on every slot except the completion slot, whose equation is the
// product relation and is kept as a held-out check.
struct TangencySystem {
  const DegreeContext* ctx = nullptr;
  BoundaryConstraint target;
  int comp_slot = -1;
  int pin0 = -1, pin1 = -1;
  std::vector<int> free_slots;
  std::vector<int> eq_slots;  // all slots except comp_slot

  int unknowns() const { return static_cast<int>(free_slots.size()) + 2; }
};

TangencySystem build_system(const DegreeContext& ctx, const BoundaryConstraint& w);

// Unknown-vector layout: [t of free_slots..., log a, log b].
RationalCurve curve_from_unknowns(const TangencySystem& sys, const std::vector<double>& u);
std::vector<double> unknowns_from_curve(const TangencySystem& sys, const RationalCurve& curve);

// Equation residuals and analytic Jacobian at an unknown vector; returns
// false when the point is invalid (colliding parameters, overflow).  `scale`
// receives the sum of the absolute values of the terms entering each
// equation: residuals are only meaningful relative to it, since near walls
// the coefficient logs grow and the equation value is a small difference of
// large terms.
bool system_residual(const TangencySystem& sys, const std::vector<double>& u,
                     std::vector<double>* resid, std::vector<double>* jac_rowmajor,
                     std::vector<double>* scale = nullptr);

struct SolveOptions {
  int starts = 0;           // 0 means 200 * unknowns
  int newton_iters = 100;
  double tol = 1e-12;       // stopping residual (max norm)
  double dedup_tol = 1e-8;
  double min_param_gap = 1e-10;  // reject solutions with colliding marked points
};

// All real solutions of the system found by seeded multistart damped Newton,
// deduplicated and canonically ordered.  Individual non-convergent starts are
// not errors; an empty list is a legitimate outcome.
std::vector<RationalCurve> solve_all(const TangencySystem& sys, std::uint64_t seed,
                                     const SolveOptions& opts = {});

// One Newton correction from an explicit initial curve (used by tracking).
std::optional<RationalCurve> newton_correct(const TangencySystem& sys,
                                            const RationalCurve& guess,
                                            const SolveOptions& opts = {});

struct VerifyOptions {
  double resid_tol = 1e-9;
  double param_gap = 1e-6;
  double near_wall_gap = 1e-3;
  bool check_nodes = true;
  bool check_qi = true;
  QiOptions qi;
};

struct VerifyReport {
  bool ok = false;
  std::vector<std::string> reasons;  // failed checks (empty when ok)
  std::vector<std::string> flags;    // non-fatal observations, e.g. "NearWall"
  double max_residual = 0.0;         // worst matched-slot residual (log scale)
  double heldout_residual = 0.0;     // residual of the held-out equation
  double min_param_gap = 0.0;
  i64 node_count = -1;
  i64 node_target = -1;
  bool qi_certified = false;
  double kappa_raw = 0.0;
};

// Structured re-examination of a solved curve: residuals on all equations
// including the held-out one, distinctness of marked points, node count
// against the lattice-interior target, and quantum-index certification.
// Reports failures instead of throwing.
VerifyReport verify_solution(const TangencySystem& sys, const RationalCurve& curve,
                             const VerifyOptions& opts = {});

}  // namespace refinv
