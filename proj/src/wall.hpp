#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "invariants.hpp"

namespace refinv {

// Straight segment between two complete constraints, linear in log xi.  Both
// endpoints satisfy the product relation, hence so does every point of the
// segment: the path moves through chambers and across walls, never off the
// constraint variety.
struct ConstraintPath {
  const DegreeContext* ctx = nullptr;
  std::vector<double> lxi0, lxi1;  // endpoint log-coordinates per slot
  int completion_slot = -1;

  BoundaryConstraint at(double s) const;
};

ConstraintPath make_path(const DegreeContext& ctx, const BoundaryConstraint& from,
                         const BoundaryConstraint& to);

enum class EventKind { PointCollision, BoundaryA2m, SingularBranch, Reducible, Unknown };

const char* event_kind_name(EventKind k);

// Observables collected while approaching a tracking anomaly; classify_event
// turns them into a wall type.
struct EventWitness {
  bool gap_sign_change = false;       // a same-side pair of constraint values crossed
  int gap_slot_a = -1, gap_slot_b = -1;
  double min_constraint_gap = 1e300;  // smallest same-side |log xi_i - log xi_j|
  double min_node_boundary_dist = 1e300;  // node parameter vs marked parameter
  double min_node_pair_dist = 1e300;      // closest pair of node parameters
  double min_node_disc = 1e300;           // smallest |e1^2 - 4 e2| among real nodes
  double max_coeff_log = 0.0;             // max of |log a|, |log b|
};

struct ClassifyOptions {
  double boundary_tol = 1e-3;
  double pair_tol = 1e-3;
  double blowup_log = 50.0;
};

EventKind classify_event(const EventWitness& w, const ClassifyOptions& opts = {});

struct WallEvent {
  double s = 0.0;  // localized position along the path
  EventKind kind = EventKind::Unknown;
  EventWitness witness;
  std::string note;
};

struct TrackOptions {
  double dt0 = 1e-2;
  double dt_floor = 1e-8;
  double event_probe_offset = 1e-4;  // distance before the event where the witness is taken
  // Once halving has shrunk the step below this, a persistent correction
  // failure is treated as a branch dying at a wall rather than as a step-size
  // problem: the failure point becomes an event and tracking re-seeds beyond.
  double branch_tol = 1e-5;
  bool per_step_tables = true;
  SolveOptions solve;
  QiOptions qi;
};

struct StepRecord {
  double s = 0.0;
  int n_solutions = 0;
  double min_gap = 1e300;  // smallest same-side constraint gap at this position
  InvariantTable table;    // per-step table (filled when per_step_tables)
};

struct TraceRecord {
  std::vector<StepRecord> steps;
  std::vector<WallEvent> events;
  InvariantTable table_from, table_to;
  bool tables_equal = false;
};

// Continuation of the full solution set from path start to end with adaptive
// step halving, event detection/localization (point collisions are found
// exactly on the linear gap functions by bisection) and re-seeding after each
// crossing.  Throws TrackingStalled if the step floor is reached.
TraceRecord track(const ConstraintPath& path, std::uint64_t seed,
                  const TrackOptions& opts = {});

struct InvarianceReport {
  std::vector<InvariantTable> tables;
  bool all_equal = true;
  std::string diff;  // human-readable mismatch description
};

// Tables assembled from independently sampled constraints; throws
// InvarianceViolation (carrying the diff) if any two disagree.
InvarianceReport invariance_report(const DegreeContext& ctx,
                                   const std::vector<std::uint64_t>& seeds,
                                   const SampleOptions& sample = {},
                                   const SolveOptions& solve = {},
                                   const QiOptions& qi = {});

}  // namespace refinv
