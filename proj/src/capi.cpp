#include "refinv.h"

#include <cstdlib>
#include <cstring>
#include <string>

#include "io.hpp"

using namespace refinv;

struct rc_degree {
  DegreeContext ctx;
};
struct rc_curves {
  std::vector<RationalCurve> curves;
};
struct rc_table {
  InvariantTable table;
};
struct rc_trace {
  TraceRecord trace;
};

namespace {

thread_local std::string g_last_error;

rc_status to_status(Errc c) {
  switch (c) {
    case Errc::Ok: return RC_OK;
    case Errc::ParseError: return RC_PARSE_ERROR;
    case Errc::NotBalanced: return RC_NOT_BALANCED;
    case Errc::DegenerateDegree: return RC_DEGENERATE_DEGREE;
    case Errc::NotEven: return RC_NOT_EVEN;
    case Errc::ZeroVector: return RC_ZERO_VECTOR;
    case Errc::BadSideAssignment: return RC_BAD_SIDE_ASSIGNMENT;
    case Errc::ChartDegenerate: return RC_CHART_DEGENERATE;
    case Errc::IncompleteConstraint: return RC_INCOMPLETE_CONSTRAINT;
    case Errc::NotPositive: return RC_NOT_POSITIVE;
    case Errc::EmptyChamberBox: return RC_EMPTY_CHAMBER_BOX;
    case Errc::SlotMismatch: return RC_SLOT_MISMATCH;
    case Errc::NoConvergence: return RC_NO_CONVERGENCE;
    case Errc::DegenerateCurve: return RC_DEGENERATE_CURVE;
    case Errc::BranchOutsidePositiveQuadrant: return RC_BRANCH_OUTSIDE_POSITIVE_QUADRANT;
    case Errc::UncertifiedRounding: return RC_UNCERTIFIED_ROUNDING;
    case Errc::BudgetExceeded: return RC_BUDGET_EXCEEDED;
    case Errc::TrackingStalled: return RC_TRACKING_STALLED;
    case Errc::InvarianceViolation: return RC_INVARIANCE_VIOLATION;
    case Errc::IoError: return RC_IO_ERROR;
    case Errc::Internal: return RC_INTERNAL;
  }
  return RC_INTERNAL;
}

template <typename F>
rc_status guard(F&& f) {
  try {
    f();
    g_last_error.clear();
    return RC_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return RC_INTERNAL;
  } catch (...) {
    g_last_error = "unknown failure";
    return RC_INTERNAL;
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out != nullptr) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

ojson parse_json(const char* text, const char* what) {
  if (text == nullptr) fail(Errc::ParseError, std::string(what) + " is null");
  ojson j = ojson::parse(text, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) fail(Errc::ParseError, std::string(what) + " is not valid JSON");
  return j;
}

ojson parse_options(const char* text) {
  if (text == nullptr || *text == '\0') return ojson::object();
  ojson j = parse_json(text, "options");
  if (!j.is_object()) fail(Errc::ParseError, "options must be a JSON object");
  return j;
}

template <typename T>
void load(const ojson& j, const char* key, T& into) {
  if (j.contains(key)) into = j[key].get<T>();
}

SampleOptions sample_opts_from(const ojson& j) {
  SampleOptions o;
  load(j, "log_lo", o.log_lo);
  load(j, "log_hi", o.log_hi);
  load(j, "rho", o.rho);
  load(j, "min_log_gap", o.min_log_gap);
  load(j, "max_tries", o.max_tries);
  return o;
}

SolveOptions solve_opts_from(const ojson& j) {
  SolveOptions o;
  load(j, "starts", o.starts);
  load(j, "newton_iters", o.newton_iters);
  load(j, "tol", o.tol);
  load(j, "dedup_tol", o.dedup_tol);
  load(j, "min_param_gap", o.min_param_gap);
  return o;
}

QiOptions qi_opts_from(const ojson& j) {
  QiOptions o;
  load(j, "jmin", o.eps_jmin);
  load(j, "jmax", o.eps_jmax);
  load(j, "panels", o.panels);
  load(j, "gauss", o.gauss);
  load(j, "margin", o.certify_margin);
  load(j, "fallback", o.allow_2d_fallback);
  load(j, "fallback_tol", o.fallback_tol);
  load(j, "fallback_budget", o.fallback_budget);
  return o;
}

TrackOptions track_opts_from(const ojson& j) {
  TrackOptions o;
  load(j, "dt0", o.dt0);
  load(j, "dt_floor", o.dt_floor);
  load(j, "event_probe_offset", o.event_probe_offset);
  load(j, "branch_tol", o.branch_tol);
  load(j, "per_step_tables", o.per_step_tables);
  if (j.contains("solve")) o.solve = solve_opts_from(j["solve"]);
  if (j.contains("qi")) o.qi = qi_opts_from(j["qi"]);
  return o;
}

const DegreeContext& ctx_of(const rc_degree* d) {
  if (d == nullptr) fail(Errc::ParseError, "degree handle is null");
  return d->ctx;
}

const RationalCurve& curve_at(const rc_curves* c, size_t index) {
  if (c == nullptr) fail(Errc::ParseError, "curves handle is null");
  if (index >= c->curves.size())
    fail(Errc::ParseError, "curve index " + std::to_string(index) + " out of range (" +
                               std::to_string(c->curves.size()) + " curves)");
  return c->curves[index];
}

}  // namespace

extern "C" {

const char* rc_version(void) { return "0.1.0"; }

const char* rc_status_name(rc_status s) {
  switch (s) {
    case RC_OK: return "Ok";
    case RC_PARSE_ERROR: return "ParseError";
    case RC_NOT_BALANCED: return "NotBalanced";
    case RC_DEGENERATE_DEGREE: return "DegenerateDegree";
    case RC_NOT_EVEN: return "NotEven";
    case RC_ZERO_VECTOR: return "ZeroVector";
    case RC_BAD_SIDE_ASSIGNMENT: return "BadSideAssignment";
    case RC_CHART_DEGENERATE: return "ChartDegenerate";
    case RC_INCOMPLETE_CONSTRAINT: return "IncompleteConstraint";
    case RC_NOT_POSITIVE: return "NotPositive";
    case RC_EMPTY_CHAMBER_BOX: return "EmptyChamberBox";
    case RC_SLOT_MISMATCH: return "SlotMismatch";
    case RC_NO_CONVERGENCE: return "NoConvergence";
    case RC_DEGENERATE_CURVE: return "DegenerateCurve";
    case RC_BRANCH_OUTSIDE_POSITIVE_QUADRANT: return "BranchOutsidePositiveQuadrant";
    case RC_UNCERTIFIED_ROUNDING: return "UncertifiedRounding";
    case RC_BUDGET_EXCEEDED: return "BudgetExceeded";
    case RC_TRACKING_STALLED: return "TrackingStalled";
    case RC_INVARIANCE_VIOLATION: return "InvarianceViolation";
    case RC_IO_ERROR: return "IoError";
    case RC_INTERNAL: return "Internal";
  }
  return "Unknown";
}

const char* rc_last_error(void) { return g_last_error.c_str(); }

void rc_string_free(char* s) { std::free(s); }

rc_status rc_degree_parse(const char* json, rc_degree** out) {
  return guard([&] {
    if (out == nullptr) fail(Errc::ParseError, "output pointer is null");
    auto [raw, sides] = degree_from_json(parse_json(json, "degree"));
    auto* d = new rc_degree{make_context(raw, sides ? &*sides : nullptr)};
    *out = d;
  });
}

rc_status rc_degree_from_entries(const int64_t* xy_pairs, size_t n, rc_degree** out) {
  return guard([&] {
    if (out == nullptr || xy_pairs == nullptr) fail(Errc::ParseError, "null argument");
    std::vector<IVec> raw;
    for (size_t i = 0; i < n; ++i)
      raw.push_back({xy_pairs[2 * i], xy_pairs[2 * i + 1]});
    *out = new rc_degree{make_context(raw)};
  });
}

void rc_degree_free(rc_degree* d) { delete d; }

rc_status rc_degree_info(const rc_degree* d, char** json_out) {
  return guard([&] {
    const DegreeContext& ctx = ctx_of(d);
    ojson j;
    j["schema"] = "refinv/degree-info@1";
    j["degree"] = degree_to_json(ctx.degree);
    j["polygon"] = polygon_to_json(ctx.poly, ctx.metrics);
    ojson slots = ojson::array();
    for (const Slot& s : ctx.slots) {
      ojson o;
      o["side"] = s.side;
      o["entry"] = s.entry;
      o["k"] = ctx.degree.entries[static_cast<std::size_t>(s.entry)].k;
      slots.push_back(std::move(o));
    }
    j["slots"] = std::move(slots);
    j["k0"] = ctx.k0;
    j["constraint_count"] = constraint_count(ctx.degree);
    j["default_completion_slot"] = default_completion_slot(ctx);
    *json_out = dup_string(j.dump(2));
  });
}

rc_status rc_degree_constraint_count(const rc_degree* d, int genus, int* out) {
  return guard([&] { *out = constraint_count(ctx_of(d).degree, genus); });
}

rc_status rc_degree_aqc(const rc_degree* d, int eps_x, int eps_y, int* out) {
  return guard([&] { *out = aqc_check(ctx_of(d).poly, eps_x, eps_y) ? 1 : 0; });
}

rc_status rc_constraint_residual(const rc_degree* d, const char* constraint_json,
                                 char** json_out) {
  return guard([&] {
    const DegreeContext& ctx = ctx_of(d);
    BoundaryConstraint w = constraint_from_json(ctx, parse_json(constraint_json, "constraint"));
    ResidualReport rep = menelaus_residual(ctx, w);
    ojson j;
    j["residual"] = rep.residual;
    j["k0"] = rep.k0;
    j["lambda"] = ojson::array({rep.lambda.x, rep.lambda.y});
    j["ascending_sides"] = rep.ascending_sides;
    j["descending_sides"] = rep.descending_sides;
    *json_out = dup_string(j.dump(2));
  });
}

rc_status rc_constraint_complete(const rc_degree* d, const char* constraint_json,
                                 char** json_out) {
  return guard([&] {
    const DegreeContext& ctx = ctx_of(d);
    BoundaryConstraint w = complete(ctx, constraint_from_json(ctx, parse_json(constraint_json, "constraint")));
    *json_out = dup_string(constraint_to_json(w).dump(2));
  });
}

rc_status rc_sample_chamber(const rc_degree* d, uint64_t seed, const char* options_json,
                            char** json_out) {
  return guard([&] {
    const DegreeContext& ctx = ctx_of(d);
    BoundaryConstraint w = sample_chamber(ctx, seed, sample_opts_from(parse_options(options_json)));
    *json_out = dup_string(constraint_to_json(w).dump(2));
  });
}

rc_status rc_enumerate(const rc_degree* d, const char* constraint_json, uint64_t seed,
                       const char* options_json, rc_curves** out) {
  return guard([&] {
    const DegreeContext& ctx = ctx_of(d);
    BoundaryConstraint w = constraint_from_json(ctx, parse_json(constraint_json, "constraint"));
    TangencySystem sys = build_system(ctx, w);
    *out = new rc_curves{solve_all(sys, seed, solve_opts_from(parse_options(options_json)))};
  });
}

rc_status rc_curves_parse(const rc_degree* d, const char* json, rc_curves** out) {
  return guard([&] {
    const DegreeContext& ctx = ctx_of(d);
    *out = new rc_curves{curves_from_json(ctx, parse_json(json, "curves"))};
  });
}

void rc_curves_free(rc_curves* c) { delete c; }

rc_status rc_curves_count(const rc_curves* c, size_t* out) {
  return guard([&] {
    if (c == nullptr || out == nullptr) fail(Errc::ParseError, "null argument");
    *out = c->curves.size();
  });
}

rc_status rc_curves_to_json(const rc_curves* c, char** json_out) {
  return guard([&] {
    if (c == nullptr) fail(Errc::ParseError, "curves handle is null");
    *json_out = dup_string(curves_to_json(c->curves).dump(2));
  });
}

rc_status rc_curve_evaluate(const rc_degree* d, const rc_curves* c, size_t index,
                            double t_re, double t_im, double out_xy[4]) {
  return guard([&] {
    auto [x, y] = evaluate(ctx_of(d), curve_at(c, index), cplx(t_re, t_im));
    out_xy[0] = x.real();
    out_xy[1] = x.imag();
    out_xy[2] = y.real();
    out_xy[3] = y.imag();
  });
}

rc_status rc_curve_boundary(const rc_degree* d, const rc_curves* c, size_t index,
                            char** json_out) {
  return guard([&] {
    BoundaryConstraint w = boundary_data(ctx_of(d), curve_at(c, index));
    *json_out = dup_string(constraint_to_json(w).dump(2));
  });
}

rc_status rc_curve_nodes(const rc_degree* d, const rc_curves* c, size_t index,
                         char** json_out) {
  return guard([&] {
    std::vector<NodeRecord> nodes = find_nodes(ctx_of(d), curve_at(c, index));
    *json_out = dup_string(nodes_to_json(nodes).dump(2));
  });
}

rc_status rc_curve_qi(const rc_degree* d, const rc_curves* c, size_t index, int half,
                      const char* options_json, char** json_out) {
  return guard([&] {
    QiResult qi = compute_qi(ctx_of(d), curve_at(c, index),
                             half == 0 ? Half::Upper : Half::Lower,
                             qi_opts_from(parse_options(options_json)));
    *json_out = dup_string(qi_to_json(qi).dump(2));
  });
}

rc_status rc_curve_verify(const rc_degree* d, const rc_curves* c, size_t index,
                          const char* constraint_json, char** json_out) {
  return guard([&] {
    const DegreeContext& ctx = ctx_of(d);
    BoundaryConstraint w = constraint_from_json(ctx, parse_json(constraint_json, "constraint"));
    TangencySystem sys = build_system(ctx, w);
    VerifyReport rep = verify_solution(sys, curve_at(c, index));
    *json_out = dup_string(verify_to_json(rep).dump(2));
  });
}

rc_status rc_assemble_table(const rc_degree* d, const rc_curves* c,
                            const char* options_json, rc_table** out) {
  return guard([&] {
    if (c == nullptr) fail(Errc::ParseError, "curves handle is null");
    *out = new rc_table{assemble_w0(ctx_of(d), c->curves,
                                    qi_opts_from(parse_options(options_json)))};
  });
}

void rc_table_free(rc_table* t) { delete t; }

rc_status rc_table_to_json(const rc_table* t, char** json_out) {
  return guard([&] {
    if (t == nullptr) fail(Errc::ParseError, "table handle is null");
    *json_out = dup_string(table_to_json(t->table).dump(2));
  });
}

rc_status rc_table_to_csv(const rc_table* t, char** csv_out) {
  return guard([&] {
    if (t == nullptr) fail(Errc::ParseError, "table handle is null");
    *csv_out = dup_string(table_to_csv(t->table));
  });
}

rc_status rc_track(const rc_degree* d, const char* from_json, const char* to_json,
                   uint64_t seed, const char* options_json, rc_trace** out) {
  return guard([&] {
    const DegreeContext& ctx = ctx_of(d);
    BoundaryConstraint from = constraint_from_json(ctx, parse_json(from_json, "from"));
    BoundaryConstraint to = constraint_from_json(ctx, parse_json(to_json, "to"));
    ConstraintPath path = make_path(ctx, from, to);
    *out = new rc_trace{track(path, seed, track_opts_from(parse_options(options_json)))};
  });
}

void rc_trace_free(rc_trace* t) { delete t; }

rc_status rc_trace_to_json(const rc_trace* t, char** json_out) {
  return guard([&] {
    if (t == nullptr) fail(Errc::ParseError, "trace handle is null");
    *json_out = dup_string(trace_to_json(t->trace).dump(2));
  });
}

rc_status rc_invariance_report(const rc_degree* d, const uint64_t* seeds, size_t n_seeds,
                               const char* options_json, char** json_out) {
  return guard([&] {
    const DegreeContext& ctx = ctx_of(d);
    ojson opts = parse_options(options_json);
    std::vector<std::uint64_t> sv(seeds, seeds + n_seeds);
    InvarianceReport rep = invariance_report(
        ctx, sv, sample_opts_from(opts.contains("sample") ? opts["sample"] : ojson::object()),
        solve_opts_from(opts.contains("solve") ? opts["solve"] : ojson::object()),
        qi_opts_from(opts.contains("qi") ? opts["qi"] : ojson::object()));
    ojson j;
    j["schema"] = "refinv/invariance@1";
    ojson tables = ojson::array();
    for (const InvariantTable& t : rep.tables) tables.push_back(table_to_json(t));
    j["tables"] = std::move(tables);
    j["all_equal"] = rep.all_equal;
    *json_out = dup_string(j.dump(2));
  });
}

rc_status rc_plot_data(const rc_degree* d, const rc_curves* c, char** csv_out) {
  return guard([&] {
    if (c == nullptr) fail(Errc::ParseError, "curves handle is null");
    *csv_out = dup_string(emit_plot_data(ctx_of(d), c->curves));
  });
}

}  // extern "C"
