#include "io.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

namespace refinv {

namespace {

constexpr const char* kDegreeSchema = "refinv/degree@1";
constexpr const char* kConstraintSchema = "refinv/constraint@1";
constexpr const char* kCurvesSchema = "refinv/curves@1";
constexpr const char* kTableSchema = "refinv/table@1";
constexpr const char* kTraceSchema = "refinv/trace@1";

void expect_schema(const ojson& j, const char* want) {
  if (!j.is_object() || !j.contains("schema") || !j["schema"].is_string())
    fail(Errc::ParseError, "artifact is missing its schema tag");
  std::string got = j["schema"].get<std::string>();
  if (got != want)
    fail(Errc::ParseError, "expected schema " + std::string(want) + ", got " + got);
}

ojson cplx_to_json(cplx z) { return ojson::array({z.real(), z.imag()}); }

const char* node_kind_name(NodeKind k) {
  switch (k) {
    case NodeKind::Hyperbolic: return "hyperbolic";
    case NodeKind::Elliptic: return "elliptic";
    case NodeKind::ComplexPair: return "complex-pair";
  }
  return "unknown";
}

}  // namespace

ojson degree_to_json(const ToricDegree& degree) {
  ojson j;
  j["schema"] = kDegreeSchema;
  ojson entries = ojson::array();
  ojson sides = ojson::array();
  for (const DegreeEntry& e : degree.entries) {
    entries.push_back(ojson::array({e.a.x, e.a.y}));
    sides.push_back(e.side);
  }
  j["entries"] = std::move(entries);
  j["sides"] = std::move(sides);
  return j;
}

std::pair<std::vector<IVec>, std::optional<std::vector<int>>> degree_from_json(const ojson& j) {
  expect_schema(j, kDegreeSchema);
  if (!j.contains("entries") || !j["entries"].is_array())
    fail(Errc::ParseError, "degree artifact has no entries array");
  std::vector<IVec> raw;
  for (const ojson& e : j["entries"]) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number_integer())
      fail(Errc::ParseError, "degree entries must be integer pairs");
    raw.push_back({e[0].get<i64>(), e[1].get<i64>()});
  }
  std::optional<std::vector<int>> sides;
  if (j.contains("sides") && !j["sides"].is_null()) {
    if (!j["sides"].is_array())
      fail(Errc::ParseError, "side labels must form an array");
    sides.emplace();
    for (const ojson& s : j["sides"]) {
      if (!s.is_number_integer()) fail(Errc::ParseError, "side labels must be integers");
      sides->push_back(s.get<int>());
    }
  }
  return {std::move(raw), std::move(sides)};
}

ojson polygon_to_json(const LatticePolygon& poly, const PolygonMetrics& metrics) {
  ojson j;
  j["schema"] = "refinv/polygon@1";
  ojson verts = ojson::array();
  for (IVec v : poly.vertices) verts.push_back(ojson::array({v.x, v.y}));
  j["vertices"] = std::move(verts);
  ojson sides = ojson::array();
  for (const Side& s : poly.sides) {
    ojson o;
    o["dir"] = ojson::array({s.dir.x, s.dir.y});
    o["normal"] = ojson::array({s.normal.x, s.normal.y});
    o["start"] = ojson::array({s.start.x, s.start.y});
    o["length"] = s.length;
    o["entries"] = s.entries;
    sides.push_back(std::move(o));
  }
  j["sides"] = std::move(sides);
  j["dbl_area"] = metrics.dbl_area;
  j["boundary_points"] = metrics.boundary;
  j["interior_points"] = metrics.interior;
  return j;
}

ojson constraint_to_json(const BoundaryConstraint& w) {
  ojson j;
  j["schema"] = kConstraintSchema;
  ojson xi = ojson::array();
  for (double v : w.xi) {
    if (std::isnan(v))
      xi.push_back(nullptr);
    else
      xi.push_back(v);
  }
  j["xi"] = std::move(xi);
  j["completion_slot"] = w.completion_slot;
  return j;
}

BoundaryConstraint constraint_from_json(const DegreeContext& ctx, const ojson& j) {
  expect_schema(j, kConstraintSchema);
  if (!j.contains("xi") || !j["xi"].is_array())
    fail(Errc::ParseError, "constraint artifact has no xi array");
  BoundaryConstraint w;
  for (const ojson& v : j["xi"]) {
    if (v.is_null())
      w.xi.push_back(std::numeric_limits<double>::quiet_NaN());
    else if (v.is_number())
      w.xi.push_back(v.get<double>());
    else
      fail(Errc::ParseError, "xi entries must be numbers or null");
  }
  if (w.xi.size() != ctx.slots.size())
    fail(Errc::SlotMismatch,
         "constraint has " + std::to_string(w.xi.size()) + " values for " +
             std::to_string(ctx.slots.size()) + " slots");
  w.completion_slot = j.value("completion_slot", -1);
  return w;
}

ojson curve_to_json(const RationalCurve& curve) {
  ojson j;
  j["a"] = curve.a;
  j["b"] = curve.b;
  ojson pts = ojson::array();
  for (const CurvePoint& p : curve.points) {
    ojson o;
    o["at_inf"] = p.at_inf;
    if (!p.at_inf) o["t"] = p.t;
    pts.push_back(std::move(o));
  }
  j["points"] = std::move(pts);
  return j;
}

RationalCurve curve_from_json(const DegreeContext& ctx, const ojson& j) {
  RationalCurve c;
  if (!j.contains("a") || !j.contains("b") || !j.contains("points"))
    fail(Errc::ParseError, "curve artifact needs a, b and points");
  c.a = j["a"].get<double>();
  c.b = j["b"].get<double>();
  for (const ojson& o : j["points"]) {
    CurvePoint p;
    p.at_inf = o.value("at_inf", false);
    if (!p.at_inf) {
      if (!o.contains("t")) fail(Errc::ParseError, "finite curve point needs t");
      p.t = o["t"].get<double>();
    }
    c.points.push_back(p);
  }
  if (c.points.size() != ctx.slots.size())
    fail(Errc::SlotMismatch, "curve artifact does not match the degree's slots");
  return c;
}

ojson curves_to_json(const std::vector<RationalCurve>& curves) {
  ojson j;
  j["schema"] = kCurvesSchema;
  ojson arr = ojson::array();
  for (const RationalCurve& c : curves) arr.push_back(curve_to_json(c));
  j["curves"] = std::move(arr);
  return j;
}

std::vector<RationalCurve> curves_from_json(const DegreeContext& ctx, const ojson& j) {
  expect_schema(j, kCurvesSchema);
  std::vector<RationalCurve> out;
  for (const ojson& c : j["curves"]) out.push_back(curve_from_json(ctx, c));
  return out;
}

ojson nodes_to_json(const std::vector<NodeRecord>& nodes) {
  ojson arr = ojson::array();
  for (const NodeRecord& n : nodes) {
    ojson o;
    o["kind"] = node_kind_name(n.kind);
    o["s"] = cplx_to_json(n.s);
    o["t"] = cplx_to_json(n.t);
    o["x"] = cplx_to_json(n.x);
    o["y"] = cplx_to_json(n.y);
    if (n.quadrant >= 0) o["quadrant"] = n.quadrant;
    arr.push_back(std::move(o));
  }
  return arr;
}

ojson qi_to_json(const QiResult& qi) {
  ojson j;
  j["raw"] = qi.raw;
  j["two_kappa"] = qi.two_kappa;
  j["err"] = qi.err;
  j["certified"] = qi.certified;
  j["method"] = qi.method;
  j["evals"] = qi.evals;
  return j;
}

ojson table_to_json(const InvariantTable& table) {
  ojson j;
  j["schema"] = kTableSchema;
  ojson rows = ojson::array();
  for (const auto& [k, v] : table.rows) {
    ojson r;
    r["two_kappa"] = k;
    r["W0"] = v.first;
    r["W0_tilde"] = v.second;
    rows.push_back(std::move(r));
  }
  j["rows"] = std::move(rows);
  return j;
}

InvariantTable table_from_json(const ojson& j) {
  expect_schema(j, kTableSchema);
  InvariantTable t;
  for (const ojson& r : j["rows"])
    t.rows[r["two_kappa"].get<int>()] = {r["W0"].get<i64>(), r["W0_tilde"].get<i64>()};
  return t;
}

ojson trace_to_json(const TraceRecord& trace) {
  ojson j;
  j["schema"] = kTraceSchema;
  ojson steps = ojson::array();
  for (const StepRecord& s : trace.steps) {
    ojson o;
    o["s"] = s.s;
    o["n_solutions"] = s.n_solutions;
    o["min_gap"] = s.min_gap;
    o["table"] = table_to_json(s.table);
    steps.push_back(std::move(o));
  }
  j["steps"] = std::move(steps);
  ojson events = ojson::array();
  for (const WallEvent& e : trace.events) {
    ojson o;
    o["s"] = e.s;
    o["kind"] = event_kind_name(e.kind);
    o["note"] = e.note;
    ojson w;
    w["gap_sign_change"] = e.witness.gap_sign_change;
    w["gap_slots"] = ojson::array({e.witness.gap_slot_a, e.witness.gap_slot_b});
    w["min_constraint_gap"] = e.witness.min_constraint_gap;
    w["min_node_boundary_dist"] = e.witness.min_node_boundary_dist;
    w["min_node_pair_dist"] = e.witness.min_node_pair_dist;
    w["min_node_disc"] = e.witness.min_node_disc;
    w["max_coeff_log"] = e.witness.max_coeff_log;
    o["witness"] = std::move(w);
    events.push_back(std::move(o));
  }
  j["events"] = std::move(events);
  j["table_from"] = table_to_json(trace.table_from);
  j["table_to"] = table_to_json(trace.table_to);
  j["tables_equal"] = trace.tables_equal;
  return j;
}

ojson verify_to_json(const VerifyReport& rep) {
  ojson j;
  j["ok"] = rep.ok;
  j["reasons"] = rep.reasons;
  j["flags"] = rep.flags;
  j["max_residual"] = rep.max_residual;
  j["heldout_residual"] = rep.heldout_residual;
  j["min_param_gap"] = rep.min_param_gap;
  j["node_count"] = rep.node_count;
  j["node_target"] = rep.node_target;
  j["qi_certified"] = rep.qi_certified;
  j["kappa_raw"] = rep.kappa_raw;
  return j;
}

std::string table_to_csv(const InvariantTable& table) {
  std::ostringstream os;
  os << "two_kappa,W0,W0_tilde\n";
  for (const auto& [k, v] : table.rows) os << k << "," << v.first << "," << v.second << "\n";
  return os.str();
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string fnv1a64_hex(std::string_view bytes) {
  static const char* digits = "0123456789abcdef";
  std::uint64_t h = fnv1a64(bytes);
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[h & 0xf];
    h >>= 4;
  }
  return out;
}

ojson make_manifest(const std::string& command, std::uint64_t seed,
                    const std::vector<std::pair<std::string, std::string>>& input_digests,
                    const ojson& options) {
  ojson m;
  m["tool"] = "refinv";
  m["version"] = "0.1.0";
  m["command"] = command;
  m["seed"] = seed;
  ojson inputs;
  for (const auto& [name, digest] : input_digests) inputs[name] = digest;
  m["inputs"] = std::move(inputs);
  m["options"] = options;
  return m;
}

std::string ResultCache::key_for(const ojson& manifest) {
  return fnv1a64_hex(manifest.dump());
}

std::optional<std::string> ResultCache::get(const std::string& key) const {
  std::filesystem::path p = std::filesystem::path(dir_) / (key + ".json");
  std::error_code ec;
  if (!std::filesystem::exists(p, ec) || ec) return std::nullopt;
  return read_file(p.string());
}

void ResultCache::put(const std::string& key, const std::string& payload) const {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) fail(Errc::IoError, "cannot create cache directory " + dir_);
  write_file((std::filesystem::path(dir_) / (key + ".json")).string(), payload);
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) fail(Errc::IoError, "cannot open " + path + " for reading");
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

void write_file(const std::string& path, const std::string& payload) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) fail(Errc::IoError, "cannot open " + path + " for writing");
  f.write(payload.data(), static_cast<std::streamsize>(payload.size()));
  if (!f) fail(Errc::IoError, "short write to " + path);
}

std::string emit_plot_data(const DegreeContext& ctx,
                           const std::vector<RationalCurve>& curves) {
  // Lattice points of the polygon, for the moment-map weights.
  const auto& verts = ctx.poly.vertices;
  i64 xlo = verts[0].x, xhi = verts[0].x, ylo = verts[0].y, yhi = verts[0].y;
  for (IVec v : verts) {
    xlo = std::min(xlo, v.x); xhi = std::max(xhi, v.x);
    ylo = std::min(ylo, v.y); yhi = std::max(yhi, v.y);
  }
  std::vector<IVec> lattice;
  for (i64 x = xlo; x <= xhi; ++x)
    for (i64 y = ylo; y <= yhi; ++y) {
      bool in = true;
      for (std::size_t i = 0; i < verts.size() && in; ++i)
        in = cross(verts[(i + 1) % verts.size()] - verts[i], IVec{x, y} - verts[i]) >= 0;
      if (in) lattice.push_back({x, y});
    }

  // mu(x, y) = sum_w w * |x|^(2 w1) |y|^(2 w2) / sum_w ..., evaluated through
  // logs so boundary approaches stay finite.
  auto moment = [&](double lx, double ly) {
    double best = -1e300;
    std::vector<double> lw(lattice.size());
    for (std::size_t i = 0; i < lattice.size(); ++i) {
      lw[i] = 2.0 * (static_cast<double>(lattice[i].x) * lx + static_cast<double>(lattice[i].y) * ly);
      best = std::max(best, lw[i]);
    }
    double den = 0.0, nx = 0.0, ny = 0.0;
    for (std::size_t i = 0; i < lattice.size(); ++i) {
      double w = std::exp(lw[i] - best);
      den += w;
      nx += w * static_cast<double>(lattice[i].x);
      ny += w * static_cast<double>(lattice[i].y);
    }
    return std::pair<double, double>{nx / den, ny / den};
  };

  std::ostringstream os;
  os << "series,label,u,v\n";
  os.precision(12);
  for (std::size_t i = 0; i <= verts.size(); ++i) {
    IVec v = verts[i % verts.size()];
    os << "polygon,0," << v.x << "," << v.y << "\n";
  }

  constexpr double kPi = 3.14159265358979323846;
  for (std::size_t ci = 0; ci < curves.size(); ++ci) {
    const RationalCurve& c = curves[ci];
    const int samples = 600;
    for (int k = 1; k < samples; ++k) {
      double th = -kPi / 2 + kPi * static_cast<double>(k) / samples;
      double t = std::tan(th);
      bool near_marked = false;
      for (const CurvePoint& p : c.points)
        if (!p.at_inf && std::fabs(t - p.t) < 1e-9) near_marked = true;
      if (near_marked) continue;
      double lx = std::log(c.a), ly = std::log(c.b);
      for (std::size_t j = 0; j < c.points.size(); ++j) {
        if (c.points[j].at_inf) continue;
        IVec a = ctx.degree.entries[static_cast<std::size_t>(ctx.slots[j].entry)].a;
        double l = std::log(std::fabs(t - c.points[j].t));
        lx += static_cast<double>(-a.x) * l;
        ly += static_cast<double>(-a.y) * l;
      }
      auto [u, v] = moment(lx, ly);
      os << "curve," << ci << "," << u << "," << v << "\n";
    }
    for (const NodeRecord& n : find_nodes(ctx, c)) {
      if (n.kind == NodeKind::ComplexPair) continue;
      double ax = std::fabs(n.x.real()), ay = std::fabs(n.y.real());
      if (ax <= 0.0 || ay <= 0.0) continue;
      auto [u, v] = moment(std::log(ax), std::log(ay));
      os << "node," << ci << ":" << node_kind_name(n.kind) << "," << u << "," << v << "\n";
    }
  }
  return os.str();
}

}  // namespace refinv
