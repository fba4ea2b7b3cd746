// Acceptance suite: eight end-to-end criteria, one [PASS]/[FAIL] line each.
// Hard pass/fail in Release builds; any failure exits nonzero immediately.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <limits>
#include <sstream>
#include <utility>
#include <string>
#include <vector>

#include "io.hpp"
#include "rng.hpp"

namespace {

using namespace refinv;

// Always-on requirement: never compiled out in Release.
#define REQUIRE(cond, msg)                                                      \
  do {                                                                          \
    if (!(cond)) {                                                              \
      std::cerr << "[FAIL] " << __FILE__ << ":" << __LINE__ << " " << msg       \
                << "\n";                                                        \
      std::exit(1);                                                             \
    }                                                                           \
  } while (0)

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void pass(int criterion, const std::string& what, Clock::time_point t0, double limit_s) {
  double dt = seconds_since(t0);
  REQUIRE(dt < limit_s, "criterion " << criterion << " exceeded its time budget: " << dt
                                     << " s >= " << limit_s << " s");
  std::ostringstream line;
  line.setf(std::ios::fixed);
  line.precision(2);
  line << "[PASS] " << criterion << " " << what << " (" << dt << " s)";
  std::cout << line.str() << "\n";
}

std::vector<IVec> conic_raw() { return {{2, 2}, {-2, 0}, {0, -2}}; }
std::vector<IVec> quartic_raw() { return {{4, 4}, {-4, 0}, {0, -4}}; }
std::vector<IVec> mixed_raw() { return {{2, 2}, {2, 2}, {-4, 0}, {0, -4}}; }
std::vector<IVec> square_raw() { return {{2, 0}, {0, 2}, {-2, 0}, {0, -2}}; }

RationalCurve triangle_curve(double a, double b) {
  RationalCurve c;
  c.a = a;
  c.b = b;
  c.points = {{0.0, true}, {0.0, false}, {1.0, false}};
  return c;
}

RationalCurve mixed_curve(double a, double b, double t2, double t3) {
  RationalCurve c;
  c.a = a;
  c.b = b;
  c.points = {{0.0, false}, {0.0, true}, {t2, false}, {t3, false}};
  return c;
}

RationalCurve square_curve(double a, double b, double tb) {
  RationalCurve c;
  c.a = a;
  c.b = b;
  c.points = {{0.0, true}, {0.0, false}, {1.0, false}, {tb, false}};
  return c;
}

// ---- criterion 1: Pick identity on random convex lattice polygons ----

std::vector<IVec> convex_hull(std::vector<IVec> pts) {
  std::sort(pts.begin(), pts.end(),
            [](IVec a, IVec b) { return a.x != b.x ? a.x < b.x : a.y < b.y; });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  std::size_t n = pts.size();
  if (n < 3) return {};
  std::vector<IVec> h(2 * n);
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {
    while (k >= 2 && cross(h[k - 1] - h[k - 2], pts[i] - h[k - 2]) <= 0) --k;
    h[k++] = pts[i];
  }
  for (std::size_t i = n - 1, lo = k + 1; i-- > 0;) {
    while (k >= lo && cross(h[k - 1] - h[k - 2], pts[i] - h[k - 2]) <= 0) --k;
    h[k++] = pts[i];
  }
  h.resize(k - 1);
  return h;
}

std::pair<i64, i64> count_points_brute(const std::vector<IVec>& v) {
  i64 xlo = v[0].x, xhi = v[0].x, ylo = v[0].y, yhi = v[0].y;
  for (IVec p : v) {
    xlo = std::min(xlo, p.x);
    xhi = std::max(xhi, p.x);
    ylo = std::min(ylo, p.y);
    yhi = std::max(yhi, p.y);
  }
  i64 interior = 0, boundary = 0;
  for (i64 x = xlo; x <= xhi; ++x)
    for (i64 y = ylo; y <= yhi; ++y) {
      bool inside = true, on_edge = false;
      for (std::size_t i = 0; i < v.size(); ++i) {
        i64 c = cross(v[(i + 1) % v.size()] - v[i], IVec{x, y} - v[i]);
        if (c < 0) {
          inside = false;
          break;
        }
        if (c == 0) on_edge = true;
      }
      if (!inside) continue;
      if (on_edge)
        ++boundary;
      else
        ++interior;
    }
  return {interior, boundary};
}

void criterion1() {
  Clock::time_point t0 = Clock::now();
  Rng rng(0xACCE5501u);
  int built = 0;
  while (built < 100) {
    int npts = 3 + static_cast<int>(rng.next_u64() % 12);
    std::vector<IVec> pts;
    for (int i = 0; i < npts; ++i)
      pts.push_back({static_cast<i64>(rng.next_u64() % 19),
                     static_cast<i64>(rng.next_u64() % 19)});
    std::vector<IVec> hull = convex_hull(pts);
    if (hull.size() < 3 || hull.size() > 20) continue;
    ++built;
    LatticePolygon poly = polygon_from_vertices(hull);
    PolygonMetrics m = polygon_metrics(poly);
    auto [interior, boundary] = count_points_brute(poly.vertices);
    REQUIRE(m.interior == interior,
            "interior count mismatch: " << m.interior << " vs brute " << interior);
    REQUIRE(m.boundary == boundary,
            "boundary count mismatch: " << m.boundary << " vs brute " << boundary);
    REQUIRE(m.dbl_area == 2 * interior + boundary - 2,
            "Pick identity violated: 2A=" << m.dbl_area << " I=" << interior
                                          << " B=" << boundary);
  }
  pass(1, "Pick identity exact on 100 random convex lattice polygons", t0, 5.0);
}

// ---- criterion 2: completion drives the product relation to zero ----

void criterion2() {
  Clock::time_point t0 = Clock::now();
  std::vector<DegreeContext> degrees;
  degrees.push_back(make_context(conic_raw()));
  degrees.push_back(make_context(mixed_raw()));
  degrees.push_back(make_context(square_raw()));

  for (int i = 0; i < 100; ++i) {
    const DegreeContext& ctx = degrees[static_cast<std::size_t>(i % 3)];
    BoundaryConstraint w = sample_chamber(ctx, 1000 + static_cast<std::uint64_t>(i));

    // Knock out one value (rotating through the slots) and restore it from
    // the product relation.
    BoundaryConstraint gap = w;
    std::size_t knock = static_cast<std::size_t>(i) % ctx.slots.size();
    gap.xi[knock] = std::numeric_limits<double>::quiet_NaN();
    gap.completion_slot = -1;
    BoundaryConstraint filled = complete(ctx, gap);
    double res = menelaus_residual(ctx, filled).residual;
    REQUIRE(std::fabs(res) < 1e-12,
            "completion left residual " << res << " on sample " << i);

    // The residual is a linear functional of the log coordinates: additive
    // under coordinate-wise products and constant across reference choices.
    BoundaryConstraint w2 = sample_chamber(ctx, 5000 + static_cast<std::uint64_t>(i));
    BoundaryConstraint prod = w;
    for (std::size_t j = 0; j < w.xi.size(); ++j) prod.xi[j] = w.xi[j] * w2.xi[j];
    double r1 = menelaus_residual(ctx, w).residual;
    double r2 = menelaus_residual(ctx, w2).residual;
    double rp = menelaus_residual(ctx, prod).residual;
    REQUIRE(std::fabs(rp - r1 - r2) < 1e-10,
            "log-linearity violated: " << rp << " vs " << r1 + r2);
    double alt = menelaus_residual(ctx, filled, IVec{2, 7}).residual;
    REQUIRE(std::fabs(alt - res) < 1e-10,
            "residual depends on the reference functional: " << alt << " vs " << res);
  }
  pass(2, "completion kills the product-relation residual on 100 samples, 3 degrees", t0,
       5.0);
}

// ---- criterion 3: conic end-to-end against the closed form ----

std::string criterion3_artifacts() {
  DegreeContext ctx = make_context(conic_raw());
  std::ostringstream bytes;
  InvariantTable first;
  for (std::uint64_t seed : {1, 2, 3, 4, 5}) {
    BoundaryConstraint w = sample_chamber(ctx, seed);
    TangencySystem sys = build_system(ctx, w);
    std::vector<RationalCurve> sols = solve_all(sys, seed ^ 0xC3u);
    REQUIRE(sols.size() == 1, "conic chamber " << seed << " gave " << sols.size()
                                               << " curves, expected exactly 1");
    const RationalCurve& c = sols[0];
    // Closed form in the solver's gauge [inf, 0, 1]: x = a t^2, y = b (t-1)^2
    // with a = xi_bottom and b = 1/xi_left.
    REQUIRE(c.points[0].at_inf && c.points[1].t == 0.0 && c.points[2].t == 1.0,
            "conic solution is not in the expected gauge");
    REQUIRE(std::fabs(c.a - w.xi[2]) < 1e-8 * w.xi[2],
            "coefficient a=" << c.a << " differs from the closed form " << w.xi[2]);
    REQUIRE(std::fabs(c.b - 1.0 / w.xi[1]) < 1e-8 / w.xi[1],
            "coefficient b=" << c.b << " differs from the closed form " << 1.0 / w.xi[1]);
    REQUIRE(find_nodes(ctx, c).empty(), "conic curve unexpectedly has nodes");

    QiResult up = compute_qi(ctx, c, Half::Upper);
    REQUIRE(up.certified, "conic quantum index not certified");
    REQUIRE(std::abs(up.two_kappa) == 4,
            "conic |kappa| = " << std::abs(up.two_kappa) / 2.0 << ", expected 2");

    InvariantTable table = assemble_w0(ctx, sols);
    InvariantTable want;
    want.rows[-4] = {1, -1};
    want.rows[4] = {1, 1};
    REQUIRE(table == want, "conic table differs from the frozen support on 2k = +-4");
    if (seed == 1)
      first = table;
    else
      REQUIRE(table == first, "conic tables differ between chambers " << seed << " and 1");

    bytes << curves_to_json(sols).dump(2) << "\n"
          << qi_to_json(up).dump(2) << "\n"
          << table_to_json(table).dump(2) << "\n";
  }
  return bytes.str();
}

// ---- criterion 4: mixed-quartic node budget, antisymmetry, support ----

std::string criterion4_artifacts() {
  DegreeContext ctx = make_context(mixed_raw());

  // Antisymmetry factors fixed by the degree: the number of even-order slots
  // for W0 and the total number of slots for W0_tilde.
  int even_slots = 0;
  for (const Slot& s : ctx.slots)
    if (ctx.degree.entries[static_cast<std::size_t>(s.entry)].k % 2 == 0) ++even_slots;
  i64 sgn_w0 = even_slots % 2 ? -1 : 1;
  i64 sgn_w0t = ctx.slots.size() % 2 ? -1 : 1;

  std::ostringstream bytes;
  InvariantTable first;
  std::size_t first_count = 0;
  for (std::uint64_t seed : {21, 101, 202, 303, 404}) {
    BoundaryConstraint w = sample_chamber(ctx, seed);
    TangencySystem sys = build_system(ctx, w);
    std::vector<RationalCurve> sols = solve_all(sys, seed ^ 0x5eedu);
    REQUIRE(!sols.empty(), "no curves in chamber " << seed);

    for (const RationalCurve& c : sols) {
      i64 weight = 0;
      for (const NodeRecord& n : find_nodes(ctx, c))
        weight += n.kind == NodeKind::ComplexPair ? 2 : 1;
      REQUIRE(weight == 3, "curve in chamber " << seed << " has " << weight
                                               << " nodes, expected exactly 3");
    }

    InvariantTable table = assemble_w0(ctx, sols);
    for (const auto& [k, v] : table.rows) {
      REQUIRE(k % 8 == 0, "support violates kappa = 0 mod 4: found 2k = " << k);
      auto it = table.rows.find(-k);
      REQUIRE(it != table.rows.end(), "missing mirror row for 2k = " << k);
      REQUIRE(it->second.first == sgn_w0 * v.first,
              "W0 antisymmetry fails at 2k = " << k);
      REQUIRE(it->second.second == sgn_w0t * v.second,
              "W0_tilde antisymmetry fails at 2k = " << k);
    }

    if (seed == 21) {
      first = table;
      first_count = sols.size();
    } else {
      REQUIRE(sols.size() == first_count, "solution count changed between chambers: "
                                              << sols.size() << " vs " << first_count);
      REQUIRE(table == first, "tables differ between chambers " << seed << " and 21");
    }
    bytes << curves_to_json(sols).dump(2) << "\n" << table_to_json(table).dump(2) << "\n";
  }
  REQUIRE(first_count == 2, "expected 2 curves per chamber, found " << first_count);
  return bytes.str();
}

// ---- criterion 5: quantum-index certification corpus ----

std::string criterion5_artifacts() {
  struct Entry {
    DegreeContext ctx;
    RationalCurve curve;
  };
  std::vector<Entry> corpus;
  DegreeContext conic = make_context(conic_raw());
  DegreeContext quartic = make_context(quartic_raw());
  DegreeContext mixed = make_context(mixed_raw());
  DegreeContext square = make_context(square_raw());
  corpus.push_back({conic, triangle_curve(1.0, 1.0)});
  corpus.push_back({conic, triangle_curve(3.0, 0.5)});
  corpus.push_back({quartic, triangle_curve(1.0, 1.0)});
  corpus.push_back({quartic, triangle_curve(3.0, 0.5)});
  corpus.push_back({mixed, mixed_curve(1.3, 0.7, 1.0, 2.0)});
  corpus.push_back({mixed, mixed_curve(1.3, 0.7, 1.0, 0.5)});
  corpus.push_back({mixed, mixed_curve(1.3, 0.7, 1.0, -2.0)});
  corpus.push_back({square, square_curve(2.0, 3.0, 0.5)});
  corpus.push_back({square, square_curve(2.0, 3.0, 1.5)});

  const std::array<std::array<double, 4>, 3> gauges = {
      {{2.0, 1.0, 0.0, 1.0}, {1.0, 1.0, 1.0, 2.0}, {3.0, -1.0, 1.0, 1.0}}};

  std::ostringstream bytes;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const DegreeContext& ctx = corpus[i].ctx;
    const RationalCurve& c = corpus[i].curve;
    QiResult up = compute_qi(ctx, c, Half::Upper);
    QiResult lo = compute_qi(ctx, c, Half::Lower);
    REQUIRE(up.certified, "corpus curve " << i << " not certified");

    double doubled = 2.0 * up.raw;
    REQUIRE(std::fabs(doubled - std::llround(doubled)) < 0.1,
            "corpus curve " << i << ": 2*raw = " << doubled
                            << " is not within 0.1 of an integer");
    double area = static_cast<double>(ctx.metrics.dbl_area) / 2.0;
    REQUIRE(std::fabs(up.raw) <= area + 1e-6, "corpus curve " << i << ": |kappa| = "
                                                              << std::fabs(up.raw)
                                                              << " exceeds the area bound "
                                                              << area);
    double planar = qi_2d_oracle(ctx, c, Half::Upper, 2e-3, 600000);
    REQUIRE(std::fabs(up.raw - planar) < 1e-2,
            "corpus curve " << i << ": boundary and planar quadratures disagree: "
                            << up.raw << " vs " << planar);
    REQUIRE(lo.raw == -up.raw && lo.two_kappa == -up.two_kappa,
            "corpus curve " << i << ": half flip is not exactly antisymmetric");

    for (const auto& g : gauges) {
      QiResult re = compute_qi(ctx, regauge(ctx, c, g[0], g[1], g[2], g[3]), Half::Upper);
      REQUIRE(re.certified && re.two_kappa == up.two_kappa,
              "corpus curve " << i << ": quantum index changed under a re-gauge");
    }
    bytes << qi_to_json(up).dump(2) << "\n" << qi_to_json(lo).dump(2) << "\n";
  }
  return bytes.str();
}

// ---- criterion 6: point-collision wall crossing preserves the tables ----

std::string criterion6_artifacts() {
  DegreeContext ctx = make_context(mixed_raw());
  ConstraintPath path = make_path(ctx, sample_chamber(ctx, 21), sample_chamber(ctx, 22));

  TraceRecord coarse = track(path, 1);
  REQUIRE(coarse.events.size() == 1,
          "expected exactly one wall event, found " << coarse.events.size());
  REQUIRE(coarse.events[0].kind == EventKind::PointCollision,
          "event classified as " << event_kind_name(coarse.events[0].kind)
                                 << ", expected PointCollision");
  REQUIRE(coarse.tables_equal, "invariant tables differ across the wall");

  TrackOptions halved;
  halved.dt0 = 5e-3;
  TraceRecord fine = track(path, 1, halved);
  REQUIRE(fine.events.size() == 1, "step halving changed the event count");
  REQUIRE(std::fabs(fine.events[0].s - coarse.events[0].s) < 1e-4,
          "event localization moved by " << std::fabs(fine.events[0].s - coarse.events[0].s)
                                         << " under step halving");
  REQUIRE(fine.table_from == coarse.table_from && fine.table_to == coarse.table_to,
          "step halving changed the endpoint tables");
  return trace_to_json(coarse).dump(2) + "\n";
}

// ---- criterion 7: sign formulas and the admissible quadrant condition ----

void criterion7() {
  Clock::time_point t0 = Clock::now();

  // Exhaustive truth table over node tallies in {0,1,2} and orientation-sign
  // vectors of length <= 4 (entering only through their products).
  for (int e0 = 0; e0 <= 2; ++e0)
    for (int e2 = 0; e2 <= 2; ++e2)
      for (int h1 = 0; h1 <= 2; ++h1)
        for (int h2 = 0; h2 <= 2; ++h2)
          for (int h3 = 0; h3 <= 2; ++h3)
            for (int len = 1; len <= 4; ++len)
              for (int bits = 0; bits < (1 << len); ++bits) {
                int prod_all = 1, prod_even = 1;
                for (int j = 0; j < len; ++j) {
                  int s = (bits >> j) & 1 ? -1 : 1;
                  prod_all *= s;
                  if (j % 2 == 0) prod_even *= s;  // even-order subset
                }
                CurveDescriptor d;
                d.ell = {e0, 0, e2, 0};
                d.hyp = {0, h1, h2, h3};
                d.prod_even = prod_even;
                d.prod_all = prod_all;

                int w0 = (e0 % 2 ? -1 : 1) * prod_even;
                REQUIRE(sign_w0(d) == w0, "sign_w0 truth table mismatch");
                int w0t = ((e0 + e2) % 2 ? -1 : 1) * prod_all;
                REQUIRE(sign_w0_tilde(d) == w0t, "sign_w0_tilde truth table mismatch");
                for (int q = 0; q < 4; ++q)
                  REQUIRE(sign_g1(d, q) == w0 * (d.hyp[static_cast<std::size_t>(q)] % 2
                                                     ? -1
                                                     : 1),
                          "sign_g1 truth table mismatch at quadrant " << q);
                REQUIRE(sign_g2(d) == w0 * ((h1 + h2 + h3) % 2 ? -1 : 1),
                        "sign_g2 truth table mismatch");
              }

  // Quadrant admissibility: no restriction for the triangle, only the
  // both-negative quadrant for the rectangle.
  LatticePolygon tri = make_context(quartic_raw()).poly;
  REQUIRE(aqc_check(tri, -1, 1) && aqc_check(tri, 1, -1) && aqc_check(tri, -1, -1),
          "triangle should admit every non-positive quadrant");
  LatticePolygon sq = make_context(square_raw()).poly;
  REQUIRE(aqc_check(sq, -1, -1), "rectangle should admit the both-negative quadrant");
  REQUIRE(!aqc_check(sq, -1, 1) && !aqc_check(sq, 1, -1),
          "rectangle admits only the both-negative quadrant");

  pass(7, "sign rules exhaustive truth tables and quadrant admissibility", t0, 1.0);
}

// ---- criterion 8: byte-identical artifacts on rerun ----

std::string run_cli(const std::string& args, const std::string& out_file) {
  std::string cmd = std::string("REFINV_CACHE= \"") + REFINV_CLI_PATH + "\" " + args +
                    " --out \"" + out_file + "\" 2>/dev/null";
  int rc = std::system(cmd.c_str());
  REQUIRE(rc == 0, "CLI run failed (exit " << rc << "): " << args);
  return read_file(out_file);
}

void criterion8(const std::string& t3, const std::string& t4, const std::string& t5,
                const std::string& t6) {
  Clock::time_point t0 = Clock::now();

  REQUIRE(criterion3_artifacts() == t3, "criterion 3 artifacts changed on rerun");
  REQUIRE(criterion4_artifacts() == t4, "criterion 4 artifacts changed on rerun");
  REQUIRE(criterion5_artifacts() == t5, "criterion 5 artifacts changed on rerun");
  REQUIRE(criterion6_artifacts() == t6, "criterion 6 artifacts changed on rerun");

  // The command-line tool must be deterministic end to end as well,
  // manifests included.
  DegreeContext ctx = make_context(mixed_raw());
  std::string degree = "'" + degree_to_json(ctx.degree).dump() + "'";
  std::string from = "'" + constraint_to_json(sample_chamber(ctx, 21)).dump() + "'";
  std::string to = "'" + constraint_to_json(sample_chamber(ctx, 22)).dump() + "'";
  std::filesystem::path tmp = std::filesystem::temp_directory_path();
  std::string fa = (tmp / "refinv_acc_a.json").string();
  std::string fb = (tmp / "refinv_acc_b.json").string();

  std::vector<std::string> invocations = {
      "sample --degree " + degree + " --seed 21",
      "invariants --degree " + degree + " --seed 21",
      "walk --degree " + degree + " --from " + from + " --to " + to + " --seed 1",
  };
  for (const std::string& args : invocations) {
    std::string a = run_cli(args, fa);
    std::string b = run_cli(args, fb);
    REQUIRE(!a.empty(), "CLI produced an empty artifact: " << args);
    REQUIRE(a == b, "CLI artifacts differ between reruns: " << args);
  }
  std::filesystem::remove(fa);
  std::filesystem::remove(fb);

  pass(8, "reruns of criteria 3-6 and the CLI produce byte-identical artifacts", t0,
       300.0);
}

}  // namespace

int main() {
  criterion1();
  criterion2();

  Clock::time_point t3 = Clock::now();
  std::string a3 = criterion3_artifacts();
  pass(3, "conic end-to-end: 1 curve per chamber, closed form, |kappa| = 2, stable table",
       t3, 30.0);

  Clock::time_point t4 = Clock::now();
  std::string a4 = criterion4_artifacts();
  pass(4, "mixed quartic: 3 nodes per curve, exact antisymmetry, support in 4Z, stable",
       t4, 300.0);

  Clock::time_point t5 = Clock::now();
  std::string a5 = criterion5_artifacts();
  pass(5, "quantum index: half-integral, area-bounded, two quadratures, gauge-free", t5,
       120.0);

  Clock::time_point t6 = Clock::now();
  std::string a6 = criterion6_artifacts();
  pass(6, "wall crossing: equal tables across one reproducibly localized collision", t6,
       300.0);

  criterion7();
  criterion8(a3, a4, a5, a6);
  return 0;
}
