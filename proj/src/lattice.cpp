#include "lattice.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <sstream>
#include <tuple>

namespace refinv {

i64 gcd_nonneg(i64 a, i64 b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    i64 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

i64 lattice_length(IVec v) {
  if (v.x == 0 && v.y == 0) fail(Errc::ZeroVector, "zero vector has no lattice length");
  return gcd_nonneg(v.x, v.y);
}

IVec primitive(IVec v) {
  i64 g = lattice_length(v);
  return {v.x / g, v.y / g};
}

std::string format_ivec(IVec v) {
  std::ostringstream os;
  os << "(" << v.x << "," << v.y << ")";
  return os.str();
}

namespace {

// Extended Euclid: returns (g, u, v) with u*a + v*b = g, g = gcd up to sign.
std::tuple<i64, i64, i64> ext_gcd(i64 a, i64 b) {
  if (b == 0) return {a, 1, 0};
  auto [g, u, v] = ext_gcd(b, a % b);
  return {g, v, u - (a / b) * v};
}

i64 floor_div(i64 a, i64 b) {  // b > 0
  return a >= 0 ? a / b : -((-a + b - 1) / b);
}

// Strict order on directions by angle in (-pi, pi], computed exactly.
int angle_rank_signed(IVec u) {
  if (u.y < 0) return 0;                 // (-pi, 0)
  if (u.y == 0 && u.x > 0) return 1;     // 0
  if (u.y > 0) return 2;                 // (0, pi)
  return 3;                              // pi
}

bool angle_less_signed(IVec u, IVec v) {
  int ru = angle_rank_signed(u), rv = angle_rank_signed(v);
  if (ru != rv) return ru < rv;
  return cross(u, v) > 0;
}

// Strict order on outer normals by angle in [0, 2*pi), computed exactly.
int angle_rank_unsigned(IVec u) {
  if (u.y == 0 && u.x > 0) return 0;     // 0
  if (u.y > 0) return 1;                 // (0, pi)
  if (u.y == 0 && u.x < 0) return 2;     // pi
  return 3;                              // (pi, 2*pi)
}

bool normal_angle_less(IVec u, IVec v) {
  int ru = angle_rank_unsigned(u), rv = angle_rank_unsigned(v);
  if (ru != rv) return ru < rv;
  return cross(u, v) > 0;
}

bool lex_less(IVec u, IVec v) {
  return u.x != v.x ? u.x < v.x : u.y < v.y;
}

// Rotate the side cycle so it starts at the side with minimal outer-normal
// angle, and recompute nothing else: the cycle order is already CCW.
void canonicalize_side_order(std::vector<Side>& sides) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < sides.size(); ++i)
    if (normal_angle_less(sides[i].normal, sides[best].normal)) best = i;
  std::rotate(sides.begin(), sides.begin() + static_cast<std::ptrdiff_t>(best),
              sides.end());
}

}  // namespace

ToricDegree validate_degree(const std::vector<IVec>& raw,
                            const std::vector<int>* side_assignment) {
  if (raw.size() < 3)
    fail(Errc::DegenerateDegree,
         "a toric degree needs at least 3 entries, got " + std::to_string(raw.size()));
  IVec sum{0, 0};
  for (std::size_t i = 0; i < raw.size(); ++i) {
    IVec a = raw[i];
    if (a.x == 0 && a.y == 0)
      fail(Errc::ZeroVector, "entry " + std::to_string(i) + " is the zero vector");
    if (a.x % 2 != 0 || a.y % 2 != 0)
      fail(Errc::NotEven,
           "entry " + std::to_string(i) + " = " + format_ivec(a) + " has an odd component");
    sum = sum + a;
  }
  if (sum.x != 0 || sum.y != 0)
    fail(Errc::NotBalanced, "entries sum to " + format_ivec(sum) + ", expected (0,0)");

  ToricDegree degree;
  degree.entries.reserve(raw.size());
  for (IVec a : raw) degree.entries.push_back({a, lattice_length(a) / 2, -1});

  // Side membership is forced by the dual direction; build the polygon to get
  // canonical side indices and check any user-provided assignment against it.
  LatticePolygon poly = build_polygon(degree);
  for (std::size_t s = 0; s < poly.sides.size(); ++s)
    for (int e : poly.sides[s].entries)
      degree.entries[static_cast<std::size_t>(e)].side = static_cast<int>(s);

  if (side_assignment != nullptr) {
    if (side_assignment->size() != raw.size())
      fail(Errc::BadSideAssignment,
           "side assignment has " + std::to_string(side_assignment->size()) +
               " labels for " + std::to_string(raw.size()) + " entries");
    for (std::size_t i = 0; i < raw.size(); ++i)
      if ((*side_assignment)[i] != degree.entries[i].side)
        fail(Errc::BadSideAssignment,
             "entry " + std::to_string(i) + " labeled side " +
                 std::to_string((*side_assignment)[i]) + " but its direction puts it on side " +
                 std::to_string(degree.entries[i].side));
  }
  return degree;
}

LatticePolygon build_polygon(const ToricDegree& degree) {
  // Dual edge vector of an entry is the entry rotated a quarter turn CCW.
  struct Group {
    IVec dir;
    i64 length = 0;
    std::vector<int> entries;
  };
  std::vector<Group> groups;
  for (std::size_t i = 0; i < degree.entries.size(); ++i) {
    IVec e = rot90(degree.entries[i].a);
    IVec d = primitive(e);
    i64 len = lattice_length(e);
    auto it = std::find_if(groups.begin(), groups.end(),
                           [&](const Group& g) { return g.dir == d; });
    if (it == groups.end()) {
      groups.push_back({d, len, {static_cast<int>(i)}});
    } else {
      it->length += len;
      it->entries.push_back(static_cast<int>(i));
    }
  }
  if (groups.size() < 3)
    fail(Errc::DegenerateDegree,
         "dual directions span only " + std::to_string(groups.size()) +
         " rays; the dual polygon is degenerate");

  // Chaining edge vectors in increasing angle order yields the convex dual
  // polygon; balance of the degree guarantees the chain closes.
  std::sort(groups.begin(), groups.end(),
            [](const Group& a, const Group& b) { return angle_less_signed(a.dir, b.dir); });

  std::vector<IVec> verts;
  verts.reserve(groups.size());
  IVec p{0, 0};
  for (const Group& g : groups) {
    verts.push_back(p);
    p = p + g.length * g.dir;
  }
  if (p != IVec{0, 0}) fail(Errc::Internal, "dual edge chain failed to close");

  std::size_t anchor = 0;
  for (std::size_t i = 1; i < verts.size(); ++i)
    if (lex_less(verts[i], verts[anchor])) anchor = i;
  IVec shift = verts[anchor];
  std::rotate(verts.begin(), verts.begin() + static_cast<std::ptrdiff_t>(anchor), verts.end());
  std::rotate(groups.begin(), groups.begin() + static_cast<std::ptrdiff_t>(anchor), groups.end());
  for (IVec& v : verts) v = v - shift;

  LatticePolygon poly;
  poly.vertices = verts;
  poly.sides.reserve(groups.size());
  for (std::size_t i = 0; i < groups.size(); ++i) {
    Side s;
    s.dir = groups[i].dir;
    s.normal = rot270(groups[i].dir);
    s.start = verts[i];
    s.length = groups[i].length;
    s.entries = groups[i].entries;
    poly.sides.push_back(std::move(s));
  }
  canonicalize_side_order(poly.sides);
  return poly;
}

LatticePolygon polygon_from_vertices(std::vector<IVec> vertices) {
  std::size_t n = vertices.size();
  if (n < 3) fail(Errc::DegenerateDegree, "polygon needs at least 3 vertices");
  for (std::size_t i = 0; i < n; ++i) {
    IVec e0 = vertices[(i + 1) % n] - vertices[i];
    IVec e1 = vertices[(i + 2) % n] - vertices[(i + 1) % n];
    if (e0 == IVec{0, 0})
      fail(Errc::DegenerateDegree, "repeated consecutive vertex in polygon");
    if (cross(e0, e1) <= 0)
      fail(Errc::DegenerateDegree,
           "vertex cycle is not strictly convex counterclockwise at index " +
               std::to_string((i + 1) % n));
  }
  std::size_t anchor = 0;
  for (std::size_t i = 1; i < n; ++i)
    if (lex_less(vertices[i], vertices[anchor])) anchor = i;
  std::rotate(vertices.begin(), vertices.begin() + static_cast<std::ptrdiff_t>(anchor),
              vertices.end());

  LatticePolygon poly;
  poly.vertices = vertices;
  for (std::size_t i = 0; i < n; ++i) {
    IVec e = vertices[(i + 1) % n] - vertices[i];
    Side s;
    s.dir = primitive(e);
    s.normal = rot270(s.dir);
    s.start = vertices[i];
    s.length = lattice_length(e);
    poly.sides.push_back(std::move(s));
  }
  canonicalize_side_order(poly.sides);
  return poly;
}

PolygonMetrics polygon_metrics(const LatticePolygon& poly) {
  const auto& v = poly.vertices;
  std::size_t n = v.size();
  PolygonMetrics m;
  for (std::size_t i = 0; i < n; ++i) m.dbl_area += cross(v[i], v[(i + 1) % n]);
  if (m.dbl_area <= 0) fail(Errc::Internal, "polygon is not positively oriented");
  for (std::size_t i = 0; i < n; ++i) m.boundary += lattice_length(v[(i + 1) % n] - v[i]);
  i64 twice_interior = m.dbl_area - m.boundary + 2;
  if (twice_interior < 0 || twice_interior % 2 != 0)
    fail(Errc::Internal, "area formula produced a non-integral interior count");
  m.interior = twice_interior / 2;

  // Cross-check the interior count by scanning the bounding box, as long as
  // the box is small enough for that to be cheap (always true at our scale).
  i64 xlo = v[0].x, xhi = v[0].x, ylo = v[0].y, yhi = v[0].y;
  for (IVec p : v) {
    xlo = std::min(xlo, p.x); xhi = std::max(xhi, p.x);
    ylo = std::min(ylo, p.y); yhi = std::max(yhi, p.y);
  }
  if ((xhi - xlo + 1) * (yhi - ylo + 1) <= 4'000'000) {
    i64 inside = 0;
    for (i64 x = xlo; x <= xhi; ++x)
      for (i64 y = ylo; y <= yhi; ++y) {
        bool strict = true;
        for (std::size_t i = 0; i < n && strict; ++i)
          strict = cross(v[(i + 1) % n] - v[i], IVec{x, y} - v[i]) > 0;
        if (strict) ++inside;
      }
    if (inside != m.interior)
      fail(Errc::Internal, "interior lattice-point scan disagrees with the area formula: " +
                               std::to_string(inside) + " vs " + std::to_string(m.interior));
  }
  return m;
}

ChartMap divisor_chart(const LatticePolygon& poly, int side_index) {
  if (side_index < 0 || side_index >= static_cast<int>(poly.sides.size()))
    fail(Errc::ChartDegenerate, "side index " + std::to_string(side_index) + " out of range");
  const Side& s = poly.sides[static_cast<std::size_t>(side_index)];
  IVec d = s.dir;

  // First row r1 solves r1 . d = 1; second row is the inner normal rot90(d),
  // which pins det = 1 and sends the polygon to the upper half plane.  Reduce
  // r1 modulo r2 so the choice is canonical (it does not affect the divisor
  // coordinate, which only sees c1 = d).
  auto [g, u, w] = ext_gcd(d.x, d.y);
  if (g < 0) { g = -g; u = -u; w = -w; }
  if (g != 1) fail(Errc::Internal, "side direction is not primitive");
  IVec r1{u, w};
  IVec r2 = rot90(d);
  i64 nn = dot(r2, r2);
  i64 q = floor_div(2 * dot(r1, r2) + nn, 2 * nn);
  r1 = r1 - q * r2;

  ChartMap chart;
  chart.a11 = r1.x; chart.a12 = r1.y;
  chart.a21 = r2.x; chart.a22 = r2.y;
  chart.v0 = s.start;
  chart.c1 = d;
  chart.c2 = rot90(r1);

  if (chart.a11 * chart.a22 - chart.a12 * chart.a21 != 1)
    fail(Errc::Internal, "chart determinant is not 1");
  IVec end = chart.apply(s.start + s.length * d);
  if (chart.apply(s.start) != IVec{0, 0} || end != IVec{s.length, 0})
    fail(Errc::Internal, "chart does not map the side onto [0,L] x {0}");
  for (IVec v : poly.vertices) {
    if (chart.apply(v).y < 0)
      fail(Errc::Internal, "chart does not map the polygon to the upper half plane");
  }
  return chart;
}

int constraint_count(const ToricDegree& degree, int genus) {
  return static_cast<int>(degree.entries.size()) - 1 + genus;
}

DegreeContext make_context(const std::vector<IVec>& raw,
                           const std::vector<int>* side_assignment) {
  DegreeContext ctx;
  ctx.degree = validate_degree(raw, side_assignment);
  ctx.poly = build_polygon(ctx.degree);
  ctx.metrics = polygon_metrics(ctx.poly);
  ctx.slot_of_entry.assign(ctx.degree.entries.size(), -1);
  for (std::size_t s = 0; s < ctx.poly.sides.size(); ++s)
    for (int e : ctx.poly.sides[s].entries) {
      ctx.slot_of_entry[static_cast<std::size_t>(e)] = static_cast<int>(ctx.slots.size());
      ctx.slots.push_back({static_cast<int>(s), e});
    }
  ctx.k0 = 0;
  for (const DegreeEntry& e : ctx.degree.entries) ctx.k0 = gcd_nonneg(ctx.k0, e.k);
  if (ctx.k0 == 0) fail(Errc::Internal, "gcd of tangency orders is zero");
  return ctx;
}

}  // namespace refinv
