#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "error.hpp"

namespace refinv {

using i64 = long long;

struct IVec {
  i64 x = 0;
  i64 y = 0;

  friend IVec operator+(IVec u, IVec v) { return {u.x + v.x, u.y + v.y}; }
  friend IVec operator-(IVec u, IVec v) { return {u.x - v.x, u.y - v.y}; }
  friend IVec operator*(i64 c, IVec v) { return {c * v.x, c * v.y}; }
  friend bool operator==(IVec u, IVec v) { return u.x == v.x && u.y == v.y; }
  friend bool operator!=(IVec u, IVec v) { return !(u == v); }
};

inline i64 dot(IVec u, IVec v) { return u.x * v.x + u.y * v.y; }
inline i64 cross(IVec u, IVec v) { return u.x * v.y - u.y * v.x; }
// Counterclockwise quarter turn.
inline IVec rot90(IVec v) { return {-v.y, v.x}; }
// Clockwise quarter turn.
inline IVec rot270(IVec v) { return {v.y, -v.x}; }

i64 gcd_nonneg(i64 a, i64 b);
// Lattice length: gcd(|x|, |y|) for a nonzero vector.
i64 lattice_length(IVec v);
IVec primitive(IVec v);

// One tangency datum: an even outgoing boundary vector a with lattice length
// 2k, attached to canonical side `side` of the dual polygon.
struct DegreeEntry {
  IVec a;
  i64 k = 0;
  int side = -1;
};

struct ToricDegree {
  std::vector<DegreeEntry> entries;  // in input order
};

// A side of the dual polygon, in canonical order (see build_polygon).
struct Side {
  IVec dir;                  // primitive counterclockwise direction
  IVec normal;               // primitive outer normal = rot270(dir)
  IVec start;                // first vertex when walking counterclockwise
  i64 length = 0;            // lattice length of the side
  std::vector<int> entries;  // degree-entry indices in input order
};

struct LatticePolygon {
  // Counterclockwise vertex cycle, translated and rotated so the walk starts
  // at the lexicographically minimal vertex, which is placed at the origin.
  std::vector<IVec> vertices;
  // Sides in canonical order: counterclockwise, starting from the side whose
  // outer normal has the smallest angle in [0, 2*pi).
  std::vector<Side> sides;
};

struct PolygonMetrics {
  i64 dbl_area = 0;   // twice the Euclidean area
  i64 boundary = 0;   // number of lattice points on the boundary
  i64 interior = 0;   // number of interior lattice points
};

// Exponent-plane chart of a side: the affine map w -> A*(w - v0) with
// det(A) = 1 that sends the side onto [0, L] x {0} and the polygon into the
// upper half plane.  The induced torus coordinates are monomials with
// exponent rows c1 (along the side) and c2.
struct ChartMap {
  i64 a11 = 1, a12 = 0, a21 = 0, a22 = 1;
  IVec v0;
  IVec c1;  // = side direction; the divisor coordinate is x^c1.x * y^c1.y
  IVec c2;

  IVec apply(IVec w) const {
    IVec t = w - v0;
    return {a11 * t.x + a12 * t.y, a21 * t.x + a22 * t.y};
  }
};

// A tangency slot: one boundary point of a parameterized curve, identified by
// (canonical side, degree-entry index).  Slots are enumerated side by side in
// canonical side order and in input entry order within a side; that
// enumeration fixes how constraint values pair with curve boundary points.
struct Slot {
  int side = -1;
  int entry = -1;
};

// Validated degree together with everything derived from it that the rest of
// the library keys on.  Built once by make_context and passed by reference.
struct DegreeContext {
  ToricDegree degree;
  LatticePolygon poly;
  PolygonMetrics metrics;
  std::vector<Slot> slots;
  std::vector<int> slot_of_entry;
  i64 k0 = 1;  // gcd of all tangency orders k_i
};

// Checks balance, evenness, nonzero entries and that the dual directions span
// a genuine polygon.  If `side_assignment` is given it must label each entry
// with the canonical index of the side its dual direction generates.
ToricDegree validate_degree(const std::vector<IVec>& raw,
                            const std::vector<int>* side_assignment = nullptr);

// Dual polygon of a degree: rotate each entry by +90 degrees, merge parallel
// edge vectors, sort by direction angle and chain.
LatticePolygon build_polygon(const ToricDegree& degree);

// Builds a polygon directly from a counterclockwise convex vertex cycle
// (used by tests and plotting; validates convexity).
LatticePolygon polygon_from_vertices(std::vector<IVec> vertices);

// Area, boundary and interior lattice-point counts.  Interior count comes
// from the area formula and is cross-checked against a direct scan.
PolygonMetrics polygon_metrics(const LatticePolygon& poly);

ChartMap divisor_chart(const LatticePolygon& poly, int side_index);

// Number of point constraints that cut the family down to finitely many
// curves: one fewer than the number of tangency conditions, plus the genus.
int constraint_count(const ToricDegree& degree, int genus = 0);

DegreeContext make_context(const std::vector<IVec>& raw,
                           const std::vector<int>* side_assignment = nullptr);

std::string format_ivec(IVec v);

}  // namespace refinv
