#pragma once

#include <array>
#include <complex>
#include <vector>

#include "lattice.hpp"
#include "menelaus.hpp"

namespace refinv {

using cplx = std::complex<double>;

enum class Half { Upper, Lower };

// One boundary point of a parameterized curve.  Points are stored in
// canonical slot order, so points[i] realizes tangency slot i.
struct CurvePoint {
  double t = 0.0;
  bool at_inf = false;
};

// Rational curve with real coefficients, parameterized over the projective
// line, written with one linear factor per boundary point:
//   x(t) = a * prod_j (t - t_j)^(-A_j.x),   y(t) = b * prod_j (t - t_j)^(-A_j.y)
// where A_j is the degree entry of slot j and the product runs over finite
// marked points (a point at infinity contributes no factor; balance makes the
// degrees come out right).  All exponents are even, so x and y are positive
// on the whole real line when a, b > 0: the real branch lives in the positive
// quadrant and its boundary limits land on the positive part of each divisor.
struct RationalCurve {
  double a = 1.0;
  double b = 1.0;
  std::vector<CurvePoint> points;
};

enum class NodeKind { Hyperbolic, Elliptic, ComplexPair };

struct NodeRecord {
  NodeKind kind = NodeKind::Hyperbolic;
  cplx s, t;      // parameter pair mapping to the same image, s != t
  cplx x, y;      // common image
  int quadrant = -1;  // for real-image nodes: 0:(+,+) 1:(-,+) 2:(-,-) 3:(+,-)
};

std::pair<cplx, cplx> evaluate(const DegreeContext& ctx, const RationalCurve& curve,
                               cplx t);

// Divisor coordinate of every boundary point (always positive; exponents are
// even).  Throws ChartDegenerate if two marked points coincide, since the
// boundary limits then blow up.
BoundaryConstraint boundary_data(const DegreeContext& ctx, const RationalCurve& curve);

// Direction in which the boundary walk of the given half crosses marked point
// `slot`: the sign of d/dt log xi(t) at t_slot, taken in the +dt orientation
// of the upper boundary and negated for the lower half.
int orientation_sign(const DegreeContext& ctx, const RationalCurve& curve, int slot,
                     Half half);

struct SignProducts {
  int prod_even = 1;  // product of orientation signs over slots with even k
  int prod_all = 1;   // product over all slots
  int e = 0;          // real elliptic (isolated) nodes
  int e_plus = 0;     // those in the positive quadrant
  std::array<int, 4> hyp_by_quadrant{0, 0, 0, 0};
  std::array<int, 4> ell_by_quadrant{0, 0, 0, 0};
};

// Orientation-sign products for the given half together with node tallies.
// Node records must come from find_nodes on the same curve.
SignProducts sign_products(const DegreeContext& ctx, const RationalCurve& curve,
                           const std::vector<NodeRecord>& nodes, Half half);

// Reparameterization t -> (p*t + q)/(r*t + s) with p*s - q*r > 0, refitting
// the coefficients so the image curve is unchanged.  Used to check that all
// derived quantities are gauge-independent.
RationalCurve regauge(const DegreeContext& ctx, const RationalCurve& curve,
                      double p, double q, double r, double s);

struct NodeOptions {
  double cluster_tol = 1e-7;   // merging / classification tolerance
  double param_guard = 1e-6;   // reject node parameters this close to marked points
  int polish_iters = 40;
};

// All double points of the parameterized curve: solves x(s) = x(t),
// y(s) = y(t) with s != t by symmetric elimination (power sums in
// e1 = s + t, e2 = s*t, then a resultant computed as a matrix-pencil
// eigenproblem), Newton-polishes every candidate and verifies it on the
// original equations.  Conjugate parameter pairs with non-real image are
// recorded once as ComplexPair.
std::vector<NodeRecord> find_nodes(const DegreeContext& ctx, const RationalCurve& curve,
                                   const NodeOptions& opts = {});

}  // namespace refinv
