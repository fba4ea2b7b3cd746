#pragma once

#include <array>
#include <map>
#include <utility>
#include <vector>

#include "tangency.hpp"

namespace refinv {

// Refined count keyed by the doubled quantum index (kept doubled so the keys
// are exact integers): 2*kappa -> (W0, W0_tilde) contributions.
struct InvariantTable {
  std::map<int, std::pair<i64, i64>> rows;

  friend bool operator==(const InvariantTable& a, const InvariantTable& b) {
    return a.rows == b.rows;
  }
};

// Scoring detail for one solved curve (both halves).
struct ScoredCurve {
  RationalCurve curve;
  std::vector<NodeRecord> nodes;
  int two_kappa_upper = 0;
  int w0_upper = 0, w0t_upper = 0;  // contributions of the upper half
  int w0_lower = 0, w0t_lower = 0;  // contributions of the lower half (at -kappa)
};

// Scores every curve on both halves and accumulates the table: the half with
// quantum index kappa adds (-1)^(e+) * prod_even to W0 and (-1)^e * prod_all
// to W0_tilde at key 2*kappa.  The lower half lands at the negated key with
// all orientation signs reversed.
InvariantTable assemble_w0(const DegreeContext& ctx,
                           const std::vector<RationalCurve>& curves,
                           const QiOptions& qi = {},
                           std::vector<ScoredCurve>* details = nullptr);

// Topological data of a parameterized real curve needed by the sign rules;
// for genus-1 and genus-2 refinements callers supply it directly.
struct CurveDescriptor {
  int prod_even = 1;                    // orientation-sign product, even slots
  int prod_all = 1;                     // orientation-sign product, all slots
  std::array<int, 4> hyp{0, 0, 0, 0};   // hyperbolic nodes per quadrant
  std::array<int, 4> ell{0, 0, 0, 0};   // elliptic nodes per quadrant
};                                      // quadrants: 0:(+,+) 1:(-,+) 2:(-,-) 3:(+,-)

// Genus-0 weights.
int sign_w0(const CurveDescriptor& d);        // (-1)^(e+) * prod_even
int sign_w0_tilde(const CurveDescriptor& d);  // (-1)^e * prod_all

// Genus-1 refinement: extra parity of the hyperbolic nodes in the chosen
// quadrant.  Genus-2 refinement: extra parity of the hyperbolic nodes outside
// the positive quadrant.
int sign_g1(const CurveDescriptor& d, int quadrant);
int sign_g2(const CurveDescriptor& d);

// Admissible-quadrant criterion for a quadrant label eps != (+,+): at most
// one side of the polygon may have eps^(side direction) = +1.
bool aqc_check(const LatticePolygon& poly, int eps_x, int eps_y);

}  // namespace refinv
