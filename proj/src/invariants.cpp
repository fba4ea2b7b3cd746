#include "invariants.hpp"

namespace refinv {

namespace {

int parity_sign(int n) { return n % 2 == 0 ? 1 : -1; }

CurveDescriptor descriptor_from(const SignProducts& sp) {
  CurveDescriptor d;
  d.prod_even = sp.prod_even;
  d.prod_all = sp.prod_all;
  d.hyp = sp.hyp_by_quadrant;
  d.ell = sp.ell_by_quadrant;
  return d;
}

}  // namespace

int sign_w0(const CurveDescriptor& d) { return parity_sign(d.ell[0]) * d.prod_even; }

int sign_w0_tilde(const CurveDescriptor& d) {
  int e = d.ell[0] + d.ell[1] + d.ell[2] + d.ell[3];
  return parity_sign(e) * d.prod_all;
}

int sign_g1(const CurveDescriptor& d, int quadrant) {
  if (quadrant < 0 || quadrant > 3)
    fail(Errc::ParseError, "quadrant index must be in 0..3");
  return sign_w0(d) * parity_sign(d.hyp[static_cast<std::size_t>(quadrant)]);
}

int sign_g2(const CurveDescriptor& d) {
  int h_minus = d.hyp[1] + d.hyp[2] + d.hyp[3];
  return sign_w0(d) * parity_sign(h_minus);
}

bool aqc_check(const LatticePolygon& poly, int eps_x, int eps_y) {
  if ((eps_x != 1 && eps_x != -1) || (eps_y != 1 && eps_y != -1))
    fail(Errc::ParseError, "quadrant labels must be +1 or -1");
  if (eps_x == 1 && eps_y == 1)
    fail(Errc::ParseError, "the admissibility criterion applies to quadrants other than (+,+)");
  int fixed = 0;
  for (const Side& s : poly.sides) {
    // eps^d = eps_x^(d.x) * eps_y^(d.y); only the exponent parities matter.
    int v = 1;
    if (s.dir.x % 2 != 0) v *= eps_x;
    if (s.dir.y % 2 != 0) v *= eps_y;
    if (v == 1) ++fixed;
  }
  return fixed <= 1;
}

InvariantTable assemble_w0(const DegreeContext& ctx,
                           const std::vector<RationalCurve>& curves, const QiOptions& qi,
                           std::vector<ScoredCurve>* details) {
  InvariantTable table;
  if (details) details->clear();
  for (const RationalCurve& curve : curves) {
    ScoredCurve sc;
    sc.curve = curve;
    sc.nodes = find_nodes(ctx, curve);

    QiResult qu = compute_qi(ctx, curve, Half::Upper, qi);
    CurveDescriptor du = descriptor_from(sign_products(ctx, curve, sc.nodes, Half::Upper));
    CurveDescriptor dl = descriptor_from(sign_products(ctx, curve, sc.nodes, Half::Lower));

    sc.two_kappa_upper = qu.two_kappa;
    sc.w0_upper = sign_w0(du);
    sc.w0t_upper = sign_w0_tilde(du);
    sc.w0_lower = sign_w0(dl);
    sc.w0t_lower = sign_w0_tilde(dl);

    auto& up = table.rows[qu.two_kappa];
    up.first += sc.w0_upper;
    up.second += sc.w0t_upper;
    auto& lo = table.rows[-qu.two_kappa];
    lo.first += sc.w0_lower;
    lo.second += sc.w0t_lower;

    if (details) details->push_back(std::move(sc));
  }
  return table;
}

}  // namespace refinv
