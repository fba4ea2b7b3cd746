#pragma once

#include <string>

#include "curve.hpp"

namespace refinv {

struct QiOptions {
  // Excision radii for the principal value are 2^-j, j in [jmin, jmax].
  int eps_jmin = 3;
  int eps_jmax = 12;
  int panels = 24;              // cos-graded panels per smooth interval
  int gauss = 24;               // Gauss-Legendre nodes per panel
  double certify_margin = 0.25; // admissible |raw - half-integer| + error, in kappa units
  bool allow_2d_fallback = true;
  double fallback_tol = 2e-3;
  long fallback_budget = 600000;
};

struct QiResult {
  double raw = 0.0;      // quadrature estimate of kappa
  int two_kappa = 0;     // certified doubled value
  double err = 0.0;      // error estimate on raw
  bool certified = false;
  std::string method;    // "pv-richardson" or "2d-adaptive"
  long evals = 0;
};

// Quantum index of one half of the real curve: the logarithmic-image area
//   kappa = (1/pi^2) * integral over the half of  d(log|x|) ^ d(log|y|),
// computed by Stokes as a boundary principal value with symmetric excisions
// around every boundary point (in the bounded chart t and the tail chart
// s = 1/t), Richardson-extrapolated in the excision radius on the basis
// {1, eps*log(eps), eps}.  The result is certified against the nearest
// half-integer; an uncertifiable value falls back to the 2-d oracle and, if
// still ambiguous, throws UncertifiedRounding.
QiResult compute_qi(const DegreeContext& ctx, const RationalCurve& curve, Half half,
                    const QiOptions& opts = {});

// Independent check: adaptive 2-d quadrature of the same area form over the
// half disk model (t = i(1-w)/(1+w) maps the unit w-disk onto the upper half
// plane).  Returns the kappa estimate; *err_out / *evals_out report the
// internal error bound and evaluation count when non-null.
double qi_2d_oracle(const DegreeContext& ctx, const RationalCurve& curve, Half half,
                    double tol = 1e-3, long budget = 600000, double* err_out = nullptr,
                    long* evals_out = nullptr);

}  // namespace refinv
