#include "qindex.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

namespace refinv {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Marked {
  std::vector<double> t;      // finite marked parameters
  std::vector<double> alpha;  // exponent of (t - t_j) in x
  std::vector<double> beta;   // exponent of (t - t_j) in y
  double la = 0.0, lb = 0.0;  // log coefficients
  double sum_alpha = 0.0, sum_beta = 0.0;
  bool has_inf = false;
};

Marked marked_data(const DegreeContext& ctx, const RationalCurve& curve) {
  if (curve.points.size() != ctx.slots.size())
    fail(Errc::SlotMismatch, "curve does not match the degree's slot layout");
  if (!(curve.a > 0.0) || !(curve.b > 0.0))
    fail(Errc::BranchOutsidePositiveQuadrant,
         "the quantum index is computed on the positive branch (a, b > 0)");
  Marked m;
  m.la = std::log(curve.a);
  m.lb = std::log(curve.b);
  for (std::size_t i = 0; i < curve.points.size(); ++i) {
    IVec a = ctx.degree.entries[static_cast<std::size_t>(ctx.slots[i].entry)].a;
    if (curve.points[i].at_inf) {
      m.has_inf = true;
      continue;
    }
    m.t.push_back(curve.points[i].t);
    m.alpha.push_back(static_cast<double>(-a.x));
    m.beta.push_back(static_cast<double>(-a.y));
  }
  for (double v : m.alpha) m.sum_alpha += v;
  for (double v : m.beta) m.sum_beta += v;
  return m;
}

// u(t) = log|x(t)| and v'(t) on the bounded chart.
double eval_u(const Marked& m, double t) {
  double u = m.la;
  for (std::size_t j = 0; j < m.t.size(); ++j) u += m.alpha[j] * std::log(std::fabs(t - m.t[j]));
  return u;
}
double eval_vp(const Marked& m, double t) {
  double v = 0.0;
  for (std::size_t j = 0; j < m.t.size(); ++j) v += m.beta[j] / (t - m.t[j]);
  return v;
}

// Tail chart s = 1/t: u(1/s) and d/ds v(1/s).
double eval_u_tail(const Marked& m, double s) {
  double u = m.la - m.sum_alpha * std::log(std::fabs(s));
  for (std::size_t j = 0; j < m.t.size(); ++j)
    u += m.alpha[j] * std::log(std::fabs(1.0 - m.t[j] * s));
  return u;
}
double eval_wp_tail(const Marked& m, double s) {
  double w = -m.sum_beta / s;
  for (std::size_t j = 0; j < m.t.size(); ++j) w += -m.beta[j] * m.t[j] / (1.0 - m.t[j] * s);
  return w;
}

struct Interval {
  double lo, hi;
};

// [-1, 1] minus a union of blocked windows.
std::vector<Interval> keep_intervals(std::vector<Interval> blocked) {
  std::sort(blocked.begin(), blocked.end(),
            [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  std::vector<Interval> out;
  double cur = -1.0;
  for (const Interval& b : blocked) {
    double lo = std::max(b.lo, -1.0), hi = std::min(b.hi, 1.0);
    if (hi <= cur || hi <= lo) {
      cur = std::max(cur, hi);
      continue;
    }
    if (lo > cur) out.push_back({cur, lo});
    cur = std::max(cur, hi);
  }
  if (cur < 1.0) out.push_back({cur, 1.0});
  return out;
}

// Gauss-Legendre nodes/weights on [-1, 1], computed once per order.
void gauss_rule(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(static_cast<std::size_t>(n), 0.0);
  w.assign(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (z * p0 - p1) / (z * z - 1.0);
      double dz = p0 / pp;
      z -= dz;
      if (std::fabs(dz) < 1e-15) break;
    }
    x[static_cast<std::size_t>(i)] = -z;
    x[static_cast<std::size_t>(n - 1 - i)] = z;
    w[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - z * z) * pp * pp);
    w[static_cast<std::size_t>(n - 1 - i)] = w[static_cast<std::size_t>(i)];
  }
}

// Integral of f over [a, b] with cosine grading toward both ends (the ends
// sit against excision boundaries where the integrand has log spikes).
template <typename F>
double graded_panels(F&& f, double a, double b, int panels, const std::vector<double>& gx,
                     const std::vector<double>& gw, long& evals) {
  double total = 0.0;
  for (int p = 0; p < panels; ++p) {
    double th0 = kPi * p / panels, th1 = kPi * (p + 1) / panels;
    double mid = 0.5 * (th0 + th1), rad = 0.5 * (th1 - th0);
    for (std::size_t q = 0; q < gx.size(); ++q) {
      double th = mid + rad * gx[q];
      double x = a + (b - a) * 0.5 * (1.0 - std::cos(th));
      double jac = (b - a) * 0.5 * std::sin(th) * rad;
      total += gw[q] * jac * f(x);
      ++evals;
    }
  }
  return total;
}

// One principal-value approximant: boundary integral with every marked point
// excised symmetrically (radius eps) in its owning chart.
double pv_at_eps(const Marked& m, double eps, int panels, const std::vector<double>& gx,
                 const std::vector<double>& gw, long& evals) {
  std::vector<Interval> blocked_t, blocked_s;
  auto add_window = [](std::vector<Interval>& primary, std::vector<Interval>& other,
                       double c, double eps_, bool owner_is_t) {
    primary.push_back({c - eps_, c + eps_});
    // The part of the window sticking out of [-1, 1] lives in the other
    // chart; map it exactly so nothing is integrated twice.
    if (c + eps_ > 1.0) other.push_back({1.0 / (c + eps_), 1.0});
    if (c - eps_ < -1.0) other.push_back({-1.0, 1.0 / (c - eps_)});
    (void)owner_is_t;
  };
  for (double tj : m.t) {
    if (std::fabs(tj) <= 1.0)
      add_window(blocked_t, blocked_s, tj, eps, true);
    else
      add_window(blocked_s, blocked_t, 1.0 / tj, eps, false);
  }
  // The point t = infinity (s = 0) is always treated as a puncture of the
  // tail chart; if nothing is singular there the excision limit is harmless.
  add_window(blocked_s, blocked_t, 0.0, eps, false);

  double acc = 0.0;
  for (const Interval& iv : keep_intervals(std::move(blocked_t)))
    acc += graded_panels([&](double t) { return eval_u(m, t) * eval_vp(m, t); }, iv.lo, iv.hi,
                         panels, gx, gw, evals);
  for (const Interval& iv : keep_intervals(std::move(blocked_s)))
    acc -= graded_panels([&](double s) { return eval_u_tail(m, s) * eval_wp_tail(m, s); },
                         iv.lo, iv.hi, panels, gx, gw, evals);
  return acc / (kPi * kPi);
}

// Solve the 3x3 system fitting I(eps) = I0 + c1*eps*log(eps) + c2*eps.
double richardson_triple(const std::array<double, 3>& eps, const std::array<double, 3>& val) {
  double a[3][4];
  for (int r = 0; r < 3; ++r) {
    a[r][0] = 1.0;
    a[r][1] = eps[static_cast<std::size_t>(r)] * std::log(eps[static_cast<std::size_t>(r)]);
    a[r][2] = eps[static_cast<std::size_t>(r)];
    a[r][3] = val[static_cast<std::size_t>(r)];
  }
  for (int c = 0; c < 3; ++c) {
    int piv = c;
    for (int r = c + 1; r < 3; ++r)
      if (std::fabs(a[r][c]) > std::fabs(a[piv][c])) piv = r;
    std::swap(a[c], a[piv]);
    for (int r = 0; r < 3; ++r) {
      if (r == c) continue;
      double f = a[r][c] / a[c][c];
      for (int k = c; k < 4; ++k) a[r][k] -= f * a[c][k];
    }
  }
  return a[0][3] / a[0][0];
}

double logpair_integrand(const Marked& m, cplx t) {
  // Im( (x'/x) * conj(y'/y) ), the density of d(log|x|) ^ d(log|y|).
  cplx fx = 0.0, fy = 0.0;
  for (std::size_t j = 0; j < m.t.size(); ++j) {
    cplx inv = 1.0 / (t - m.t[j]);
    fx += m.alpha[j] * inv;
    fy += m.beta[j] * inv;
  }
  return std::imag(fx * std::conj(fy));
}

}  // namespace

double qi_2d_oracle(const DegreeContext& ctx, const RationalCurve& curve, Half half,
                    double tol, long budget, double* err_out, long* evals_out) {
  Marked m = marked_data(ctx, curve);

  // Model the upper half plane as the unit w-disk via t = i(1-w)/(1+w);
  // the area form picks up |dt/dw|^2 = 4/|1+w|^4.
  auto density = [&](double r, double th) {
    cplx w = std::polar(r, th);
    cplx opw = 1.0 + w;
    double d2 = std::norm(opw);
    if (d2 < 1e-28) return 0.0;
    cplx t = cplx(0.0, 1.0) * (1.0 - w) / opw;
    double jac = 4.0 / (d2 * d2);
    return logpair_integrand(m, t) * jac * r;  // polar area element r dr dth
  };

  static thread_local std::vector<double> g5x, g5w, g3x, g3w;
  if (g5x.empty()) {
    gauss_rule(5, g5x, g5w);
    gauss_rule(3, g3x, g3w);
  }
  long evals = 0;
  auto cell_quad = [&](double r0, double r1, double t0, double t1,
                       const std::vector<double>& qx, const std::vector<double>& qw) {
    double acc = 0.0;
    double rm = 0.5 * (r0 + r1), rr = 0.5 * (r1 - r0);
    double tm = 0.5 * (t0 + t1), tr = 0.5 * (t1 - t0);
    for (std::size_t i = 0; i < qx.size(); ++i)
      for (std::size_t j = 0; j < qx.size(); ++j) {
        acc += qw[i] * qw[j] * density(rm + rr * qx[i], tm + tr * qx[j]);
        ++evals;
      }
    return acc * rr * tr;
  };

  struct Cell {
    double r0, r1, t0, t1, val, err;
  };
  auto make_cell = [&](double r0, double r1, double t0, double t1) {
    Cell c{r0, r1, t0, t1, 0.0, 0.0};
    c.val = cell_quad(r0, r1, t0, t1, g5x, g5w);
    double coarse = cell_quad(r0, r1, t0, t1, g3x, g3w);
    c.err = std::fabs(c.val - coarse);
    return c;
  };
  auto cmp = [](const Cell& a, const Cell& b) { return a.err < b.err; };
  std::priority_queue<Cell, std::vector<Cell>, decltype(cmp)> heap(cmp);

  double total = 0.0, err_sum = 0.0;
  const int nr = 6, nt = 12;
  for (int i = 0; i < nr; ++i)
    for (int j = 0; j < nt; ++j) {
      Cell c = make_cell(double(i) / nr, double(i + 1) / nr, 2.0 * kPi * j / nt,
                         2.0 * kPi * (j + 1) / nt);
      total += c.val;
      err_sum += c.err;
      heap.push(c);
    }

  double target = tol * kPi * kPi;  // tolerance is stated in kappa units
  while (err_sum > target && evals < budget && !heap.empty()) {
    Cell c = heap.top();
    heap.pop();
    total -= c.val;
    err_sum -= c.err;
    double rm = 0.5 * (c.r0 + c.r1), tm = 0.5 * (c.t0 + c.t1);
    for (const auto& [r0, r1, t0, t1] : {std::array<double, 4>{c.r0, rm, c.t0, tm},
                                         std::array<double, 4>{rm, c.r1, c.t0, tm},
                                         std::array<double, 4>{c.r0, rm, tm, c.t1},
                                         std::array<double, 4>{rm, c.r1, tm, c.t1}}) {
      Cell child = make_cell(r0, r1, t0, t1);
      total += child.val;
      err_sum += child.err;
      heap.push(child);
    }
  }

  double kappa = total / (kPi * kPi);
  if (half == Half::Lower) kappa = -kappa;
  if (err_out) *err_out = err_sum / (kPi * kPi);
  if (evals_out) *evals_out = evals;
  return kappa;
}

QiResult compute_qi(const DegreeContext& ctx, const RationalCurve& curve, Half half,
                    const QiOptions& opts) {
  if (opts.eps_jmax < opts.eps_jmin + 3)
    fail(Errc::ParseError, "quantum index needs at least four excision levels");
  Marked m = marked_data(ctx, curve);

  std::vector<double> gx, gw;
  gauss_rule(opts.gauss, gx, gw);

  QiResult res;
  std::vector<double> eps_list, vals;
  for (int j = opts.eps_jmin; j <= opts.eps_jmax; ++j) {
    double eps = std::ldexp(1.0, -j);
    eps_list.push_back(eps);
    vals.push_back(pv_at_eps(m, eps, opts.panels, gx, gw, res.evals));
  }
  std::vector<double> extr;
  for (std::size_t k = 0; k + 2 < vals.size(); ++k)
    extr.push_back(richardson_triple({eps_list[k], eps_list[k + 1], eps_list[k + 2]},
                                     {vals[k], vals[k + 1], vals[k + 2]}));
  res.raw = extr.back();
  res.err = std::fabs(extr.back() - extr[extr.size() - 2]) + 1e-10;
  if (half == Half::Lower) res.raw = -res.raw;  // exact antisymmetry by construction
  res.method = "pv-richardson";

  long long nearest = std::llround(2.0 * res.raw);
  double slack = std::fabs(res.raw - 0.5 * static_cast<double>(nearest)) + res.err;
  if (slack < opts.certify_margin) {
    res.two_kappa = static_cast<int>(nearest);
    res.certified = true;
    return res;
  }
  if (opts.allow_2d_fallback) {
    double err2 = 0.0;
    long ev2 = 0;
    double raw2 = qi_2d_oracle(ctx, curve, half, opts.fallback_tol, opts.fallback_budget,
                               &err2, &ev2);
    res.evals += ev2;
    long long n2 = std::llround(2.0 * raw2);
    double slack2 = std::fabs(raw2 - 0.5 * static_cast<double>(n2)) + err2;
    if (slack2 < opts.certify_margin) {
      res.raw = raw2;
      res.err = err2;
      res.two_kappa = static_cast<int>(n2);
      res.certified = true;
      res.method = "2d-adaptive";
      return res;
    }
  }
  fail(Errc::UncertifiedRounding,
       "quantum index estimate " + std::to_string(res.raw) +
           " could not be certified to a half-integer (error " + std::to_string(res.err) + ")");
}

}  // namespace refinv
