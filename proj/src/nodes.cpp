#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "curve.hpp"
#include "rng.hpp"

namespace refinv {

namespace {

// ---------- dense univariate / bivariate polynomial helpers ----------

using Vec = std::vector<double>;
using Mat = std::vector<std::vector<double>>;  // c[i][j] * u^i * v^j

void trim(Vec& p) {
  double m = 0.0;
  for (double c : p) m = std::max(m, std::fabs(c));
  while (p.size() > 1 && std::fabs(p.back()) <= 1e-12 * m) p.pop_back();
  if (m == 0.0) p.assign(1, 0.0);
}

Vec mul(const Vec& p, const Vec& q) {
  Vec r(p.size() + q.size() - 1, 0.0);
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = 0; j < q.size(); ++j) r[i + j] += p[i] * q[j];
  return r;
}

cplx peval(const Vec& p, cplx z) {
  cplx r = 0.0;
  for (std::size_t i = p.size(); i-- > 0;) r = r * z + p[i];
  return r;
}

int deg_v(const Mat& m) {
  int d = 0;
  for (const auto& row : m) d = std::max(d, static_cast<int>(row.size()) - 1);
  return d;
}

double max_abs(const Mat& m) {
  double r = 0.0;
  for (const auto& row : m)
    for (double c : row) r = std::max(r, std::fabs(c));
  return r;
}

void trim_mat(Mat& m) {
  double mx = max_abs(m);
  double tol = 1e-12 * (mx == 0.0 ? 1.0 : mx);
  for (auto& row : m) {
    for (double& c : row)
      if (std::fabs(c) <= tol) c = 0.0;
    while (row.size() > 1 && row.back() == 0.0) row.pop_back();
  }
  while (m.size() > 1) {
    const auto& last = m.back();
    bool zero = std::all_of(last.begin(), last.end(), [](double c) { return c == 0.0; });
    if (!zero) break;
    m.pop_back();
  }
}

bool is_zero(const Mat& m) { return max_abs(m) == 0.0; }

cplx beval(const Mat& m, cplx u, cplx v) {
  cplx r = 0.0;
  for (std::size_t i = m.size(); i-- > 0;) {
    cplx row = 0.0;
    for (std::size_t j = m[i].size(); j-- > 0;) row = row * v + m[i][j];
    r = r * u + row;
  }
  return r;
}

Mat d_du(const Mat& m) {
  if (m.size() <= 1) return {{0.0}};
  Mat r(m.size() - 1);
  for (std::size_t i = 1; i < m.size(); ++i) {
    r[i - 1] = m[i];
    for (double& c : r[i - 1]) c *= static_cast<double>(i);
  }
  return r;
}

Mat d_dv(const Mat& m) {
  Mat r(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (m[i].size() <= 1) {
      r[i] = {0.0};
      continue;
    }
    r[i].resize(m[i].size() - 1);
    for (std::size_t j = 1; j < m[i].size(); ++j)
      r[i][j - 1] = m[i][j] * static_cast<double>(j);
  }
  return r;
}

// Residual scale of a bivariate value: sum |c_ij| |u|^i |v|^j.
double resid_scale(const Mat& m, cplx u, cplx v) {
  double au = std::abs(u), av = std::abs(v);
  double r = 0.0, pu = 1.0;
  for (const auto& row : m) {
    double pv = 1.0, acc = 0.0;
    for (double c : row) {
      acc += std::fabs(c) * pv;
      pv *= av;
    }
    r += acc * pu;
    pu *= au;
  }
  return std::max(r, 1.0);
}

// Roots of a complex-coefficient univariate polynomial via its companion
// matrix (coefficients ascending).
std::vector<cplx> croots(std::vector<cplx> p) {
  double m = 0.0;
  for (cplx c : p) m = std::max(m, std::abs(c));
  if (m == 0.0) return {};
  while (p.size() > 1 && std::abs(p.back()) <= 1e-11 * m) p.pop_back();
  int n = static_cast<int>(p.size()) - 1;
  if (n <= 0) return {};
  Eigen::MatrixXcd C = Eigen::MatrixXcd::Zero(n, n);
  for (int i = 1; i < n; ++i) C(i, i - 1) = 1.0;
  for (int i = 0; i < n; ++i) C(i, n - 1) = -p[static_cast<std::size_t>(i)] / p.back();
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(C, /*computeEigenvectors=*/false);
  std::vector<cplx> out;
  for (int i = 0; i < n; ++i) out.push_back(es.eigenvalues()(i));
  return out;
}

// ---------- elimination machinery ----------

struct XYPolys {
  Vec nx, dx, ny, dy;  // x = nx/dx, y = ny/dy, coefficients folded in
};

XYPolys build_xy(const DegreeContext& ctx, const RationalCurve& curve) {
  XYPolys p{{curve.a}, {1.0}, {curve.b}, {1.0}};
  for (std::size_t i = 0; i < curve.points.size(); ++i) {
    if (curve.points[i].at_inf) continue;
    IVec a = ctx.degree.entries[static_cast<std::size_t>(ctx.slots[i].entry)].a;
    Vec lin{-curve.points[i].t, 1.0};
    for (i64 e = 0; e < -a.x; ++e) p.nx = mul(p.nx, lin);
    for (i64 e = 0; e < a.x; ++e) p.dx = mul(p.dx, lin);
    for (i64 e = 0; e < -a.y; ++e) p.ny = mul(p.ny, lin);
    for (i64 e = 0; e < a.y; ++e) p.dy = mul(p.dy, lin);
  }
  trim(p.nx); trim(p.dx); trim(p.ny); trim(p.dy);
  return p;
}

// F(s,t) = N(s) D(t) - N(t) D(s), antisymmetric.
Mat cross_diff(const Vec& n, const Vec& d) {
  std::size_t sz = std::max(n.size(), d.size());
  Mat f(sz, std::vector<double>(sz, 0.0));
  for (std::size_t i = 0; i < n.size(); ++i)
    for (std::size_t j = 0; j < d.size(); ++j) {
      f[i][j] += n[i] * d[j];
      f[j][i] -= n[i] * d[j];
    }
  return f;
}

// Exact division of an antisymmetric F by (s - t).  With F = (s-t)H the
// coefficients satisfy H[i][j] = F[i+1][j] + H[i+1][j-1], which must be
// filled with i descending so the needed entries already exist.
Mat divide_s_minus_t(const Mat& f) {
  int n = static_cast<int>(f.size());
  if (n < 2) return {{0.0}};
  Mat h(static_cast<std::size_t>(n - 1), std::vector<double>(static_cast<std::size_t>(n - 1), 0.0));
  for (int i = n - 2; i >= 0; --i)
    for (int j = 0; j <= n - 2; ++j) {
      double v = (i + 1 < n && j < static_cast<int>(f[static_cast<std::size_t>(i + 1)].size()))
                     ? f[static_cast<std::size_t>(i + 1)][static_cast<std::size_t>(j)]
                     : 0.0;
      if (j >= 1 && i + 1 <= n - 2)
        v += h[static_cast<std::size_t>(i + 1)][static_cast<std::size_t>(j - 1)];
      h[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = v;
    }
  // Verify H is symmetric (it must be, F being antisymmetric).
  double scale = max_abs(h), worst = 0.0;
  for (int i = 0; i <= n - 2; ++i)
    for (int j = 0; j <= n - 2; ++j)
      worst = std::max(worst, std::fabs(h[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] -
                                        h[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)]));
  if (worst > 1e-9 * std::max(scale, 1.0))
    fail(Errc::Internal, "division by (s - t) produced a non-symmetric quotient");
  for (int i = 0; i <= n - 2; ++i)
    for (int j = i + 1; j <= n - 2; ++j) {
      double avg = 0.5 * (h[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] +
                          h[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)]);
      h[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = avg;
      h[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] = avg;
    }
  return h;
}

// Rewrite a symmetric polynomial in (s, t) in the elementary basis
// e1 = s + t, e2 = s * t, via power sums p_k = e1 p_{k-1} - e2 p_{k-2}.
Mat sym_to_elementary(const Mat& h) {
  int n = static_cast<int>(h.size());
  // power_sum[k] as a polynomial in (e1, e2)
  std::vector<Mat> ps;
  ps.push_back({{2.0}});            // p_0
  ps.push_back({{0.0}, {1.0}});     // p_1 = e1
  for (int k = 2; k < n; ++k) {
    const Mat& a = ps[static_cast<std::size_t>(k - 1)];
    const Mat& b = ps[static_cast<std::size_t>(k - 2)];
    Mat r(a.size() + 1);
    for (auto& row : r) row.assign(static_cast<std::size_t>(k / 2 + 1), 0.0);
    for (std::size_t i = 0; i < a.size(); ++i)          // e1 * p_{k-1}
      for (std::size_t j = 0; j < a[i].size(); ++j) r[i + 1][j] += a[i][j];
    for (std::size_t i = 0; i < b.size(); ++i)          // - e2 * p_{k-2}
      for (std::size_t j = 0; j < b[i].size(); ++j) r[i][j + 1] -= b[i][j];
    ps.push_back(std::move(r));
  }

  Mat out(1, std::vector<double>(1, 0.0));
  auto add = [&](const Mat& m, double coeff, int e2_shift) {
    std::size_t need_u = m.size();
    std::size_t need_v = 0;
    for (const auto& row : m) need_v = std::max(need_v, row.size() + static_cast<std::size_t>(e2_shift));
    if (out.size() < need_u) out.resize(need_u);
    for (auto& row : out)
      if (row.size() < need_v) row.resize(need_v, 0.0);
    for (std::size_t i = 0; i < m.size(); ++i)
      for (std::size_t j = 0; j < m[i].size(); ++j)
        out[i][j + static_cast<std::size_t>(e2_shift)] += coeff * m[i][j];
  };
  for (int i = 0; i < n; ++i) {
    add({{1.0}}, h[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)], i);  // e2^i
    for (int j = i + 1; j < n; ++j)
      add(ps[static_cast<std::size_t>(j - i)], h[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)], i);
  }
  trim_mat(out);
  return out;
}

// Coefficients of e2^beta in m, as a univariate polynomial in e1.
Vec v_coefficient(const Mat& m, int beta) {
  Vec out(m.size(), 0.0);
  for (std::size_t i = 0; i < m.size(); ++i)
    if (beta < static_cast<int>(m[i].size())) out[i] = m[i][static_cast<std::size_t>(beta)];
  trim(out);
  return out;
}

std::vector<cplx> coeffs_at(const Mat& m, cplx e1, int vdeg) {
  std::vector<cplx> out(static_cast<std::size_t>(vdeg) + 1, 0.0);
  for (int b = 0; b <= vdeg; ++b) {
    Vec c = v_coefficient(m, b);
    out[static_cast<std::size_t>(b)] = peval(c, e1);
  }
  return out;
}

// Finite generalized eigenvalues of the Sylvester matrix polynomial of
// (A, B) in e2: values of e1 where the two polynomials share an e2-root.
std::vector<cplx> pencil_e1_values(const Mat& A, const Mat& B) {
  int na = deg_v(A), nb = deg_v(B);
  int m = na + nb;
  int D = 0;
  for (int b = 0; b <= na; ++b) D = std::max(D, static_cast<int>(v_coefficient(A, b).size()) - 1);
  for (int b = 0; b <= nb; ++b) D = std::max(D, static_cast<int>(v_coefficient(B, b).size()) - 1);
  if (m == 0) return {};
  if (D == 0) return {};  // resultant is constant in e1

  // Sylvester blocks S_d, d = 0..D (standard layout, highest power first).
  std::vector<Eigen::MatrixXd> S(static_cast<std::size_t>(D) + 1,
                                 Eigen::MatrixXd::Zero(m, m));
  auto put = [&S](int row, int col, const Vec& c) {
    for (std::size_t d = 0; d < c.size(); ++d) S[d](row, col) += c[d];
  };
  for (int r = 0; r < nb; ++r)
    for (int b = 0; b <= na; ++b)
      put(r, r + (na - b), v_coefficient(A, b));
  for (int r = 0; r < na; ++r)
    for (int b = 0; b <= nb; ++b)
      put(nb + r, r + (nb - b), v_coefficient(B, b));

  int N = m * D;
  Eigen::MatrixXd X = Eigen::MatrixXd::Zero(N, N), Y = Eigen::MatrixXd::Zero(N, N);
  for (int i = 0; i < m * (D - 1); ++i) {
    X(i, m + i) = 1.0;
    Y(i, i) = 1.0;
  }
  for (int d = 0; d < D; ++d)
    X.block(m * (D - 1), m * d, m, m) = -S[static_cast<std::size_t>(d)];
  Y.block(m * (D - 1), m * (D - 1), m, m) = S[static_cast<std::size_t>(D)];

  Eigen::GeneralizedEigenSolver<Eigen::MatrixXd> ges;
  ges.compute(X, Y, /*computeEigenvectors=*/false);
  std::vector<cplx> out;
  for (int i = 0; i < N; ++i) {
    cplx alpha = ges.alphas()(i);
    double beta = ges.betas()(i);
    if (std::fabs(beta) > 1e-10 * (1.0 + std::abs(alpha)))
      out.push_back(alpha / beta);
  }
  return out;
}

struct ECand {
  cplx e1, e2;
};

bool polish(const Mat& A, const Mat& B, const Mat& A1, const Mat& A2, const Mat& B1,
            const Mat& B2, ECand& c, int iters) {
  for (int it = 0; it < iters; ++it) {
    cplx fa = beval(A, c.e1, c.e2), fb = beval(B, c.e1, c.e2);
    double sa = resid_scale(A, c.e1, c.e2), sb = resid_scale(B, c.e1, c.e2);
    if (std::abs(fa) <= 1e-13 * sa && std::abs(fb) <= 1e-13 * sb) return true;
    cplx j11 = beval(A1, c.e1, c.e2), j12 = beval(A2, c.e1, c.e2);
    cplx j21 = beval(B1, c.e1, c.e2), j22 = beval(B2, c.e1, c.e2);
    cplx det = j11 * j22 - j12 * j21;
    if (std::abs(det) < 1e-14 * (std::abs(j11 * j22) + std::abs(j12 * j21) + 1e-300))
      return false;
    cplx d1 = (fa * j22 - fb * j12) / det;
    cplx d2 = (j11 * fb - j21 * fa) / det;
    c.e1 -= d1;
    c.e2 -= d2;
    if (!(std::isfinite(c.e1.real()) && std::isfinite(c.e2.real()))) return false;
  }
  double sa = resid_scale(A, c.e1, c.e2), sb = resid_scale(B, c.e1, c.e2);
  return std::abs(beval(A, c.e1, c.e2)) <= 1e-10 * sa &&
         std::abs(beval(B, c.e1, c.e2)) <= 1e-10 * sb;
}

}  // namespace

std::vector<NodeRecord> find_nodes(const DegreeContext& ctx, const RationalCurve& curve,
                                   const NodeOptions& opts) {
  if (curve.points.size() != ctx.slots.size())
    fail(Errc::SlotMismatch, "curve does not match the degree's slot layout");
  XYPolys xy = build_xy(ctx, curve);

  Mat A = sym_to_elementary(divide_s_minus_t(cross_diff(xy.nx, xy.dx)));
  Mat B = sym_to_elementary(divide_s_minus_t(cross_diff(xy.ny, xy.dy)));
  trim_mat(A);
  trim_mat(B);
  if (is_zero(A) || is_zero(B))
    fail(Errc::DegenerateCurve,
         "a coordinate takes equal values along a whole curve of parameter pairs; "
         "the map is not birational onto its image");
  // Normalize so residual thresholds are scale-free.
  {
    double ma = max_abs(A), mb = max_abs(B);
    for (auto& row : A)
      for (double& c : row) c /= ma;
    for (auto& row : B)
      for (double& c : row) c /= mb;
  }

  Mat A1 = d_du(A), A2 = d_dv(A), B1 = d_du(B), B2 = d_dv(B);
  int dA2 = deg_v(A), dB2 = deg_v(B);

  std::vector<ECand> cands;
  auto add_pairs_for_e1 = [&](cplx e1) {
    // Union of the e2-roots of both slices; bad ones die in polishing.
    for (const Mat* M : {&A, &B}) {
      int dv = deg_v(*M);
      if (dv < 1) continue;
      for (cplx e2 : croots(coeffs_at(*M, e1, dv))) cands.push_back({e1, e2});
    }
  };

  if (dA2 == 0 && dB2 == 0) {
    // Both elimination polynomials are e2-free.  A common e1-root would give
    // a one-parameter family of coincidences, i.e. a non-reduced image.
    Vec a0 = v_coefficient(A, 0), b0 = v_coefficient(B, 0);
    for (cplx r : croots(std::vector<cplx>(a0.begin(), a0.end())))
      if (std::abs(peval(Vec(b0.begin(), b0.end()), r)) < 1e-7 * resid_scale(B, r, 0.0))
        fail(Errc::DegenerateCurve, "elimination degenerates to a shared univariate root");
    // no isolated solutions
  } else if (dA2 == 0 || dB2 == 0) {
    // One polynomial pins e1 alone; the other supplies e2.
    const Mat& U = (dA2 == 0) ? A : B;   // univariate in e1
    Vec u0 = v_coefficient(U, 0);
    for (cplx r : croots(std::vector<cplx>(u0.begin(), u0.end()))) add_pairs_for_e1(r);
  } else {
    for (cplx r : pencil_e1_values(A, B)) add_pairs_for_e1(r);
  }

  std::vector<ECand> roots;
  auto accept = [&](ECand c) {
    if (!polish(A, B, A1, A2, B1, B2, c, opts.polish_iters)) return;
    // Conjugate copies of a real root polish to opposite tiny imaginary
    // parts; snap them onto the axis so deduplication can merge them.
    if (std::abs(c.e1.imag()) <= opts.cluster_tol * (1.0 + std::abs(c.e1)) &&
        std::abs(c.e2.imag()) <= opts.cluster_tol * (1.0 + std::abs(c.e2))) {
      c.e1 = cplx(c.e1.real(), 0.0);
      c.e2 = cplx(c.e2.real(), 0.0);
    }
    for (const ECand& r : roots)
      if (std::abs(r.e1 - c.e1) <= opts.cluster_tol * (1.0 + std::abs(r.e1)) &&
          std::abs(r.e2 - c.e2) <= opts.cluster_tol * (1.0 + std::abs(r.e2)))
        return;
    roots.push_back(c);
  };
  for (const ECand& c : cands) accept(c);

  // Escalate with a deterministic multistart sweep if the count is short of
  // the lattice-interior target (roots can hide from the pencil when the
  // leading structure degenerates near walls).  Every root of the elimination
  // pair, real or not, is one point of the (e1, e2) solution set.
  if (static_cast<i64>(roots.size()) < ctx.metrics.interior) {
    double R = 2.0;
    for (const ECand& r : roots) R = std::max({R, std::abs(r.e1), std::abs(r.e2)});
    for (const CurvePoint& p : curve.points)
      if (!p.at_inf) R = std::max(R, std::fabs(p.t));
    R = 2.0 * (1.0 + R);
    Rng rng(0x4e0de5u);
    for (int i = 0; i < 400; ++i) {
      ECand c{cplx(rng.uniform(-R, R), rng.uniform(-R, R)),
              cplx(rng.uniform(-R, R), rng.uniform(-R, R))};
      accept(c);
    }
  }

  // Lift each (e1, e2) to a parameter pair and screen against the actual map.
  std::vector<NodeRecord> out;
  std::vector<ECand> kept;
  for (const ECand& r : roots) {
    cplx disc = r.e1 * r.e1 - 4.0 * r.e2;
    cplx sq = std::sqrt(disc);
    cplx s = 0.5 * (r.e1 + sq), t = 0.5 * (r.e1 - sq);
    if (std::abs(s - t) <= 1e-9 * (1.0 + std::abs(s))) continue;  // diagonal artifact
    // Clearing denominators makes every same-type pair of marked parameters
    // a root of the divided system.  Test at the symmetric-function level:
    // |p^2 - e1 p + e2| = |p - s| |p - t| exactly, with no square-root
    // inflation of tiny discriminants.
    bool near_marked = false;
    for (const CurvePoint& p : curve.points) {
      if (p.at_inf) continue;
      cplx q = (p.t - s) * (p.t - t);
      double scale = 1.0 + p.t * p.t + std::abs(r.e1 * p.t) + std::abs(r.e2);
      if (std::abs(q) <= 1e-9 * scale) near_marked = true;
    }
    if (near_marked) continue;
    auto [xs, ys] = evaluate(ctx, curve, s);
    auto [xt, yt] = evaluate(ctx, curve, t);
    if (std::abs(xs - xt) > 1e-6 * (1.0 + std::abs(xs)) ||
        std::abs(ys - yt) > 1e-6 * (1.0 + std::abs(ys)))
      continue;
    kept.push_back(r);
  }

  // Conjugate roots describe the same geometric node; keep one representative.
  std::vector<bool> used(kept.size(), false);
  for (std::size_t i = 0; i < kept.size(); ++i) {
    if (used[i]) continue;
    const ECand& r = kept[i];
    double sc1 = 1.0 + std::abs(r.e1), sc2 = 1.0 + std::abs(r.e2);
    bool realroot = std::abs(r.e1.imag()) <= opts.cluster_tol * sc1 &&
                    std::abs(r.e2.imag()) <= opts.cluster_tol * sc2;
    NodeRecord rec;
    cplx e1 = r.e1, e2 = r.e2;
    if (realroot) {
      e1 = cplx(e1.real(), 0.0);
      e2 = cplx(e2.real(), 0.0);
      double disc = (e1 * e1 - 4.0 * e2).real();
      double dscale = std::max({1.0, std::abs(e1) * std::abs(e1), 4.0 * std::abs(e2)});
      if (std::fabs(disc) <= opts.cluster_tol * dscale)
        fail(Errc::DegenerateCurve,
             "double point degenerates to a tangential self-contact (discriminant ~ 0)");
      rec.kind = disc > 0.0 ? NodeKind::Hyperbolic : NodeKind::Elliptic;
    } else {
      rec.kind = NodeKind::ComplexPair;
      // Pair up with the conjugate root and drop it.
      for (std::size_t j = i + 1; j < kept.size(); ++j) {
        if (used[j]) continue;
        if (std::abs(std::conj(kept[j].e1) - r.e1) <= 1e-6 * sc1 &&
            std::abs(std::conj(kept[j].e2) - r.e2) <= 1e-6 * sc2) {
          used[j] = true;
          break;
        }
      }
      if (e1.imag() < 0.0 || (e1.imag() == 0.0 && e2.imag() < 0.0)) {
        e1 = std::conj(e1);
        e2 = std::conj(e2);
      }
    }
    cplx sq = std::sqrt(e1 * e1 - 4.0 * e2);
    rec.s = 0.5 * (e1 + sq);
    rec.t = 0.5 * (e1 - sq);
    auto [xs, ys] = evaluate(ctx, curve, rec.s);
    auto [xt, yt] = evaluate(ctx, curve, rec.t);
    rec.x = 0.5 * (xs + xt);
    rec.y = 0.5 * (ys + yt);
    if (rec.kind != NodeKind::ComplexPair) {
      rec.x = cplx(rec.x.real(), 0.0);
      rec.y = cplx(rec.y.real(), 0.0);
      double xr = rec.x.real(), yr = rec.y.real();
      if (xr == 0.0 || yr == 0.0)
        fail(Errc::DegenerateCurve, "node lands on a coordinate axis");
      rec.quadrant = xr > 0.0 ? (yr > 0.0 ? 0 : 3) : (yr > 0.0 ? 1 : 2);
    }
    out.push_back(rec);
  }

  std::sort(out.begin(), out.end(), [](const NodeRecord& a, const NodeRecord& b) {
    auto key = [](const NodeRecord& n) {
      return std::array<double, 4>{n.s.real() + n.t.real(), n.s.imag() + n.t.imag(),
                                   (n.s * n.t).real(), (n.s * n.t).imag()};
    };
    return key(a) < key(b);
  });
  return out;
}

}  // namespace refinv
