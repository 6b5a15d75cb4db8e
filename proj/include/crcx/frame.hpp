#pragma once

// Pointwise pseudohermitian frame machinery. From a chart (Z_raw, theta) this
// builds, as jets at a point: the normalized section Z with L(Z,Z) = 1, the
// Reeb field T, the dual coframe (zeta, zetabar, theta), and the bracket
// coefficients a, b, c defined by
//
//   i[Z,Zbar] = T + a Z + conj(a) Zbar,
//   [Z,T]     = b Z + conj(c) Zbar,
//   [Zbar,T]  = c Z + conj(b) Zbar.
//
// Conventions: 2-forms are evaluated by full contraction with the
// antisymmetric coefficient matrix (dA)_ij = d_i A_j - d_j A_i, which matches
// dA(V,W) = V A(W) - W A(V) - A([V,W]); the Levi normalization is
// L(V) = -i dtheta(V, conj V), the sign that makes the bracket equations above
// hold with +T.

#include <array>
#include <cmath>
#include <string>

#include "crcx/chart.hpp"
#include "crcx/errors.hpp"
#include "crcx/expr.hpp"
#include "crcx/jet.hpp"

namespace crcx {

struct FrameTolerances {
  double frame_tol = 1e-9;
  double condition_limit = 1e12;
};

using JetVec = std::array<Jet, 3>;
using JetMat = std::array<std::array<Jet, 3>, 3>;

namespace detail {

inline Jet dot(const JetVec& row, const JetVec& v) {
  int m = row[0].order();
  for (const auto& j : row) m = std::min(m, j.order());
  for (const auto& j : v) m = std::min(m, j.order());
  auto t = [m](const Jet& j) { return j.order() == m ? j : j.truncated(m); };
  return t(row[0]) * t(v[0]) + t(row[1]) * t(v[1]) + t(row[2]) * t(v[2]);
}

inline JetVec conj(const JetVec& v) { return {v[0].conj(), v[1].conj(), v[2].conj()}; }

inline JetVec scale(const JetVec& v, const Jet& s) {
  int m = std::min({v[0].order(), v[1].order(), v[2].order(), s.order()});
  auto t = [m](const Jet& j) { return j.order() == m ? j : j.truncated(m); };
  return {t(v[0]) * t(s), t(v[1]) * t(s), t(v[2]) * t(s)};
}

// 2-form evaluation: sum_ij A_ij V_i W_j.
inline Jet eval_two_form(const JetMat& A, const JetVec& v, const JetVec& w) {
  int m = A[0][1].order();
  for (const auto& row : A)
    for (const auto& j : row) m = std::min(m, j.order());
  for (const auto& j : v) m = std::min(m, j.order());
  for (const auto& j : w) m = std::min(m, j.order());
  auto t = [m](const Jet& j) { return j.order() == m ? j : j.truncated(m); };
  Jet s = Jet::zero(m, v[0].base_point());
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      if (i == j) continue;
      s = s + t(A[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]) *
                  t(v[static_cast<std::size_t>(i)]) * t(w[static_cast<std::size_t>(j)]);
    }
  return s;
}

inline Jet det3(const JetMat& m) {
  return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
         m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
         m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

inline JetMat invert3(const JetMat& m, errc on_singular, const std::string& what) {
  const Jet d = det3(m);
  if (std::abs(d.value()) <= kDivEpsilon)
    throw CalcError(on_singular, what + ": singular 3x3 system");
  JetMat adj;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const int i1 = (i + 1) % 3, i2 = (i + 2) % 3, j1 = (j + 1) % 3, j2 = (j + 2) % 3;
      // adj_ji = cofactor_ij
      adj[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] =
          m[static_cast<std::size_t>(i1)][static_cast<std::size_t>(j1)] *
              m[static_cast<std::size_t>(i2)][static_cast<std::size_t>(j2)] -
          m[static_cast<std::size_t>(i1)][static_cast<std::size_t>(j2)] *
              m[static_cast<std::size_t>(i2)][static_cast<std::size_t>(j1)];
    }
  const Jet dinv = d.reciprocal();
  JetMat r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      r[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
          adj[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] * dinv;
  return r;
}

// (dtheta)_ij = d_i theta_j - d_j theta_i; order drops by one.
inline JetMat exterior_derivative(const JetVec& one_form) {
  JetMat a;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
          one_form[static_cast<std::size_t>(j)].partial(i) -
          one_form[static_cast<std::size_t>(i)].partial(j);
  return a;
}

inline double one_norm_values(const JetMat& m) {
  double best = 0;
  for (int j = 0; j < 3; ++j) {
    double s = 0;
    for (int i = 0; i < 3; ++i)
      s += std::abs(m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)].value());
    best = std::max(best, s);
  }
  return best;
}

}  // namespace detail

struct FrameData {
  std::array<double, 3> point{};
  int order = 0;  // order of the frame component jets (chart order minus one)
  JetVec Z, Zbar, T;
  JetVec zeta, zetabar, theta;  // dual coframe rows over coordinate differentials
  Jet a, b, c;                  // one order below the frame components
  double levi_raw = 0;          // L(Z_raw, Z_raw) before normalization
  double condition = 0;         // frame matrix condition estimate (1-norm)
};

struct BracketResiduals {
  double zz;  // i[Z,Zbar] - (T + aZ + conj(a)Zbar)
  double zt;  // [Z,T] - (bZ + conj(c)Zbar)
  double zbt; // [Zbar,T] - (cZ + conj(b)Zbar)
  double max() const { return std::max({zz, zt, zbt}); }
};

namespace detail {

struct StructureOut {
  Jet a, b, c;
  BracketResiduals residuals;
};

inline StructureOut compute_structure(const JetVec& Z, const JetVec& Zbar, const JetVec& T,
                                      const JetVec& zeta) {
  const JetVec lzz = bracket(Z, Zbar);
  const JetVec lzt = bracket(Z, T);
  const JetVec lzbt = bracket(Zbar, T);

  const Jet a = cplx(0, 1) * dot(zeta, lzz);
  const Jet b = dot(zeta, lzt);
  const Jet c = dot(zeta, lzbt);

  auto expand_residual = [&](const JetVec& lhs, const Jet& cz, const Jet& czb,
                             bool with_t) -> double {
    double r = 0;
    for (int k = 0; k < 3; ++k) {
      const int m = lhs[static_cast<std::size_t>(k)].order();
      auto t = [m](const Jet& j) { return j.order() == m ? j : j.truncated(m); };
      Jet rhs = t(cz) * t(Z[static_cast<std::size_t>(k)]) +
                t(czb) * t(Zbar[static_cast<std::size_t>(k)]);
      if (with_t) rhs = rhs + t(T[static_cast<std::size_t>(k)]);
      r = std::max(r, std::abs(lhs[static_cast<std::size_t>(k)].value() - rhs.value()));
    }
    return r;
  };

  StructureOut out{a, b, c, {}};
  const JetVec izz = scale(lzz, Jet::constant(lzz[0].order(), cplx(0, 1), lzz[0].base_point()));
  out.residuals.zz = expand_residual(izz, a, a.conj(), true);
  out.residuals.zt = expand_residual(lzt, b, c.conj(), false);
  out.residuals.zbt = expand_residual(lzbt, c, b.conj(), false);
  return out;
}

}  // namespace detail

inline FrameData build_frame(const ChartSpec& chart, const std::array<double, 3>& point,
                             int order, const FrameTolerances& tol = {}) {
  if (order < 2)
    throw CalcError(errc::order_exhausted, "frame construction needs jet order >= 2");
  if (!chart.contains(point))
    throw CalcError(errc::domain_out_of_chart,
                    "point outside the domain box of chart '" + chart.name + "'");

  JetVec theta, zraw;
  for (int i = 0; i < 3; ++i) {
    theta[static_cast<std::size_t>(i)] = eval(chart.theta[static_cast<std::size_t>(i)], point, order);
    zraw[static_cast<std::size_t>(i)] = eval(chart.z_raw[static_cast<std::size_t>(i)], point, order);
    if (theta[static_cast<std::size_t>(i)].imag_part().max_abs() > tol.frame_tol)
      throw CalcError(errc::config_error, "theta coefficients must be real-valued");
  }

  // Contact condition theta(Z_raw) = 0.
  const Jet contact = detail::dot(theta, zraw);
  if (std::abs(contact.value()) > tol.frame_tol)
    throw CalcError(errc::contact_violation,
                    "theta(Z_raw) = " + std::to_string(std::abs(contact.value())));

  const JetMat dtheta = detail::exterior_derivative(theta);

  // Levi normalization.
  const Jet levi = cplx(0, -1) * detail::eval_two_form(dtheta, zraw, detail::conj(zraw));
  if (!(levi.value().real() > 0) || std::abs(levi.value().imag()) > tol.frame_tol * (1 + std::abs(levi.value())))
    throw CalcError(errc::not_pseudoconvex,
                    "Levi form value " + std::to_string(levi.value().real()) + "+" +
                        std::to_string(levi.value().imag()) + "i");

  FrameData f;
  f.point = point;
  f.order = order - 1;
  f.levi_raw = levi.value().real();

  const Jet norm = sqrt(levi.real_part());
  const Jet ninv = norm.reciprocal();
  for (int i = 0; i < 3; ++i)
    f.Z[static_cast<std::size_t>(i)] = zraw[static_cast<std::size_t>(i)].truncated(order - 1) * ninv;
  f.Zbar = detail::conj(f.Z);

  // Reeb field: least squares on the rank-3 4x3 system
  // {theta(T) = 1, dtheta(T, d_i) = 0}, i.e. N T = theta with N = theta theta^T + A A^T.
  {
    const int m = order - 1;
    JetVec th;
    for (int i = 0; i < 3; ++i) th[static_cast<std::size_t>(i)] = theta[static_cast<std::size_t>(i)].truncated(m);
    JetMat N;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        Jet s = th[static_cast<std::size_t>(i)] * th[static_cast<std::size_t>(j)];
        for (int k = 0; k < 3; ++k)
          s = s + dtheta[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] *
                      dtheta[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)];
        N[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = s;
      }
    const JetMat Ninv = detail::invert3(N, errc::degenerate_frame, "Reeb solve");
    for (int i = 0; i < 3; ++i) {
      Jet s = Jet::zero(m, point);
      for (int j = 0; j < 3; ++j)
        s = s + Ninv[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] *
                    th[static_cast<std::size_t>(j)];
      f.T[static_cast<std::size_t>(i)] = s;
    }
    // Consistency of the overdetermined system.
    const double r0 = std::abs(detail::dot(th, f.T).value() - cplx(1, 0));
    double r1 = 0;
    for (int i = 0; i < 3; ++i) {
      Jet s = Jet::zero(m, point);
      for (int j = 0; j < 3; ++j)
        s = s + dtheta[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)].truncated(m) *
                    f.T[static_cast<std::size_t>(j)];
      r1 = std::max(r1, std::abs(s.value()));
    }
    if (std::max(r0, r1) > tol.frame_tol)
      throw CalcError(errc::degenerate_frame,
                      "Reeb consistency residual " + std::to_string(std::max(r0, r1)));
  }

  // Dual coframe: rows of the inverse of the frame matrix with columns (Z, Zbar, T).
  JetMat F;
  for (int i = 0; i < 3; ++i) {
    F[static_cast<std::size_t>(i)][0] = f.Z[static_cast<std::size_t>(i)];
    F[static_cast<std::size_t>(i)][1] = f.Zbar[static_cast<std::size_t>(i)];
    F[static_cast<std::size_t>(i)][2] = f.T[static_cast<std::size_t>(i)];
  }
  const JetMat C = detail::invert3(F, errc::degenerate_frame, "coframe");
  f.condition = detail::one_norm_values(F) * detail::one_norm_values(C);
  if (f.condition > tol.condition_limit)
    throw CalcError(errc::degenerate_frame,
                    "frame matrix condition estimate " + std::to_string(f.condition));
  for (int j = 0; j < 3; ++j) {
    f.zeta[static_cast<std::size_t>(j)] = C[0][static_cast<std::size_t>(j)];
    f.zetabar[static_cast<std::size_t>(j)] = C[1][static_cast<std::size_t>(j)];
    f.theta[static_cast<std::size_t>(j)] = C[2][static_cast<std::size_t>(j)];
  }

  const auto s = detail::compute_structure(f.Z, f.Zbar, f.T, f.zeta);
  f.a = s.a;
  f.b = s.b;
  f.c = s.c;
  return f;
}

struct StructureFunctions {
  Jet a, b, c;
  BracketResiduals residuals;
};

inline StructureFunctions structure_functions(const FrameData& f) {
  if (f.order < 1)
    throw CalcError(errc::order_exhausted, "structure functions need frame jets of order >= 1");
  const auto s = detail::compute_structure(f.Z, f.Zbar, f.T, f.zeta);
  return {s.a, s.b, s.c, s.residuals};
}

// Scalar field action of the frame vectors.
inline Jet Zf(const FrameData& f, const Jet& x) { return apply_field(f.Z, x); }
inline Jet Zbarf(const FrameData& f, const Jet& x) { return apply_field(f.Zbar, x); }
inline Jet Tf(const FrameData& f, const Jet& x) { return apply_field(f.T, x); }

struct StructureEqReport {
  double dtheta = 0;    // dtheta = i zeta ^ zetabar
  double dzeta = 0;     // dzeta = ia zeta^zetabar - b zeta^theta - c zetabar^theta
  double reality = 0;   // b + conj(b) = 0
  double jacobi = 0;    // iZc - iZbar b + Ta - ab - conj(a) c = 0
  double duality = 0;   // coframe * frame = identity
  double reeb = 0;      // theta(T) = 1 and dtheta(T, .) = 0
  double levi = 0;      // L(Z,Z) = 1
  double max_residual() const {
    return std::max({dtheta, dzeta, reality, jacobi, duality, reeb, levi});
  }
};

namespace detail {

// max |(A - (s1 p^q + s2 r^t + s3 x^y))_ij| over values, forms given as rows.
inline double two_form_residual(const JetMat& A, const Jet& s1, const JetVec& p, const JetVec& q,
                                const Jet& s2, const JetVec& r, const JetVec& t, const Jet& s3,
                                const JetVec& x, const JetVec& y) {
  double worst = 0;
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j) {
      const std::size_t si = static_cast<std::size_t>(i), sj = static_cast<std::size_t>(j);
      const cplx lhs = A[si][sj].value();
      const cplx rhs = s1.value() * (p[si].value() * q[sj].value() - p[sj].value() * q[si].value()) +
                       s2.value() * (r[si].value() * t[sj].value() - r[sj].value() * t[si].value()) +
                       s3.value() * (x[si].value() * y[sj].value() - x[sj].value() * y[si].value());
      worst = std::max(worst, std::abs(lhs - rhs));
    }
  return worst;
}

}  // namespace detail

inline StructureEqReport verify_structure_equations(const FrameData& f) {
  StructureEqReport r;
  const auto& p = f.point;
  const int m = f.order;
  const Jet zero = Jet::zero(m, p);

  // dtheta = i zeta ^ zetabar.
  const JetMat dth = detail::exterior_derivative(f.theta);
  r.dtheta = detail::two_form_residual(dth, Jet::constant(m - 1, cplx(0, 1), p), f.zeta,
                                       f.zetabar, zero, f.zeta, f.theta, zero, f.zetabar, f.theta);

  // dzeta = ia zeta^zetabar - b zeta^theta - c zetabar^theta.
  const JetMat dze = detail::exterior_derivative(f.zeta);
  r.dzeta = detail::two_form_residual(dze, cplx(0, 1) * f.a, f.zeta, f.zetabar, -f.b, f.zeta,
                                      f.theta, -f.c, f.zetabar, f.theta);

  r.reality = std::abs((f.b + f.b.conj()).value());

  // iZc - iZbar b + Ta - ab - conj(a) c = 0.
  {
    const Jet zc = Zf(f, f.c);
    const Jet zbb = Zbarf(f, f.b);
    const Jet ta = Tf(f, f.a);
    const int mm = zc.order();
    auto t = [mm](const Jet& j) { return j.order() == mm ? j : j.truncated(mm); };
    const Jet jac = cplx(0, 1) * zc - cplx(0, 1) * zbb + ta - t(f.a) * t(f.b) -
                    t(f.a.conj()) * t(f.c);
    r.jacobi = std::abs(jac.value());
  }

  // Duality: coframe rows against frame columns.
  {
    const JetVec* rows[3] = {&f.zeta, &f.zetabar, &f.theta};
    const JetVec* cols[3] = {&f.Z, &f.Zbar, &f.T};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        const cplx want = (i == j) ? cplx(1, 0) : cplx(0, 0);
        r.duality = std::max(r.duality,
                             std::abs(detail::dot(*rows[static_cast<std::size_t>(i)],
                                                  *cols[static_cast<std::size_t>(j)]).value() -
                                      want));
      }
  }

  // Reeb and Levi re-checks against the coframe-provided theta row.
  {
    const JetMat dth2 = detail::exterior_derivative(f.theta);
    r.reeb = std::abs(detail::dot(f.theta, f.T).value() - cplx(1, 0));
    const Jet itd = detail::eval_two_form(dth2, f.T, f.Z);
    const Jet itd2 = detail::eval_two_form(dth2, f.T, f.Zbar);
    r.reeb = std::max({r.reeb, std::abs(itd.value()), std::abs(itd2.value())});
    const Jet levi = cplx(0, -1) * detail::eval_two_form(dth2, f.Z, f.Zbar);
    r.levi = std::abs(levi.value() - cplx(1, 0));
  }
  return r;
}

// Pseudohermitian change of frame: Z' = exp(-i v) Z with v real on the domain.
inline ChartSpec change_frame(const ChartSpec& chart, const ExprPtr& v,
                              const FrameTolerances& tol = {}) {
  // Reality check at a fixed deterministic batch of interior points.
  for (const auto& p : sample_box(chart.domain, 16, 0)) {
    const Jet vj = eval(v, p, 1);
    if (vj.imag_part().max_abs() > tol.frame_tol)
      throw CalcError(errc::non_real_gauge,
                      "gauge function has imaginary part " + std::to_string(vj.imag_part().max_abs()));
  }
  const ExprPtr phase = Expr::call(
      Expr::Fn::exp, Expr::binary(Expr::Binary::mul,
                                  Expr::unary(Expr::Unary::neg, Expr::imaginary()), v));
  ChartSpec out = chart;
  out.name = chart.name + "_gauged";
  for (int i = 0; i < 3; ++i)
    out.z_raw[static_cast<std::size_t>(i)] =
        Expr::binary(Expr::Binary::mul, phase, chart.z_raw[static_cast<std::size_t>(i)]);
  return out;
}

struct GaugeLawResiduals {
  double a = 0, b = 0, c = 0;
  double max() const { return std::max({a, b, c}); }
};

// Residuals of a' = e^{iv}(a - Zbar v), b' = b + iTv, c' = e^{2iv} c at one point.
inline GaugeLawResiduals gauge_law_residuals(const ChartSpec& chart, const ExprPtr& v,
                                             const std::array<double, 3>& point, int order,
                                             const FrameTolerances& tol = {}) {
  const FrameData f0 = build_frame(chart, point, order, tol);
  const FrameData f1 = build_frame(change_frame(chart, v, tol), point, order, tol);

  const Jet vj = eval(v, point, order).real_part();
  const Jet zbv = Zbarf(f0, vj);
  const Jet tv = Tf(f0, vj);
  const int m = f0.a.order() - 1;
  auto t = [m](const Jet& j) { return j.order() == m ? j : j.truncated(m); };
  const Jet eiv = exp(cplx(0, 1) * t(vj));
  const Jet e2iv = exp(cplx(0, 2) * t(vj));

  GaugeLawResiduals r;
  r.a = std::abs((eiv * (t(f0.a) - t(zbv)) - t(f1.a)).value());
  r.b = std::abs((t(f0.b) + cplx(0, 1) * t(tv) - t(f1.b)).value());
  r.c = std::abs((e2iv * t(f0.c) - t(f1.c)).value());
  return r;
}

enum class InnerKind { bilinear, hermitian };

// Webster inner product of two coordinate vectors at the frame's base point,
// via the frame expansion: <V,W> = vz wzb + vzb wz + vt wt on the orthonormal
// real frame (X, Y, T).
inline cplx webster_inner(const FrameData& f, const std::array<cplx, 3>& V,
                          const std::array<cplx, 3>& W, InnerKind kind) {
  auto pair = [&f](const std::array<cplx, 3>& U) {
    std::array<cplx, 3> r{};
    for (int i = 0; i < 3; ++i) {
      r[0] += f.zeta[static_cast<std::size_t>(i)].value() * U[static_cast<std::size_t>(i)];
      r[1] += f.zetabar[static_cast<std::size_t>(i)].value() * U[static_cast<std::size_t>(i)];
      r[2] += f.theta[static_cast<std::size_t>(i)].value() * U[static_cast<std::size_t>(i)];
    }
    return r;
  };
  const auto vv = pair(V);
  std::array<cplx, 3> w = W;
  if (kind == InnerKind::hermitian)
    for (auto& x : w) x = std::conj(x);
  const auto ww = pair(w);
  return vv[0] * ww[1] + vv[1] * ww[0] + vv[2] * ww[2];
}

}  // namespace crcx
