#pragma once

// Candidate maps f: chart -> R^n and the verification battery: the five
// frame-form conditions of the integral representation theorem, the isometry
// system, the two equivalent frame characterizations of CR pluriharmonicity,
// the harmonicity chain, the isotropy pairings, the shape-operator spectrum,
// and the endpoint classification.

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "crcx/chart.hpp"
#include "crcx/errors.hpp"
#include "crcx/frame.hpp"
#include "crcx/glform.hpp"
#include "crcx/report.hpp"

namespace crcx {

struct ImmersionMap {
  ChartSpec chart;
  std::vector<ExprPtr> components;

  int dimension() const { return static_cast<int>(components.size()); }

  static ImmersionMap from_chart(const ChartSpec& c) {
    if (c.immersion.empty())
      throw CalcError(errc::config_error,
                      "chart '" + c.name + "' carries no immersion components");
    if (c.immersion.size() < 3)
      throw CalcError(errc::wrong_dimension, "immersion target dimension must be >= 3");
    return {c, c.immersion};
  }

  ImmersionMap scaled(double s) const {
    ImmersionMap out = *this;
    for (auto& comp : out.components)
      comp = Expr::binary(Expr::Binary::mul, Expr::literal(s, false), comp);
    return out;
  }
};

namespace detail {

inline cplx bilin_value(const std::vector<Jet>& x, const std::vector<Jet>& y) {
  cplx s = 0;
  for (std::size_t n = 0; n < x.size(); ++n) s += x[n].value() * y[n].value();
  return s;
}

inline cplx herm_value(const std::vector<Jet>& x, const std::vector<Jet>& y) {
  cplx s = 0;
  for (std::size_t n = 0; n < x.size(); ++n) s += x[n].value() * std::conj(y[n].value());
  return s;
}

inline double norm2_value(const std::vector<Jet>& x) { return herm_value(x, x).real(); }

inline std::vector<Jet> vec_apply(const JetVec& field, const std::vector<Jet>& xs) {
  std::vector<Jet> out;
  out.reserve(xs.size());
  for (const auto& x : xs) out.push_back(apply_field(field, x));
  return out;
}

inline std::vector<Jet> vec_conj(const std::vector<Jet>& xs) {
  std::vector<Jet> out;
  out.reserve(xs.size());
  for (const auto& x : xs) out.push_back(x.conj());
  return out;
}

}  // namespace detail

// Per-point cache shared by all checks over one sample set.
class ImmersionChecker {
 public:
  struct PointData {
    FrameData fr;
    JetVec X, Y;                 // orthonormal real contact fields
    std::vector<Jet> f;          // immersion components, order K
    std::vector<Jet> phi;        // Zf
    std::vector<Jet> zbarf, tf;  // Zbar f, Tf
    std::vector<Jet> dgl, dr;    // the two Laplacians of f
  };

  ImmersionChecker(const ImmersionMap& map, std::vector<std::array<double, 3>> points, int order,
                   std::uint64_t seed, FrameTolerances tol = {})
      : map_(map), seed_(seed), tol_(tol) {
    if (order < 4)
      throw CalcError(errc::order_exhausted, "immersion checks need jet order >= 4");
    data_.reserve(points.size());
    for (const auto& p : points) {
      PointData d;
      d.fr = build_frame(map.chart, p, order, tol);
      const double inv_sqrt2 = 0.70710678118654752440;
      for (int i = 0; i < 3; ++i) {
        const std::size_t si = static_cast<std::size_t>(i);
        d.X[si] = (d.fr.Z[si] + d.fr.Zbar[si]) * cplx(inv_sqrt2, 0);
        d.Y[si] = (d.fr.Z[si] - d.fr.Zbar[si]) * cplx(0, inv_sqrt2);
      }
      for (const auto& comp : map.components) {
        Jet j = eval(comp, p, order);
        if (j.imag_part().max_abs() > tol.frame_tol)
          throw CalcError(errc::config_error,
                          "immersion component is not real-valued on the domain");
        d.f.push_back(std::move(j));
      }
      d.phi = detail::vec_apply(d.fr.Z, d.f);
      d.zbarf = detail::vec_apply(d.fr.Zbar, d.f);
      d.tf = detail::vec_apply(d.fr.T, d.f);
      d.dgl = laplacian_gl(d.fr, d.f);
      d.dr = laplacian_full(d.fr, d.f);
      data_.push_back(std::move(d));
    }
  }

  const ImmersionMap& map() const { return map_; }
  const std::vector<PointData>& data() const { return data_; }
  int dimension() const { return map_.dimension(); }
  std::uint64_t seed() const { return seed_; }
  const FrameTolerances& tolerances() const { return tol_; }

 private:
  ImmersionMap map_;
  std::uint64_t seed_;
  FrameTolerances tol_;
  std::vector<PointData> data_;
};

// --- Weierstrass frame conditions -------------------------------------------

// Conditions (1')-(5') for phi = Zf. (1') is evaluated as the vanishing of
// D''(omega) + D'(conj omega), which is the representation theorem's own
// integrability condition; in frame form it reads
// c phi + iZbar(Zbar phi - ia phi) + T conj(phi) - b conj(phi)
//       - iZbar(Z conj(phi) + i conj(a) conj(phi)) = 0.
inline std::array<ConditionReport, 5> weierstrass_check(const ImmersionChecker& ck, double tol) {
  std::array<ConditionReport, 5> reps;
  reps[0].id = "weierstrass.1";
  reps[0].anchor = "D''(d'f) + D'(d''f) = 0";
  reps[1].id = "weierstrass.2";
  reps[1].anchor = "<phi,phi> = 0";
  reps[2].id = "weierstrass.3";
  reps[2].anchor = "||phi||^2 = 1";
  reps[3].id = "weierstrass.4";
  reps[3].anchor = "||Zbar phi - ia phi||^2 = 1/2";
  reps[4].id = "weierstrass.5";
  reps[4].anchor = "<Z conj(phi) + i conj(a) conj(phi), phi> = 0";

  for (const auto& d : ck.data()) {
    const GlForm omega{Bidegree::e10, d.phi};
    const GlForm omega_bar{Bidegree::e01, detail::vec_conj(d.phi)};
    const GlForm lhs1 = D_second(d.fr, omega);
    const GlForm lhs2 = D_prime(d.fr, omega_bar);
    double r1 = 0;
    for (int n = 0; n < lhs1.components(); ++n)
      r1 = std::max(r1, std::abs(detail::jsum({lhs1.coeff[static_cast<std::size_t>(n)],
                                               lhs2.coeff[static_cast<std::size_t>(n)]})
                                     .value()));
    reps[0].add(r1);

    reps[1].add(std::abs(detail::bilin_value(d.phi, d.phi)));
    reps[2].add(std::abs(detail::norm2_value(d.phi) - 1.0));

    std::vector<Jet> psi;
    psi.reserve(d.phi.size());
    for (std::size_t n = 0; n < d.phi.size(); ++n)
      psi.push_back(detail::jsum({Zbarf(d.fr, d.phi[n]),
                                  cplx(0, -1) * detail::jprod(d.fr.a, d.phi[n])}));
    reps[3].add(std::abs(detail::norm2_value(psi) - 0.5));

    std::vector<Jet> chi;
    chi.reserve(d.phi.size());
    for (std::size_t n = 0; n < d.phi.size(); ++n) {
      const Jet pb = d.phi[n].conj();
      chi.push_back(detail::jsum({Zf(d.fr, pb),
                                  cplx(0, 1) * detail::jprod(d.fr.a.conj(), pb)}));
    }
    reps[4].add(std::abs(detail::bilin_value(chi, d.phi)));
  }
  for (auto& r : reps) r.finalize(tol, ck.seed());
  return reps;
}

// Pullback metric equals the Webster metric: (Zf,Zbar f) = 0, (Tf,Zf) = 0,
// ||Tf||^2 = ||Zf||^2 = 1.
inline ConditionReport isometry_check(const ImmersionChecker& ck, double tol) {
  ConditionReport rep;
  rep.id = "isometry";
  rep.anchor = "(Zf,Zbar f)=0, (Tf,Zf)=0, ||Tf||^2=||Zf||^2=1";
  for (const auto& d : ck.data()) {
    const double r = std::max({std::abs(detail::herm_value(d.phi, d.zbarf)),
                               std::abs(detail::herm_value(d.tf, d.phi)),
                               std::abs(detail::norm2_value(d.tf) - 1.0),
                               std::abs(detail::norm2_value(d.phi) - 1.0)});
    rep.add(r);
  }
  return rep.finalize(tol, ck.seed());
}

// The two equivalent frame conditions for CR pluriharmonicity, evaluated as
// the coefficients of D'(d'f) and D''(d'f) componentwise.
inline std::array<ConditionReport, 2> pluriharmonic_check(const ImmersionChecker& ck, double tol) {
  std::array<ConditionReport, 2> reps;
  reps[0].id = "pluriharmonic.2";
  reps[0].anchor = "TZf + bZf + iZ(Zbar Zf - iaZf) = 0";
  reps[1].id = "pluriharmonic.3";
  reps[1].anchor = "cZf + iZbar(Zbar Zf - iaZf) = 0";
  for (const auto& d : ck.data()) {
    const GlForm omega{Bidegree::e10, d.phi};
    const GlForm dp = D_prime(d.fr, omega);
    const GlForm ds = D_second(d.fr, omega);
    double r2 = 0, r3 = 0;
    for (int n = 0; n < dp.components(); ++n) {
      r2 = std::max(r2, std::abs(dp.coeff[static_cast<std::size_t>(n)].value()));
      r3 = std::max(r3, std::abs(ds.coeff[static_cast<std::size_t>(n)].value()));
    }
    reps[0].add(r2);
    reps[1].add(r3);
  }
  for (auto& r : reps) r.finalize(tol, ck.seed());
  return reps;
}

// Integrability of a C^n-valued (1,0) class omega, given pointwise by a
// callable producing its coefficients from the cached point data:
// D'(omega) = -D+(conj omega) and D''(omega) = -D'(conj omega).
inline std::array<ConditionReport, 2> integrability_check(
    const ImmersionChecker& ck,
    const std::function<std::vector<Jet>(const ImmersionChecker::PointData&)>& omega_fn,
    double tol) {
  std::array<ConditionReport, 2> reps;
  reps[0].id = "integrability.20";
  reps[0].anchor = "D'(w) + D+(conj w) = 0";
  reps[1].id = "integrability.11";
  reps[1].anchor = "D''(w) + D'(conj w) = 0";
  for (const auto& d : ck.data()) {
    const std::vector<Jet> w = omega_fn(d);
    const GlForm omega{Bidegree::e10, w};
    const GlForm omega_bar{Bidegree::e01, detail::vec_conj(w)};
    const GlForm a20 = D_prime(d.fr, omega);
    const GlForm b20 = D_plus(d.fr, omega_bar);
    const GlForm a11 = D_second(d.fr, omega);
    const GlForm b11 = D_prime(d.fr, omega_bar);
    double r20 = 0, r11 = 0;
    for (int n = 0; n < a20.components(); ++n) {
      r20 = std::max(r20, std::abs(detail::jsum({a20.coeff[static_cast<std::size_t>(n)],
                                                 b20.coeff[static_cast<std::size_t>(n)]})
                                       .value()));
      r11 = std::max(r11, std::abs(detail::jsum({a11.coeff[static_cast<std::size_t>(n)],
                                                 b11.coeff[static_cast<std::size_t>(n)]})
                                       .value()));
    }
    reps[0].add(r20);
    reps[1].add(r11);
  }
  for (auto& r : reps) r.finalize(tol, ck.seed());
  return reps;
}

// --- harmonicity chain -------------------------------------------------------

struct HarmonicityReport {
  ConditionReport h1, h2, h3, h4;
  double norm_dr_mean = 0;        // ||Delta_R f||, should be 1 when (2) holds
  double norm_dr_std = 0;
  double norm_dgl2_mean = 0;      // ||Delta_GL f||^2
  double norm_zbar_dgl2_mean = 0; // ||Zbar Delta_GL f||^2
  double norm_t_dgl2_mean = 0;    // ||T Delta_GL f||^2
  bool n_is_4 = false;
  bool implications_consistent = true;
};

inline HarmonicityReport harmonicity_chain(const ImmersionChecker& ck, double tol,
                                           double isometry_tol = 1e-8) {
  const ConditionReport iso = isometry_check(ck, isometry_tol);
  if (!iso.pass)
    throw CalcError(errc::prerequisite_failed,
                    "harmonicity chain requires an isometric map (residual " +
                        std::to_string(iso.max_residual) + ")");

  HarmonicityReport out;
  out.n_is_4 = ck.dimension() == 4;
  out.h1.id = "harmonicity.1";
  out.h1.anchor = "f CR pluriharmonic";
  out.h2.id = "harmonicity.2";
  out.h2.anchor = "<Delta_GL f, Delta_GL f> = 0";
  out.h3.id = "harmonicity.3";
  out.h3.anchor = "Delta_R f orthogonal to Zf, Zbar f, Tf; ||Delta_R f|| constant";
  out.h4.id = "harmonicity.4";
  out.h4.anchor = "normal parallelism via equivalence with (3), n = 4";

  std::vector<double> dr_norms;
  double dgl2 = 0, zb2 = 0, t2 = 0;
  for (const auto& d : ck.data()) {
    const GlForm omega{Bidegree::e10, d.phi};
    const GlForm dp = D_prime(d.fr, omega);
    const GlForm ds = D_second(d.fr, omega);
    double r1 = 0;
    for (int n = 0; n < dp.components(); ++n)
      r1 = std::max({r1, std::abs(dp.coeff[static_cast<std::size_t>(n)].value()),
                     std::abs(ds.coeff[static_cast<std::size_t>(n)].value())});
    out.h1.add(r1);

    out.h2.add(std::abs(detail::bilin_value(d.dgl, d.dgl)));

    const double ortho = std::max({std::abs(detail::herm_value(d.dr, d.phi)),
                                   std::abs(detail::herm_value(d.dr, d.zbarf)),
                                   std::abs(detail::herm_value(d.dr, d.tf))});
    out.h3.add(ortho);
    out.h4.add(ortho);
    dr_norms.push_back(std::sqrt(detail::norm2_value(d.dr)));

    dgl2 += detail::norm2_value(d.dgl);
    const auto zbd = detail::vec_apply(d.fr.Zbar, d.dgl);
    const auto td = detail::vec_apply(d.fr.T, d.dgl);
    zb2 += detail::norm2_value(zbd);
    t2 += detail::norm2_value(td);
  }
  const double count = static_cast<double>(ck.data().size());
  out.norm_dr_std = sample_std(dr_norms);
  for (double x : dr_norms) out.norm_dr_mean += x;
  out.norm_dr_mean /= count;
  out.norm_dgl2_mean = dgl2 / count;
  out.norm_zbar_dgl2_mean = zb2 / count;
  out.norm_t_dgl2_mean = t2 / count;

  out.h1.finalize(tol, ck.seed());
  out.h2.finalize(tol, ck.seed());
  out.h3.finalize(tol, ck.seed());
  // Constancy of ||Delta_R f|| is part of (3); fold the sample std in.
  out.h3.max_residual = std::max(out.h3.max_residual, out.norm_dr_std);
  out.h3.pass = out.h3.max_residual < tol;
  out.h4.finalize(tol, ck.seed());
  out.h4.max_residual = out.h3.max_residual;
  out.h4.pass = out.n_is_4 && out.h3.pass;

  out.implications_consistent =
      !(out.h1.pass && !out.h2.pass) && !(out.h2.pass && !out.h3.pass);
  return out;
}

// Six bilinear pairings <V Delta_GL f, W Delta_GL f> = 0 for V,W in
// {Z, Zbar, T}; n = 4 and condition (2) are prerequisites.
inline std::array<ConditionReport, 6> isotropy_check(const ImmersionChecker& ck, double tol) {
  if (ck.dimension() != 4)
    throw CalcError(errc::wrong_dimension, "isotropy pairings are an n = 4 statement");
  static const char* kNames[6] = {"ZZ", "ZZbar", "ZT", "ZbarZbar", "ZbarT", "TT"};
  std::array<ConditionReport, 6> reps;
  for (int k = 0; k < 6; ++k) {
    reps[static_cast<std::size_t>(k)].id = std::string("isotropy.") + kNames[k];
    reps[static_cast<std::size_t>(k)].anchor = "<V Delta_GL f, W Delta_GL f> = 0";
  }
  for (const auto& d : ck.data()) {
    if (std::abs(detail::bilin_value(d.dgl, d.dgl)) > tol)
      throw CalcError(errc::prerequisite_failed,
                      "isotropy pairings require <Delta_GL f, Delta_GL f> = 0");
    const auto zd = detail::vec_apply(d.fr.Z, d.dgl);
    const auto zbd = detail::vec_apply(d.fr.Zbar, d.dgl);
    const auto td = detail::vec_apply(d.fr.T, d.dgl);
    reps[0].add(std::abs(detail::bilin_value(zd, zd)));
    reps[1].add(std::abs(detail::bilin_value(zd, zbd)));
    reps[2].add(std::abs(detail::bilin_value(zd, td)));
    reps[3].add(std::abs(detail::bilin_value(zbd, zbd)));
    reps[4].add(std::abs(detail::bilin_value(zbd, td)));
    reps[5].add(std::abs(detail::bilin_value(td, td)));
  }
  for (auto& r : reps) r.finalize(tol, ck.seed());
  return reps;
}

// --- shape operator ----------------------------------------------------------

struct SpectrumReport {
  std::vector<std::array<double, 3>> eigenvalues;  // per point, descending
  std::array<double, 3> mean{};
  double symmetry_residual = 0;
  double trace_residual = 0;
};

namespace detail {

// Closed-form eigenvalues of a symmetric 3x3 matrix, descending.
inline std::array<double, 3> symmetric_eigenvalues(const std::array<std::array<double, 3>, 3>& A) {
  const double p1 = A[0][1] * A[0][1] + A[0][2] * A[0][2] + A[1][2] * A[1][2];
  std::array<double, 3> eig{};
  if (p1 < 1e-30) {
    eig = {A[0][0], A[1][1], A[2][2]};
  } else {
    const double q = (A[0][0] + A[1][1] + A[2][2]) / 3.0;
    const double p2 = (A[0][0] - q) * (A[0][0] - q) + (A[1][1] - q) * (A[1][1] - q) +
                      (A[2][2] - q) * (A[2][2] - q) + 2 * p1;
    const double p = std::sqrt(p2 / 6.0);
    std::array<std::array<double, 3>, 3> B{};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        B[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
            (A[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] - (i == j ? q : 0.0)) / p;
    const double detB =
        B[0][0] * (B[1][1] * B[2][2] - B[1][2] * B[2][1]) -
        B[0][1] * (B[1][0] * B[2][2] - B[1][2] * B[2][0]) +
        B[0][2] * (B[1][0] * B[2][1] - B[1][1] * B[2][0]);
    double r = detB / 2.0;
    r = std::max(-1.0, std::min(1.0, r));
    const double phi = std::acos(r) / 3.0;
    const double two_pi_3 = 2.0943951023931953;
    eig = {q + 2 * p * std::cos(phi), q + 2 * p * std::cos(phi + 2 * two_pi_3),
           q + 2 * p * std::cos(phi + two_pi_3)};
  }
  if (eig[0] < eig[1]) std::swap(eig[0], eig[1]);
  if (eig[1] < eig[2]) std::swap(eig[1], eig[2]);
  if (eig[0] < eig[1]) std::swap(eig[0], eig[1]);
  return eig;
}

}  // namespace detail

// Second fundamental form h(V,W) = <VWf, nu> on the orthonormal frame
// (X, Y, T), with the unit normal nu = -Delta_R f / ||Delta_R f|| (the
// orientation for which the reference sphere has positive curvatures).
inline SpectrumReport shape_spectrum(const ImmersionChecker& ck, double tol) {
  if (ck.dimension() != 4)
    throw CalcError(errc::wrong_dimension, "shape spectrum is computed for n = 4");
  SpectrumReport out;
  for (const auto& d : ck.data()) {
    const double dr_norm = std::sqrt(detail::norm2_value(d.dr));
    const double ortho = std::max({std::abs(detail::herm_value(d.dr, d.phi)),
                                   std::abs(detail::herm_value(d.dr, d.tf))});
    if (dr_norm < 0.1 || ortho > 100 * tol)
      throw CalcError(errc::prerequisite_failed,
                      "shape spectrum needs Delta_R f normal and bounded away from zero");
    std::array<double, 4> nu{};
    for (int n = 0; n < 4; ++n)
      nu[static_cast<std::size_t>(n)] = -d.dr[static_cast<std::size_t>(n)].value().real() / dr_norm;

    const JetVec* fields[3] = {&d.X, &d.Y, &d.fr.T};
    std::vector<Jet> first[3];
    for (int i = 0; i < 3; ++i) first[i] = detail::vec_apply(*fields[i], d.f);

    std::array<std::array<double, 3>, 3> h{};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        const auto second = detail::vec_apply(*fields[i], first[j]);
        double s = 0;
        for (int n = 0; n < 4; ++n)
          s += second[static_cast<std::size_t>(n)].value().real() * nu[static_cast<std::size_t>(n)];
        h[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = s;
      }

    double asym = 0;
    for (int i = 0; i < 3; ++i)
      for (int j = i + 1; j < 3; ++j)
        asym = std::max(asym, std::abs(h[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] -
                                       h[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)]));
    if (asym > std::max(tol, 1e-6) * 100)
      throw CalcError(errc::non_symmetric,
                      "second fundamental form asymmetry " + std::to_string(asym));
    out.symmetry_residual = std::max(out.symmetry_residual, asym);

    std::array<std::array<double, 3>, 3> hs{};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        hs[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
            0.5 * (h[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] +
                   h[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)]);
    const auto eig = detail::symmetric_eigenvalues(hs);

    // Trace consistency: sum of solver eigenvalues vs a direct contraction.
    double direct = 0;
    for (int i = 0; i < 3; ++i) {
      const auto second = detail::vec_apply(*fields[i], first[i]);
      for (int n = 0; n < 4; ++n)
        direct += second[static_cast<std::size_t>(n)].value().real() * nu[static_cast<std::size_t>(n)];
    }
    out.trace_residual =
        std::max(out.trace_residual, std::abs(eig[0] + eig[1] + eig[2] - direct));
    out.eigenvalues.push_back(eig);
  }
  for (const auto& e : out.eigenvalues)
    for (int i = 0; i < 3; ++i) out.mean[static_cast<std::size_t>(i)] += e[static_cast<std::size_t>(i)];
  for (int i = 0; i < 3; ++i)
    out.mean[static_cast<std::size_t>(i)] /= static_cast<double>(out.eigenvalues.size());
  return out;
}

// --- classification ----------------------------------------------------------

enum class Classification { Sphere, Cylinder, Inconclusive };

inline const char* classification_name(Classification c) {
  switch (c) {
    case Classification::Sphere: return "Sphere";
    case Classification::Cylinder: return "Cylinder";
    case Classification::Inconclusive: return "Inconclusive";
  }
  return "?";
}

struct ClassifyResult {
  Classification verdict = Classification::Inconclusive;
  double c_max = 0;              // max |c| over samples
  double f_minus_2dr_std = 0;    // max component std of f - 2 Delta_R f
  std::array<double, 3> spectrum{};
  double gauge_b_residual = 0;   // |b' - i/2| after the canonical gauge
  double gauge_c_residual = 0;   // |c' - i/2| after the canonical gauge
  std::string detail;
};

// Endpoint classification keyed on the branch invariants: the torsion
// coefficient c, the constancy of f - 2 Delta_R f, the canonical-gauge values
// of b and c, and the principal curvature spectrum.
inline ClassifyResult classify(const ImmersionChecker& ck, double tol,
                               double prerequisite_tol = 1e-8) {
  if (ck.dimension() != 4)
    throw CalcError(errc::wrong_dimension, "classification targets n = 4");
  const auto w = weierstrass_check(ck, prerequisite_tol);
  for (const auto& r : w)
    if (!r.pass)
      throw CalcError(errc::prerequisite_failed,
                      "classification requires the representation conditions (" + r.id +
                          " residual " + std::to_string(r.max_residual) + ")");
  const auto ph = pluriharmonic_check(ck, prerequisite_tol);
  if (!ph[0].pass || !ph[1].pass)
    throw CalcError(errc::prerequisite_failed, "classification requires CR pluriharmonicity");

  ClassifyResult out;

  std::array<std::vector<double>, 4> residue;
  double gauge_b = 0, gauge_c = 0;
  bool gauge_defined = true;
  for (const auto& d : ck.data()) {
    out.c_max = std::max(out.c_max, std::abs(d.fr.c.value()));
    for (int n = 0; n < 4; ++n)
      residue[static_cast<std::size_t>(n)].push_back(
          d.f[static_cast<std::size_t>(n)].value().real() -
          2 * d.dr[static_cast<std::size_t>(n)].value().real());

    // Canonical gauge rotating c onto i/2: v = (1/2) Im log((i/2)/c); then
    // c' = e^{2iv} c and b' = b + iTv.
    if (std::abs(d.fr.c.value()) < 0.05) {
      gauge_defined = false;
    } else {
      const Jet ratio = Jet::constant(d.fr.c.order(), cplx(0, 0.5), d.fr.point) / d.fr.c;
      const Jet v = cplx(0.5, 0) * log(ratio).imag_part();
      const Jet cprime = exp(cplx(0, 2) * v) * d.fr.c;
      const Jet bprime = detail::jsum({d.fr.b, cplx(0, 1) * Tf(d.fr, v)});
      gauge_c = std::max(gauge_c, std::abs(cprime.value() - cplx(0, 0.5)));
      gauge_b = std::max(gauge_b, std::abs(bprime.value() - cplx(0, 0.5)));
    }
  }
  for (int n = 0; n < 4; ++n)
    out.f_minus_2dr_std =
        std::max(out.f_minus_2dr_std, sample_std(residue[static_cast<std::size_t>(n)]));
  out.gauge_b_residual = gauge_defined ? gauge_b : 1.0;
  out.gauge_c_residual = gauge_defined ? gauge_c : 1.0;

  const auto spec = shape_spectrum(ck, tol);
  out.spectrum = spec.mean;
  double dev_sphere = 0, dev_cylinder = 0;
  const double targets_sphere[3] = {0.5, 0.5, 0.5};
  const double targets_cylinder[3] = {1.0, 0.0, 0.0};
  for (const auto& e : spec.eigenvalues)
    for (int i = 0; i < 3; ++i) {
      dev_sphere = std::max(dev_sphere, std::abs(e[static_cast<std::size_t>(i)] -
                                                 targets_sphere[i]));
      dev_cylinder = std::max(dev_cylinder, std::abs(e[static_cast<std::size_t>(i)] -
                                                     targets_cylinder[i]));
    }

  if (out.c_max < tol && out.f_minus_2dr_std < tol && dev_sphere < tol) {
    out.verdict = Classification::Sphere;
    out.detail = "c vanishes, f - 2 Delta_R f constant, spectrum (1/2,1/2,1/2)";
  } else if (dev_cylinder < tol && gauge_defined && out.gauge_b_residual < tol &&
             out.gauge_c_residual < tol) {
    out.verdict = Classification::Cylinder;
    out.detail = "spectrum (1,0,0) and a gauge with b = c = i/2";
  } else {
    out.verdict = Classification::Inconclusive;
    out.detail = "no branch matched at tolerance " + std::to_string(tol);
  }
  return out;
}

// --- cylinder branch identities ----------------------------------------------

struct CylinderBranchReport {
  ConditionReport y_dgl;    // Y Delta_GL f = 0
  ConditionReport x_dgl;    // X Delta_GL f = 2^{-1/2} Zbar f
  ConditionReport xx;       // XXf = -Delta_R f
  ConditionReport xxx;      // XXXf = -Xf
  ConditionReport xxxx;     // X^4 f = Delta_R f
};

inline CylinderBranchReport cylinder_branch_check(const ImmersionChecker& ck, double tol) {
  CylinderBranchReport out;
  out.y_dgl.id = "cylinder.y_dgl";
  out.y_dgl.anchor = "Y Delta_GL f = 0";
  out.x_dgl.id = "cylinder.x_dgl";
  out.x_dgl.anchor = "X Delta_GL f = 2^{-1/2} Zbar f";
  out.xx.id = "cylinder.xx";
  out.xx.anchor = "XXf = -Delta_R f";
  out.xxx.id = "cylinder.xxx";
  out.xxx.anchor = "XXXf = -Xf";
  out.xxxx.id = "cylinder.xxxx";
  out.xxxx.anchor = "X^4 f = Delta_R f";

  const double inv_sqrt2 = 0.70710678118654752440;
  for (const auto& d : ck.data()) {
    const auto ydgl = detail::vec_apply(d.Y, d.dgl);
    const auto xdgl = detail::vec_apply(d.X, d.dgl);
    const auto xf = detail::vec_apply(d.X, d.f);
    const auto xxf = detail::vec_apply(d.X, xf);
    const auto xxxf = detail::vec_apply(d.X, xxf);
    const auto xxxxf = detail::vec_apply(d.X, xxxf);
    double ry = 0, rx = 0, rxx = 0, rxxx = 0, rxxxx = 0;
    for (std::size_t n = 0; n < d.f.size(); ++n) {
      ry = std::max(ry, std::abs(ydgl[n].value()));
      rx = std::max(rx, std::abs(xdgl[n].value() - inv_sqrt2 * d.zbarf[n].value()));
      rxx = std::max(rxx, std::abs(xxf[n].value() + d.dr[n].value()));
      rxxx = std::max(rxxx, std::abs(xxxf[n].value() + xf[n].value()));
      rxxxx = std::max(rxxxx, std::abs(xxxxf[n].value() - d.dr[n].value()));
    }
    out.y_dgl.add(ry);
    out.x_dgl.add(rx);
    out.xx.add(rxx);
    out.xxx.add(rxxx);
    out.xxxx.add(rxxxx);
  }
  out.y_dgl.finalize(tol, ck.seed());
  out.x_dgl.finalize(tol, ck.seed());
  out.xx.finalize(tol, ck.seed());
  out.xxx.finalize(tol, ck.seed());
  out.xxxx.finalize(tol, ck.seed());
  return out;
}

}  // namespace crcx
