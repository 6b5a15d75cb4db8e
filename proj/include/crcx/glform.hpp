#pragma once

// The six nonzero bigraded spaces in dimension three and their differentials,
// the star operator, the adjoints, and both Laplacians on functions. All six
// spaces have rank one, so a form is stored as its bidegree plus a scalar or
// C^n-valued coefficient in the basis convention
//
//   (0,0) f     (1,0) [g zeta]        (0,1) [h zetabar]
//   (2,0) g zeta^theta   (1,1) h zetabar^theta   (2,1) f vol,
//
// with vol = zeta ^ zetabar ^ theta. Wedge bookkeeping is in the bidegree
// tag; only coefficients are numeric.

#include <initializer_list>
#include <string>
#include <vector>

#include "crcx/errors.hpp"
#include "crcx/frame.hpp"
#include "crcx/jet.hpp"

namespace crcx {

enum class Bidegree { e00, e10, e01, f20, f11, f21 };

inline const char* bidegree_name(Bidegree b) {
  switch (b) {
    case Bidegree::e00: return "(0,0)";
    case Bidegree::e10: return "(1,0)";
    case Bidegree::e01: return "(0,1)";
    case Bidegree::f20: return "(2,0)";
    case Bidegree::f11: return "(1,1)";
    case Bidegree::f21: return "(2,1)";
  }
  return "?";
}

struct GlForm {
  Bidegree deg{};
  std::vector<Jet> coeff;  // one entry for scalar forms, n for R^n-valued ones

  static GlForm scalar(Bidegree deg, Jet j) { return {deg, {std::move(j)}}; }
  int components() const { return static_cast<int>(coeff.size()); }
};

namespace detail {

inline Jet trunc_to(const Jet& j, int m) { return j.order() == m ? j : j.truncated(m); }

// Sum with truncation to the smallest order among the parts.
inline Jet jsum(std::initializer_list<Jet> parts) {
  int m = kMaxJetOrder;
  for (const auto& j : parts) m = std::min(m, j.order());
  Jet s = Jet::zero(m, parts.begin()->base_point());
  for (const auto& j : parts) s = s + trunc_to(j, m);
  return s;
}

inline Jet jprod(const Jet& a, const Jet& b) {
  const int m = std::min(a.order(), b.order());
  return trunc_to(a, m) * trunc_to(b, m);
}

[[noreturn]] inline void wrong_bidegree(const char* op, Bidegree got) {
  throw CalcError(errc::undefined_on_bidegree,
                  std::string(op) + " is not defined on " + bidegree_name(got));
}

}  // namespace detail

// --- first-order differentials ---------------------------------------------

// d' on functions: [Zf zeta].
inline GlForm d_prime(const FrameData& fr, const GlForm& f) {
  if (f.deg != Bidegree::e00) detail::wrong_bidegree("d'", f.deg);
  GlForm out{Bidegree::e10, {}};
  for (const auto& g : f.coeff) out.coeff.push_back(Zf(fr, g));
  return out;
}

// d'' on functions: [Zbar f zetabar].
inline GlForm d_second(const FrameData& fr, const GlForm& f) {
  if (f.deg != Bidegree::e00) detail::wrong_bidegree("d''", f.deg);
  GlForm out{Bidegree::e01, {}};
  for (const auto& g : f.coeff) out.coeff.push_back(Zbarf(fr, g));
  return out;
}

// --- second-order middle differentials -------------------------------------

// D'([g zeta]) = -(Tg + bg + iZ(Zbar g - iag)) zeta^theta.
inline GlForm D_prime(const FrameData& fr, const GlForm& f) {
  if (f.deg == Bidegree::e10) {
    GlForm out{Bidegree::f20, {}};
    for (const auto& g : f.coeff) {
      const Jet psi = detail::jsum({Zbarf(fr, g), cplx(0, -1) * detail::jprod(fr.a, g)});
      out.coeff.push_back(-detail::jsum(
          {Tf(fr, g), detail::jprod(fr.b, g), cplx(0, 1) * Zf(fr, psi)}));
    }
    return out;
  }
  // D'([h zetabar]) = -(Th + conj(b)h - iZbar(Zh + i conj(a) h)) zetabar^theta.
  if (f.deg == Bidegree::e01) {
    GlForm out{Bidegree::f11, {}};
    for (const auto& h : f.coeff) {
      const Jet chi = detail::jsum({Zf(fr, h), cplx(0, 1) * detail::jprod(fr.a.conj(), h)});
      out.coeff.push_back(-detail::jsum(
          {Tf(fr, h), detail::jprod(fr.b.conj(), h), cplx(0, -1) * Zbarf(fr, chi)}));
    }
    return out;
  }
  detail::wrong_bidegree("D'", f.deg);
}

// D''([g zeta]) = -(cg + iZbar(Zbar g - iag)) zetabar^theta.
inline GlForm D_second(const FrameData& fr, const GlForm& f) {
  if (f.deg != Bidegree::e10) detail::wrong_bidegree("D''", f.deg);
  GlForm out{Bidegree::f11, {}};
  for (const auto& g : f.coeff) {
    const Jet psi = detail::jsum({Zbarf(fr, g), cplx(0, -1) * detail::jprod(fr.a, g)});
    out.coeff.push_back(
        -detail::jsum({detail::jprod(fr.c, g), cplx(0, 1) * Zbarf(fr, psi)}));
  }
  return out;
}

// D+([h zetabar]) = -(conj(c)h - iZ(Zh + i conj(a) h)) zeta^theta.
inline GlForm D_plus(const FrameData& fr, const GlForm& f) {
  if (f.deg != Bidegree::e01) detail::wrong_bidegree("D+", f.deg);
  GlForm out{Bidegree::f20, {}};
  for (const auto& h : f.coeff) {
    const Jet chi = detail::jsum({Zf(fr, h), cplx(0, 1) * detail::jprod(fr.a.conj(), h)});
    out.coeff.push_back(
        -detail::jsum({detail::jprod(fr.c.conj(), h), cplx(0, -1) * Zf(fr, chi)}));
  }
  return out;
}

// --- top-degree differentials ----------------------------------------------

// d''(g zeta^theta) = -(Zbar g - iag) vol.
inline GlForm d_second_top(const FrameData& fr, const GlForm& f) {
  if (f.deg != Bidegree::f20) detail::wrong_bidegree("d''", f.deg);
  GlForm out{Bidegree::f21, {}};
  for (const auto& g : f.coeff)
    out.coeff.push_back(-detail::jsum({Zbarf(fr, g), cplx(0, -1) * detail::jprod(fr.a, g)}));
  return out;
}

// d'(h zetabar^theta) = (Zh + i conj(a) h) vol.
inline GlForm d_prime_top(const FrameData& fr, const GlForm& f) {
  if (f.deg != Bidegree::f11) detail::wrong_bidegree("d'", f.deg);
  GlForm out{Bidegree::f21, {}};
  for (const auto& h : f.coeff)
    out.coeff.push_back(detail::jsum({Zf(fr, h), cplx(0, 1) * detail::jprod(fr.a.conj(), h)}));
  return out;
}

// --- star, adjoints, Laplacians --------------------------------------------

// Pure relabeling between the paired spaces; the coefficient is untouched.
inline GlForm star(const GlForm& f) {
  GlForm out = f;
  switch (f.deg) {
    case Bidegree::e00: out.deg = Bidegree::f21; break;
    case Bidegree::f21: out.deg = Bidegree::e00; break;
    case Bidegree::e10: out.deg = Bidegree::f20; break;
    case Bidegree::f20: out.deg = Bidegree::e10; break;
    case Bidegree::e01: out.deg = Bidegree::f11; break;
    case Bidegree::f11: out.deg = Bidegree::e01; break;
  }
  return out;
}

// L2 adjoint of d'. On E^{1,0} this is +star d'' star, i.e.
// delta'([g zeta]) = -(Zbar g - iag); on functions it vanishes. The
// per-bidegree signs are pinned by integration by parts (div Z = i conj(a))
// and verified by the Reeb-recovery identity Tf = i delta'd'f - i delta''d''f.
inline GlForm delta_prime(const FrameData& fr, const GlForm& f) {
  if (f.deg == Bidegree::e00) {
    GlForm out = f;
    for (auto& g : out.coeff) g = Jet::zero(g.order(), g.base_point());
    return out;
  }
  if (f.deg == Bidegree::e10) {
    GlForm out = star(d_second_top(fr, star(f)));
    return out;
  }
  detail::wrong_bidegree("delta'", f.deg);
}

// L2 adjoint of d''. On E^{0,1}: -star d' star, i.e.
// delta''([h zetabar]) = -(Zh + i conj(a) h); on functions it vanishes.
inline GlForm delta_second(const FrameData& fr, const GlForm& f) {
  if (f.deg == Bidegree::e00) {
    GlForm out = f;
    for (auto& g : out.coeff) g = Jet::zero(g.order(), g.base_point());
    return out;
  }
  if (f.deg == Bidegree::e01) {
    GlForm out = star(d_prime_top(fr, star(f)));
    for (auto& g : out.coeff) g = -g;
    return out;
  }
  detail::wrong_bidegree("delta''", f.deg);
}

// Laplacian on functions in frame form: -(Z Zbar + i conj(a) Zbar) f.
inline Jet laplacian_gl(const FrameData& fr, const Jet& x) {
  const Jet zb = Zbarf(fr, x);
  return -detail::jsum({Zf(fr, zb), cplx(0, 1) * detail::jprod(fr.a.conj(), zb)});
}

// Contact-distribution Laplacian: -Z Zbar f - i conj(a) Zbar f - Zbar Z f + iaZf.
inline Jet laplacian_full(const FrameData& fr, const Jet& x) {
  const Jet zb = Zbarf(fr, x);
  const Jet z = Zf(fr, x);
  return detail::jsum({-Zf(fr, zb), cplx(0, -1) * detail::jprod(fr.a.conj(), zb),
                       -Zbarf(fr, z), cplx(0, 1) * detail::jprod(fr.a, z)});
}

inline std::vector<Jet> laplacian_gl(const FrameData& fr, const std::vector<Jet>& xs) {
  std::vector<Jet> out;
  out.reserve(xs.size());
  for (const auto& x : xs) out.push_back(laplacian_gl(fr, x));
  return out;
}

inline std::vector<Jet> laplacian_full(const FrameData& fr, const std::vector<Jet>& xs) {
  std::vector<Jet> out;
  out.reserve(xs.size());
  for (const auto& x : xs) out.push_back(laplacian_full(fr, x));
  return out;
}

// --- full second-order operator on degree-one classes -----------------------

struct DPair {
  GlForm f20;  // zeta^theta component
  GlForm f11;  // zetabar^theta component
};

// D on [g zeta + h zetabar]: eliminate the theta correction explicitly. This
// is an independent route from composing the projected operators above: the
// correction k = -i(Zbar g - iag) + i(Zh + i conj(a) h) is computed once and
// both output coefficients are read off d(g zeta + h zetabar + k theta).
inline DPair D_full(const FrameData& fr, const GlForm& omega10, const GlForm& omega01) {
  if (omega10.deg != Bidegree::e10 || omega01.deg != Bidegree::e01)
    detail::wrong_bidegree("D", omega10.deg);
  if (omega10.components() != omega01.components())
    throw CalcError(errc::wrong_dimension, "mismatched component counts in D");
  DPair out{{Bidegree::f20, {}}, {Bidegree::f11, {}}};
  for (int n = 0; n < omega10.components(); ++n) {
    const Jet& g = omega10.coeff[static_cast<std::size_t>(n)];
    const Jet& h = omega01.coeff[static_cast<std::size_t>(n)];
    const Jet k = detail::jsum({cplx(0, -1) * Zbarf(fr, g),
                                -detail::jprod(fr.a, g),
                                cplx(0, 1) * Zf(fr, h),
                                -detail::jprod(fr.a.conj(), h)});
    out.f20.coeff.push_back(detail::jsum({-Tf(fr, g), -detail::jprod(fr.b, g),
                                          -detail::jprod(fr.c.conj(), h), Zf(fr, k)}));
    out.f11.coeff.push_back(detail::jsum({-detail::jprod(fr.c, g), -Tf(fr, h),
                                          -detail::jprod(fr.b.conj(), h), Zbarf(fr, k)}));
  }
  return out;
}

}  // namespace crcx
