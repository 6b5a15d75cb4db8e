#pragma once

// Truncated multivariate Taylor arithmetic in three real coordinates with
// complex coefficients. A Jet of order K stores one coefficient per
// multi-index a = (a1,a2,a3) with |a| <= K, in graded-lexicographic order,
// Taylor-normalized: coeff(a) = (d^a f)(p) / a!.  Multiplication is then a
// plain truncated convolution and every differential operator downstream is
// exact up to rounding.

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "crcx/errors.hpp"

namespace crcx {

using cplx = std::complex<double>;

constexpr int kMaxJetOrder = 8;
constexpr double kDivEpsilon = 1e-12;

namespace detail {

constexpr int coeff_count(int order) { return (order + 1) * (order + 2) * (order + 3) / 6; }
constexpr int degree_offset(int d) { return d * (d + 1) * (d + 2) / 6; }

// Position of (i,j,k) in the table: degrees in increasing order; within a
// degree, i descending, then j descending.
inline int index_of(int i, int j, int k) {
  const int d = i + j + k;
  return degree_offset(d) + (d - i) * (d - i + 1) / 2 + k;
}

struct MultiIndex {
  int i, j, k;
  int degree() const { return i + j + k; }
};

inline const std::vector<MultiIndex>& index_table() {
  static const std::vector<MultiIndex> table = [] {
    std::vector<MultiIndex> t;
    t.reserve(coeff_count(kMaxJetOrder));
    for (int d = 0; d <= kMaxJetOrder; ++d)
      for (int i = d; i >= 0; --i)
        for (int j = d - i; j >= 0; --j) t.push_back({i, j, d - i - j});
    return t;
  }();
  return table;
}

}  // namespace detail

class Jet {
 public:
  Jet() : order_(0), base_{0, 0, 0}, c_(1, cplx{0, 0}) {}

  static Jet zero(int order, const std::array<double, 3>& base) { return Jet(order, base); }

  static Jet constant(int order, cplx value, const std::array<double, 3>& base) {
    Jet j(order, base);
    j.c_[0] = value;
    return j;
  }

  // Coordinate seed: value = base[axis], gradient entry 1.
  static Jet coordinate(int order, int axis, const std::array<double, 3>& base) {
    Jet j(order, base);
    j.c_[0] = base[static_cast<std::size_t>(axis)];
    if (order >= 1) j.c_[static_cast<std::size_t>(1 + axis)] = 1.0;
    return j;
  }

  int order() const { return order_; }
  const std::array<double, 3>& base_point() const { return base_; }
  cplx value() const { return c_[0]; }
  const std::vector<cplx>& coeffs() const { return c_; }

  cplx coeff(int i, int j, int k) const {
    if (i + j + k > order_) return 0.0;
    return c_[static_cast<std::size_t>(detail::index_of(i, j, k))];
  }
  void set_coeff(int i, int j, int k, cplx v) {
    c_[static_cast<std::size_t>(detail::index_of(i, j, k))] = v;
  }

  // Un-normalized partial derivative value d^(i,j,k) f = coeff * i! j! k!.
  cplx derivative(int i, int j, int k) const {
    static const double fact[] = {1, 1, 2, 6, 24, 120, 720, 5040, 40320};
    return coeff(i, j, k) * (fact[i] * fact[j] * fact[k]);
  }

  Jet truncated(int order) const {
    if (order > order_)
      throw CalcError(errc::order_mismatch, "cannot extend a jet beyond its order");
    Jet r(order, base_);
    for (std::size_t n = 0; n < r.c_.size(); ++n) r.c_[n] = c_[n];
    return r;
  }

  Jet conj() const {
    Jet r = *this;
    for (auto& v : r.c_) v = std::conj(v);
    return r;
  }
  Jet real_part() const {
    Jet r = *this;
    for (auto& v : r.c_) v = v.real();
    return r;
  }
  Jet imag_part() const {
    Jet r = *this;
    for (auto& v : r.c_) v = v.imag();
    return r;
  }

  friend Jet operator-(const Jet& a) {
    Jet r = a;
    for (auto& v : r.c_) v = -v;
    return r;
  }

  friend Jet operator+(const Jet& a, const Jet& b) {
    check_compatible(a, b);
    Jet r = a;
    for (std::size_t n = 0; n < r.c_.size(); ++n) r.c_[n] += b.c_[n];
    return r;
  }
  friend Jet operator-(const Jet& a, const Jet& b) {
    check_compatible(a, b);
    Jet r = a;
    for (std::size_t n = 0; n < r.c_.size(); ++n) r.c_[n] -= b.c_[n];
    return r;
  }

  friend Jet operator*(const Jet& a, const Jet& b) {
    check_compatible(a, b);
    Jet r(a.order_, a.base_);
    const auto& tab = detail::index_table();
    const int K = a.order_;
    const int na = detail::coeff_count(K);
    for (int p = 0; p < na; ++p) {
      const cplx av = a.c_[static_cast<std::size_t>(p)];
      if (av == cplx{0, 0}) continue;
      const auto& ma = tab[static_cast<std::size_t>(p)];
      const int rem = K - ma.degree();
      const int nb = detail::coeff_count(rem);
      for (int q = 0; q < nb; ++q) {
        const cplx bv = b.c_[static_cast<std::size_t>(q)];
        if (bv == cplx{0, 0}) continue;
        const auto& mb = tab[static_cast<std::size_t>(q)];
        r.c_[static_cast<std::size_t>(detail::index_of(ma.i + mb.i, ma.j + mb.j, ma.k + mb.k))] +=
            av * bv;
      }
    }
    return r;
  }

  friend Jet operator/(const Jet& a, const Jet& b) {
    check_compatible(a, b);
    return a * b.reciprocal();
  }

  friend Jet operator*(const Jet& a, cplx s) {
    Jet r = a;
    for (auto& v : r.c_) v *= s;
    return r;
  }
  friend Jet operator*(cplx s, const Jet& a) { return a * s; }
  friend Jet operator+(const Jet& a, cplx s) {
    Jet r = a;
    r.c_[0] += s;
    return r;
  }
  friend Jet operator+(cplx s, const Jet& a) { return a + s; }
  friend Jet operator-(const Jet& a, cplx s) { return a + (-s); }
  friend Jet operator-(cplx s, const Jet& a) { return (-a) + s; }

  Jet reciprocal() const {
    const cplx b0 = c_[0];
    if (std::abs(b0) <= kDivEpsilon)
      throw CalcError(errc::division_near_zero,
                      "divisor value magnitude " + std::to_string(std::abs(b0)));
    // 1/(b0 (1 + w)) with w nilpotent: geometric series, Horner form.
    Jet w = *this * (1.0 / b0);
    w.c_[0] = 0.0;
    Jet r = Jet::constant(order_, (order_ % 2 == 0) ? 1.0 : -1.0, base_);
    for (int m = order_ - 1; m >= 0; --m) {
      r = r * w;
      r.c_[0] += (m % 2 == 0) ? 1.0 : -1.0;
    }
    return r * (1.0 / b0);
  }

  // Composition with a univariate series: sum_m series[m] * (jet - value)^m.
  Jet compose_series(const std::vector<cplx>& series) const {
    Jet w = *this;
    w.c_[0] = 0.0;
    Jet r = Jet::constant(order_, series[static_cast<std::size_t>(order_)], base_);
    for (int m = order_ - 1; m >= 0; --m) {
      r = r * w;
      r.c_[0] += series[static_cast<std::size_t>(m)];
    }
    return r;
  }

  // d/du_axis, order drops by one.
  Jet partial(int axis) const {
    if (order_ < 1) throw CalcError(errc::order_exhausted, "partial of an order-0 jet");
    Jet r(order_ - 1, base_);
    const auto& tab = detail::index_table();
    const int nr = detail::coeff_count(order_ - 1);
    for (int p = 0; p < nr; ++p) {
      auto m = tab[static_cast<std::size_t>(p)];
      int idx[3] = {m.i, m.j, m.k};
      idx[axis] += 1;
      r.c_[static_cast<std::size_t>(p)] =
          static_cast<double>(idx[axis]) *
          c_[static_cast<std::size_t>(detail::index_of(idx[0], idx[1], idx[2]))];
    }
    return r;
  }

  double max_abs() const {
    double m = 0;
    for (const auto& v : c_) m = std::max(m, std::abs(v));
    return m;
  }
  double max_abs_diff(const Jet& other) const {
    check_compatible(*this, other);
    double m = 0;
    for (std::size_t n = 0; n < c_.size(); ++n) m = std::max(m, std::abs(c_[n] - other.c_[n]));
    return m;
  }

 private:
  Jet(int order, const std::array<double, 3>& base)
      : order_(order), base_(base), c_(static_cast<std::size_t>(detail::coeff_count(order))) {
    if (order < 0 || order > kMaxJetOrder)
      throw CalcError(errc::order_mismatch,
                      "jet order must be in [0," + std::to_string(kMaxJetOrder) + "]");
  }

  static void check_compatible(const Jet& a, const Jet& b) {
    if (a.order_ != b.order_)
      throw CalcError(errc::order_mismatch, "jet orders " + std::to_string(a.order_) + " vs " +
                                                std::to_string(b.order_));
    if (a.base_ != b.base_)
      throw CalcError(errc::base_point_mismatch, "jets anchored at different base points");
  }

  int order_;
  std::array<double, 3> base_;
  std::vector<cplx> c_;
};

// Elementary functions: composition of the univariate Taylor series at the
// jet's value with the nilpotent part. sqrt and log use principal branches;
// both reject values within kDivEpsilon of the origin.

inline Jet exp(const Jet& a) {
  const int K = a.order();
  std::vector<cplx> s(static_cast<std::size_t>(K) + 1);
  const cplx e0 = std::exp(a.value());
  double invfact = 1.0;
  for (int m = 0; m <= K; ++m) {
    if (m > 0) invfact /= m;
    s[static_cast<std::size_t>(m)] = e0 * invfact;
  }
  return a.compose_series(s);
}

inline Jet sin(const Jet& a) {
  const int K = a.order();
  std::vector<cplx> s(static_cast<std::size_t>(K) + 1);
  const cplx sv = std::sin(a.value()), cv = std::cos(a.value());
  const cplx cycle[4] = {sv, cv, -sv, -cv};
  double invfact = 1.0;
  for (int m = 0; m <= K; ++m) {
    if (m > 0) invfact /= m;
    s[static_cast<std::size_t>(m)] = cycle[m % 4] * invfact;
  }
  return a.compose_series(s);
}

inline Jet cos(const Jet& a) {
  const int K = a.order();
  std::vector<cplx> s(static_cast<std::size_t>(K) + 1);
  const cplx sv = std::sin(a.value()), cv = std::cos(a.value());
  const cplx cycle[4] = {cv, -sv, -cv, sv};
  double invfact = 1.0;
  for (int m = 0; m <= K; ++m) {
    if (m > 0) invfact /= m;
    s[static_cast<std::size_t>(m)] = cycle[m % 4] * invfact;
  }
  return a.compose_series(s);
}

inline Jet sqrt(const Jet& a) {
  if (std::abs(a.value()) <= kDivEpsilon)
    throw CalcError(errc::branch_violation, "sqrt of a jet with value near the origin");
  const int K = a.order();
  std::vector<cplx> s(static_cast<std::size_t>(K) + 1);
  const cplx r0 = std::sqrt(a.value());
  // s[m] = binom(1/2, m) * a0^(1/2 - m), built iteratively.
  s[0] = r0;
  for (int m = 1; m <= K; ++m)
    s[static_cast<std::size_t>(m)] =
        s[static_cast<std::size_t>(m - 1)] * (0.5 - (m - 1)) / (static_cast<double>(m) * a.value());
  return a.compose_series(s);
}

inline Jet log(const Jet& a) {
  if (std::abs(a.value()) <= kDivEpsilon)
    throw CalcError(errc::branch_violation, "log of a jet with value near the origin");
  const int K = a.order();
  std::vector<cplx> s(static_cast<std::size_t>(K) + 1);
  s[0] = std::log(a.value());
  cplx p = 1.0;  // (-1)^(m+1) / a0^m accumulator
  for (int m = 1; m <= K; ++m) {
    p /= -a.value();
    s[static_cast<std::size_t>(m)] = -p / static_cast<double>(m);
  }
  return a.compose_series(s);
}

// Vf = sum_i V_i df/du_i. Components of V may carry higher order than needed;
// they are truncated to f.order()-1.
inline Jet apply_field(const std::array<Jet, 3>& field, const Jet& f) {
  if (f.order() < 1) throw CalcError(errc::order_exhausted, "field applied to an order-0 jet");
  const int m = f.order() - 1;
  Jet r = Jet::zero(m, f.base_point());
  for (int i = 0; i < 3; ++i) {
    const Jet& v = field[static_cast<std::size_t>(i)];
    if (v.order() < m)
      throw CalcError(errc::order_exhausted, "field component order below f.order()-1");
    r = r + (v.order() == m ? v : v.truncated(m)) * f.partial(i);
  }
  return r;
}

// [V,W]^k = V^j d_j W^k - W^j d_j V^k, componentwise; order drops by one.
inline std::array<Jet, 3> bracket(const std::array<Jet, 3>& v, const std::array<Jet, 3>& w) {
  std::array<Jet, 3> r{};
  for (int k = 0; k < 3; ++k)
    r[static_cast<std::size_t>(k)] =
        apply_field(v, w[static_cast<std::size_t>(k)]) - apply_field(w, v[static_cast<std::size_t>(k)]);
  return r;
}

}  // namespace crcx
