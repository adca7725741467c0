#pragma once

// Truncated multivariate Taylor expansions ("jets").
//
// A Jet of dimension m and order k stores the Taylor coefficients
// c[alpha] = d^alpha f / alpha! for every multi-index |alpha| <= k, so the
// arithmetic below is forward-mode differentiation carried to order k. Every
// catalog field evaluates through jets, which gives exact (rounding-limited)
// partial derivatives of any order without symbolic manipulation.
//
// Multi-indices are laid out graded by total degree, so the coefficient
// layout of order k-1 is a prefix of the layout of order k: truncation is a
// resize, and jets of different orders combine at the lower order.

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include <boost/container/small_vector.hpp>

namespace hardylab {

inline constexpr int kMaxJetDim = 8;
inline constexpr int kMaxJetOrder = 6;

class Jet {
 public:
  using Storage = boost::container::small_vector<double, 20>;

  Jet() = default;
  Jet(int dim, int order);  // zero jet

  static Jet constant(int dim, int order, double value);
  static Jet variable(int dim, int order, double value, int axis);

  int dim() const noexcept { return dim_; }
  int order() const noexcept { return order_; }
  std::size_t size() const noexcept { return c_.size(); }

  double value() const noexcept { return c_[0]; }
  /// First partial d_i f.
  double d(int i) const;
  /// Second partial d_i d_j f.
  double d2(int i, int j) const;

  double coeff(std::size_t idx) const { return c_[idx]; }
  double& coeff(std::size_t idx) { return c_[idx]; }
  std::span<const double> coeffs() const noexcept { return {c_.data(), c_.size()}; }

  /// Exact partial derivative along `axis`; the result has order() - 1.
  Jet partial(int axis) const;
  Jet truncated(int order) const;
  bool all_finite() const noexcept;
  bool is_zero() const noexcept;

  Jet& operator+=(const Jet& o);
  Jet& operator-=(const Jet& o);
  Jet& operator*=(const Jet& o);
  Jet& operator+=(double s) { c_[0] += s; return *this; }
  Jet& operator-=(double s) { c_[0] -= s; return *this; }
  Jet& operator*=(double s);
  Jet& operator/=(double s) { return *this *= (1.0 / s); }

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator*(const Jet& a, const Jet& b);
  friend Jet operator/(const Jet& a, const Jet& b);
  friend Jet operator+(Jet a, double s) { return a += s; }
  friend Jet operator+(double s, Jet a) { return a += s; }
  friend Jet operator-(Jet a, double s) { return a -= s; }
  friend Jet operator-(double s, const Jet& a);
  friend Jet operator*(Jet a, double s) { return a *= s; }
  friend Jet operator*(double s, Jet a) { return a *= s; }
  friend Jet operator/(Jet a, double s) { return a /= s; }
  friend Jet operator/(double s, const Jet& a);
  friend Jet operator-(const Jet& a);

 private:
  int dim_ = 0;
  int order_ = 0;
  Storage c_;
};

/// Compose a univariate map g with the jet u. `derivs[n]` holds g^(n)(u0) for
/// n = 0..u.order(); missing trailing entries are treated as zero.
Jet compose(const Jet& u, std::span<const double> derivs);

Jet pow(const Jet& u, double p);
Jet sqrt(const Jet& u);
Jet exp(const Jet& u);
Jet log(const Jet& u);
Jet sin(const Jet& u);
Jet cos(const Jet& u);
/// |u| with the sign of the value fixed; derivative at u0 = 0 is taken from
/// the positive branch.
Jet abs(const Jet& u);
Jet square(const Jet& u);

/// Number of coefficients of a jet of dimension `dim` and order `order`.
std::size_t jet_size(int dim, int order);

/// Index of the multi-index with the given exponents (length dim).
std::size_t jet_index(int dim, std::span<const int> alpha);

}  // namespace hardylab
