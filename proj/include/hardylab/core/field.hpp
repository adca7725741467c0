#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "hardylab/core/jet.hpp"

namespace hardylab {

/// A coordinate point x in R^m.
class Point {
 public:
  Point() = default;
  explicit Point(std::vector<double> coords);
  Point(std::initializer_list<double> coords) : Point(std::vector<double>(coords)) {}

  int dim() const noexcept { return static_cast<int>(x_.size()); }
  double operator[](int i) const { return x_[static_cast<std::size_t>(i)]; }
  double& operator[](int i) { return x_[static_cast<std::size_t>(i)]; }
  std::span<const double> coords() const noexcept { return x_; }
  operator std::span<const double>() const noexcept { return x_; }

 private:
  std::vector<double> x_;
};

using DomainMask = std::function<bool(std::span<const double>)>;

/// How a field produces derivatives.
struct DerivativeOracle {
  enum class Kind { ClosedForm, CentralDifference };
  Kind kind = Kind::ClosedForm;
  double step = 0.0;  // only for CentralDifference

  static DerivativeOracle closed_form() { return {}; }
  static DerivativeOracle central_difference(double h) { return {Kind::CentralDifference, h}; }
  bool exact() const noexcept { return kind == Kind::ClosedForm; }
};

/// A real-valued function on a coordinate domain, evaluated as a jet.
///
/// `jet(p, k)` returns the Taylor expansion of order k at p. Closed-form
/// fields support any order up to kMaxJetOrder; central-difference fields
/// support k <= 2. Fields are immutable and cheap to copy (shared state).
class ScalarField {
 public:
  using Evaluator = std::function<Jet(std::span<const double>, int)>;

  ScalarField() = default;
  ScalarField(int dim, Evaluator eval, DomainMask mask = {},
              DerivativeOracle oracle = DerivativeOracle::closed_form());

  int dim() const noexcept { return dim_; }
  const DerivativeOracle& oracle() const noexcept { return oracle_; }
  const DomainMask& mask() const noexcept { return mask_; }
  bool valid() const noexcept { return static_cast<bool>(eval_); }

  bool in_domain(std::span<const double> p) const { return !mask_ || mask_(p); }
  Jet jet(std::span<const double> p, int order) const;
  double operator()(std::span<const double> p) const { return jet(p, 0).value(); }

  /// Same field with its mask replaced by (old mask AND extra).
  ScalarField restricted(DomainMask extra) const;

 private:
  int dim_ = 0;
  Evaluator eval_;
  DomainMask mask_;
  DerivativeOracle oracle_;
};

/// Coordinate function x_axis on R^dim.
ScalarField coordinate(int dim, int axis);
ScalarField constant_field(int dim, double value);

/// Replace the derivative oracle of `f` by second-order central differences
/// of its values with per-axis step h. The result supports jet orders <= 2.
ScalarField with_central_differences(const ScalarField& f, double h);

/// Univariate smooth map phi, described by its derivatives up to `order`.
struct ScalarMap {
  std::string name;
  /// derivs(u, n) fills out[0..n] with phi^(k)(u).
  std::function<void(double u, int n, std::span<double> out)> derivs;

  double value(double u) const;
  double d1(double u) const;
  double d2(double u) const;

  static ScalarMap identity();
  static ScalarMap power(double p);
  static ScalarMap exponential();
  static ScalarMap logarithm();
};

/// phi o f.
ScalarField compose(const ScalarMap& phi, const ScalarField& f);

ScalarField operator+(const ScalarField& a, const ScalarField& b);
ScalarField operator-(const ScalarField& a, const ScalarField& b);
ScalarField operator*(const ScalarField& a, const ScalarField& b);
ScalarField operator/(const ScalarField& a, const ScalarField& b);
ScalarField operator+(const ScalarField& a, double s);
ScalarField operator*(double s, const ScalarField& a);
ScalarField operator-(const ScalarField& a);
ScalarField pow(const ScalarField& a, double p);
ScalarField sqrt(const ScalarField& a);
ScalarField log(const ScalarField& a);
ScalarField exp(const ScalarField& a);
ScalarField abs(const ScalarField& a);
ScalarField square(const ScalarField& a);

/// sum_i c_i d_i.
struct VectorField {
  std::vector<ScalarField> coeffs;

  int dim() const noexcept { return static_cast<int>(coeffs.size()); }
  /// (X f) at p, given the jet of f of order k >= 1; result has order k - 1.
  Jet apply(std::span<const double> p, const Jet& f) const;
  /// Same, reusing coefficient jets already evaluated at order >= k - 1.
  static Jet apply(std::span<const Jet> coeff_jets, const Jet& f);
  std::vector<Jet> coeff_jets(std::span<const double> p, int order) const;

  static VectorField zero(int dim);
  static VectorField partial(int dim, int axis);
};

}  // namespace hardylab
