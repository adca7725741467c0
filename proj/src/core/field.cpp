#include "hardylab/core/field.hpp"

#include <cmath>
#include <utility>

#include "hardylab/core/error.hpp"

namespace hardylab {

Point::Point(std::vector<double> coords) : x_(std::move(coords)) {
  for (double v : x_) require(std::isfinite(v), ErrorKind::Domain, "point has a non-finite coordinate");
}

ScalarField::ScalarField(int dim, Evaluator eval, DomainMask mask, DerivativeOracle oracle)
    : dim_(dim), eval_(std::move(eval)), mask_(std::move(mask)), oracle_(oracle) {
  require(dim >= 1 && dim <= kMaxJetDim, ErrorKind::Usage, "field dimension out of range");
}

Jet ScalarField::jet(std::span<const double> p, int order) const {
  require(valid(), ErrorKind::Usage, "evaluating an empty field");
  require(static_cast<int>(p.size()) == dim_, ErrorKind::Domain, "point dimension does not match field");
  return eval_(p, order);
}

ScalarField ScalarField::restricted(DomainMask extra) const {
  DomainMask combined = mask_ ? DomainMask([a = mask_, b = std::move(extra)](std::span<const double> p) {
    return a(p) && b(p);
  })
                              : std::move(extra);
  return ScalarField(dim_, eval_, std::move(combined), oracle_);
}

ScalarField coordinate(int dim, int axis) {
  require(axis >= 0 && axis < dim, ErrorKind::Usage, "coordinate axis out of range");
  return ScalarField(dim, [dim, axis](std::span<const double> p, int k) {
    return Jet::variable(dim, k, p[axis], axis);
  });
}

ScalarField constant_field(int dim, double value) {
  return ScalarField(dim, [dim, value](std::span<const double>, int k) {
    return Jet::constant(dim, k, value);
  });
}

ScalarField with_central_differences(const ScalarField& f, double h) {
  require(h > 0.0 && std::isfinite(h), ErrorKind::Usage, "difference step must be positive");
  const int dim = f.dim();
  auto eval = [f, h, dim](std::span<const double> p, int order) {
    require(order <= 2, ErrorKind::Numeric,
            "central-difference oracle supports derivatives up to order 2 only");
    Jet r(dim, order);
    std::vector<double> q(p.begin(), p.end());
    auto at = [&](std::span<const double> x) { return f.jet(x, 0).value(); };
    const double f0 = at(q);
    r.coeff(0) = f0;
    if (order == 0) return r;
    std::vector<int> alpha(static_cast<std::size_t>(dim), 0);
    std::vector<double> fp(static_cast<std::size_t>(dim)), fm(static_cast<std::size_t>(dim));
    for (int i = 0; i < dim; ++i) {
      q[i] = p[i] + h;
      fp[i] = at(q);
      q[i] = p[i] - h;
      fm[i] = at(q);
      q[i] = p[i];
      alpha[i] = 1;
      r.coeff(jet_index(dim, alpha)) = (fp[i] - fm[i]) / (2.0 * h);
      alpha[i] = 0;
    }
    if (order == 1) return r;
    for (int i = 0; i < dim; ++i) {
      alpha[i] = 2;
      r.coeff(jet_index(dim, alpha)) = 0.5 * (fp[i] - 2.0 * f0 + fm[i]) / (h * h);
      alpha[i] = 0;
      for (int j = i + 1; j < dim; ++j) {
        auto corner = [&](double si, double sj) {
          q[i] = p[i] + si * h;
          q[j] = p[j] + sj * h;
          const double v = at(q);
          q[i] = p[i];
          q[j] = p[j];
          return v;
        };
        const double mixed =
            (corner(1, 1) - corner(1, -1) - corner(-1, 1) + corner(-1, -1)) / (4.0 * h * h);
        alpha[i] = 1;
        alpha[j] = 1;
        r.coeff(jet_index(dim, alpha)) = mixed;
        alpha[i] = 0;
        alpha[j] = 0;
      }
    }
    return r;
  };
  return ScalarField(dim, std::move(eval), f.mask(), DerivativeOracle::central_difference(h));
}

double ScalarMap::value(double u) const {
  double out[1];
  derivs(u, 0, out);
  return out[0];
}

double ScalarMap::d1(double u) const {
  double out[2];
  derivs(u, 1, out);
  return out[1];
}

double ScalarMap::d2(double u) const {
  double out[3];
  derivs(u, 2, out);
  return out[2];
}

ScalarMap ScalarMap::identity() {
  return {"identity", [](double u, int n, std::span<double> out) {
            for (int k = 0; k <= n; ++k) out[k] = k == 0 ? u : (k == 1 ? 1.0 : 0.0);
          }};
}

ScalarMap ScalarMap::power(double p) {
  return {"power(" + std::to_string(p) + ")", [p](double u, int n, std::span<double> out) {
            double falling = 1.0;
            for (int k = 0; k <= n; ++k) {
              out[k] = falling == 0.0 ? 0.0 : falling * std::pow(u, p - k);
              falling *= (p - k);
            }
          }};
}

ScalarMap ScalarMap::exponential() {
  return {"exp", [](double u, int n, std::span<double> out) {
            for (int k = 0; k <= n; ++k) out[k] = std::exp(u);
          }};
}

ScalarMap ScalarMap::logarithm() {
  return {"log", [](double u, int n, std::span<double> out) {
            out[0] = std::log(u);
            double fact = 1.0;
            for (int k = 1; k <= n; ++k) {
              if (k > 1) fact *= (k - 1);
              out[k] = ((k % 2 == 1) ? 1.0 : -1.0) * fact / std::pow(u, k);
            }
          }};
}

namespace {

DomainMask both(const DomainMask& a, const DomainMask& b) {
  if (!a) return b;
  if (!b) return a;
  return [a, b](std::span<const double> p) { return a(p) && b(p); };
}

DerivativeOracle merged(const DerivativeOracle& a, const DerivativeOracle& b) {
  if (a.exact()) return b;
  if (b.exact()) return a;
  return a.step >= b.step ? a : b;
}

template <class Op>
ScalarField binary(const ScalarField& a, const ScalarField& b, Op op) {
  require(a.dim() == b.dim(), ErrorKind::Usage, "field dimension mismatch");
  return ScalarField(
      a.dim(), [a, b, op](std::span<const double> p, int k) { return op(a.jet(p, k), b.jet(p, k)); },
      both(a.mask(), b.mask()), merged(a.oracle(), b.oracle()));
}

template <class Op>
ScalarField unary(const ScalarField& a, Op op) {
  return ScalarField(
      a.dim(), [a, op](std::span<const double> p, int k) { return op(a.jet(p, k)); }, a.mask(),
      a.oracle());
}

}  // namespace

ScalarField compose(const ScalarMap& phi, const ScalarField& f) {
  return unary(f, [phi](const Jet& u) {
    std::array<double, kMaxJetOrder + 1> d{};
    phi.derivs(u.value(), u.order(), std::span<double>(d.data(), u.order() + 1));
    return compose(u, std::span<const double>(d.data(), u.order() + 1));
  });
}

ScalarField operator+(const ScalarField& a, const ScalarField& b) {
  return binary(a, b, [](const Jet& x, const Jet& y) { return x + y; });
}
ScalarField operator-(const ScalarField& a, const ScalarField& b) {
  return binary(a, b, [](const Jet& x, const Jet& y) { return x - y; });
}
ScalarField operator*(const ScalarField& a, const ScalarField& b) {
  return binary(a, b, [](const Jet& x, const Jet& y) { return x * y; });
}
ScalarField operator/(const ScalarField& a, const ScalarField& b) {
  return binary(a, b, [](const Jet& x, const Jet& y) { return x / y; });
}
ScalarField operator+(const ScalarField& a, double s) {
  return unary(a, [s](const Jet& x) { return x + s; });
}
ScalarField operator*(double s, const ScalarField& a) {
  return unary(a, [s](const Jet& x) { return x * s; });
}
ScalarField operator-(const ScalarField& a) {
  return unary(a, [](const Jet& x) { return -x; });
}
ScalarField pow(const ScalarField& a, double p) {
  return unary(a, [p](const Jet& x) { return pow(x, p); });
}
ScalarField sqrt(const ScalarField& a) {
  return unary(a, [](const Jet& x) { return sqrt(x); });
}
ScalarField log(const ScalarField& a) {
  return unary(a, [](const Jet& x) { return log(x); });
}
ScalarField exp(const ScalarField& a) {
  return unary(a, [](const Jet& x) { return exp(x); });
}
ScalarField abs(const ScalarField& a) {
  return unary(a, [](const Jet& x) { return abs(x); });
}
ScalarField square(const ScalarField& a) {
  return unary(a, [](const Jet& x) { return x * x; });
}

Jet VectorField::apply(std::span<const Jet> coeff_jets, const Jet& f) {
  require(f.order() >= 1, ErrorKind::Usage, "vector field applied to an order-0 jet");
  Jet r(f.dim(), f.order() - 1);
  for (std::size_t i = 0; i < coeff_jets.size(); ++i) {
    const Jet& c = coeff_jets[i];
    if (c.is_zero()) continue;
    r += c * f.partial(static_cast<int>(i));
  }
  return r;
}

std::vector<Jet> VectorField::coeff_jets(std::span<const double> p, int order) const {
  std::vector<Jet> out;
  out.reserve(coeffs.size());
  for (const auto& c : coeffs) out.push_back(c.jet(p, order));
  return out;
}

Jet VectorField::apply(std::span<const double> p, const Jet& f) const {
  require(dim() == f.dim(), ErrorKind::Usage, "vector field dimension mismatch");
  const auto cj = coeff_jets(p, f.order() - 1);
  return apply(std::span<const Jet>(cj), f);
}

VectorField VectorField::zero(int dim) {
  VectorField v;
  v.coeffs.assign(static_cast<std::size_t>(dim), constant_field(dim, 0.0));
  return v;
}

VectorField VectorField::partial(int dim, int axis) {
  VectorField v = zero(dim);
  v.coeffs[static_cast<std::size_t>(axis)] = constant_field(dim, 1.0);
  return v;
}

}  // namespace hardylab
