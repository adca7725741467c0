#pragma once

// One-dimensional reference integrals for rotation-invariant integrands,
// written without the library so they can check its grid quadrature.

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <functional>
#include <numbers>

namespace oracle {

/// Surface area of the unit sphere in R^m.
inline double sphere_area(int m) { return 2.0 * std::pow(std::numbers::pi, 0.5 * m) / std::tgamma(0.5 * m); }

/// (1 - u^2)^3 on [a, b] mapped to u in [-1, 1], and its first derivative.
struct Bump {
  double a, b;
  double u(double r) const { return (2.0 * r - a - b) / (b - a); }
  double value(double r) const {
    if (r <= a || r >= b) return 0.0;
    const double s = 1.0 - u(r) * u(r);
    return s * s * s;
  }
  double deriv(double r) const {
    if (r <= a || r >= b) return 0.0;
    const double v = u(r), s = 1.0 - v * v;
    return -6.0 * v * s * s * 2.0 / (b - a);
  }
};

inline double integrate(const std::function<double(double)>& g, double a, double b) {
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(g, a, b, 12, 1e-14);
}

/// int_a^b w(r) g(r)^2 r^(m-1) dr and int_a^b w(r) g'(r)^2 r^(m-1) dr times the sphere area.
struct RadialSides {
  double mass, energy;
};

inline RadialSides radial_sides(int m, const Bump& g, const std::function<double(double)>& mass_w,
                                const std::function<double(double)>& energy_w) {
  const double s = sphere_area(m);
  const double mass =
      integrate([&](double r) { return mass_w(r) * g.value(r) * g.value(r) * std::pow(r, m - 1); }, g.a, g.b);
  const double energy =
      integrate([&](double r) { return energy_w(r) * g.deriv(r) * g.deriv(r) * std::pow(r, m - 1); }, g.a, g.b);
  return {s * mass, s * energy};
}

}  // namespace oracle
