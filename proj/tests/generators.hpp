#pragma once

// Hand-rolled generators for property tests: points inside a geometry's
// domain and random smooth fields built from the field algebra.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "hardylab/catalog.hpp"

namespace gen {

using hardylab::GeometrySpec;
using hardylab::Point;
using hardylab::ScalarField;

struct Rng {
  std::mt19937_64 engine;
  explicit Rng(std::uint64_t seed) : engine(seed) {}
  double uniform(double lo, double hi) {
    return lo + (hi - lo) * (static_cast<double>(engine() >> 11) * 0x1.0p-53);
  }
  int integer(int lo, int hi) { return lo + static_cast<int>(engine() % static_cast<std::uint64_t>(hi - lo + 1)); }
};

struct GeometryCase {
  std::string name;
  int m;
};

/// Every catalog geometry at one or two sizes.
inline std::vector<GeometryCase> all_geometries() {
  return {{"euclidean", 2},           {"euclidean", 3},  {"heisenberg", 1}, {"heisenberg", 2},
          {"hyperbolic", 2},          {"hyperbolic", 3}, {"grushin", 1},    {"grushin", 2},
          {"halfspace-euclidean", 2}, {"convex-domain", 2}, {"radial-euclidean", 3}};
}

/// Sampling box well inside the domain of the geometry.
inline std::pair<std::vector<double>, std::vector<double>> sample_box(const GeometrySpec& geo) {
  std::vector<double> lo(geo.dim, -1.0), hi(geo.dim, 1.0);
  const auto starts = [&](const char* family) { return geo.name.rfind(family, 0) == 0; };
  if (starts("hyperbolic") || starts("halfspace-euclidean")) {
    lo.back() = 0.5;
    hi.back() = 2.0;
  } else if (starts("convex-domain")) {
    std::fill(lo.begin(), lo.end(), 0.1);
    std::fill(hi.begin(), hi.end(), 0.9);
  } else if (starts("radial-euclidean")) {
    lo[0] = 0.5;
    hi[0] = 2.0;
  }
  return {lo, hi};
}

inline Point point_in(Rng& rng, const GeometrySpec& geo) {
  const auto [lo, hi] = sample_box(geo);
  std::vector<double> x(geo.dim);
  for (int i = 0; i < geo.dim; ++i) x[i] = rng.uniform(lo[i], hi[i]);
  return Point(std::move(x));
}

/// c0 + linear + quadratic + cubic monomial + a * exp(linear form), all
/// coefficients O(1): smooth everywhere, closed-form derivatives.
inline ScalarField smooth_field(Rng& rng, int dim) {
  using hardylab::coordinate;
  ScalarField f = hardylab::constant_field(dim, rng.uniform(-1.0, 1.0));
  ScalarField lin = hardylab::constant_field(dim, 0.0);
  for (int i = 0; i < dim; ++i) {
    f = f + rng.uniform(-1.0, 1.0) * coordinate(dim, i);
    lin = lin + rng.uniform(-0.5, 0.5) * coordinate(dim, i);
    const int j = rng.integer(0, dim - 1);
    f = f + rng.uniform(-1.0, 1.0) * (coordinate(dim, i) * coordinate(dim, j));
  }
  const int a = rng.integer(0, dim - 1), b = rng.integer(0, dim - 1), c = rng.integer(0, dim - 1);
  f = f + rng.uniform(-0.5, 0.5) * (coordinate(dim, a) * coordinate(dim, b) * coordinate(dim, c));
  return f + rng.uniform(-1.0, 1.0) * exp(lin);
}

}  // namespace gen
