#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "generators.hpp"
#include "hardylab/catalog.hpp"
#include "hardylab/conditions.hpp"
#include "hardylab/core/error.hpp"
#include "hardylab/test_functions.hpp"

using namespace hardylab;

namespace {

Grid cube_grid(const GeometrySpec& geo, double half, double h, const Excision& ex = {}) {
  return make_grid(geo, Box::with_spacing(std::vector<double>(geo.dim, -half), std::vector<double>(geo.dim, half), h),
                   ex);
}

struct ExactPair {
  GeometrySpec geo;
  Weight w;
  Grid grid;
};

std::vector<ExactPair> exact_pairs() {
  std::vector<ExactPair> out;
  const auto add = [&](const GeometrySpec& g, const Weight& w, Grid grid) { out.push_back({g, w, std::move(grid)}); };
  const auto e3 = make_geometry("euclidean", {.m = 3});
  const auto h1 = make_geometry("heisenberg", {.m = 1});
  const auto h2 = make_geometry("heisenberg", {.m = 2});
  const auto g1 = make_geometry("grushin", {.m = 1});
  for (const auto& [geo, name] : std::vector<std::pair<GeometrySpec, const char*>>{
           {e3, "euclid-norm"}, {h1, "koranyi-gauge"}, {h1, "coordinate"}, {h2, "horizontal-norm"},
           {g1, "grushin-gauge"}}) {
    const auto w = make_weight(geo, name);
    add(geo, w, cube_grid(geo, 1.0, geo.dim > 3 ? 0.34 : 0.1, excise_near(w, 0.05)));
  }
  for (int m : {2, 3}) {
    const auto hyp = make_geometry("hyperbolic", {.m = m});
    std::vector<double> lo(m, -1.0), hi(m, 1.0);
    lo.back() = 0.5;
    hi.back() = 2.0;
    add(hyp, make_weight(hyp, "hyperbolic-height"), make_grid(hyp, Box::with_spacing(lo, hi, 0.1)));
  }
  return out;
}

}  // namespace

TEST_CASE("power range") {
  auto r = power_range(3.0);
  CHECK(r.lo == 0.0);
  CHECK(r.hi == 0.5);
  for (double p : {r.lo, r.hi}) CHECK(p * (p + 1.0) - 3.0 * p * p == doctest::Approx(0.0));
  r = power_range(2.0);
  CHECK(r.lo == 0.0);
  CHECK(r.hi == 0.0);
  r = power_range(0.0);
  CHECK(r.lo == -1.0);
  CHECK(r.hi == 0.0);
  gen::Rng rng(5);
  for (int k = 0; k < 1000; ++k) {
    const double Q = rng.uniform(-6.0, 12.0), p = rng.uniform(-5.0, 5.0);
    const bool inside = p * (p + Q - 2.0) - 3.0 * p * p >= 0.0;
    CHECK(power_range(Q).contains(p) == inside);
  }
}

TEST_CASE("suffcond basics") {
  const auto e3 = make_geometry("euclidean", {.m = 3});
  const auto psi = make_weight(e3, "euclid-norm");
  const auto grid = cube_grid(e3, 1.0, 0.1, excise_near(psi, 0.05));
  const auto one = check_suffcond(e3.diffusion, constant_field(3, 1.0), grid, 0.0);
  CHECK(one.passes);
  CHECK(one.inf_value == 0.0);
  const auto half = check_suffcond(e3.diffusion, pow(psi.psi, 0.5), grid, 0.0);
  CHECK(half.inf_value >= -1e-10);
  CHECK(half.passes);
  CHECK_FALSE(check_suffcond(e3.diffusion, pow(psi.psi, 0.8), grid, 0.0).passes);
  try {
    check_suffcond(e3.diffusion, coordinate(3, 0), grid, 0.0);
    FAIL("nonpositive W must be rejected");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Precondition);
  }
}

TEST_CASE("suffcond closed form for the regularized weight") {
  const auto e3 = make_geometry("euclidean", {.m = 3});
  const double n0 = 3.0;
  gen::Rng rng(9);
  for (double eps : {1e-2, 0.3, 2.0}) {
    ScalarField r2 = square(coordinate(3, 0)) + square(coordinate(3, 1)) + square(coordinate(3, 2));
    const auto W = pow(r2 + eps, (n0 - 2.0) / 4.0);
    for (int k = 0; k < 1000; ++k) {
      const auto p = gen::point_in(rng, e3);
      const double s = eps + p[0] * p[0] + p[1] * p[1] + p[2] * p[2];
      const double expect = eps * n0 * (n0 - 2.0) / 2.0 / (s * s);
      CHECK(suffcond_value(e3.diffusion, W, p) == doctest::Approx(expect).epsilon(1e-8));
    }
  }
}

TEST_CASE("powers inside the admissible range satisfy suffcond") {
  for (const auto& pair : exact_pairs()) {
    const double Q = pair.w.claimed_Q;
    CAPTURE(pair.geo.name);
    CAPTURE(pair.w.name);
    const auto range = power_range(Q);
    for (int i = 1; i <= 5; ++i) {
      const double p = range.lo + (range.hi - range.lo) * i / 6.0;
      CHECK(check_suffcond(pair.geo.diffusion, pow(pair.w.psi, p), pair.grid, 0.0).passes);
    }
  }
}

TEST_CASE("qcond report invariants") {
  for (const auto& pair : exact_pairs()) {
    const auto r = qcond_report(pair.geo.diffusion, pair.w, pair.grid, 1e-8);
    CHECK(r.inf_ratio <= r.Q_estimate - 1.0 + 1e-12);
    CHECK(r.Q_estimate - 1.0 <= r.sup_ratio + 1e-12);
  }
  const auto e3 = make_geometry("euclidean", {.m = 3});
  Weight flat = make_weight(e3, "euclid-norm");
  flat.psi = constant_field(3, 2.0);
  try {
    qcond_report(e3.diffusion, flat, cube_grid(e3, 1.0, 0.25), 1e-8);
    FAIL("all-skipped grid must be rejected");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Degenerate);
  }
  CHECK(default_qcond_tolerance(flat.psi) == 1e-8);
  CHECK(default_qcond_tolerance(with_central_differences(flat.psi, 0.1)) == doctest::Approx(0.1));
}

TEST_CASE("suffcond implies the curvature condition over a corpus") {
  const auto e3 = make_geometry("euclidean", {.m = 3});
  const auto psi = make_weight(e3, "euclid-norm");
  const auto grid = cube_grid(e3, 2.0, 0.1, excise_near(psi, 0.15));
  const auto W = pow(psi.psi, 0.5);
  CHECK(check_curvature(e3.diffusion, W, constant_field(3, 0.0), 0.0, grid) == 0.0);
  const auto s = check_suffcond(e3.diffusion, W, grid, 0.0);
  REQUIRE(s.passes);
  const auto corpus = make_corpus({.psi = psi, .psi_lo = 0.4, .psi_hi = 1.9, .lo = {-2, -2, -2}, .hi = {2, 2, 2},
                                   .size = 20, .seed = 42},
                                  grid);
  for (const auto& m : corpus) {
    CAPTURE(m.label);
    CHECK(check_curvature(e3.diffusion, W, m.f, 0.0, grid) >= -1e-8);
  }
  // A weight with a positive suffcond bound: the curvature bound follows pointwise.
  const double eps = 0.3;
  const auto Weps = pow(square(psi.psi) + eps, 0.25);
  const auto se = check_suffcond(e3.diffusion, Weps, grid, 0.0);
  for (const auto& m : corpus) {
    double min_w2f2 = INFINITY;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const auto p = grid.node(i);
      min_w2f2 = std::min(min_w2f2, Weps(p) * Weps(p) * m.f(p) * m.f(p));
    }
    CHECK(check_curvature(e3.diffusion, Weps, m.f, 0.0, grid) >= se.inf_value * min_w2f2 - 1e-8);
  }
}
