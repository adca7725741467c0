#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "generators.hpp"
#include "hardylab/catalog.hpp"
#include "hardylab/core/error.hpp"
#include "hardylab/operators.hpp"
#include "hardylab/test_functions.hpp"

using namespace hardylab;

namespace {

double rel(double a, double b) { return std::fabs(a - b) / std::max(1.0, std::fabs(b)); }

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::Usage;
}

}  // namespace

TEST_CASE("weighted operator: L_w f = w L f + Gamma(w, f), Gamma_w = w Gamma") {
  gen::Rng rng(101);
  for (const auto& gc : gen::all_geometries()) {
    const auto geo = make_geometry(gc.name, {.m = gc.m});
    CAPTURE(geo.name);
    const Diffusion& d = geo.diffusion;
    double worst = 0.0;
    for (int k = 0; k < 40; ++k) {
      const auto omega = exp(0.5 * gen::smooth_field(rng, geo.dim));
      const auto f = gen::smooth_field(rng, geo.dim);
      const auto op = weighted_operator(d, omega);
      const auto p = gen::point_in(rng, geo);
      worst = std::max(worst, rel(eval_L(op.effective, f, p), omega(p) * eval_L(d, f, p) + gamma(d, omega, f, p)));
      worst = std::max(worst, rel(gamma(op.effective, f, f, p), omega(p) * gamma(d, f, f, p)));
    }
    CHECK(worst <= 1e-10);
  }
  const auto e2 = make_geometry("euclidean", {.m = 2});
  const auto op = weighted_operator(e2.diffusion, coordinate(2, 0));
  CHECK(kind_of([&] { eval_L(op.effective, square(coordinate(2, 1)), Point{-0.5, 0.2}); }) == ErrorKind::Precondition);
}

TEST_CASE("drifted operator: L_s f = L f + Gamma(s, f), symmetric for e^s mu") {
  gen::Rng rng(202);
  for (const auto& gc : gen::all_geometries()) {
    const auto geo = make_geometry(gc.name, {.m = gc.m});
    CAPTURE(geo.name);
    const Diffusion& d = geo.diffusion;
    double worst = 0.0, worst_sym = 0.0;
    for (int k = 0; k < 40; ++k) {
      const auto sigma = gen::smooth_field(rng, geo.dim);
      const auto f = gen::smooth_field(rng, geo.dim);
      const auto op = drifted_operator(d, sigma);
      const auto oracle = Diffusion::symmetric("oracle", d.frame, op.effective.measure_density, d.domain);
      const auto p = gen::point_in(rng, geo);
      const double L = eval_L(op.effective, f, p);
      worst = std::max(worst, rel(L, eval_L(d, f, p) + gamma(d, sigma, f, p)));
      worst_sym = std::max(worst_sym, rel(L, eval_L(oracle, f, p)));
    }
    CHECK(worst <= 1e-10);
    CHECK(worst_sym <= 1e-10);
  }
  const auto e2 = make_geometry("euclidean", {.m = 2});
  const auto op = drifted_operator(e2.diffusion, constant_field(2, 1000.0));
  // e^sigma enters through the measure, e.g. when a grid is built.
  CHECK(kind_of([&] { op.effective.measure_density(Point{0.5, 0.2}); }) == ErrorKind::Numeric);
}

TEST_CASE("radial operator: Gamma_psi(f) = Gamma(psi, f)^2") {
  gen::Rng rng(303);
  const auto h1 = make_geometry("heisenberg", {.m = 1});
  const auto N = make_weight(h1, "koranyi-gauge");
  const auto op = radial_operator(h1.diffusion, N.psi);
  double worst = 0.0;
  for (int k = 0; k < 200; ++k) {
    const auto f = gen::smooth_field(rng, 3);
    const auto p = gen::point_in(rng, h1);
    const double zf = gamma(h1.diffusion, N.psi, f, p);
    worst = std::max(worst, rel(gamma(op.effective, f, f, p), zf * zf));
    const auto Zf = gamma_field(h1.diffusion, N.psi, f);
    const double expect = gamma(h1.diffusion, N.psi, Zf, p) + eval_L(h1.diffusion, N.psi, p) * zf;
    worst = std::max(worst, rel(eval_L(op.effective, f, p), expect));
  }
  CHECK(worst <= 1e-9);
}

TEST_CASE("dilation generator") {
  const auto e3 = make_geometry("euclidean", {.m = 3});
  const auto h1 = make_geometry("heisenberg", {.m = 1});
  const auto g1 = make_geometry("grushin", {.m = 1});
  gen::Rng rng(404);
  // Euler identity D psi = psi for the homogeneous quasinorms.
  const std::vector<std::pair<GeometrySpec, Weight>> norms = {{e3, make_weight(e3, "euclid-norm")},
                                                              {h1, make_weight(h1, "koranyi-gauge")},
                                                              {h1, make_weight(h1, "horizontal-norm")},
                                                              {g1, make_weight(g1, "grushin-gauge")}};
  for (const auto& [geo, w] : norms) {
    CAPTURE(w.name);
    const auto D = dilation_field(geo);
    for (int k = 0; k < 50; ++k) {
      const auto p = gen::point_in(rng, geo);
      CHECK(D.apply(p, w.psi.jet(p, 1)).value() == doctest::Approx(w.psi(p)).epsilon(1e-12));
    }
  }
  // L_G = D^2 + Q D.
  const auto op = dilation_operator(h1);
  const auto D = dilation_field(h1);
  for (int k = 0; k < 50; ++k) {
    const auto f = gen::smooth_field(rng, 3);
    const auto p = gen::point_in(rng, h1);
    const auto Df = derivative_along(D, f);
    const double expect = derivative_along(D, Df)(p) + 4.0 * Df(p);
    CHECK(rel(eval_L(op.effective, f, p), expect) <= 1e-10);
  }
  // Adjoint of D is -D - Q: the dilation generator is symmetric for Lebesgue measure.
  const auto grid = make_grid(h1, Box::with_spacing({-1, -1, -1}, {1, 1, 1}, 0.05));
  const auto a = tensor_bump({-0.8, -0.6, -0.7}, {0.7, 0.8, 0.6});
  const auto b = tensor_bump({-0.5, -0.9, -0.8}, {0.9, 0.5, 0.9});
  const double fDg = integrate(grid, a * derivative_along(D, b));
  const double gDf = integrate(grid, b * derivative_along(D, a));
  const double ab = integrate(grid, a * b);
  CHECK(fDg == doctest::Approx(-gDf - 4.0 * ab).epsilon(1e-4));
  CHECK(kind_of([] { dilation_field(make_geometry("hyperbolic", {.m = 2})); }) == ErrorKind::Precondition);
}
