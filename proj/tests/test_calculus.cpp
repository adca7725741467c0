#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "hardylab/core/diffusion.hpp"
#include "hardylab/core/error.hpp"
#include "hardylab/core/grid.hpp"

using namespace hardylab;

namespace {

Diffusion euclid(int m) {
  std::vector<VectorField> frame;
  for (int i = 0; i < m; ++i) frame.push_back(VectorField::partial(m, i));
  return Diffusion::symmetric("euclidean", frame, constant_field(m, 1.0));
}

ScalarField norm(int m) {
  ScalarField s = square(coordinate(m, 0));
  for (int i = 1; i < m; ++i) s = s + square(coordinate(m, i));
  return sqrt(s);
}

}  // namespace

TEST_CASE("laplacian of |x|^2 is 2m") {
  const auto d = euclid(3);
  const auto f = square(norm(3));
  CHECK(eval_L(d, f, Point{0.3, -1.2, 2.0}) == doctest::Approx(6.0).epsilon(1e-13));
}

TEST_CASE("gradient of the norm has unit length") {
  const auto d = euclid(4);
  const auto r = norm(4);
  CHECK(gamma(d, r, r, Point{0.3, -1.2, 2.0, 0.1}) == doctest::Approx(1.0).epsilon(1e-13));
}

#include "generators.hpp"
#include "hardylab/catalog.hpp"
#include "hardylab/test_functions.hpp"

namespace {

double scale_of(std::initializer_list<double> terms) {
  double s = 1.0;
  for (double t : terms) s = std::max(s, std::fabs(t));
  return s;
}

// Gamma(f, g) recomputed from its definition through L.
double gamma_by_definition(const Diffusion& d, const ScalarField& f, const ScalarField& g, const Point& p,
                           const ScalarField& fg) {
  return 0.5 * (eval_L(d, fg, p) - f(p) * eval_L(d, g, p) - g(p) * eval_L(d, f, p));
}

}  // namespace

TEST_CASE("algebraic identities at random points, closed-form derivatives") {
  gen::Rng rng(20261015);
  const std::vector<ScalarMap> maps = {ScalarMap::exponential(), ScalarMap::power(3.0)};
  for (const auto& gc : gen::all_geometries()) {
    const auto geo = make_geometry(gc.name, {.m = gc.m});
    const Diffusion& d = geo.diffusion;
    CAPTURE(geo.name);
    double worst_cs = 0.0, worst_der = 0.0, worst_def = 0.0, worst_chain = 0.0, worst_gchain = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
      const auto f = gen::smooth_field(rng, geo.dim);
      const auto g = gen::smooth_field(rng, geo.dim);
      const auto h = gen::smooth_field(rng, geo.dim);
      const auto fg = f * g;
      std::vector<Point> pts;
      for (int k = 0; k < 20; ++k) pts.push_back(gen::point_in(rng, geo));
      for (const auto& p : pts) {
        const double gfg = gamma(d, f, g, p), gff = gamma(d, f, f, p), ggg = gamma(d, g, g, p);
        worst_cs = std::max(worst_cs, (gfg * gfg - gff * ggg) / scale_of({gff * ggg}));
        const double der = gamma(d, fg, h, p) - f(p) * gamma(d, g, h, p) - g(p) * gamma(d, f, h, p);
        worst_der = std::max(worst_der, std::fabs(der) / scale_of({gamma(d, fg, h, p)}));
        const double def = gfg - gamma_by_definition(d, f, g, p, fg);
        worst_def = std::max(worst_def, std::fabs(def) / scale_of({eval_L(d, fg, p)}));
      }
      // Chain rules on a bounded field so exp and cubes stay O(1).
      const auto u = 0.3 * f;
      for (const auto& phi : maps) {
        const double scale = scale_of({eval_L(d, compose(phi, u), pts[0])});
        worst_chain = std::max(worst_chain, chain_rule_defect(d, phi, u, pts) / (10.0 * scale));
        worst_gchain = std::max(worst_gchain, gamma_chain_rule_defect(d, phi, u, g, pts) / (10.0 * scale));
      }
    }
    CHECK(worst_cs <= 1e-10);
    CHECK(worst_der <= 1e-10);
    CHECK(worst_def <= 1e-10);
    CHECK(worst_chain <= 1e-10);
    CHECK(worst_gchain <= 1e-10);
  }
}

TEST_CASE("catalog drifts make each geometry symmetric for its measure") {
  gen::Rng rng(7);
  for (const auto& gc : gen::all_geometries()) {
    const auto geo = make_geometry(gc.name, {.m = gc.m});
    CAPTURE(geo.name);
    const auto sym = Diffusion::symmetric("oracle", geo.diffusion.frame, geo.diffusion.measure_density,
                                          geo.diffusion.domain);
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
      const auto f = gen::smooth_field(rng, geo.dim);
      const auto p = gen::point_in(rng, geo);
      const double a = eval_L(geo.diffusion, f, p), b = eval_L(sym, f, p);
      worst = std::max(worst, std::fabs(a - b) / scale_of({a}));
    }
    CHECK(worst <= 1e-11);
  }
}

TEST_CASE("integration by parts and symmetry hold to quadrature order") {
  // The bumps are C^2, so L f has kinks at the support boundary and the
  // lattice rule converges at O(h^2).
  const auto h1 = make_geometry("heisenberg", {.m = 1});
  const auto f = tensor_bump({-0.8, -0.7, -0.9}, {0.6, 0.8, 0.7});
  gen::Rng rng(3);
  const auto g = gen::smooth_field(rng, 3) * tensor_bump({-0.9, -0.9, -0.9}, {0.9, 0.9, 0.9});
  std::vector<double> ibp, sym;
  double scale = 0.0;
  for (double h : {0.04, 0.02}) {
    const auto grid = make_grid(h1, Box::with_spacing({-1, -1, -1}, {1, 1, 1}, h));
    scale = std::fabs(integrate(grid, gamma_field(h1.diffusion, f, f)));
    ibp.push_back(ibp_defect(h1.diffusion, f, g, grid) / scale);
    sym.push_back(symmetry_defect(h1.diffusion, f, g, grid) / scale);
    CHECK(ibp.back() <= h * h);
    CHECK(sym.back() <= h * h);
  }
  // Kinks sit at arbitrary lattice offsets, so successive ratios scatter
  // around 4; only require a clear decrease.
  CHECK(ibp[1] < ibp[0] / 1.5);
  CHECK(sym[1] < sym[0] / 1.5);

  const auto hyp = make_geometry("hyperbolic", {.m = 2});
  const auto a = tensor_bump({-0.8, 0.4}, {0.7, 1.8});
  const auto b = square(coordinate(2, 0)) * tensor_bump({-0.9, 0.3}, {0.9, 1.9});
  for (double h : {0.01, 0.005}) {
    const auto hg = make_grid(hyp, Box::with_spacing({-1, 0.2}, {1, 2}, h));
    const double s2 = std::fabs(integrate(hg, gamma_field(hyp.diffusion, a, a)));
    CHECK(symmetry_defect(hyp.diffusion, a, b, hg) <= h * h * s2);
  }

  const auto grid = make_grid(h1, Box::with_spacing({-1, -1, -1}, {1, 1, 1}, 0.1));
  const auto big = tensor_bump({-1.5, -1.5, -1.5}, {1.5, 1.5, 1.5});
  try {
    ibp_defect(h1.diffusion, big, g, grid);
    FAIL("support on the rim must be rejected");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Precondition);
  }
}

TEST_CASE("difference oracle converges at second order") {
  const auto h1 = make_geometry("heisenberg", {.m = 1});
  const Diffusion& d = h1.diffusion;
  gen::Rng rng(11);
  const auto f = gen::smooth_field(rng, 3);
  const auto g = gen::smooth_field(rng, 3);
  std::vector<Point> pts;
  for (int k = 0; k < 50; ++k) pts.push_back(gen::point_in(rng, h1));
  std::vector<double> def_gamma, def_chain, def_exact;
  const std::vector<double> steps = {0.04, 0.02, 0.01};
  for (double h : steps) {
    const auto fh = with_central_differences(f, h), gh = with_central_differences(g, h);
    const auto fgh = with_central_differences(f * g, h);
    double worst = 0.0, werr = 0.0;
    for (const auto& p : pts) {
      worst = std::max(worst, std::fabs(gamma(d, fh, gh, p) - gamma_by_definition(d, fh, gh, p, fgh)));
      werr = std::max(werr, std::fabs(gamma(d, fh, gh, p) - gamma(d, f, g, p)));
    }
    def_gamma.push_back(worst);
    def_exact.push_back(werr);
    def_chain.push_back(chain_rule_defect(d, ScalarMap::exponential(), 0.3 * fh, pts));
  }
  for (const auto* series : {&def_gamma, &def_chain, &def_exact}) {
    for (std::size_t i = 1; i < series->size(); ++i) {
      const double slope = std::log2((*series)[i - 1] / (*series)[i]);
      CAPTURE(i);
      CHECK(slope == doctest::Approx(2.0).epsilon(0.1));
    }
  }
  CHECK(def_gamma.back() <= 1e-2);
}
