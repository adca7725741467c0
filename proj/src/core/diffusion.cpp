#include "hardylab/core/diffusion.hpp"

#include <algorithm>
#include <cmath>

#include "hardylab/core/error.hpp"

namespace hardylab {

bool Diffusion::in_domain(std::span<const double> p) const {
  return (!domain || domain(p)) && measure_density.in_domain(p);
}

Diffusion Diffusion::symmetric(std::string name, std::vector<VectorField> frame,
                               ScalarField measure_density, DomainMask domain) {
  require(!frame.empty(), ErrorKind::Usage, "diffusion needs at least one frame field");
  const int dim = frame.front().dim();
  require(measure_density.dim() == dim, ErrorKind::Usage, "measure density dimension mismatch");
  Diffusion d;
  d.name = std::move(name);
  d.dim = dim;
  d.measure_density = measure_density;
  d.domain = std::move(domain);
  d.drift = VectorField::zero(dim);
  for (const auto& X : frame) {
    require(X.dim() == dim, ErrorKind::Usage, "frame field dimension mismatch");
    ScalarField div(dim, [X, measure_density, dim](std::span<const double> p, int k) {
      const Jet rho = measure_density.jet(p, k + 1);
      Jet acc(dim, k);
      for (int i = 0; i < dim; ++i) acc += (rho * X.coeffs[i].jet(p, k + 1)).partial(i);
      return acc / rho.truncated(k);
    });
    for (int i = 0; i < dim; ++i) d.drift.coeffs[i] = d.drift.coeffs[i] + div * X.coeffs[i];
  }
  d.frame = std::move(frame);
  return d;
}

Jet apply_L(const Diffusion& diff, std::span<const double> p, const Jet& f) {
  require(f.order() >= 2, ErrorKind::Usage, "L needs a jet of order >= 2");
  const int k = f.order();
  Jet out(f.dim(), k - 2);
  for (const auto& X : diff.frame) {
    const auto cj = X.coeff_jets(p, k - 1);
    const Jet Xf = VectorField::apply(cj, f);
    out += VectorField::apply(cj, Xf);
  }
  const auto bj = diff.drift.coeff_jets(p, k - 2);
  out += VectorField::apply(bj, f);
  return out;
}

Jet apply_gamma(const Diffusion& diff, std::span<const double> p, const Jet& f, const Jet& g) {
  const int k = std::min(f.order(), g.order());
  require(k >= 1, ErrorKind::Usage, "Gamma needs jets of order >= 1");
  Jet out(f.dim(), k - 1);
  for (const auto& X : diff.frame) {
    const auto cj = X.coeff_jets(p, k - 1);
    out += VectorField::apply(cj, f) * VectorField::apply(cj, g);
  }
  return out;
}

ScalarField L_field(const Diffusion& diff, const ScalarField& f) {
  DomainMask mask = [diff, f](std::span<const double> p) { return diff.in_domain(p) && f.in_domain(p); };
  return ScalarField(
      diff.dim, [diff, f](std::span<const double> p, int k) { return apply_L(diff, p, f.jet(p, k + 2)); },
      std::move(mask), f.oracle());
}

ScalarField gamma_field(const Diffusion& diff, const ScalarField& f, const ScalarField& g) {
  DomainMask mask = [diff, f, g](std::span<const double> p) {
    return diff.in_domain(p) && f.in_domain(p) && g.in_domain(p);
  };
  DerivativeOracle oracle = f.oracle().exact() ? g.oracle() : f.oracle();
  return ScalarField(
      diff.dim,
      [diff, f, g](std::span<const double> p, int k) {
        return apply_gamma(diff, p, f.jet(p, k + 1), g.jet(p, k + 1));
      },
      std::move(mask), oracle);
}

namespace {

void check_point(const Diffusion& diff, const Point& p) {
  require(p.dim() == diff.dim, ErrorKind::Domain, "point dimension does not match diffusion");
  require(diff.in_domain(p), ErrorKind::Domain, "point outside the diffusion's domain");
}

void check_field(const ScalarField& f, const Point& p) {
  require(f.dim() == p.dim(), ErrorKind::Domain, "point dimension does not match field");
  require(f.in_domain(p), ErrorKind::Domain, "point outside the field's domain mask");
}

double finite_or_throw(double v, const char* what) {
  require(std::isfinite(v), ErrorKind::Numeric, what);
  return v;
}

}  // namespace

double eval_L(const Diffusion& diff, const ScalarField& f, const Point& p) {
  check_point(diff, p);
  check_field(f, p);
  const Jet fj = f.jet(p, 2);
  require(fj.all_finite(), ErrorKind::Numeric, "non-finite derivative in L f");
  return finite_or_throw(apply_L(diff, p, fj).value(), "non-finite value of L f");
}

double gamma(const Diffusion& diff, const ScalarField& f, const ScalarField& g, const Point& p) {
  check_point(diff, p);
  check_field(f, p);
  check_field(g, p);
  const Jet fj = f.jet(p, 1), gj = g.jet(p, 1);
  require(fj.all_finite() && gj.all_finite(), ErrorKind::Numeric, "non-finite derivative in Gamma");
  return finite_or_throw(apply_gamma(diff, p, fj, gj).value(), "non-finite value of Gamma");
}

double gamma_W(const Diffusion& diff, const ScalarField& W, const ScalarField& f, const Point& p) {
  check_point(diff, p);
  check_field(W, p);
  check_field(f, p);
  const Jet wj = W.jet(p, 2);
  const Jet fj = f.jet(p, 1);
  require(wj.all_finite() && fj.all_finite(), ErrorKind::Numeric, "non-finite derivative in Gamma^W");
  const double w = wj.value(), fv = fj.value();
  const double LW = apply_L(diff, p, wj).value();
  const double gW = apply_gamma(diff, p, wj, wj).value();
  const double gWf = apply_gamma(diff, p, wj, fj).value();
  const double gf = apply_gamma(diff, p, fj, fj).value();
  return finite_or_throw((w * LW + gW) * fv * fv + 4.0 * w * fv * gWf + w * w * gf,
                         "non-finite value of Gamma^W");
}

double chain_rule_defect(const Diffusion& diff, const ScalarMap& phi, const ScalarField& f,
                         std::span<const Point> pts) {
  ScalarField phif = compose(phi, f);
  if (!f.oracle().exact()) {
    // phi o f only has values under a difference oracle; difference it directly.
    phif = with_central_differences(compose(phi, f), f.oracle().step);
  }
  double worst = 0.0;
  for (const auto& p : pts) {
    const double u = f(p);
    const double lhs = eval_L(diff, phif, p);
    const double rhs = phi.d1(u) * eval_L(diff, f, p) + phi.d2(u) * gamma(diff, f, f, p);
    worst = std::max(worst, std::fabs(finite_or_throw(lhs - rhs, "non-finite chain-rule defect")));
  }
  return worst;
}

double gamma_chain_rule_defect(const Diffusion& diff, const ScalarMap& phi, const ScalarField& f,
                               const ScalarField& g, std::span<const Point> pts) {
  ScalarField phif = compose(phi, f);
  if (!f.oracle().exact()) phif = with_central_differences(compose(phi, f), f.oracle().step);
  double worst = 0.0;
  for (const auto& p : pts) {
    const double lhs = gamma(diff, phif, g, p);
    const double rhs = phi.d1(f(p)) * gamma(diff, f, g, p);
    worst = std::max(worst, std::fabs(finite_or_throw(lhs - rhs, "non-finite chain-rule defect")));
  }
  return worst;
}

namespace {

void require_interior_support(const ScalarField& f, const Grid& grid, const char* name) {
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!grid.on_rim(i)) continue;
    const Jet j = f.jet(grid.node(i), 1);
    require(j.is_zero(), ErrorKind::Precondition,
            std::string("support of ") + name + " touches the grid boundary or an excised set");
  }
}

}  // namespace

double ibp_defect(const Diffusion& diff, const ScalarField& f, const ScalarField& g, const Grid& grid) {
  require(grid.dim() == diff.dim, ErrorKind::Usage, "grid dimension does not match diffusion");
  require_interior_support(f, grid, "f");
  const auto s = grid_sum(grid, 2, [&](std::span<const double> p, double w, std::span<double> out) {
    const Jet fj = f.jet(p, 1);
    if (fj.is_zero()) return;
    const Jet gj = g.jet(p, 2);
    const double a = fj.value() * apply_L(diff, p, gj).value();
    const double b = apply_gamma(diff, p, fj, gj).value();
    require(std::isfinite(a) && std::isfinite(b), ErrorKind::Numeric, "non-finite integrand");
    out[0] += a * w;
    out[1] += b * w;
  });
  return std::fabs(s[0] + s[1]);
}

double symmetry_defect(const Diffusion& diff, const ScalarField& f, const ScalarField& g,
                       const Grid& grid) {
  require(grid.dim() == diff.dim, ErrorKind::Usage, "grid dimension does not match diffusion");
  require_interior_support(f, grid, "f");
  require_interior_support(g, grid, "g");
  const auto s = grid_sum(grid, 2, [&](std::span<const double> p, double w, std::span<double> out) {
    const Jet fj = f.jet(p, 2);
    const Jet gj = g.jet(p, 2);
    if (fj.is_zero() && gj.is_zero()) return;
    const double a = fj.value() * apply_L(diff, p, gj).value();
    const double b = gj.value() * apply_L(diff, p, fj).value();
    require(std::isfinite(a) && std::isfinite(b), ErrorKind::Numeric, "non-finite integrand");
    out[0] += a * w;
    out[1] += b * w;
  });
  return std::fabs(s[0] - s[1]);
}

}  // namespace hardylab
