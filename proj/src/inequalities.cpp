#include "hardylab/inequalities.hpp"

#include <cmath>
#include <limits>

#include "hardylab/core/error.hpp"
#include "hardylab/core/parallel.hpp"
#include "hardylab/operators.hpp"
#include "hardylab/test_functions.hpp"

namespace hardylab {

double hardy_constant(double Q, double alpha) {
  require(Q + alpha != 2.0, ErrorKind::Usage, "Q + alpha = 2 has no power Hardy inequality; use the log-hardy variant");
  const double c = 2.0 / (Q + alpha - 2.0);
  return c * c;
}

double log_hardy_constant(double alpha) {
  require(alpha != 1.0, ErrorKind::Usage, "alpha = 1 is excluded from the logarithmic Hardy inequality");
  const double c = 2.0 / (alpha - 1.0);
  return c * c;
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// term(p, f jet, out) writes the lhs and rhs densities, the rhs without the
// constant. It is skipped where the jet of f vanishes.
template <class Term>
HardyReport quadrature(std::string id, const Grid& grid, const ScalarField& f, int order, double constant,
                       Term term) {
  require(f.dim() == grid.dim(), ErrorKind::Usage, "test function dimension does not match grid");
  const auto sums = grid_sum(grid, 2, [&](std::span<const double> p, double w, std::span<double> out) {
    const Jet fj = f.jet(p, order);
    if (fj.is_zero()) return;
    double dens[2] = {0.0, 0.0};
    term(p, fj, dens);
    require(std::isfinite(dens[0]) && std::isfinite(dens[1]), ErrorKind::Numeric, "non-finite integrand");
    out[0] += dens[0] * w;
    out[1] += dens[1] * w;
  });
  HardyReport r;
  r.inequality = std::move(id);
  r.constant = constant;
  r.lhs = sums[0];
  r.rhs = constant * sums[1];
  r.ratio = r.rhs > 0.0 ? r.lhs / r.rhs : kNaN;
  return r;
}

void require_support_inside(const Grid& grid, const ScalarField& f) {
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!grid.on_rim(i)) continue;
    require(f.jet(grid.node(i), 1).is_zero(), ErrorKind::Precondition,
            "test function does not vanish on the grid boundary or next to an excised node");
  }
}

struct PsiData {
  double psi, gamma, gamma_sec;  // psi, Gamma(psi), and Gamma(psi, Gamma(psi)) when requested
};

Jet psi_jet(const Weight& psi, std::span<const double> p, int order) {
  if (!psi.psi.in_domain(p))
    fail(ErrorKind::Precondition,
         "test function support leaves the domain of " + psi.name + " (" + psi.singular_set + ")");
  const Jet j = psi.psi.jet(p, order);
  if (!j.all_finite() || !(j.value() > 0.0))
    fail(ErrorKind::Precondition, "test function support meets the singular set of " + psi.name);
  return j;
}

double log_side(const Weight& psi, std::span<const double> p, double& sign_seen) {
  const double v = psi_jet(psi, p, 0).value();
  const double s = v > 1.0 ? 1.0 : (v < 1.0 ? -1.0 : 0.0);
  require(s != 0.0 && (sign_seen == 0.0 || sign_seen == s), ErrorKind::Precondition,
          "test function support crosses {psi = 1}");
  sign_seen = s;
  return std::log(v);
}

// Branch consistency is decided from all support nodes, so it is checked serially.
void require_one_side(const Weight& psi, const ScalarField& f, const Grid& grid) {
  double sign = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto p = grid.node(i);
    if (f.jet(p, 1).is_zero()) continue;
    log_side(psi, p, sign);
  }
  if (psi.branch == Branch::LogLower)
    require(sign <= 0.0, ErrorKind::Precondition, "log-lower branch needs psi < 1 on the support");
  if (psi.branch == Branch::LogUpper)
    require(sign >= 0.0, ErrorKind::Precondition, "log-upper branch needs psi > 1 on the support");
}

void check_secondary(const Diffusion& diff, const Weight& psi, const Grid& grid, double tol) {
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto p = grid.node(i);
    if (!psi.psi.in_domain(p)) continue;
    const Jet j = psi.psi.jet(p, 3);
    if (!j.all_finite()) continue;
    const Jet g = apply_gamma(diff, p, j, j);
    const double sec = apply_gamma(diff, p, j, g).value();
    const double scale = std::max(1.0, std::pow(g.value(), 1.5) / std::max(j.value(), 1e-300));
    require(std::fabs(sec) <= tol * scale, ErrorKind::Precondition,
            "radial Hardy inequality needs Gamma(psi, Gamma(psi)) = 0, violated on the grid");
  }
}

void check_euler(const VectorField& D, const Weight& psi, const Grid& grid, double tol) {
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto p = grid.node(i);
    if (!psi.psi.in_domain(p)) continue;
    const Jet j = psi.psi.jet(p, 1);
    if (!j.all_finite()) continue;
    const double Dpsi = D.apply(p, j).value();
    require(std::fabs(Dpsi - j.value()) <= tol * std::max(1.0, std::fabs(j.value())), ErrorKind::Precondition,
            "dilation Hardy inequality needs D psi = psi (homogeneous quasinorm), violated on the grid");
  }
}

}  // namespace

HardyReport hardy_report(const GeometrySpec& geo, const Weight& psi, double Q, double alpha, const ScalarField& f,
                         const Grid& grid) {
  const double C = hardy_constant(Q, alpha);
  require_support_inside(grid, f);
  const Diffusion& diff = geo.diffusion;
  auto r = quadrature("hardy", grid, f, 1, C, [&](std::span<const double> p, const Jet& fj, double* out) {
    const Jet pj = psi_jet(psi, p, 1);
    const double v = pj.value(), wa = std::pow(v, alpha);
    out[0] = wa * apply_gamma(diff, p, pj, pj).value() / (v * v) * fj.value() * fj.value();
    out[1] = wa * apply_gamma(diff, p, fj, fj).value();
  });
  r.params = {{"Q", Q}, {"alpha", alpha}};
  return r;
}

namespace {

HardyReport log_family(const char* id, const GeometrySpec& geo, const Weight& psi, double Q, double alpha,
                       const ScalarField& f, const Grid& grid, bool weighted) {
  const double C = log_hardy_constant(alpha);
  if (weighted) require(Q != 2.0, ErrorKind::Usage, "weighted-log-hardy needs Q != 2; use log-hardy");
  require_support_inside(grid, f);
  require_one_side(psi, f, grid);
  const Diffusion& diff = geo.diffusion;
  auto r = quadrature(id, grid, f, 1, C, [&](std::span<const double> p, const Jet& fj, double* out) {
    const Jet pj = psi_jet(psi, p, 1);
    const double v = pj.value(), lg = std::log(v);
    const double w = std::pow(std::fabs(lg), alpha) * (weighted ? std::pow(v, 2.0 - Q) : 1.0);
    out[0] = w * apply_gamma(diff, p, pj, pj).value() / (v * v * lg * lg) * fj.value() * fj.value();
    out[1] = w * apply_gamma(diff, p, fj, fj).value();
  });
  r.params = {{"alpha", alpha}};
  if (weighted) r.params["Q"] = Q;
  return r;
}

}  // namespace

HardyReport log_hardy_report(const GeometrySpec& geo, const Weight& psi, double alpha, const ScalarField& f,
                             const Grid& grid) {
  return log_family("log-hardy", geo, psi, 2.0, alpha, f, grid, false);
}

HardyReport weighted_log_hardy_report(const GeometrySpec& geo, const Weight& psi, double Q, double alpha,
                                      const ScalarField& f, const Grid& grid) {
  return log_family("weighted-log-hardy", geo, psi, Q, alpha, f, grid, true);
}

namespace {

HardyReport radial_family(const GeometrySpec& geo, const Weight& psi, double Q, double alpha, const ScalarField& f,
                          const Grid& grid, double tol, bool logarithmic) {
  const double C = logarithmic ? log_hardy_constant(alpha) : [&] {
    require(Q + alpha != 2.0, ErrorKind::Usage, "Q + alpha = 2: use the radial-log variant");
    return hardy_constant(Q, alpha);
  }();
  require_support_inside(grid, f);
  if (logarithmic) require_one_side(psi, f, grid);
  const Diffusion& diff = geo.diffusion;
  check_secondary(diff, psi, grid, tol);
  auto r = quadrature(logarithmic ? "radial-log" : "radial", grid, f, 1, C,
                      [&](std::span<const double> p, const Jet& fj, double* out) {
                        const Jet pj = psi_jet(psi, p, 1);
                        const double v = pj.value();
                        const double g = apply_gamma(diff, p, pj, pj).value();
                        const double zf = apply_gamma(diff, p, pj, fj).value();
                        double w, den;
                        if (logarithmic) {
                          const double lg = std::log(v);
                          w = std::pow(v, 2.0 - Q) * std::pow(std::fabs(lg), alpha);
                          den = v * v * lg * lg;
                        } else {
                          w = std::pow(v, alpha);
                          den = v * v;
                        }
                        out[0] = w * g * g / den * fj.value() * fj.value();
                        out[1] = w * zf * zf;
                      });
  r.params = {{"Q", Q}, {"alpha", alpha}};
  return r;
}

HardyReport dilation_family(const GeometrySpec& geo, const Weight& psi, double alpha, const ScalarField& f,
                            const Grid& grid, double tol, bool logarithmic) {
  const VectorField D = dilation_field(geo);
  const double Q = geo.homogeneous_dimension();
  const double C = logarithmic ? log_hardy_constant(alpha) : [&] {
    require(Q + alpha != 0.0, ErrorKind::Usage, "Q(G) + alpha = 0 is excluded; use the dilation-log variant");
    const double c = 2.0 / (Q + alpha);
    return c * c;
  }();
  require_support_inside(grid, f);
  if (logarithmic) require_one_side(psi, f, grid);
  check_euler(D, psi, grid, tol);
  auto r = quadrature(logarithmic ? "dilation-log" : "dilation", grid, f, 1, C,
                      [&](std::span<const double> p, const Jet& fj, double* out) {
                        const double v = psi_jet(psi, p, 0).value();
                        const double Df = D.apply(p, fj).value();
                        double w, den = 1.0;
                        if (logarithmic) {
                          const double lg = std::log(v);
                          w = std::pow(v, -Q) * std::pow(std::fabs(lg), alpha);
                          den = lg * lg;
                        } else {
                          w = std::pow(v, alpha);
                        }
                        out[0] = w * fj.value() * fj.value() / den;
                        out[1] = w * Df * Df;
                      });
  r.params = {{"Q", Q}, {"alpha", alpha}};
  return r;
}

}  // namespace

HardyReport radial_hardy_report(const GeometrySpec& geo, const Weight& psi, double Q, double alpha,
                                const ScalarField& f, const Grid& grid, double secondary_tol) {
  return radial_family(geo, psi, Q, alpha, f, grid, secondary_tol, false);
}

HardyReport radial_log_hardy_report(const GeometrySpec& geo, const Weight& psi, double Q, double alpha,
                                    const ScalarField& f, const Grid& grid, double secondary_tol) {
  return radial_family(geo, psi, Q, alpha, f, grid, secondary_tol, true);
}

HardyReport dilation_hardy_report(const GeometrySpec& geo, const Weight& psi, double alpha, const ScalarField& f,
                                  const Grid& grid, double euler_tol) {
  return dilation_family(geo, psi, alpha, f, grid, euler_tol, false);
}

HardyReport dilation_log_hardy_report(const GeometrySpec& geo, const Weight& psi, double alpha,
                                      const ScalarField& f, const Grid& grid, double euler_tol) {
  return dilation_family(geo, psi, alpha, f, grid, euler_tol, true);
}

HardyReport funcineq_report(const Diffusion& diff, const ScalarField& W, double gamma, const ScalarField& f,
                            const Grid& grid) {
  require_support_inside(grid, f);
  const auto sums = grid_sum(grid, 3, [&](std::span<const double> p, double w, std::span<double> out) {
    const Jet fj = f.jet(p, 1);
    if (fj.is_zero()) return;
    require(W.in_domain(p), ErrorKind::Precondition, "test function support leaves the domain of W");
    const Jet wj = W.jet(p, 2);
    const double Wv = wj.value(), fv = fj.value();
    const double LW2 = 2.0 * Wv * apply_L(diff, p, wj).value() + 2.0 * apply_gamma(diff, p, wj, wj).value();
    const double a = LW2 * fv * fv, b = Wv * Wv * apply_gamma(diff, p, fj, fj).value(), c = Wv * Wv * fv * fv;
    require(std::isfinite(a) && std::isfinite(b) && std::isfinite(c), ErrorKind::Numeric, "non-finite integrand");
    out[0] += a * w;
    out[1] += b * w;
    out[2] += c * w;
  });
  HardyReport r;
  r.inequality = "funcineq";
  r.lhs = sums[0];
  r.rhs = 2.0 * sums[1] - 2.0 * gamma * sums[2];
  r.ratio = r.rhs > 0.0 ? r.lhs / r.rhs : kNaN;
  r.params = {{"gamma", gamma}};
  return r;
}

HardyReport funcineqgeneral_report(const Diffusion& diff, const ScalarField& W, double beta, const ScalarField& f,
                                   const Grid& grid) {
  require(std::isfinite(beta), ErrorKind::Usage, "beta must be finite");
  require_support_inside(grid, f);
  const double c1 = 1.0 - beta, c2 = beta * beta - beta + 1.0;
  auto r = quadrature("funcineqgeneral", grid, f, 1, 1.0, [&](std::span<const double> p, const Jet& fj, double* out) {
    require(W.in_domain(p), ErrorKind::Precondition, "test function support leaves the domain of W");
    const Jet wj = W.jet(p, 2);
    const double Wv = wj.value(), fv = fj.value();
    require(Wv > 0.0, ErrorKind::Precondition, "W must be positive on the support of f");
    out[0] = (c1 * std::pow(Wv, 1.0 - 2.0 * beta) * apply_L(diff, p, wj).value() +
              c2 * std::pow(Wv, -2.0 * beta) * apply_gamma(diff, p, wj, wj).value()) *
             fv * fv;
    out[1] = std::pow(Wv, 2.0 - 2.0 * beta) * apply_gamma(diff, p, fj, fj).value();
  });
  r.params = {{"beta", beta}};
  return r;
}

HardyReport homogeneous_norm_report(const GeometrySpec& geo, const Weight& rho, const ScalarField& f,
                                    const Grid& grid, const Grid& kappa_grid) {
  require(geo.stratified(), ErrorKind::Usage, "homo-norm needs a stratified geometry");
  const bool heis = geo.name.rfind("heisenberg(", 0) == 0;
  const bool eucl = geo.name.rfind("euclidean(", 0) == 0;
  require(heis || eucl, ErrorKind::Usage, "homo-norm is available on euclidean(m) and heisenberg(m)");
  const Weight N = make_weight(geo, heis ? "koranyi-gauge" : "euclid-norm");
  const auto horiz = geo.horizontal();
  const int n0 = static_cast<int>(horiz.size());
  WeightParams qp;
  if (n0 <= 2) qp.coords = {horiz.front()};
  const Weight q = eucl && n0 > 2 ? make_weight(geo, "euclid-norm") : make_weight(geo, "horizontal-norm", qp);
  const double kq = estimate_kappa(q, N, kappa_grid);
  const double kr = estimate_kappa(rho, N, kappa_grid);
  const double base = n0 >= 3 ? hardy_constant(n0, 0.0) : 4.0;
  const double C = base * kq * kq * kr * kr;
  require_support_inside(grid, f);
  const Diffusion& diff = geo.diffusion;
  auto r = quadrature("homo-norm", grid, f, 1, C, [&](std::span<const double> p, const Jet& fj, double* out) {
    const double v = psi_jet(rho, p, 0).value();
    out[0] = fj.value() * fj.value() / (v * v);
    out[1] = apply_gamma(diff, p, fj, fj).value();
  });
  r.params = {{"n0", static_cast<double>(n0)}, {"kappa_q", kq}, {"kappa_rho", kr}, {"base_constant", base}};
  return r;
}

BestConstantEstimate estimate_best_constant(const GeometrySpec& geo, const Weight& psi, double alpha,
                                            const TrialFamily& family, const Grid& grid) {
  require(!family.eps.empty() && !family.widths.empty() && !family.ramp_fractions.empty(), ErrorKind::Usage,
          "best-constant: empty trial family");
  require(family.a > 0.0, ErrorKind::Usage, "best-constant: a must be positive");
  const double Q = psi.claimed_Q;
  BestConstantEstimate best;
  best.sharp_constant = hardy_constant(Q, alpha);
  best.sup_ratio = -1.0;
  const Diffusion& diff = geo.diffusion;
  const double p0 = -(Q + alpha - 2.0) / 2.0;
  bool any = false;
  for (double eps : family.eps) {
    for (double width : family.widths) {
      for (double frac : family.ramp_fractions) {
        require(width > 0.0 && frac > 0.0 && frac <= 0.5, ErrorKind::Usage,
                "best-constant: widths must be positive and ramp fractions in (0, 1/2]");
        const double b = family.a * std::exp(width);
        const ScalarField f = smoothed_power(psi.psi, p0 + eps, family.a, b, std::exp(frac * width));
        require_support_inside(grid, f);
        const auto s = grid_sum(grid, 2, [&](std::span<const double> p, double w, std::span<double> out) {
          const Jet fj = f.jet(p, 1);
          if (fj.is_zero()) return;
          const Jet pj = psi_jet(psi, p, 1);
          const double v = pj.value(), wa = std::pow(v, alpha);
          out[0] += w * wa * apply_gamma(diff, p, pj, pj).value() / (v * v) * fj.value() * fj.value();
          out[1] += w * wa * apply_gamma(diff, p, fj, fj).value();
        });
        ++best.trials;
        if (!(s[1] > 0.0)) continue;
        any = true;
        const double ratio = s[0] / s[1];
        require(std::isfinite(ratio), ErrorKind::Numeric, "best-constant: non-finite Rayleigh quotient");
        if (ratio > best.sup_ratio) {
          best.sup_ratio = ratio;
          best.eps = eps;
          best.width = width;
          best.ramp_fraction = frac;
        }
      }
    }
  }
  require(any, ErrorKind::Precondition, "best-constant: every trial function has zero energy on the grid");
  return best;
}

}  // namespace hardylab
