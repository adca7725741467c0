#pragma once

#include <map>
#include <string>
#include <vector>

#include "hardylab/catalog.hpp"

namespace hardylab {

/// Both sides of one inequality evaluated by grid quadrature. `rhs` already
/// includes `constant`; ratio = lhs / rhs is NaN when rhs = 0.
struct HardyReport {
  std::string inequality;
  double lhs = 0.0;
  double rhs = 0.0;
  double constant = 1.0;
  double ratio = 0.0;
  std::map<std::string, double> params;

  bool ratio_defined() const noexcept { return rhs > 0.0; }
};

/// (2/(Q + alpha - 2))^2; usage error at Q + alpha = 2.
double hardy_constant(double Q, double alpha);
/// (2/(alpha - 1))^2; usage error at alpha = 1.
double log_hardy_constant(double alpha);

HardyReport hardy_report(const GeometrySpec& geo, const Weight& psi, double Q, double alpha, const ScalarField& f,
                         const Grid& grid);
/// |log psi|-weighted variant for a weight verifying qcond with Q = 2. The
/// support of f must lie on one side of {psi = 1}.
HardyReport log_hardy_report(const GeometrySpec& geo, const Weight& psi, double alpha, const ScalarField& f,
                             const Grid& grid);
/// log-hardy with both sides multiplied by psi^(2 - Q), Q != 2.
HardyReport weighted_log_hardy_report(const GeometrySpec& geo, const Weight& psi, double Q, double alpha,
                                      const ScalarField& f, const Grid& grid);
/// Radial variant: Gamma(f) becomes Gamma(psi, f)^2 and Gamma(psi) becomes
/// Gamma(psi)^2. Requires Gamma(psi, Gamma(psi)) = 0 on the grid within
/// `secondary_tol`.
HardyReport radial_hardy_report(const GeometrySpec& geo, const Weight& psi, double Q, double alpha,
                                const ScalarField& f, const Grid& grid, double secondary_tol = 1e-8);
HardyReport radial_log_hardy_report(const GeometrySpec& geo, const Weight& psi, double Q, double alpha,
                                    const ScalarField& f, const Grid& grid, double secondary_tol = 1e-8);
/// Dilation variant for a homogeneous quasinorm psi (D psi = psi checked on the grid).
HardyReport dilation_hardy_report(const GeometrySpec& geo, const Weight& psi, double alpha, const ScalarField& f,
                                  const Grid& grid, double euler_tol = 1e-8);
HardyReport dilation_log_hardy_report(const GeometrySpec& geo, const Weight& psi, double alpha,
                                      const ScalarField& f, const Grid& grid, double euler_tol = 1e-8);

/// lhs = int L(W^2) f^2, rhs = 2 int W^2 Gamma(f) - 2 gamma int W^2 f^2.
HardyReport funcineq_report(const Diffusion& diff, const ScalarField& W, double gamma, const ScalarField& f,
                            const Grid& grid);
/// lhs = (1-b) int W^(1-2b) LW f^2 + (b^2-b+1) int W^(-2b) Gamma(W) f^2,
/// rhs = int W^(2-2b) Gamma(f).
HardyReport funcineqgeneral_report(const Diffusion& diff, const ScalarField& W, double beta, const ScalarField& f,
                                   const Grid& grid);

/// int f^2/rho^2 against C kappa^2(q) kappa^2(rho) int Gamma(f): q = |x_0| and
/// C = (2/(n_0-2))^2 when n_0 >= 3, q = |x_{0,1}| and C = 4 when n_0 <= 2.
/// The kappa values are grid sups over `kappa_grid` against the gauge N
/// (Koranyi on heisenberg(m), |x| on euclidean(m)).
HardyReport homogeneous_norm_report(const GeometrySpec& geo, const Weight& rho, const ScalarField& f,
                                    const Grid& grid, const Grid& kappa_grid);

/// Trial functions psi^(-(Q+alpha-2)/2 + eps) cut off on [a, a ramp] and
/// [b/ramp, b] with b = a e^width and ramp = e^(fraction * width).
struct TrialFamily {
  double a = 1.0;
  std::vector<double> eps;
  std::vector<double> widths;
  std::vector<double> ramp_fractions = {0.1, 0.2, 0.3, 0.4};
};

struct BestConstantEstimate {
  double sup_ratio = 0.0;
  double sharp_constant = 0.0;  // (2/(Q+alpha-2))^2
  double eps = 0.0, width = 0.0, ramp_fraction = 0.0;
  std::size_t trials = 0;
};

/// Grid search of the Rayleigh quotient int psi^a (Gamma(psi)/psi^2) f^2 /
/// int psi^a Gamma(f) over the family. The grid must cover [a, a e^max width].
BestConstantEstimate estimate_best_constant(const GeometrySpec& geo, const Weight& psi, double alpha,
                                            const TrialFamily& family, const Grid& grid);

}  // namespace hardylab
