#pragma once

#include <string>
#include <vector>

#include "hardylab/core/field.hpp"
#include "hardylab/core/grid.hpp"

namespace hardylab {

/// Second-order diffusion L = sum_j X_j^2 + b written through a frame of
/// vector fields X_j plus a first-order drift b, together with the density of
/// its reversible measure against coordinate volume. The frame induces the
/// carre du champ Gamma(f, g) = sum_j (X_j f)(X_j g), and the coefficient
/// matrix a = sum_j X_j X_j^T is positive semidefinite by construction.
struct Diffusion {
  std::string name;
  int dim = 0;
  std::vector<VectorField> frame;
  VectorField drift;
  ScalarField measure_density;
  DomainMask domain;

  bool in_domain(std::span<const double> p) const;

  /// Sum-of-squares diffusion whose drift makes it symmetric against the given
  /// measure density: b = sum_j div_mu(X_j) X_j.
  static Diffusion symmetric(std::string name, std::vector<VectorField> frame,
                             ScalarField measure_density, DomainMask domain = {});
};

/// L applied to a jet of order k >= 2; the result has order k - 2.
Jet apply_L(const Diffusion& diff, std::span<const double> p, const Jet& f);
/// Gamma(f, g) for jets of order >= 1; the result has order min(k_f, k_g) - 1.
Jet apply_gamma(const Diffusion& diff, std::span<const double> p, const Jet& f, const Jet& g);

/// The fields p -> (L f)(p) and p -> Gamma(f, g)(p). Their jets of order k pull
/// jets of order k + 2 (resp. k + 1) from the inputs.
ScalarField L_field(const Diffusion& diff, const ScalarField& f);
ScalarField gamma_field(const Diffusion& diff, const ScalarField& f, const ScalarField& g);

double eval_L(const Diffusion& diff, const ScalarField& f, const Point& p);
double gamma(const Diffusion& diff, const ScalarField& f, const ScalarField& g, const Point& p);

/// Gamma^W(f) = 1/2 (L(W^2) f^2 + 2 Gamma(W^2, f^2) + 2 W^2 Gamma(f)), evaluated
/// from the expanded form (W LW + Gamma(W)) f^2 + 4 W f Gamma(W, f) + W^2 Gamma(f).
double gamma_W(const Diffusion& diff, const ScalarField& W, const ScalarField& f, const Point& p);

/// max over pts of |L(phi o f) - phi'(f) L f - phi''(f) Gamma(f)|.
double chain_rule_defect(const Diffusion& diff, const ScalarMap& phi, const ScalarField& f,
                         std::span<const Point> pts);
/// max over pts of |Gamma(phi o f, g) - phi'(f) Gamma(f, g)|.
double gamma_chain_rule_defect(const Diffusion& diff, const ScalarMap& phi, const ScalarField& f,
                               const ScalarField& g, std::span<const Point> pts);

/// |sum f Lg w + sum Gamma(f, g) w| on the grid. f must vanish with its
/// gradient on every rim node.
double ibp_defect(const Diffusion& diff, const ScalarField& f, const ScalarField& g, const Grid& grid);

/// |sum f Lg w - sum g Lf w| on the grid, with the same support rule for f and g.
double symmetry_defect(const Diffusion& diff, const ScalarField& f, const ScalarField& g,
                       const Grid& grid);

}  // namespace hardylab
