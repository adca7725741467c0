#pragma once

#include "hardylab/catalog.hpp"
#include "hardylab/core/diffusion.hpp"

namespace hardylab {

/// A diffusion built from a base one. `effective` is an ordinary Diffusion,
/// so every calculus routine applies to it unchanged.
struct DerivedDiffusion {
  enum class Kind { Weighted, Drifted, Radial, Dilation };
  Kind kind;
  Diffusion base;
  ScalarField parameter;  // omega, sigma or psi; empty for the dilation generator
  Diffusion effective;
};

const char* to_string(DerivedDiffusion::Kind k);

/// The field p -> (X f)(p).
ScalarField derivative_along(const VectorField& X, const ScalarField& f);

/// L_omega f = omega L f + Gamma(omega, f): frame sqrt(omega) X_j, same measure.
DerivedDiffusion weighted_operator(const Diffusion& base, const ScalarField& omega);
/// L_sigma f = L f + Gamma(sigma, f), measure density times e^sigma.
DerivedDiffusion drifted_operator(const Diffusion& base, const ScalarField& sigma);
/// L_psi = Z^2 + (L psi) Z with Z = Gamma(psi, .), same measure.
DerivedDiffusion radial_operator(const Diffusion& base, const ScalarField& psi);
/// L_G = D^2 + Q(G) D with D = sum_j c_j y_j d_j, Lebesgue measure.
DerivedDiffusion dilation_operator(const GeometrySpec& geo);

/// D = sum_j c_j y_j d_j with c_j = stratum index + 1.
VectorField dilation_field(const GeometrySpec& geo);

}  // namespace hardylab
