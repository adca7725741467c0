#include "hardylab/operators.hpp"

#include <cmath>

#include "hardylab/core/error.hpp"

namespace hardylab {

const char* to_string(DerivedDiffusion::Kind k) {
  switch (k) {
    case DerivedDiffusion::Kind::Weighted: return "weighted";
    case DerivedDiffusion::Kind::Drifted: return "drifted";
    case DerivedDiffusion::Kind::Radial: return "radial";
    case DerivedDiffusion::Kind::Dilation: return "dilation";
  }
  return "?";
}

ScalarField derivative_along(const VectorField& X, const ScalarField& f) {
  return ScalarField(
      f.dim(), [X, f](std::span<const double> p, int k) { return X.apply(p, f.jet(p, k + 1)); }, f.mask(),
      f.oracle());
}

namespace {

DomainMask joint_domain(const Diffusion& base, const ScalarField& g) {
  return [base, g](std::span<const double> p) { return base.in_domain(p) && g.in_domain(p); };
}

// sum_j a_j X_j as a single vector field.
VectorField combine(const std::vector<VectorField>& frame, const std::vector<ScalarField>& a, int dim) {
  VectorField Z = VectorField::zero(dim);
  for (std::size_t j = 0; j < frame.size(); ++j)
    for (int i = 0; i < dim; ++i) Z.coeffs[i] = Z.coeffs[i] + a[j] * frame[j].coeffs[i];
  return Z;
}

}  // namespace

DerivedDiffusion weighted_operator(const Diffusion& base, const ScalarField& omega) {
  require(omega.dim() == base.dim, ErrorKind::Usage, "weight dimension does not match diffusion");
  const int dim = base.dim;
  const ScalarField checked(
      dim,
      [omega](std::span<const double> p, int k) {
        Jet w = omega.jet(p, k);
        require(w.value() >= 0.0, ErrorKind::Precondition, "weighted operator: omega is negative");
        return w;
      },
      omega.mask(), omega.oracle());
  const ScalarField root = sqrt(checked);
  Diffusion eff;
  eff.name = base.name + " weighted";
  eff.dim = dim;
  std::vector<ScalarField> half_grad;
  for (const auto& X : base.frame) {
    VectorField Y = VectorField::zero(dim);
    for (int i = 0; i < dim; ++i) Y.coeffs[i] = root * X.coeffs[i];
    eff.frame.push_back(std::move(Y));
    half_grad.push_back(0.5 * derivative_along(X, checked));
  }
  // sum_j (sqrt w X_j)^2 = w sum_j X_j^2 + 1/2 sum_j (X_j w) X_j.
  eff.drift = combine(base.frame, half_grad, dim);
  for (int i = 0; i < dim; ++i) eff.drift.coeffs[i] = eff.drift.coeffs[i] + checked * base.drift.coeffs[i];
  eff.measure_density = base.measure_density;
  eff.domain = joint_domain(base, omega);
  return {DerivedDiffusion::Kind::Weighted, base, omega, std::move(eff)};
}

DerivedDiffusion drifted_operator(const Diffusion& base, const ScalarField& sigma) {
  require(sigma.dim() == base.dim, ErrorKind::Usage, "drift potential dimension does not match diffusion");
  const int dim = base.dim;
  Diffusion eff;
  eff.name = base.name + " drifted";
  eff.dim = dim;
  eff.frame = base.frame;
  std::vector<ScalarField> grad;
  for (const auto& X : base.frame) grad.push_back(derivative_along(X, sigma));
  eff.drift = combine(base.frame, grad, dim);
  for (int i = 0; i < dim; ++i) eff.drift.coeffs[i] = eff.drift.coeffs[i] + base.drift.coeffs[i];
  const ScalarField e_sigma(
      dim,
      [sigma](std::span<const double> p, int k) {
        Jet e = exp(sigma.jet(p, k));
        require(e.all_finite(), ErrorKind::Numeric, "drifted operator: e^sigma overflows");
        return e;
      },
      sigma.mask(), sigma.oracle());
  eff.measure_density = base.measure_density * e_sigma;
  eff.domain = joint_domain(base, sigma);
  return {DerivedDiffusion::Kind::Drifted, base, sigma, std::move(eff)};
}

DerivedDiffusion radial_operator(const Diffusion& base, const ScalarField& psi) {
  require(psi.dim() == base.dim, ErrorKind::Usage, "psi dimension does not match diffusion");
  const int dim = base.dim;
  std::vector<ScalarField> grad;
  for (const auto& X : base.frame) grad.push_back(derivative_along(X, psi));
  VectorField Z = combine(base.frame, grad, dim);
  Diffusion eff;
  eff.name = base.name + " radial";
  eff.dim = dim;
  eff.frame = {Z};
  const ScalarField Lpsi = L_field(base, psi);
  eff.drift = VectorField::zero(dim);
  for (int i = 0; i < dim; ++i) eff.drift.coeffs[i] = Lpsi * Z.coeffs[i];
  eff.measure_density = base.measure_density;
  eff.domain = joint_domain(base, psi);
  return {DerivedDiffusion::Kind::Radial, base, psi, std::move(eff)};
}

VectorField dilation_field(const GeometrySpec& geo) {
  require(geo.stratified(), ErrorKind::Precondition, "dilation operator needs a stratified geometry");
  VectorField D = VectorField::zero(geo.dim);
  for (int j = 0; j < geo.dim; ++j) D.coeffs[j] = static_cast<double>(geo.stratum[j] + 1) * coordinate(geo.dim, j);
  return D;
}

DerivedDiffusion dilation_operator(const GeometrySpec& geo) {
  const VectorField D = dilation_field(geo);
  const double Q = geo.homogeneous_dimension();
  Diffusion eff;
  eff.name = geo.name + " dilation";
  eff.dim = geo.dim;
  eff.frame = {D};
  eff.drift = VectorField::zero(geo.dim);
  for (int i = 0; i < geo.dim; ++i) eff.drift.coeffs[i] = Q * D.coeffs[i];
  eff.measure_density = constant_field(geo.dim, 1.0);
  eff.domain = geo.diffusion.domain;
  return {DerivedDiffusion::Kind::Dilation, geo.diffusion, ScalarField{}, std::move(eff)};
}

}  // namespace hardylab
