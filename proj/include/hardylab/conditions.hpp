#pragma once

#include <cstddef>
#include <limits>

#include "hardylab/catalog.hpp"

namespace hardylab {

struct QcondReport {
  enum class Verdict { Exact, LowerBound, UpperBound, Fail };

  double Q_estimate = 0.0;  // 1 + mean of psi L psi / Gamma(psi)
  double max_defect = 0.0;  // max |ratio - (Q_claimed - 1)|
  double inf_ratio = 0.0;
  double sup_ratio = 0.0;
  double Q_claimed = 0.0;
  Verdict verdict = Verdict::Fail;
  std::size_t evaluated = 0;
  std::size_t skipped = 0;  // nodes where Gamma(psi) is negligible
};

const char* to_string(QcondReport::Verdict v);

/// Default tolerance for the exact verdict: 1e-8 with closed-form
/// derivatives, 10 h^2 with central differences of step h.
double default_qcond_tolerance(const ScalarField& psi);

/// Ratio psi L psi / Gamma(psi) over the grid. Nodes with Gamma(psi) below
/// 1e-12 times its grid maximum are skipped and counted. Q_claimed defaults
/// to the weight's claim when NaN is passed.
QcondReport qcond_report(const Diffusion& diff, const Weight& psi, const Grid& grid, double tol,
                         double Q_claimed = std::numeric_limits<double>::quiet_NaN());

struct SuffcondResult {
  bool passes = false;
  double inf_value = 0.0;
};

/// LW/W - 3 Gamma(W)/W^2 at one point; W must be positive there.
double suffcond_value(const Diffusion& diff, const ScalarField& W, std::span<const double> p);

/// inf over the grid of LW/W - 3 Gamma(W)/W^2, compared against gamma - tol.
SuffcondResult check_suffcond(const Diffusion& diff, const ScalarField& W, const Grid& grid, double gamma,
                              double tol = 1e-10);

/// min over the grid of Gamma^W(f) - gamma W^2 f^2.
double check_curvature(const Diffusion& diff, const ScalarField& W, const ScalarField& f, double gamma,
                       const Grid& grid);

struct PowerRange {
  double lo = 0.0, hi = 0.0;
  bool contains(double p) const noexcept { return p >= lo && p <= hi; }
};

/// {p : p(p + Q - 2) - 3p^2 >= 0}, the closed interval between 0 and (Q - 2)/2.
PowerRange power_range(double Q);

}  // namespace hardylab
