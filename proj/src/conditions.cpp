#include "hardylab/conditions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hardylab/core/error.hpp"
#include "hardylab/core/parallel.hpp"

namespace hardylab {

const char* to_string(QcondReport::Verdict v) {
  switch (v) {
    case QcondReport::Verdict::Exact: return "exact";
    case QcondReport::Verdict::LowerBound: return "lower-bound";
    case QcondReport::Verdict::UpperBound: return "upper-bound";
    case QcondReport::Verdict::Fail: return "fail";
  }
  return "?";
}

double default_qcond_tolerance(const ScalarField& psi) {
  if (psi.oracle().exact()) return 1e-8;
  const double h = psi.oracle().step;
  return 10.0 * h * h;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Per-node evaluation into a flat buffer, one block per worker chunk.
template <class Fn>
std::vector<double> per_node(const Grid& grid, std::size_t width, Fn fn) {
  std::vector<double> out(grid.size() * width, std::numeric_limits<double>::quiet_NaN());
  for_each_block(grid.size(), kReductionBlock, [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) fn(grid.node(i), std::span<double>(out.data() + i * width, width));
  });
  return out;
}

}  // namespace

QcondReport qcond_report(const Diffusion& diff, const Weight& w, const Grid& grid, double tol, double Q_claimed) {
  require(grid.dim() == diff.dim, ErrorKind::Usage, "grid dimension does not match diffusion");
  require(tol >= 0.0, ErrorKind::Usage, "tolerance must be nonnegative");
  QcondReport rep;
  rep.Q_claimed = std::isnan(Q_claimed) ? w.claimed_Q : Q_claimed;
  // columns: psi, L psi, Gamma(psi); NaN where the node is outside the weight's mask
  const auto vals = per_node(grid, 3, [&](std::span<const double> p, std::span<double> out) {
    if (!diff.in_domain(p) || !w.psi.in_domain(p)) return;
    const Jet j = w.psi.jet(p, 2);
    require(j.all_finite(), ErrorKind::Numeric, "non-finite derivative of psi");
    out[0] = j.value();
    out[1] = apply_L(diff, p, j).value();
    out[2] = apply_gamma(diff, p, j, j).value();
  });
  double gmax = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i)
    if (!std::isnan(vals[3 * i + 2])) gmax = std::max(gmax, vals[3 * i + 2]);
  const double floor = 1e-12 * gmax;
  CompensatedSum sum;
  rep.inf_ratio = kInf;
  rep.sup_ratio = -kInf;
  const double target = rep.Q_claimed - 1.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double psi = vals[3 * i], Lpsi = vals[3 * i + 1], G = vals[3 * i + 2];
    if (std::isnan(psi)) continue;
    if (!(G > floor)) {
      ++rep.skipped;
      continue;
    }
    const double r = psi * Lpsi / G;
    require(std::isfinite(r), ErrorKind::Numeric, "non-finite qcond ratio");
    sum.add(r);
    rep.inf_ratio = std::min(rep.inf_ratio, r);
    rep.sup_ratio = std::max(rep.sup_ratio, r);
    rep.max_defect = std::max(rep.max_defect, std::fabs(r - target));
    ++rep.evaluated;
  }
  require(rep.evaluated > 0, ErrorKind::Degenerate, "qcond: every grid node was skipped");
  rep.Q_estimate = 1.0 + sum.value() / static_cast<double>(rep.evaluated);
  if (rep.sup_ratio - rep.inf_ratio <= tol && rep.max_defect <= tol)
    rep.verdict = QcondReport::Verdict::Exact;
  else if (rep.sup_ratio <= target + tol && w.exactness != Exactness::LowerBound)
    rep.verdict = QcondReport::Verdict::UpperBound;
  else if (rep.inf_ratio >= target - tol && w.exactness != Exactness::UpperBound)
    rep.verdict = QcondReport::Verdict::LowerBound;
  else
    rep.verdict = QcondReport::Verdict::Fail;
  return rep;
}

double suffcond_value(const Diffusion& diff, const ScalarField& W, std::span<const double> p) {
  const Jet j = W.jet(p, 2);
  require(j.value() > 0.0, ErrorKind::Precondition, "suffcond: W must be positive at every grid node");
  require(j.all_finite(), ErrorKind::Numeric, "non-finite derivative of W");
  const double w = j.value();
  return apply_L(diff, p, j).value() / w - 3.0 * apply_gamma(diff, p, j, j).value() / (w * w);
}

SuffcondResult check_suffcond(const Diffusion& diff, const ScalarField& W, const Grid& grid, double gamma,
                              double tol) {
  require(grid.dim() == diff.dim, ErrorKind::Usage, "grid dimension does not match diffusion");
  const auto vals = per_node(grid, 1, [&](std::span<const double> p, std::span<double> out) {
    if (!diff.in_domain(p) || !W.in_domain(p)) return;
    out[0] = suffcond_value(diff, W, p);
  });
  SuffcondResult res;
  res.inf_value = kInf;
  bool any = false;
  for (double v : vals) {
    if (std::isnan(v)) continue;
    require(std::isfinite(v), ErrorKind::Numeric, "non-finite suffcond value");
    res.inf_value = std::min(res.inf_value, v);
    any = true;
  }
  require(any, ErrorKind::Degenerate, "suffcond: no grid node inside the domain");
  res.passes = res.inf_value >= gamma - tol;
  return res;
}

double check_curvature(const Diffusion& diff, const ScalarField& W, const ScalarField& f, double gamma,
                       const Grid& grid) {
  require(grid.dim() == diff.dim, ErrorKind::Usage, "grid dimension does not match diffusion");
  const auto vals = per_node(grid, 1, [&](std::span<const double> p, std::span<double> out) {
    if (!diff.in_domain(p) || !W.in_domain(p) || !f.in_domain(p)) return;
    const double w = W(p), fv = f(p);
    out[0] = gamma_W(diff, W, f, Point(std::vector<double>(p.begin(), p.end()))) - gamma * w * w * fv * fv;
  });
  double lo = kInf;
  for (double v : vals)
    if (!std::isnan(v)) lo = std::min(lo, v);
  require(lo < kInf, ErrorKind::Degenerate, "curvature: no grid node inside the domain");
  return lo;
}

PowerRange power_range(double Q) {
  const double e = (Q - 2.0) / 2.0;
  return {std::min(0.0, e), std::max(0.0, e)};
}

}  // namespace hardylab
