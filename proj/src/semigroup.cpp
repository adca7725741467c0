#include "hardylab/semigroup.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>
#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "hardylab/core/error.hpp"
#include "hardylab/inequalities.hpp"

namespace hardylab {

namespace {

using SpMat = Eigen::SparseMatrix<double>;
using Vec = Eigen::VectorXd;

// Direct factorization up to this many unknowns, conjugate gradients above.
constexpr Eigen::Index kDirectLimit = 60000;

}  // namespace

struct HeatSemigroup::Impl {
  std::vector<std::int64_t> unknown;  // node -> unknown index or -1
  std::vector<std::size_t> node_of;   // unknown -> node
  Vec mass;                           // M over unknowns
  Vec mass_all;                       // M over every node
  SpMat A;
  SpMat system;  // M + dt A
  Eigen::SimplicialLDLT<SpMat> direct;
  Eigen::ConjugateGradient<SpMat, Eigen::Lower | Eigen::Upper, Eigen::DiagonalPreconditioner<double>> iterative;
  bool use_direct = true;

  Vec restrict(const GridFunction& u) const {
    Vec v(static_cast<Eigen::Index>(node_of.size()));
    for (std::size_t k = 0; k < node_of.size(); ++k) v[static_cast<Eigen::Index>(k)] = u[node_of[k]];
    return v;
  }
  void extend(const Vec& v, GridFunction& u) const {
    std::fill(u.begin(), u.end(), 0.0);
    for (std::size_t k = 0; k < node_of.size(); ++k) u[node_of[k]] = v[static_cast<Eigen::Index>(k)];
  }
};

HeatSemigroup::HeatSemigroup(const Diffusion& diff, const Grid& grid, double dt)
    : grid_(&grid), dt_(dt), impl_(std::make_unique<Impl>()) {
  require(dt > 0.0 && std::isfinite(dt), ErrorKind::Usage, "time step must be positive");
  require(grid.dim() == diff.dim, ErrorKind::Usage, "grid dimension does not match diffusion");
  require(grid.lattice_info().has_value(), ErrorKind::Usage, "the heat semigroup needs a lattice grid");
  const auto& lat = *grid.lattice_info();
  const int dim = grid.dim();
  const std::size_t n = grid.size();
  Impl& im = *impl_;
  im.unknown.assign(n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    if (grid.on_rim(i)) continue;
    im.unknown[i] = static_cast<std::int64_t>(im.node_of.size());
    im.node_of.push_back(i);
  }
  require(!im.node_of.empty(), ErrorKind::Degenerate, "grid has no interior nodes");
  double cell = 1.0;
  for (double h : lat.h) cell *= h;
  im.mass_all.resize(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) im.mass_all[static_cast<Eigen::Index>(i)] = cell * diff.measure_density(grid.node(i));
  im.mass = Vec(static_cast<Eigen::Index>(im.node_of.size()));
  for (std::size_t k = 0; k < im.node_of.size(); ++k)
    im.mass[static_cast<Eigen::Index>(k)] = im.mass_all[static_cast<Eigen::Index>(im.node_of[k])];

  // Each stencil row r (one frame field, one direction, one center) adds
  // w/2 r r^T; entries on rim or missing nodes drop out (Dirichlet zero).
  std::vector<Eigen::Triplet<double>> trip;
  std::vector<std::pair<std::int64_t, double>> row;
  std::vector<double> coeff(static_cast<std::size_t>(dim));
  for (std::size_t c = 0; c < n; ++c) {
    const auto p = grid.node(c);
    const auto idx = grid.lattice_index(c);
    const double w = 0.5 * im.mass_all[static_cast<Eigen::Index>(c)];
    for (const auto& X : diff.frame) {
      for (int i = 0; i < dim; ++i) coeff[i] = X.coeffs[i](p);
      for (int s : {1, -1}) {
        row.clear();
        double centre = 0.0;
        for (int i = 0; i < dim; ++i) {
          if (coeff[i] == 0.0) continue;
          const double a = coeff[i] / lat.h[i];
          auto nb = idx;
          nb[i] += s;
          const std::int64_t flat = lat.flatten(nb);
          const std::int64_t node = flat < 0 ? -1 : lat.to_node[static_cast<std::size_t>(flat)];
          // forward: (u(n+e) - u(n)) a; backward: (u(n) - u(n-e)) a
          const double sign = s > 0 ? 1.0 : -1.0;
          if (node >= 0 && im.unknown[static_cast<std::size_t>(node)] >= 0)
            row.emplace_back(im.unknown[static_cast<std::size_t>(node)], sign * a);
          centre -= sign * a;
        }
        if (im.unknown[c] >= 0 && centre != 0.0) row.emplace_back(im.unknown[c], centre);
        for (const auto& [ra, va] : row)
          for (const auto& [rb, vb] : row) trip.emplace_back(ra, rb, w * va * vb);
      }
    }
  }
  const auto m = static_cast<Eigen::Index>(im.node_of.size());
  SpMat A(m, m);
  A.setFromTriplets(trip.begin(), trip.end());
  trip.clear();
  trip.shrink_to_fit();
  SpMat At = A.transpose();
  im.A = 0.5 * (A + At);
  im.system = dt * im.A;
  for (Eigen::Index k = 0; k < m; ++k) im.system.coeffRef(k, k) += im.mass[k];
  im.system.makeCompressed();
  im.use_direct = m <= kDirectLimit;
  if (im.use_direct) {
    im.direct.compute(im.system);
    require(im.direct.info() == Eigen::Success, ErrorKind::Numeric, "heat step: factorization failed");
  } else {
    im.iterative.setTolerance(1e-14);
    im.iterative.setMaxIterations(20000);
    im.iterative.compute(im.system);
    require(im.iterative.info() == Eigen::Success, ErrorKind::Numeric, "heat step: preconditioner setup failed");
  }
}

HeatSemigroup::~HeatSemigroup() = default;
HeatSemigroup::HeatSemigroup(HeatSemigroup&&) noexcept = default;
HeatSemigroup& HeatSemigroup::operator=(HeatSemigroup&&) noexcept = default;

std::size_t HeatSemigroup::unknowns() const noexcept { return impl_->node_of.size(); }

GridFunction HeatSemigroup::sample(const ScalarField& f) const {
  require(f.dim() == grid_->dim(), ErrorKind::Usage, "field dimension does not match grid");
  GridFunction u(grid_->size(), 0.0);
  double peak = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const auto p = grid_->node(i);
    require(f.in_domain(p), ErrorKind::Precondition, "initial datum is undefined at a grid node");
    u[i] = f(p);
    require(std::isfinite(u[i]), ErrorKind::Numeric, "initial datum is not finite at a grid node");
    peak = std::max(peak, std::fabs(u[i]));
  }
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (!grid_->on_rim(i)) continue;
    require(std::fabs(u[i]) <= 1e-12 * peak, ErrorKind::Precondition,
            "initial datum must vanish on the grid boundary and next to excised nodes");
    u[i] = 0.0;
  }
  return u;
}

void HeatSemigroup::step(GridFunction& u) const {
  require(u.size() == grid_->size(), ErrorKind::Usage, "grid function size mismatch");
  const Impl& im = *impl_;
  const Vec rhs = im.mass.cwiseProduct(im.restrict(u));
  Vec next;
  if (im.use_direct) {
    next = im.direct.solve(rhs);
    require(im.direct.info() == Eigen::Success, ErrorKind::Numeric, "heat step: solve failed");
  } else {
    next = im.iterative.solveWithGuess(rhs, im.restrict(u));
    require(im.iterative.info() == Eigen::Success, ErrorKind::Numeric, "heat step: conjugate gradients did not converge");
  }
  require(next.allFinite(), ErrorKind::Numeric, "heat step produced non-finite values");
  im.extend(next, u);
}

GridFunction HeatSemigroup::apply_L(const GridFunction& u) const {
  require(u.size() == grid_->size(), ErrorKind::Usage, "grid function size mismatch");
  const Impl& im = *impl_;
  const Vec Au = im.A * im.restrict(u);
  GridFunction out(u.size());
  im.extend(-Au.cwiseQuotient(im.mass), out);
  return out;
}

double HeatSemigroup::inner(const GridFunction& u, const GridFunction& v) const {
  require(u.size() == grid_->size() && v.size() == grid_->size(), ErrorKind::Usage, "grid function size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += impl_->mass_all[static_cast<Eigen::Index>(i)] * u[i] * v[i];
  return s;
}

double HeatSemigroup::mass(const GridFunction& u) const {
  require(u.size() == grid_->size(), ErrorKind::Usage, "grid function size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += impl_->mass_all[static_cast<Eigen::Index>(i)] * u[i];
  return s;
}

namespace {

std::size_t step_count(double t_max, double dt) {
  require(t_max >= 0.0 && std::isfinite(t_max), ErrorKind::Usage, "t_max must be nonnegative");
  require(dt > 0.0, ErrorKind::Usage, "time step must be positive");
  return static_cast<std::size_t>(std::ceil(t_max / dt - 1e-9));
}

}  // namespace

Trajectory evolve(const Diffusion& diff, const ScalarField& f0, const Grid& grid, double t_max, double dt,
                  std::size_t stride) {
  require(stride >= 1, ErrorKind::Usage, "stride must be at least 1");
  const std::size_t steps = step_count(t_max, dt);
  Trajectory tr;
  if (steps == 0) {
    HeatSemigroup sg(diff, grid, dt);
    tr.times.push_back(0.0);
    tr.states.push_back(sg.sample(f0));
    return tr;
  }
  const double h = t_max / static_cast<double>(steps);
  HeatSemigroup sg(diff, grid, h);
  GridFunction u = sg.sample(f0);
  tr.times.push_back(0.0);
  tr.states.push_back(u);
  for (std::size_t k = 1; k <= steps; ++k) {
    sg.step(u);
    if (k % stride == 0 || k == steps) {
      tr.times.push_back(static_cast<double>(k) * h);
      tr.states.push_back(u);
    }
  }
  return tr;
}

ContractionTrace contraction_trace(const Diffusion& diff, const ScalarField& W, const ScalarField& f0,
                                   const Grid& grid, double t_max, double dt, double gamma, double tol) {
  const std::size_t steps = step_count(t_max, dt);
  require(steps >= 1, ErrorKind::Usage, "contraction trace needs t_max > 0");
  require(tol >= 0.0, ErrorKind::Usage, "tolerance must be nonnegative");
  ContractionTrace tr;
  tr.gamma = gamma;
  const HardyReport fi = funcineq_report(diff, W, gamma, f0, grid);
  tr.flagged = !(fi.lhs <= fi.rhs);
  const double h = t_max / static_cast<double>(steps);
  HeatSemigroup sg(diff, grid, h);
  GridFunction w2(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double w = W(grid.node(i));
    require(std::isfinite(w), ErrorKind::Numeric, "W is not finite at a grid node");
    w2[i] = w * w;
  }
  GridFunction u = sg.sample(f0);
  GridFunction wu(u.size());
  const auto record = [&](double t) {
    for (std::size_t i = 0; i < u.size(); ++i) wu[i] = w2[i] * u[i];
    tr.times.push_back(t);
    tr.I_values.push_back(sg.inner(wu, u));
    tr.mass_values.push_back(sg.mass(u));
  };
  record(0.0);
  for (std::size_t k = 1; k <= steps; ++k) {
    sg.step(u);
    record(static_cast<double>(k) * h);
  }
  for (std::size_t k = 1; k < tr.times.size(); ++k) {
    const double prev = std::exp(2.0 * gamma * tr.times[k - 1]) * tr.I_values[k - 1];
    const double next = std::exp(2.0 * gamma * tr.times[k]) * tr.I_values[k];
    require(std::isfinite(next), ErrorKind::Numeric, "contraction trace overflowed");
    if (prev > 0.0) tr.worst_increase = std::max(tr.worst_increase, (next - prev) / prev);
    else if (next > 0.0) tr.worst_increase = std::numeric_limits<double>::infinity();
  }
  tr.passes = tr.worst_increase <= tol;
  return tr;
}

double subcommutation_check(const Diffusion& diff, const ScalarField& W, const ScalarField& f0, const Grid& grid,
                            double t, double dt, double gamma) {
  const std::size_t steps = step_count(t, dt);
  HeatSemigroup sg(diff, grid, steps == 0 ? dt : t / static_cast<double>(steps));
  GridFunction u = sg.sample(f0);
  GridFunction w2(grid.size()), v(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double w = W(grid.node(i));
    require(std::isfinite(w), ErrorKind::Numeric, "W is not finite at a grid node");
    w2[i] = w * w;
    v[i] = w2[i] * u[i] * u[i];
  }
  for (std::size_t k = 0; k < steps; ++k) {
    sg.step(u);
    sg.step(v);
  }
  const double decay = std::exp(-2.0 * gamma * t);
  double lo = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grid.size(); ++i) lo = std::min(lo, decay * v[i] - w2[i] * u[i] * u[i]);
  return lo;
}

double self_adjointness_defect(const HeatSemigroup& sg, std::uint64_t seed, int pairs) {
  require(pairs >= 1, ErrorKind::Usage, "need at least one pair");
  std::mt19937_64 rng(seed);
  const Grid& grid = sg.grid();
  const auto draw = [&] {
    GridFunction u(grid.size(), 0.0);
    for (std::size_t i = 0; i < u.size(); ++i)
      if (!grid.on_rim(i)) u[i] = static_cast<double>(rng() >> 11) * 0x1.0p-53 - 0.5;
    return u;
  };
  double worst = 0.0;
  for (int k = 0; k < pairs; ++k) {
    const GridFunction u = draw(), v = draw();
    const GridFunction Lu = sg.apply_L(u), Lv = sg.apply_L(v);
    const double a = sg.inner(u, Lv), b = sg.inner(v, Lu);
    const double scale = std::sqrt(sg.inner(u, u) * sg.inner(Lv, Lv)) + std::sqrt(sg.inner(v, v) * sg.inner(Lu, Lu));
    if (scale > 0.0) worst = std::max(worst, std::fabs(a - b) / scale);
  }
  return worst;
}

}  // namespace hardylab
