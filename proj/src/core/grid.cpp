#include "hardylab/core/grid.hpp"

#include <cmath>
#include <numbers>

#include "hardylab/core/error.hpp"
#include "hardylab/core/parallel.hpp"

namespace hardylab {

double Box::spacing(int axis) const {
  return (hi[axis] - lo[axis]) / cells[axis];
}

Box Box::with_spacing(std::vector<double> lo, std::vector<double> hi, double h) {
  require(lo.size() == hi.size() && !lo.empty(), ErrorKind::Usage, "box bounds dimension mismatch");
  require(h > 0.0, ErrorKind::Usage, "grid spacing must be positive");
  Box b{std::move(lo), std::move(hi), {}};
  for (int i = 0; i < b.dim(); ++i) {
    require(b.hi[i] > b.lo[i], ErrorKind::Usage, "box upper bound must exceed lower bound");
    b.cells.push_back(std::max(1, static_cast<int>(std::ceil((b.hi[i] - b.lo[i]) / h - 1e-9))));
  }
  return b;
}

std::int64_t Grid::Lattice::flatten(std::span<const int> idx) const {
  std::int64_t flat = 0;
  for (std::size_t a = 0; a < nodes.size(); ++a) {
    if (idx[a] < 0 || idx[a] >= nodes[a]) return -1;
    flat = flat * nodes[a] + idx[a];
  }
  return flat;
}

Grid Grid::lattice(const Box& box, const ScalarField& density, const Excision& excise,
                   const DomainMask& mask) {
  const int dim = box.dim();
  require(dim >= 1 && static_cast<int>(box.hi.size()) == dim && static_cast<int>(box.cells.size()) == dim,
          ErrorKind::Usage, "malformed box");
  require(density.dim() == dim, ErrorKind::Usage, "density dimension does not match box");
  Grid g;
  g.dim_ = dim;
  Lattice lat;
  lat.lo = box.lo;
  std::int64_t total = 1;
  g.min_spacing_ = INFINITY;
  for (int a = 0; a < dim; ++a) {
    require(box.cells[a] >= 1, ErrorKind::Usage, "box needs at least one cell per axis");
    lat.h.push_back(box.spacing(a));
    lat.nodes.push_back(box.cells[a] + 1);
    total *= lat.nodes.back();
    g.min_spacing_ = std::min(g.min_spacing_, lat.h.back());
  }
  require(total <= 60'000'000, ErrorKind::Usage, "grid too large");
  lat.to_node.assign(static_cast<std::size_t>(total), -1);

  std::vector<int> idx(static_cast<std::size_t>(dim), 0);
  std::vector<double> x(static_cast<std::size_t>(dim));
  double cell_volume = 1.0;
  for (double h : lat.h) cell_volume *= h;
  for (std::int64_t flat = 0; flat < total; ++flat) {
    std::int64_t rem = flat;
    for (int a = dim - 1; a >= 0; --a) {
      idx[a] = static_cast<int>(rem % lat.nodes[a]);
      rem /= lat.nodes[a];
    }
    double face = 1.0;
    for (int a = 0; a < dim; ++a) {
      x[a] = idx[a] == lat.nodes[a] - 1 ? box.hi[a] : box.lo[a] + idx[a] * lat.h[a];
      if (idx[a] == 0 || idx[a] == lat.nodes[a] - 1) face *= 0.5;
    }
    if (mask && !mask(x)) continue;
    if (!density.in_domain(x)) continue;
    if (excise && excise(x)) continue;
    const double rho = density(x);
    require(std::isfinite(rho) && rho > 0.0, ErrorKind::Numeric,
            "measure density must be finite and positive at retained nodes");
    lat.to_node[static_cast<std::size_t>(flat)] = static_cast<std::int64_t>(g.weights_.size());
    g.coords_.insert(g.coords_.end(), x.begin(), x.end());
    g.weights_.push_back(face * cell_volume * rho);
    g.flat_.push_back(flat);
  }
  g.rim_.assign(g.weights_.size(), 0);
  for (std::size_t n = 0; n < g.weights_.size(); ++n) {
    std::int64_t rem = g.flat_[n];
    for (int a = dim - 1; a >= 0; --a) {
      idx[a] = static_cast<int>(rem % lat.nodes[a]);
      rem /= lat.nodes[a];
    }
    bool rim = false;
    for (int a = 0; a < dim && !rim; ++a) {
      for (int s : {-1, 1}) {
        idx[a] += s;
        const std::int64_t nb = lat.flatten(idx);
        idx[a] -= s;
        if (nb < 0 || lat.to_node[static_cast<std::size_t>(nb)] < 0) {
          rim = true;
          break;
        }
      }
    }
    g.rim_[n] = rim ? 1 : 0;
  }
  g.lattice_ = std::move(lat);
  return g;
}

Grid Grid::radial(int ambient_dim, double r_min, double r_max, int nodes, double angular_measure,
                  const ScalarField& density) {
  require(ambient_dim >= 1 && density.dim() == ambient_dim, ErrorKind::Usage,
          "radial grid dimension mismatch");
  require(r_min > 0.0 && r_max > r_min && nodes >= 2, ErrorKind::Usage,
          "radial grid needs 0 < r_min < r_max and at least two nodes");
  Grid g;
  g.dim_ = ambient_dim;
  const double s0 = std::log(r_min), s1 = std::log(r_max);
  const double ds = (s1 - s0) / nodes;
  g.min_spacing_ = ds;
  std::vector<double> x(static_cast<std::size_t>(ambient_dim), 0.0);
  for (int i = 0; i < nodes; ++i) {
    const double r = std::exp(s0 + (i + 0.5) * ds);
    x[0] = r;
    const double rho = density(x);
    require(std::isfinite(rho) && rho > 0.0, ErrorKind::Numeric,
            "measure density must be finite and positive at retained nodes");
    g.coords_.insert(g.coords_.end(), x.begin(), x.end());
    g.weights_.push_back(angular_measure * std::pow(r, ambient_dim) * ds * rho);
    g.rim_.push_back(i == 0 || i == nodes - 1 ? 1 : 0);
  }
  return g;
}

std::vector<int> Grid::lattice_index(std::size_t i) const {
  require(lattice_.has_value(), ErrorKind::Usage, "grid has no lattice structure");
  std::vector<int> idx(static_cast<std::size_t>(dim_));
  std::int64_t rem = flat_[i];
  for (int a = dim_ - 1; a >= 0; --a) {
    idx[a] = static_cast<int>(rem % lattice_->nodes[a]);
    rem /= lattice_->nodes[a];
  }
  return idx;
}

std::vector<double> grid_sum(const Grid& grid, std::size_t accumulators,
                             const std::function<void(std::span<const double>, double, std::span<double>)>& term) {
  return block_sum(grid.size(), accumulators, [&](std::size_t i, std::span<double> out) {
    term(grid.node(i), grid.weight(i), out);
  });
}

double integrate(const Grid& grid, const ScalarField& field) {
  require(field.dim() == grid.dim(), ErrorKind::Usage, "field dimension does not match grid");
  return grid_sum(grid, 1, [&](std::span<const double> p, double w, std::span<double> out) {
    const double v = field(p);
    require(std::isfinite(v), ErrorKind::Numeric, "non-finite integrand at a grid node");
    out[0] += v * w;
  })[0];
}

}  // namespace hardylab
