#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "hardylab/core/field.hpp"

namespace hardylab {

/// Axis-aligned box sampled by a vertex lattice with cells[i] + 1 nodes per axis.
struct Box {
  std::vector<double> lo, hi;
  std::vector<int> cells;

  int dim() const noexcept { return static_cast<int>(lo.size()); }
  double spacing(int axis) const;
  /// Uniform cell count per axis chosen so that every spacing is <= h.
  static Box with_spacing(std::vector<double> lo, std::vector<double> hi, double h);
};

/// Predicate marking nodes to drop (true = excise).
using Excision = std::function<bool(std::span<const double>)>;

/// Quadrature nodes with positive measure weights.
///
/// Lattice grids use trapezoid weights (halved on box faces) times h^m times
/// the measure density at the node; integrands supported away from the box
/// faces see the plain product rule. Radial grids sample r -> r e_0 on
/// log-spaced midpoints and carry the angular factor and r^{m-1} Jacobian in
/// their weights; they are only meaningful for rotation-invariant integrands.
class Grid {
 public:
  struct Lattice {
    std::vector<double> lo;
    std::vector<double> h;
    std::vector<int> nodes;             // nodes per axis
    std::vector<std::int64_t> to_node;  // flattened lattice index -> node or -1

    std::int64_t flatten(std::span<const int> idx) const;
  };

  static Grid lattice(const Box& box, const ScalarField& density, const Excision& excise = {},
                      const DomainMask& mask = {});
  static Grid radial(int ambient_dim, double r_min, double r_max, int nodes, double angular_measure,
                     const ScalarField& density);

  int dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return weights_.size(); }
  bool empty() const noexcept { return weights_.empty(); }
  std::span<const double> node(std::size_t i) const {
    return {coords_.data() + i * static_cast<std::size_t>(dim_), static_cast<std::size_t>(dim_)};
  }
  double weight(std::size_t i) const { return weights_[i]; }
  /// True when the node touches the box boundary or an excised/masked node.
  bool on_rim(std::size_t i) const { return rim_[i] != 0; }
  const std::optional<Lattice>& lattice_info() const noexcept { return lattice_; }
  /// Lattice multi-index of node i (lattice grids only).
  std::vector<int> lattice_index(std::size_t i) const;
  double min_spacing() const noexcept { return min_spacing_; }

 private:
  int dim_ = 0;
  std::vector<double> coords_;
  std::vector<double> weights_;
  std::vector<std::uint8_t> rim_;
  std::vector<std::int64_t> flat_;  // lattice flat index per node
  std::optional<Lattice> lattice_;
  double min_spacing_ = 0.0;
};

/// sum_p field(p) w(p) over retained nodes.
double integrate(const Grid& grid, const ScalarField& field);

/// Deterministic multi-accumulator sum over grid nodes. term(p, w, out) adds
/// the node's weighted contributions into out.
std::vector<double> grid_sum(const Grid& grid, std::size_t accumulators,
                             const std::function<void(std::span<const double>, double,
                                                      std::span<double>)>& term);

}  // namespace hardylab
