#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hardylab/core/diffusion.hpp"
#include "hardylab/core/grid.hpp"

namespace hardylab {

/// Half-space {normal . x <= offset} bounding a convex polytope.
struct Facet {
  std::vector<double> normal;
  double offset = 0.0;
};

struct GeometrySpec {
  std::string name;
  int dim = 0;
  Diffusion diffusion;
  /// Stratum index (0-based) of every coordinate; empty without a stratification.
  std::vector<int> stratum;
  std::optional<double> Q_hom;
  std::vector<Facet> facets;  // convex-domain only
  int radial_ambient = 0;     // radial-euclidean(m): the m being modelled

  bool stratified() const noexcept { return !stratum.empty(); }
  /// Coordinates of the first stratum.
  std::vector<int> horizontal() const;
  /// sum_k (k + 1) dim(stratum k).
  double homogeneous_dimension() const;
};

struct GeometryParams {
  int m = 3;                  // dimension parameter (m of euclidean(m), heisenberg(m), n of grushin(n))
  std::vector<Facet> facets;  // convex-domain; unit cube when empty
};

/// euclidean, heisenberg, hyperbolic, grushin, halfspace-euclidean,
/// convex-domain, radial-euclidean.
GeometrySpec make_geometry(std::string_view name, const GeometryParams& params = {});

enum class Exactness { Exact, LowerBound, UpperBound, Unclaimed };
enum class Branch { Plain, LogLower, LogUpper };

const char* to_string(Exactness e);
const char* to_string(Branch b);

struct Weight {
  std::string name;
  ScalarField psi;
  double claimed_Q = 0.0;
  Exactness exactness = Exactness::Unclaimed;
  Branch branch = Branch::Plain;
  /// Distance-like gap to the set where psi is singular (or to {psi = 1} on
  /// log branches). +inf when there is no such set.
  std::function<double(std::span<const double>)> singular_gap;
  std::string singular_set;
};

struct WeightParams {
  std::vector<int> coords;  // horizontal-norm subcoordinates; empty = whole first stratum
  int axis = -1;            // coordinate(j); -1 = last coordinate
  double exponent = 1.0;    // power-of
  double eps = 1e-3;        // shifted
  Branch branch = Branch::Plain;
  std::string base;         // log-of / power-of
};

/// euclid-norm, horizontal-norm, koranyi-gauge, coordinate, hyperbolic-height,
/// grushin-gauge, boundary-distance, log-of, power-of, shifted.
Weight make_weight(const GeometrySpec& geo, std::string_view name, const WeightParams& params = {});

/// Phi = -log psi on {psi < 1} or +log psi on {psi > 1}.
Weight log_of(const Weight& base, Branch branch);
/// psi^p, p != 0. qcond for psi with constant Q gives (Q - 2)/p + 2 for psi^p.
Weight power_of(const Weight& base, double p);

/// Excises nodes within `radius` of the weight's singular set.
Excision excise_near(const Weight& w, double radius);
Excision excise_any(std::vector<Excision> parts);

/// Lattice grid over `box` carrying the geometry's measure and domain.
Grid make_grid(const GeometrySpec& geo, const Box& box, const Excision& excise = {});

/// sup over grid nodes of rho / N: the grid estimate of inf{tau : rho <= tau N}.
double estimate_kappa(const Weight& rho, const Weight& N, const Grid& grid);

/// Deterministic text listing of geometries, weights and inequalities.
std::string catalog_listing();

}  // namespace hardylab
