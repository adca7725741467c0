#include "hardylab/catalog.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "hardylab/core/error.hpp"

namespace hardylab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

VectorField field_of(int dim, std::vector<std::pair<int, ScalarField>> terms) {
  VectorField X = VectorField::zero(dim);
  for (auto& [axis, c] : terms) X.coeffs[axis] = std::move(c);
  return X;
}

ScalarField sum_of_squares(int dim, const std::vector<int>& axes) {
  ScalarField s = square(coordinate(dim, axes.front()));
  for (std::size_t i = 1; i < axes.size(); ++i) s = s + square(coordinate(dim, axes[i]));
  return s;
}

double norm_over(std::span<const double> p, const std::vector<int>& axes) {
  double s = 0.0;
  for (int a : axes) s += p[a] * p[a];
  return std::sqrt(s);
}

std::vector<int> all_axes(int dim) {
  std::vector<int> a(static_cast<std::size_t>(dim));
  for (int i = 0; i < dim; ++i) a[i] = i;
  return a;
}

void require_dim(int m, int lo, const char* name) {
  require(m >= lo && m <= kMaxJetDim, ErrorKind::Usage,
          std::string(name) + ": dimension parameter out of range");
}

GeometrySpec euclidean_like(std::string name, int m, DomainMask domain) {
  GeometrySpec g;
  g.name = std::move(name);
  g.dim = m;
  g.diffusion.name = g.name;
  g.diffusion.dim = m;
  for (int i = 0; i < m; ++i) g.diffusion.frame.push_back(VectorField::partial(m, i));
  g.diffusion.drift = VectorField::zero(m);
  g.diffusion.measure_density = constant_field(m, 1.0);
  g.diffusion.domain = std::move(domain);
  g.stratum.assign(static_cast<std::size_t>(m), 0);
  g.Q_hom = m;
  return g;
}

double facet_distance(const Facet& f, std::span<const double> p) {
  double dot = 0.0, nn = 0.0;
  for (std::size_t i = 0; i < f.normal.size(); ++i) {
    dot += f.normal[i] * p[i];
    nn += f.normal[i] * f.normal[i];
  }
  return (f.offset - dot) / std::sqrt(nn);
}

GeometrySpec convex_domain(int m, std::vector<Facet> facets) {
  if (facets.empty()) {
    for (int i = 0; i < m; ++i) {
      Facet lo{std::vector<double>(static_cast<std::size_t>(m), 0.0), 0.0};
      lo.normal[i] = -1.0;
      Facet hi{std::vector<double>(static_cast<std::size_t>(m), 0.0), 1.0};
      hi.normal[i] = 1.0;
      facets.push_back(lo);
      facets.push_back(hi);
    }
  }
  require(facets.size() >= static_cast<std::size_t>(m) + 1, ErrorKind::Usage,
          "convex-domain: a bounded polytope needs at least m + 1 facets");
  for (const auto& f : facets) {
    require(static_cast<int>(f.normal.size()) == m, ErrorKind::Usage, "convex-domain: facet normal has wrong length");
    double nn = 0.0;
    for (double v : f.normal) nn += v * v;
    require(nn > 0.0 && std::isfinite(f.offset), ErrorKind::Usage, "convex-domain: degenerate facet");
  }
  DomainMask inside = [facets](std::span<const double> p) {
    for (const auto& f : facets)
      if (facet_distance(f, p) <= 0.0) return false;
    return true;
  };
  GeometrySpec g = euclidean_like("convex-domain(" + std::to_string(m) + ")", m, inside);
  g.facets = std::move(facets);
  return g;
}

}  // namespace

std::vector<int> GeometrySpec::horizontal() const {
  std::vector<int> h;
  for (int i = 0; i < static_cast<int>(stratum.size()); ++i)
    if (stratum[i] == 0) h.push_back(i);
  return h;
}

double GeometrySpec::homogeneous_dimension() const {
  double q = 0.0;
  for (int s : stratum) q += s + 1;
  return q;
}

GeometrySpec make_geometry(std::string_view name, const GeometryParams& params) {
  const int m = params.m;
  if (name == "euclidean") {
    require_dim(m, 1, "euclidean");
    return euclidean_like("euclidean(" + std::to_string(m) + ")", m, {});
  }
  if (name == "halfspace-euclidean") {
    require_dim(m, 1, "halfspace-euclidean");
    return euclidean_like("halfspace-euclidean(" + std::to_string(m) + ")", m,
                          [m](std::span<const double> p) { return p[m - 1] > 0.0; });
  }
  if (name == "convex-domain") {
    require_dim(m, 1, "convex-domain");
    return convex_domain(m, params.facets);
  }
  if (name == "heisenberg") {
    require(m >= 1 && 2 * m + 1 <= kMaxJetDim, ErrorKind::Usage, "heisenberg: m out of range");
    const int dim = 2 * m + 1, z = 2 * m;
    GeometrySpec g;
    g.name = "heisenberg(" + std::to_string(m) + ")";
    g.dim = dim;
    auto& d = g.diffusion;
    d.name = g.name;
    d.dim = dim;
    for (int i = 0; i < m; ++i) {
      d.frame.push_back(field_of(dim, {{i, constant_field(dim, 1.0)}, {z, -0.5 * coordinate(dim, m + i)}}));
      d.frame.push_back(field_of(dim, {{m + i, constant_field(dim, 1.0)}, {z, 0.5 * coordinate(dim, i)}}));
    }
    d.drift = VectorField::zero(dim);
    d.measure_density = constant_field(dim, 1.0);
    g.stratum.assign(static_cast<std::size_t>(dim), 0);
    g.stratum[z] = 1;
    g.Q_hom = 2 * m + 2;
    return g;
  }
  if (name == "hyperbolic") {
    require_dim(m, 2, "hyperbolic");
    GeometrySpec g;
    g.name = "hyperbolic(" + std::to_string(m) + ")";
    g.dim = m;
    auto& d = g.diffusion;
    d.name = g.name;
    d.dim = m;
    const ScalarField h = coordinate(m, m - 1);
    for (int i = 0; i < m; ++i) d.frame.push_back(field_of(m, {{i, h}}));
    d.drift = field_of(m, {{m - 1, -static_cast<double>(m - 1) * h}});
    DomainMask upper = [m](std::span<const double> p) { return p[m - 1] > 0.0; };
    d.measure_density = pow(h, -static_cast<double>(m)).restricted(upper);
    d.domain = upper;
    return g;
  }
  if (name == "grushin") {
    require(m >= 1 && m + 1 <= kMaxJetDim, ErrorKind::Usage, "grushin: n out of range");
    const int dim = m + 1, y = m;
    GeometrySpec g;
    g.name = "grushin(" + std::to_string(m) + ")";
    g.dim = dim;
    auto& d = g.diffusion;
    d.name = g.name;
    d.dim = dim;
    for (int i = 0; i < m; ++i) d.frame.push_back(VectorField::partial(dim, i));
    for (int i = 0; i < m; ++i) d.frame.push_back(field_of(dim, {{y, coordinate(dim, i)}}));
    d.drift = VectorField::zero(dim);
    d.measure_density = constant_field(dim, 1.0);
    g.stratum.assign(static_cast<std::size_t>(dim), 0);
    g.stratum[y] = 1;
    g.Q_hom = m + 2;
    return g;
  }
  if (name == "radial-euclidean") {
    require_dim(m, 1, "radial-euclidean");
    // Radial part of the Laplacian on R^m: d_r^2 + (m-1)/r d_r against r^{m-1} dr.
    GeometrySpec g;
    g.name = "radial-euclidean(" + std::to_string(m) + ")";
    g.dim = 1;
    auto& d = g.diffusion;
    d.name = g.name;
    d.dim = 1;
    const ScalarField r = coordinate(1, 0);
    DomainMask positive = [](std::span<const double> p) { return p[0] > 0.0; };
    d.frame.push_back(VectorField::partial(1, 0));
    d.drift = field_of(1, {{0, static_cast<double>(m - 1) * pow(r, -1.0)}});
    d.measure_density = (m == 1 ? constant_field(1, 1.0) : pow(r, m - 1.0)).restricted(positive);
    d.domain = positive;
    g.radial_ambient = m;
    return g;
  }
  fail(ErrorKind::Usage, "unknown geometry '" + std::string(name) + "'");
}

const char* to_string(Exactness e) {
  switch (e) {
    case Exactness::Exact: return "exact";
    case Exactness::LowerBound: return "lower-bound";
    case Exactness::UpperBound: return "upper-bound";
    case Exactness::Unclaimed: return "unclaimed";
  }
  return "?";
}

const char* to_string(Branch b) {
  switch (b) {
    case Branch::Plain: return "plain";
    case Branch::LogLower: return "log-lower";
    case Branch::LogUpper: return "log-upper";
  }
  return "?";
}

namespace {

bool is_family(const GeometrySpec& geo, std::string_view family) {
  return geo.name.compare(0, family.size(), family) == 0 && geo.name.size() > family.size() &&
         geo.name[family.size()] == '(';
}

Weight weight_koranyi(const GeometrySpec& geo) {
  const int dim = geo.dim, z = dim - 1;
  std::vector<int> hz(static_cast<std::size_t>(dim - 1));
  for (int i = 0; i < dim - 1; ++i) hz[i] = i;
  const ScalarField x0sq = sum_of_squares(dim, hz);
  Weight w;
  w.name = "koranyi-gauge";
  w.psi = pow(square(x0sq) + 16.0 * square(coordinate(dim, z)), 0.25);
  w.claimed_Q = geo.homogeneous_dimension();
  w.exactness = Exactness::Exact;
  w.singular_gap = [dim](std::span<const double> p) { return norm_over(p, all_axes(dim)); };
  w.singular_set = "origin";
  return w;
}

}  // namespace

Weight make_weight(const GeometrySpec& geo, std::string_view name, const WeightParams& params) {
  const int dim = geo.dim;
  const bool euclid_family = is_family(geo, "euclidean") || is_family(geo, "halfspace-euclidean") ||
                             is_family(geo, "convex-domain");
  Weight w;
  w.name = std::string(name);
  w.singular_gap = [](std::span<const double>) { return kInf; };
  w.singular_set = "none";

  if (name == "euclid-norm") {
    if (is_family(geo, "radial-euclidean")) {
      w.psi = coordinate(1, 0);
      w.claimed_Q = geo.radial_ambient;
      w.exactness = Exactness::Exact;
      w.singular_gap = [](std::span<const double> p) { return p[0]; };
      w.singular_set = "origin";
      return w;
    }
    require(euclid_family, ErrorKind::Usage, "euclid-norm is defined on euclidean geometries only");
    w.psi = sqrt(sum_of_squares(dim, all_axes(dim)));
    w.claimed_Q = dim;
    w.exactness = Exactness::Exact;
    w.singular_gap = [dim](std::span<const double> p) { return norm_over(p, all_axes(dim)); };
    w.singular_set = "origin";
    return w;
  }
  if (name == "horizontal-norm") {
    require(geo.stratified(), ErrorKind::Usage, "horizontal-norm needs a stratified geometry");
    const auto horiz = geo.horizontal();
    std::vector<int> sub = params.coords.empty() ? horiz : params.coords;
    for (int c : sub)
      require(std::find(horiz.begin(), horiz.end(), c) != horiz.end(), ErrorKind::Usage,
              "horizontal-norm: subcoordinate is not in the first stratum");
    w.psi = sqrt(sum_of_squares(dim, sub));
    w.claimed_Q = static_cast<double>(sub.size());
    w.exactness = Exactness::Exact;
    w.singular_gap = [sub](std::span<const double> p) { return norm_over(p, sub); };
    w.singular_set = "zero locus of the horizontal subnorm";
    return w;
  }
  if (name == "koranyi-gauge") {
    require(is_family(geo, "heisenberg"), ErrorKind::Usage, "koranyi-gauge is defined on heisenberg(m) only");
    return weight_koranyi(geo);
  }
  if (name == "coordinate") {
    const int axis = params.axis < 0 ? dim - 1 : params.axis;
    require(axis < dim, ErrorKind::Usage, "coordinate: axis out of range");
    require(!(is_family(geo, "hyperbolic") && axis == dim - 1), ErrorKind::Usage,
            "coordinate: use hyperbolic-height for the vertical coordinate of hyperbolic(m)");
    require(!is_family(geo, "radial-euclidean"), ErrorKind::Usage,
            "coordinate: use euclid-norm on radial-euclidean(m)");
    w.name = "coordinate(" + std::to_string(axis) + ")";
    w.psi = abs(coordinate(dim, axis));
    w.claimed_Q = 1.0;
    w.exactness = Exactness::Exact;
    w.singular_gap = [axis](std::span<const double> p) { return std::fabs(p[axis]); };
    w.singular_set = "coordinate hyperplane";
    return w;
  }
  if (name == "hyperbolic-height") {
    require(is_family(geo, "hyperbolic"), ErrorKind::Usage, "hyperbolic-height is defined on hyperbolic(m) only");
    w.psi = coordinate(dim, dim - 1);
    w.claimed_Q = 3.0 - dim;
    w.exactness = Exactness::Exact;
    return w;
  }
  if (name == "grushin-gauge") {
    require(is_family(geo, "grushin"), ErrorKind::Usage, "grushin-gauge is defined on grushin(n) only");
    std::vector<int> xs(static_cast<std::size_t>(dim - 1));
    for (int i = 0; i < dim - 1; ++i) xs[i] = i;
    w.psi = pow(square(sum_of_squares(dim, xs)) + 4.0 * square(coordinate(dim, dim - 1)), 0.25);
    w.claimed_Q = dim + 1;  // n + 2
    w.exactness = Exactness::Exact;
    w.singular_gap = [dim](std::span<const double> p) { return norm_over(p, all_axes(dim)); };
    w.singular_set = "origin";
    return w;
  }
  if (name == "boundary-distance") {
    require(!geo.facets.empty(), ErrorKind::Usage, "boundary-distance is defined on convex-domain only");
    const auto facets = geo.facets;
    w.psi = ScalarField(
        dim,
        [facets, dim](std::span<const double> p, int k) {
          std::size_t best = 0;
          double dmin = kInf;
          for (std::size_t i = 0; i < facets.size(); ++i) {
            const double d = facet_distance(facets[i], p);
            if (d < dmin) dmin = d, best = i;
          }
          const auto& f = facets[best];
          double nn = 0.0;
          for (double v : f.normal) nn += v * v;
          const double s = 1.0 / std::sqrt(nn);
          Jet j = Jet::constant(dim, k, dmin);
          if (k >= 1) {
            for (int i = 0; i < dim; ++i) {
              std::vector<int> alpha(static_cast<std::size_t>(dim), 0);
              alpha[i] = 1;
              j.coeff(jet_index(dim, alpha)) = -f.normal[i] * s;
            }
          }
          return j;
        },
        geo.diffusion.domain);
    w.claimed_Q = 2.0;
    w.exactness = Exactness::UpperBound;
    // Non-smooth where the two nearest facets tie.
    w.singular_gap = [facets](std::span<const double> p) {
      double d1 = kInf, d2 = kInf;
      for (const auto& f : facets) {
        const double d = facet_distance(f, p);
        if (d < d1) d2 = d1, d1 = d;
        else if (d < d2) d2 = d;
      }
      return (d2 - d1) / std::sqrt(2.0);
    };
    w.singular_set = "ridge where facet distances tie";
    return w;
  }
  if (name == "shifted") {
    require(is_family(geo, "heisenberg"), ErrorKind::Usage, "shifted is defined on heisenberg(m) only");
    require(params.eps > 0.0, ErrorKind::Usage, "shifted: eps must be positive");
    const auto horiz = geo.horizontal();
    const Weight N = weight_koranyi(geo);
    w.name = "shifted";
    w.psi = sqrt(sum_of_squares(dim, horiz)) + params.eps * N.psi;
    w.claimed_Q = static_cast<double>(horiz.size());
    w.exactness = Exactness::LowerBound;
    w.singular_gap = [horiz](std::span<const double> p) { return norm_over(p, horiz); };
    w.singular_set = "zero locus of the horizontal norm";
    return w;
  }
  if (name == "log-of" || name == "power-of") {
    require(!params.base.empty() && params.base != "log-of" && params.base != "power-of", ErrorKind::Usage,
            std::string(name) + ": needs a plain base weight");
    WeightParams inner = params;
    inner.base.clear();
    const Weight base = make_weight(geo, params.base, inner);
    if (name == "log-of") {
      require(params.branch != Branch::Plain, ErrorKind::Usage, "log-of: branch must be log-lower or log-upper");
      return log_of(base, params.branch);
    }
    return power_of(base, params.exponent);
  }
  fail(ErrorKind::Usage, "unknown weight '" + std::string(name) + "'");
}

Weight log_of(const Weight& base, Branch branch) {
  require(branch != Branch::Plain, ErrorKind::Usage, "log_of needs a log branch");
  const double sign = branch == Branch::LogLower ? -1.0 : 1.0;
  const ScalarField psi = base.psi;
  Weight w;
  w.name = "log-of(" + base.name + ")";
  w.psi = (sign * log(psi)).restricted([psi, sign](std::span<const double> p) {
    const double v = psi(p);
    return sign < 0 ? (v > 0.0 && v < 1.0) : v > 1.0;
  });
  w.claimed_Q = 1.0;
  w.exactness = base.exactness == Exactness::Exact && base.claimed_Q == 2.0 ? Exactness::Exact : Exactness::Unclaimed;
  w.branch = branch;
  w.singular_gap = [g = base.singular_gap, psi](std::span<const double> p) {
    return std::min(g(p), std::fabs(psi(p) - 1.0));
  };
  w.singular_set = base.singular_set + " and {psi = 1}";
  return w;
}

Weight power_of(const Weight& base, double p) {
  require(p != 0.0 && std::isfinite(p), ErrorKind::Usage, "power-of: exponent must be finite and nonzero");
  Weight w = base;
  w.name = "power-of(" + base.name + ")";
  w.psi = pow(base.psi, p);
  w.claimed_Q = (base.claimed_Q - 2.0) / p + 2.0;
  if (p < 0.0) {
    if (base.exactness == Exactness::LowerBound) w.exactness = Exactness::UpperBound;
    else if (base.exactness == Exactness::UpperBound) w.exactness = Exactness::LowerBound;
  }
  return w;
}

Excision excise_near(const Weight& w, double radius) {
  require(radius >= 0.0, ErrorKind::Usage, "excision radius must be nonnegative");
  return [gap = w.singular_gap, radius](std::span<const double> p) { return gap(p) < radius; };
}

Excision excise_any(std::vector<Excision> parts) {
  return [parts = std::move(parts)](std::span<const double> p) {
    for (const auto& e : parts)
      if (e && e(p)) return true;
    return false;
  };
}

Grid make_grid(const GeometrySpec& geo, const Box& box, const Excision& excise) {
  require(box.dim() == geo.dim, ErrorKind::Usage, "box dimension does not match geometry");
  return Grid::lattice(box, geo.diffusion.measure_density, excise, geo.diffusion.domain);
}

double estimate_kappa(const Weight& rho, const Weight& N, const Grid& grid) {
  double best = -kInf;
  std::size_t used = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto p = grid.node(i);
    if (!rho.psi.in_domain(p) || !N.psi.in_domain(p)) continue;
    const double n = N.psi(p);
    if (!(n > 0.0)) continue;
    const double r = rho.psi(p) / n;
    require(std::isfinite(r), ErrorKind::Numeric, "non-finite ratio in kappa estimate");
    best = std::max(best, r);
    ++used;
  }
  require(used > 0, ErrorKind::Precondition, "kappa estimate: no grid node where both weights are defined");
  return best;
}

std::string catalog_listing() {
  std::ostringstream out;
  out << "geometries:\n"
      << "  euclidean(m): Laplacian on R^m, Lebesgue measure, Q(G) = m\n"
      << "  heisenberg(m): X_i = d_x_i - (y_i/2) d_z, Y_i = d_y_i + (x_i/2) d_z, Lebesgue measure, Q(G) = 2m+2\n"
      << "  hyperbolic(m): weight x_m, Q = 3-m; Laplace-Beltrami on the upper half-space, measure x_m^-m\n"
      << "  grushin(n): frame d_x_i and x_i d_y, Lebesgue measure, Q = n+2\n"
      << "  halfspace-euclidean(m): Laplacian on {x_m > 0}\n"
      << "  convex-domain(m): Laplacian on a convex polytope (unit cube by default)\n"
      << "  radial-euclidean(m): d_r^2 + (m-1)/r d_r against r^(m-1) dr\n"
      << "weights:\n"
      << "  euclid-norm: |x|, Q = m (exact)\n"
      << "  horizontal-norm: |x_0'| over n_0 first-stratum coordinates, Q = n_0 (exact)\n"
      << "  koranyi-gauge: Q = Q(G) (exact), N = (|x_0|^4 + 16 z^2)^(1/4)\n"
      << "  coordinate(j): |x_j|, Q = 1 (exact)\n"
      << "  hyperbolic-height: x_m on hyperbolic(m), Q = 3-m (exact)\n"
      << "  grushin-gauge: (|x|^4 + 4 y^2)^(1/4), Q = n+2 (exact)\n"
      << "  boundary-distance: distance to the polytope boundary, Q = 2 (upper bound)\n"
      << "  log-of(psi): -log psi on {psi < 1} or log psi on {psi > 1}, Q = 1\n"
      << "  power-of(psi, p): psi^p, Q = (Q_psi - 2)/p + 2\n"
      << "  shifted: |x_0| + eps N, Q = n_0 + o(eps) (lower bound)\n"
      << "inequalities:\n"
      << "  hardy: int psi^a G(psi)/psi^2 f^2 <= (2/(Q+a-2))^2 int psi^a G(f), Q+a != 2\n"
      << "  log-hardy: int |log psi|^a G(psi)/(psi^2 log^2 psi) f^2 <= (2/(a-1))^2 int |log psi|^a G(f), a != 1\n"
      << "  weighted-log-hardy: both sides of log-hardy times psi^(2-Q), Q != 2, a != 1\n"
      << "  radial: int psi^a G(psi)^2/psi^2 f^2 <= (2/(Q+a-2))^2 int psi^a G(psi,f)^2\n"
      << "  radial-log: int psi^(2-Q) |log psi|^a G(psi)^2/(psi^2 log^2 psi) f^2 <= (2/(a-1))^2 int psi^(2-Q) |log psi|^a G(psi,f)^2\n"
      << "  dilation: int psi^a f^2 <= (2/(Q(G)+a))^2 int psi^a (D f)^2, Q(G)+a != 0\n"
      << "  dilation-log: int psi^-Q(G) |log psi|^a f^2/log^2 psi <= (2/(a-1))^2 int psi^-Q(G) |log psi|^a (D f)^2\n"
      << "  homo-norm: int f^2/rho^2 <= C kappa^2(|x_0|) kappa^2(rho) int G(f), C = (2/(n_0-2))^2 for n_0 >= 3, 4 for n_0 <= 2\n"
      << "  funcineq: int L(W^2) f^2 <= 2 int W^2 G(f) - 2 gamma int W^2 f^2\n"
      << "  funcineqgeneral: (1-b) int W^(1-2b) LW f^2 + (b^2-b+1) int W^(-2b) G(W) f^2 <= int W^(2-2b) G(f)\n";
  return out.str();
}

}  // namespace hardylab
