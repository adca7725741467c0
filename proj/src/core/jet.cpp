#include "hardylab/core/jet.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>

#include "hardylab/core/error.hpp"

namespace hardylab {

namespace {

using Alpha = std::array<std::int8_t, kMaxJetDim>;

struct Triple {
  std::uint32_t a, b, out;
};

struct Table {
  int dim = 0;
  std::vector<Alpha> alpha;
  std::vector<int> degree;
  std::vector<std::size_t> size_by_order;    // C(dim + k, k)
  std::vector<std::vector<std::int32_t>> shift;  // index of alpha + e_i
  std::vector<Triple> products;              // sorted by degree of out
  std::vector<std::size_t> product_count;    // products with deg(out) <= k
  std::vector<std::vector<std::int32_t>> second;  // index of e_i + e_j
};

void enumerate_degree(int dim, int deg, int pos, Alpha& cur, std::vector<Alpha>& out) {
  if (pos == dim - 1) {
    cur[pos] = static_cast<std::int8_t>(deg);
    out.push_back(cur);
    cur[pos] = 0;
    return;
  }
  for (int v = deg; v >= 0; --v) {
    cur[pos] = static_cast<std::int8_t>(v);
    enumerate_degree(dim, deg - v, pos + 1, cur, out);
  }
  cur[pos] = 0;
}

std::unique_ptr<Table> build_table(int dim) {
  auto t = std::make_unique<Table>();
  t->dim = dim;
  std::map<Alpha, std::int32_t> lookup;
  for (int deg = 0; deg <= kMaxJetOrder; ++deg) {
    Alpha cur{};
    std::vector<Alpha> level;
    enumerate_degree(dim, deg, 0, cur, level);
    for (const auto& a : level) {
      lookup.emplace(a, static_cast<std::int32_t>(t->alpha.size()));
      t->alpha.push_back(a);
      t->degree.push_back(deg);
    }
    t->size_by_order.push_back(t->alpha.size());
  }
  const std::size_t n = t->alpha.size();
  t->shift.assign(dim, std::vector<std::int32_t>(n, -1));
  for (int i = 0; i < dim; ++i) {
    for (std::size_t idx = 0; idx < n; ++idx) {
      Alpha a = t->alpha[idx];
      ++a[i];
      auto it = lookup.find(a);
      if (it != lookup.end()) t->shift[i][idx] = it->second;
    }
  }
  t->second.assign(dim, std::vector<std::int32_t>(dim, -1));
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) {
      Alpha a{};
      ++a[i];
      ++a[j];
      t->second[i][j] = lookup.at(a);
    }
  }
  for (std::size_t ia = 0; ia < n; ++ia) {
    for (std::size_t ib = 0; ib < n; ++ib) {
      if (t->degree[ia] + t->degree[ib] > kMaxJetOrder) continue;
      Alpha s{};
      for (int k = 0; k < dim; ++k) s[k] = static_cast<std::int8_t>(t->alpha[ia][k] + t->alpha[ib][k]);
      t->products.push_back({static_cast<std::uint32_t>(ia), static_cast<std::uint32_t>(ib),
                             static_cast<std::uint32_t>(lookup.at(s))});
    }
  }
  std::stable_sort(t->products.begin(), t->products.end(), [&](const Triple& x, const Triple& y) {
    return t->degree[x.out] < t->degree[y.out];
  });
  t->product_count.assign(kMaxJetOrder + 1, 0);
  for (int k = 0; k <= kMaxJetOrder; ++k) {
    t->product_count[k] = static_cast<std::size_t>(
        std::partition_point(t->products.begin(), t->products.end(),
                             [&](const Triple& x) { return t->degree[x.out] <= k; }) -
        t->products.begin());
  }
  return t;
}

const Table& table(int dim) {
  static const auto tables = [] {
    std::array<std::unique_ptr<Table>, kMaxJetDim + 1> t;
    for (int d = 1; d <= kMaxJetDim; ++d) t[d] = build_table(d);
    return t;
  }();
  if (dim < 1 || dim > kMaxJetDim)
    fail(ErrorKind::Usage, "jet dimension must be in [1, " + std::to_string(kMaxJetDim) + "]");
  return *tables[dim];
}

void check_same_dim(const Jet& a, const Jet& b) {
  if (a.dim() != b.dim()) fail(ErrorKind::Usage, "jet dimension mismatch");
}

}  // namespace

std::size_t jet_size(int dim, int order) {
  if (order < 0 || order > kMaxJetOrder)
    fail(ErrorKind::Usage, "jet order must be in [0, " + std::to_string(kMaxJetOrder) + "]");
  return table(dim).size_by_order[order];
}

std::size_t jet_index(int dim, std::span<const int> alpha) {
  const Table& t = table(dim);
  require(static_cast<int>(alpha.size()) == dim, ErrorKind::Usage, "multi-index length mismatch");
  std::size_t idx = 0;
  for (int i = 0; i < dim; ++i) {
    for (int r = 0; r < alpha[i]; ++r) {
      auto next = t.shift[i][idx];
      require(next >= 0, ErrorKind::Usage, "multi-index exceeds maximum jet order");
      idx = static_cast<std::size_t>(next);
    }
  }
  return idx;
}

Jet::Jet(int dim, int order) : dim_(dim), order_(order), c_(jet_size(dim, order), 0.0) {}

Jet Jet::constant(int dim, int order, double value) {
  Jet j(dim, order);
  j.c_[0] = value;
  return j;
}

Jet Jet::variable(int dim, int order, double value, int axis) {
  Jet j(dim, order);
  j.c_[0] = value;
  if (order >= 1) j.c_[table(dim).shift[axis][0]] = 1.0;
  return j;
}

double Jet::d(int i) const {
  require(order_ >= 1, ErrorKind::Usage, "first partial requested from an order-0 jet");
  return c_[table(dim_).shift[i][0]];
}

double Jet::d2(int i, int j) const {
  require(order_ >= 2, ErrorKind::Usage, "second partial requested from a jet of order < 2");
  const double c = c_[table(dim_).second[i][j]];
  return i == j ? 2.0 * c : c;
}

Jet Jet::partial(int axis) const {
  require(order_ >= 1, ErrorKind::Usage, "partial of an order-0 jet");
  const Table& t = table(dim_);
  Jet r(dim_, order_ - 1);
  const auto& sh = t.shift[axis];
  for (std::size_t idx = 0; idx < r.c_.size(); ++idx) {
    r.c_[idx] = (t.alpha[idx][axis] + 1) * c_[sh[idx]];
  }
  return r;
}

Jet Jet::truncated(int order) const {
  if (order >= order_) return *this;
  Jet r = *this;
  r.order_ = order;
  r.c_.resize(jet_size(dim_, order));
  return r;
}

bool Jet::all_finite() const noexcept {
  return std::all_of(c_.begin(), c_.end(), [](double v) { return std::isfinite(v); });
}

bool Jet::is_zero() const noexcept {
  return std::all_of(c_.begin(), c_.end(), [](double v) { return v == 0.0; });
}

Jet& Jet::operator+=(const Jet& o) {
  check_same_dim(*this, o);
  if (o.order_ < order_) *this = truncated(o.order_);
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
  return *this;
}

Jet& Jet::operator-=(const Jet& o) {
  check_same_dim(*this, o);
  if (o.order_ < order_) *this = truncated(o.order_);
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
  return *this;
}

Jet& Jet::operator*=(double s) {
  for (auto& v : c_) v *= s;
  return *this;
}

Jet& Jet::operator*=(const Jet& o) {
  *this = *this * o;
  return *this;
}

Jet operator*(const Jet& a, const Jet& b) {
  check_same_dim(a, b);
  const int order = std::min(a.order_, b.order_);
  const Table& t = table(a.dim_);
  Jet r(a.dim_, order);
  const std::size_t n = t.product_count[order];
  const double* pa = a.c_.data();
  const double* pb = b.c_.data();
  double* pr = r.c_.data();
  for (std::size_t i = 0; i < n; ++i) {
    const Triple& tr = t.products[i];
    pr[tr.out] += pa[tr.a] * pb[tr.b];
  }
  return r;
}

Jet operator/(const Jet& a, const Jet& b) { return a * pow(b, -1.0); }

Jet operator-(double s, const Jet& a) {
  Jet r = -a;
  r += s;
  return r;
}

Jet operator/(double s, const Jet& a) { return pow(a, -1.0) * s; }

Jet operator-(const Jet& a) {
  Jet r = a;
  r *= -1.0;
  return r;
}

Jet compose(const Jet& u, std::span<const double> derivs) {
  const int k = u.order();
  Jet d = u;
  d.coeff(0) = 0.0;
  auto taylor = [&](int n) {
    if (n >= static_cast<int>(derivs.size())) return 0.0;
    double fact = 1.0;
    for (int i = 2; i <= n; ++i) fact *= i;
    return derivs[n] / fact;
  };
  Jet r = Jet::constant(u.dim(), k, taylor(k));
  for (int n = k - 1; n >= 0; --n) {
    r = r * d;
    r += taylor(n);
  }
  return r;
}

Jet pow(const Jet& u, double p) {
  const int k = u.order();
  std::array<double, kMaxJetOrder + 1> g{};
  const double u0 = u.value();
  double falling = 1.0;
  for (int n = 0; n <= k; ++n) {
    g[n] = falling == 0.0 ? 0.0 : falling * std::pow(u0, p - n);
    falling *= (p - n);
  }
  return compose(u, std::span<const double>(g.data(), k + 1));
}

Jet sqrt(const Jet& u) { return pow(u, 0.5); }

Jet exp(const Jet& u) {
  std::array<double, kMaxJetOrder + 1> g{};
  g.fill(std::exp(u.value()));
  return compose(u, std::span<const double>(g.data(), u.order() + 1));
}

Jet log(const Jet& u) {
  const int k = u.order();
  std::array<double, kMaxJetOrder + 1> g{};
  const double u0 = u.value();
  g[0] = std::log(u0);
  double fact = 1.0;  // (n-1)!
  for (int n = 1; n <= k; ++n) {
    if (n > 1) fact *= (n - 1);
    g[n] = ((n % 2 == 1) ? 1.0 : -1.0) * fact / std::pow(u0, n);
  }
  return compose(u, std::span<const double>(g.data(), k + 1));
}

Jet sin(const Jet& u) {
  std::array<double, kMaxJetOrder + 1> g{};
  const double s = std::sin(u.value()), c = std::cos(u.value());
  const double cyc[4] = {s, c, -s, -c};
  for (int n = 0; n <= u.order(); ++n) g[n] = cyc[n % 4];
  return compose(u, std::span<const double>(g.data(), u.order() + 1));
}

Jet cos(const Jet& u) {
  std::array<double, kMaxJetOrder + 1> g{};
  const double s = std::sin(u.value()), c = std::cos(u.value());
  const double cyc[4] = {c, -s, -c, s};
  for (int n = 0; n <= u.order(); ++n) g[n] = cyc[n % 4];
  return compose(u, std::span<const double>(g.data(), u.order() + 1));
}

Jet abs(const Jet& u) { return u.value() < 0.0 ? -u : u; }

Jet square(const Jet& u) { return u * u; }

}  // namespace hardylab
