#include "hardylab/test_functions.hpp"

#include <cmath>
#include <sstream>

#include "hardylab/core/error.hpp"

namespace hardylab {

namespace {

// p(v) = sum c_k v^k for |v| < 1 with v = shift + scale u; constant outside.
ScalarMap clamped_polynomial(std::string name, std::vector<double> c, double shift, double scale, double below,
                             double above) {
  ScalarMap m;
  m.name = std::move(name);
  m.derivs = [c = std::move(c), shift, scale, below, above](double u, int n, std::span<double> out) {
    for (int k = 0; k <= n; ++k) out[k] = 0.0;
    const double v = shift + scale * u;
    if (v <= -1.0) {
      out[0] = below;
      return;
    }
    if (v >= 1.0) {
      out[0] = above;
      return;
    }
    std::vector<double> d = c;
    double chain = 1.0;
    for (int k = 0; k <= n && !d.empty(); ++k) {
      double acc = 0.0;
      for (std::size_t i = d.size(); i-- > 0;) acc = acc * v + d[i];
      out[k] = acc * chain;
      for (std::size_t i = 1; i < d.size(); ++i) d[i - 1] = static_cast<double>(i) * d[i];
      d.pop_back();
      chain *= scale;
    }
  };
  return m;
}

const std::vector<double> kBump = {1.0, 0.0, -3.0, 0.0, 3.0, 0.0, -1.0};
// (35/32) (v - v^3 + 3v^5/5 - v^7/7 + 16/35)
const std::vector<double> kStep = {0.5, 35.0 / 32.0, 0.0, -35.0 / 32.0, 0.0, 21.0 / 32.0, 0.0, -5.0 / 32.0};

ScalarMap bump_on(double a, double b) {
  return clamped_polynomial("bump", kBump, -(a + b) / (b - a), 2.0 / (b - a), 0.0, 0.0);
}

ScalarMap step_on(double a, double b, bool rising) {
  std::vector<double> c = kStep;
  if (!rising) {
    for (double& v : c) v = -v;
    c[0] += 1.0;
  }
  return clamped_polynomial("step", c, -(a + b) / (b - a), 2.0 / (b - a), rising ? 0.0 : 1.0, rising ? 1.0 : 0.0);
}

void require_interval(double a, double b, const char* what) {
  require(std::isfinite(a) && std::isfinite(b) && a < b, ErrorKind::Usage,
          std::string(what) + ": support needs finite a < b");
}

}  // namespace

ScalarMap bump_profile() { return bump_on(-1.0, 1.0); }
ScalarMap smooth_step() { return step_on(0.0, 1.0, true); }

ScalarField radial_bump(const ScalarField& psi, double a, double b) {
  require_interval(a, b, "radial-bump");
  return compose(bump_on(a, b), psi);
}

ScalarField tensor_bump(const std::vector<double>& lo, const std::vector<double>& hi) {
  require(!lo.empty() && lo.size() == hi.size(), ErrorKind::Usage, "tensor-bump: box bounds dimension mismatch");
  const int dim = static_cast<int>(lo.size());
  ScalarField f;
  for (int i = 0; i < dim; ++i) {
    require_interval(lo[i], hi[i], "tensor-bump");
    ScalarField factor = compose(bump_on(lo[i], hi[i]), coordinate(dim, i));
    f = f.valid() ? f * factor : factor;
  }
  return f;
}

ScalarField smoothed_power(const ScalarField& psi, double exponent, double a, double b, double ramp) {
  require(a > 0.0, ErrorKind::Usage, "smoothed-power: a must be positive");
  require(ramp > 1.0 && a * ramp <= b / ramp, ErrorKind::Usage, "smoothed-power: need ramp > 1 and a ramp <= b / ramp");
  // Ramps are steps in log psi, so a ramp costs the same energy at every scale.
  const double la = std::log(a), lb = std::log(b), lr = std::log(ramp);
  const ScalarMap up = step_on(la, la + lr, true);
  const ScalarMap down = step_on(lb - lr, lb, false);
  ScalarMap m;
  m.name = "smoothed-power";
  m.derivs = [up, down, exponent, a, b](double u, int n, std::span<double> out) {
    for (int k = 0; k <= n; ++k) out[k] = 0.0;
    if (u <= a || u >= b) return;
    const Jet t = Jet::variable(1, n, u, 0);
    const Jet lt = log(t);
    std::vector<double> U(n + 1), D(n + 1);
    up.derivs(lt.value(), n, U);
    down.derivs(lt.value(), n, D);
    const Jet j = pow(t, exponent) * compose(lt, U) * compose(lt, D);
    double fact = 1.0;
    for (int k = 0; k <= n; ++k) {
      if (k > 0) fact *= k;
      out[k] = j.coeff(static_cast<std::size_t>(k)) * fact;
    }
  };
  return compose(m, psi);
}

ScalarField make_test_function(const std::string& kind, const Weight& psi, const TestFunctionParams& p) {
  if (kind == "radial-bump") return radial_bump(psi.psi, p.a, p.b);
  if (kind == "tensor-bump") return tensor_bump(p.lo, p.hi);
  if (kind == "smoothed-power")
    return smoothed_power(psi.psi, -(psi.claimed_Q + p.alpha - 2.0) / 2.0 + p.eps, p.a, p.b, p.ramp);
  fail(ErrorKind::Usage, "unknown test function kind '" + kind + "'");
}

CorpusRng::CorpusRng(std::uint64_t seed) : engine_(seed) {}

double CorpusRng::uniform() {
  // 53 random mantissa bits; std::uniform_real_distribution is not portable.
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::vector<CorpusMember> make_corpus(const CorpusSpec& spec, const Grid& grid) {
  require(spec.psi_lo < spec.psi_hi, ErrorKind::Usage, "corpus: psi range must be nonempty");
  require(spec.lo.size() == spec.hi.size() && static_cast<int>(spec.lo.size()) == grid.dim(), ErrorKind::Usage,
          "corpus: box dimension does not match grid");
  CorpusRng rng(spec.seed);
  std::vector<CorpusMember> out;
  const double span = spec.psi_hi - spec.psi_lo;
  const int dim = grid.dim();
  int attempts = 0;
  while (out.size() < spec.size) {
    require(++attempts <= static_cast<int>(50 * spec.size + 50), ErrorKind::Degenerate,
            "corpus: could not draw functions that are nonzero on the grid");
    const double a = spec.psi_lo + 0.5 * span * rng.uniform();
    const double b = a + (spec.psi_hi - a) * rng.uniform(0.4, 1.0);
    std::vector<double> lo(dim), hi(dim);
    for (int i = 0; i < dim; ++i) {
      const double w = spec.hi[i] - spec.lo[i];
      lo[i] = spec.lo[i] + 0.4 * w * rng.uniform();
      hi[i] = spec.hi[i] - 0.4 * w * rng.uniform();
    }
    const ScalarField f = radial_bump(spec.psi.psi, a, b) * tensor_bump(lo, hi);
    bool nonzero = false;
    for (std::size_t i = 0; i < grid.size() && !nonzero; ++i) {
      const auto p = grid.node(i);
      if (f.in_domain(p) && f(p) != 0.0) nonzero = true;
    }
    if (!nonzero) continue;
    std::ostringstream label;
    label.precision(6);
    label << "bump(psi in [" << a << ", " << b << "]) x box[";
    for (int i = 0; i < dim; ++i) label << (i ? "; " : "") << lo[i] << ".." << hi[i];
    label << "]";
    out.push_back({label.str(), std::move(f)});
  }
  return out;
}

}  // namespace hardylab
