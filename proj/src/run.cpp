#include "hardylab/run.hpp"

#include <charconv>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <regex>
#include <set>
#include <sstream>
#include <variant>

#include <json.hpp>

#include "hardylab/catalog.hpp"
#include "hardylab/conditions.hpp"
#include "hardylab/core/error.hpp"
#include "hardylab/core/parallel.hpp"
#include "hardylab/inequalities.hpp"
#include "hardylab/semigroup.hpp"
#include "hardylab/test_functions.hpp"

namespace hardylab {

namespace {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// ---- config access ---------------------------------------------------------

[[noreturn]] void config_error(const std::string& what) { fail(ErrorKind::Usage, "config: " + what); }

void check_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!obj.is_object()) config_error(where + " must be an object");
  for (const auto& [key, _] : obj.items()) {
    bool known = false;
    for (const char* a : allowed) known = known || key == a;
    if (!known) config_error("unknown key '" + key + "' in " + where);
  }
}

double num(const json& obj, const char* key, double fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_number()) config_error(std::string("'") + key + "' must be a number");
  return v.get<double>();
}

double num_required(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key)) config_error(where + " needs '" + key + "'");
  return num(obj, key, 0.0);
}

std::vector<double> vec(const json& obj, const char* key) {
  if (!obj.contains(key)) return {};
  const auto& v = obj.at(key);
  if (!v.is_array()) config_error(std::string("'") + key + "' must be an array of numbers");
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number()) config_error(std::string("'") + key + "' must be an array of numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

std::string str(const json& obj, const char* key, const std::string& fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_string()) config_error(std::string("'") + key + "' must be a string");
  return v.get<std::string>();
}

bool flag(const json& obj, const char* key) {
  if (!obj.contains(key)) return false;
  const auto& v = obj.at(key);
  if (!v.is_boolean()) config_error(std::string("'") + key + "' must be true or false");
  return v.get<bool>();
}

int integer(const json& obj, const char* key, int fallback) {
  const double v = num(obj, key, fallback);
  if (v != std::floor(v) || std::fabs(v) > 1e9) config_error(std::string("'") + key + "' must be an integer");
  return static_cast<int>(v);
}

// "name" or "name(k)".
std::pair<std::string, std::optional<int>> split_call(const std::string& s) {
  static const std::regex pattern(R"(^\s*([a-z][a-z-]*)\s*(?:\(\s*(\d+)\s*\))?\s*$)");
  std::smatch m;
  if (!std::regex_match(s, m, pattern)) config_error("cannot parse name '" + s + "'");
  std::optional<int> arg;
  if (m[2].matched) arg = std::stoi(m[2].str());
  return {m[1].str(), arg};
}

GeometrySpec parse_geometry(const json& g) {
  if (g.is_string()) {
    const auto [name, arg] = split_call(g.get<std::string>());
    GeometryParams p;
    if (arg) p.m = *arg;
    return make_geometry(name, p);
  }
  check_keys(g, {"name", "m", "facets"}, "geometry");
  GeometryParams p;
  p.m = integer(g, "m", p.m);
  if (g.contains("facets")) {
    if (!g.at("facets").is_array()) config_error("'facets' must be an array");
    for (const auto& f : g.at("facets")) {
      check_keys(f, {"normal", "offset"}, "facet");
      p.facets.push_back({vec(f, "normal"), num_required(f, "offset", "facet")});
    }
  }
  const std::string name = str(g, "name", "");
  if (name.empty()) config_error("geometry needs a name");
  return make_geometry(name, p);
}

Branch parse_branch(const std::string& s) {
  if (s == "plain") return Branch::Plain;
  if (s == "log-lower" || s == "lower") return Branch::LogLower;
  if (s == "log-upper" || s == "upper") return Branch::LogUpper;
  config_error("unknown branch '" + s + "' (plain, log-lower, log-upper)");
}

Weight parse_weight(const GeometrySpec& geo, const json& w) {
  if (w.is_string()) {
    const auto [name, arg] = split_call(w.get<std::string>());
    WeightParams p;
    if (arg) {
      if (name != "coordinate") config_error("only coordinate(j) takes an argument in the short form");
      p.axis = *arg;
    }
    return make_weight(geo, name, p);
  }
  check_keys(w, {"name", "coords", "axis", "exponent", "eps", "branch", "base"}, "weight");
  WeightParams p;
  for (double c : vec(w, "coords")) {
    if (c != std::floor(c) || c < 0) config_error("'coords' must hold coordinate indices");
    p.coords.push_back(static_cast<int>(c));
  }
  p.axis = integer(w, "axis", p.axis);
  p.exponent = num(w, "exponent", p.exponent);
  p.eps = num(w, "eps", p.eps);
  p.branch = parse_branch(str(w, "branch", "plain"));
  p.base = str(w, "base", "");
  const std::string name = str(w, "name", "");
  if (name.empty()) config_error("weight needs a name");
  return make_weight(geo, name, p);
}

// ---- report tables ---------------------------------------------------------

using Cell = std::variant<std::string, double, long long>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string render(const Table& t, ReportFormat format) {
  std::string out;
  if (format == ReportFormat::Csv) {
    for (std::size_t i = 0; i < t.columns.size(); ++i) out += (i ? "," : "") + csv_field(t.columns[i]);
    out += '\n';
    for (const auto& row : t.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) {
        if (i) out += ',';
        if (const auto* s = std::get_if<std::string>(&row[i])) out += csv_field(*s);
        else if (const auto* d = std::get_if<double>(&row[i])) out += format_double(*d);
        else out += std::to_string(std::get<long long>(row[i]));
      }
      out += '\n';
    }
    return out;
  }
  for (const auto& row : t.rows) {
    ojson line = ojson::object();
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (const auto* s = std::get_if<std::string>(&row[i])) line[t.columns[i]] = *s;
      else if (const auto* d = std::get_if<double>(&row[i])) line[t.columns[i]] = std::isfinite(*d) ? ojson(*d) : ojson();
      else line[t.columns[i]] = std::get<long long>(row[i]);
    }
    out += line.dump() + '\n';
  }
  return out;
}

ojson finite_or_null(double v) { return std::isfinite(v) ? ojson(v) : ojson(); }

// ---- run context -----------------------------------------------------------

struct Context {
  json cfg;
  std::string op;
  GeometrySpec geo;
  std::optional<Weight> psi;
  json params = json::object();
  json grid = json::object();
  json corpus = json::object();
  std::uint64_t seed = 1;
};

struct Outcome {
  Table table;
  ojson summary = ojson::object();
  bool passed = false;
  std::string verdict;
};

const Weight& need_weight(const Context& c) {
  if (!c.psi) config_error("operation '" + c.op + "' needs a weight");
  return *c.psi;
}

double sphere_area(int m) { return 2.0 * std::pow(std::numbers::pi, 0.5 * m) / std::tgamma(0.5 * m); }

struct Boxes {
  std::vector<double> grid_lo, grid_hi, corpus_lo, corpus_hi;
  double h = 0.0;
};

// Fills whichever of the grid box and the corpus box is missing from the
// other: the grid box is twice the corpus box about its centre, and h gives
// at least 64 nodes across every support dimension.
Boxes resolve_boxes(const Context& c) {
  Boxes b;
  b.grid_lo = vec(c.grid, "lo");
  b.grid_hi = vec(c.grid, "hi");
  b.corpus_lo = vec(c.corpus, "lo");
  b.corpus_hi = vec(c.corpus, "hi");
  const auto dim = static_cast<std::size_t>(c.geo.dim);
  const auto check = [&](const std::vector<double>& lo, const std::vector<double>& hi, const char* what) {
    if (lo.size() != dim || hi.size() != dim)
      config_error(std::string(what) + " lo/hi need " + std::to_string(dim) + " entries for " + c.geo.name);
    for (std::size_t i = 0; i < dim; ++i)
      if (!(lo[i] < hi[i])) config_error(std::string(what) + " needs lo < hi on every axis");
  };
  const bool have_grid = !b.grid_lo.empty() || !b.grid_hi.empty();
  const bool have_corpus = !b.corpus_lo.empty() || !b.corpus_hi.empty();
  if (!have_grid && !have_corpus) config_error("give a grid box (grid.lo/hi) or a corpus box (corpus.lo/hi)");
  if (have_corpus) check(b.corpus_lo, b.corpus_hi, "corpus");
  if (have_grid) check(b.grid_lo, b.grid_hi, "grid");
  if (!have_grid) {
    b.grid_lo.resize(dim);
    b.grid_hi.resize(dim);
    for (std::size_t i = 0; i < dim; ++i) {
      const double mid = 0.5 * (b.corpus_lo[i] + b.corpus_hi[i]), half = b.corpus_hi[i] - b.corpus_lo[i];
      b.grid_lo[i] = mid - half;
      b.grid_hi[i] = mid + half;
    }
  }
  if (!have_corpus) {
    b.corpus_lo.resize(dim);
    b.corpus_hi.resize(dim);
    for (std::size_t i = 0; i < dim; ++i) {
      const double mid = 0.5 * (b.grid_lo[i] + b.grid_hi[i]), quarter = 0.25 * (b.grid_hi[i] - b.grid_lo[i]);
      b.corpus_lo[i] = mid - quarter;
      b.corpus_hi[i] = mid + quarter;
    }
  }
  double extent = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < dim; ++i) extent = std::min(extent, b.corpus_hi[i] - b.corpus_lo[i]);
  b.h = num(c.grid, "h", extent / 63.0);
  if (!(b.h > 0.0)) config_error("grid.h must be positive");
  return b;
}

struct GridSetup {
  Grid grid;
  double h = 0.0;  // lattice spacing, or the largest radial node gap
  Boxes boxes;
};

GridSetup build_grid(const Context& c, double scale) {
  const std::string kind = str(c.grid, "kind", "lattice");
  if (kind == "radial") {
    const double r_min = num_required(c.grid, "r_min", "radial grid");
    const double r_max = num_required(c.grid, "r_max", "radial grid");
    const int nodes = integer(c.grid, "nodes", 2000);
    if (!(0.0 < r_min && r_min < r_max) || nodes < 2) config_error("radial grid needs 0 < r_min < r_max and nodes >= 2");
    double angular = sphere_area(c.geo.dim);
    if (c.geo.name.rfind("halfspace-euclidean", 0) == 0) angular *= 0.5;
    angular = num(c.grid, "angular", angular);
    const int n = static_cast<int>(std::lround(nodes / scale));
    GridSetup s{Grid::radial(c.geo.dim, r_min, r_max, n, angular, c.geo.diffusion.measure_density), 0.0, {}};
    s.h = r_max * (1.0 - std::pow(r_min / r_max, 1.0 / n));
    s.boxes.h = s.h;
    return s;
  }
  if (kind != "lattice") config_error("grid.kind must be lattice or radial");
  Boxes b = resolve_boxes(c);
  b.h *= scale;
  const Box box = Box::with_spacing(b.grid_lo, b.grid_hi, b.h);
  double radius = 0.0;
  if (c.grid.contains("excision")) radius = num(c.grid, "excision", 0.0);
  else if (c.psi && c.psi->singular_set != "none") radius = 3.0 * b.h;
  if (radius < 0.0) config_error("grid.excision must be nonnegative");
  Excision ex;
  if (radius > 0.0) {
    if (!c.psi) config_error("grid.excision needs a weight");
    ex = excise_near(*c.psi, radius);
  }
  Grid g = make_grid(c.geo, box, ex);
  double h = 0.0;
  for (int i = 0; i < box.dim(); ++i) h = std::max(h, box.spacing(i));
  return {std::move(g), h, b};
}

std::vector<CorpusMember> build_corpus(const Context& c, const GridSetup& gs) {
  CorpusSpec spec;
  spec.psi = need_weight(c);
  const auto range = vec(c.corpus, "psi_range");
  if (!range.empty()) {
    if (range.size() != 2 || !(range[0] < range[1])) config_error("corpus.psi_range must be [lo, hi] with lo < hi");
    spec.psi_lo = range[0];
    spec.psi_hi = range[1];
  }
  const int size = integer(c.corpus, "size", 20);
  if (size < 1) config_error("corpus.size must be at least 1");
  spec.size = static_cast<std::size_t>(size);
  spec.seed = c.seed;
  if (!gs.grid.lattice_info()) {
    // Radial grids only see the psi profile, so members are plain radial bumps.
    CorpusRng rng(spec.seed);
    std::vector<CorpusMember> out;
    for (std::size_t k = 0; k < spec.size; ++k) {
      const double a = spec.psi_lo + 0.5 * (spec.psi_hi - spec.psi_lo) * rng.uniform();
      const double b = a + (spec.psi_hi - a) * rng.uniform(0.4, 1.0);
      std::ostringstream label;
      label.precision(6);
      label << "bump(psi in [" << a << ", " << b << "])";
      out.push_back({label.str(), radial_bump(spec.psi.psi, a, b)});
    }
    return out;
  }
  spec.lo = gs.boxes.corpus_lo;
  spec.hi = gs.boxes.corpus_hi;
  return make_corpus(spec, gs.grid);
}

// W = constant, or (shift + base^2)^(power/2) with base the run weight or
// another catalog weight.
std::pair<ScalarField, std::string> parse_W(const Context& c) {
  if (!c.params.contains("W")) config_error("operation '" + c.op + "' needs params.W");
  const json& w = c.params.at("W");
  check_keys(w, {"constant", "power", "shift", "weight"}, "params.W");
  if (w.contains("constant")) {
    const double v = num(w, "constant", 1.0);
    return {constant_field(c.geo.dim, v), "constant " + format_double(v)};
  }
  const Weight base = w.contains("weight") ? parse_weight(c.geo, w.at("weight")) : need_weight(c);
  const double p = num(w, "power", 1.0), shift = num(w, "shift", 0.0);
  if (shift < 0.0) config_error("params.W.shift must be nonnegative");
  if (shift == 0.0) return {pow(base.psi, p), base.name + "^" + format_double(p)};
  return {pow(square(base.psi) + shift, 0.5 * p),
          "(" + format_double(shift) + " + " + base.name + "^2)^" + format_double(0.5 * p)};
}

ScalarField parse_initial(const Context& c, const GridSetup& gs) {
  if (!c.params.contains("initial")) return build_corpus(c, gs).front().f;
  const json& init = c.params.at("initial");
  check_keys(init, {"kind", "a", "b", "lo", "hi"}, "params.initial");
  const std::string kind = str(init, "kind", "radial-bump");
  TestFunctionParams tp;
  tp.a = num(init, "a", tp.a);
  tp.b = num(init, "b", tp.b);
  tp.lo = vec(init, "lo");
  tp.hi = vec(init, "hi");
  if (kind == "tensor-bump") return tensor_bump(tp.lo, tp.hi);
  if (kind == "radial-bump") return radial_bump(need_weight(c).psi, tp.a, tp.b);
  config_error("params.initial.kind must be radial-bump or tensor-bump");
}

template <class Fn>
std::vector<HardyReport> over_corpus(const std::vector<CorpusMember>& corpus, Fn fn) {
  std::vector<HardyReport> out(corpus.size());
  for_each_block(corpus.size(), 1, [&](std::size_t, std::size_t b, std::size_t) { out[b] = fn(corpus[b].f); });
  return out;
}

Outcome ratio_outcome(const std::vector<CorpusMember>& corpus, const std::vector<HardyReport>& reps, double tol) {
  Outcome o;
  o.table.columns = {"index", "function", "lhs", "rhs", "constant", "ratio"};
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < reps.size(); ++i) {
    const auto& r = reps[i];
    o.table.rows.push_back({static_cast<long long>(i), corpus[i].label, r.lhs, r.rhs, r.constant, r.ratio});
    if (r.ratio_defined()) worst = std::max(worst, r.ratio);
  }
  require(std::isfinite(worst), ErrorKind::Degenerate, "every corpus function has a zero right-hand side");
  o.passed = worst <= 1.0 + tol;
  o.summary["inequality"] = reps.front().inequality;
  o.summary["constant"] = reps.front().constant;
  o.summary["worst_ratio"] = worst;
  o.summary["corpus_size"] = reps.size();
  if (!reps.front().params.empty()) {
    ojson p = ojson::object();
    for (const auto& [k, v] : reps.front().params) p[k] = finite_or_null(v);
    o.summary["details"] = p;
  }
  return o;
}

// lhs <= rhs + tol max(1, |rhs|) for every member.
Outcome comparison_outcome(const std::vector<CorpusMember>& corpus, const std::vector<HardyReport>& reps, double tol) {
  Outcome o;
  o.table.columns = {"index", "function", "lhs", "rhs", "ratio"};
  double worst_gap = -std::numeric_limits<double>::infinity(), worst_ratio = kNaN;
  o.passed = true;
  for (std::size_t i = 0; i < reps.size(); ++i) {
    const auto& r = reps[i];
    o.table.rows.push_back({static_cast<long long>(i), corpus[i].label, r.lhs, r.rhs, r.ratio});
    const double gap = (r.lhs - r.rhs) / std::max(1.0, std::fabs(r.rhs));
    if (gap > worst_gap) {
      worst_gap = gap;
      worst_ratio = r.ratio;
    }
    o.passed = o.passed && gap <= tol;
  }
  o.summary["inequality"] = reps.front().inequality;
  o.summary["constant"] = reps.front().constant;
  o.summary["worst_ratio"] = finite_or_null(worst_ratio);
  o.summary["worst_relative_excess"] = worst_gap;
  o.summary["corpus_size"] = reps.size();
  return o;
}

Outcome op_qcond(const Context& c, const GridSetup& gs) {
  const Weight& w = need_weight(c);
  const double tol = num(c.params, "tol", default_qcond_tolerance(w.psi));
  const double Q = num(c.params, "Q", w.claimed_Q);
  const QcondReport r = qcond_report(c.geo.diffusion, w, gs.grid, tol, Q);
  Outcome o;
  o.table.columns = {"Q_claimed", "Q_estimate", "max_defect", "inf_ratio", "sup_ratio", "evaluated", "skipped", "verdict"};
  o.table.rows.push_back({r.Q_claimed, r.Q_estimate, r.max_defect, r.inf_ratio, r.sup_ratio,
                          static_cast<long long>(r.evaluated), static_cast<long long>(r.skipped),
                          std::string(to_string(r.verdict))});
  using V = QcondReport::Verdict;
  switch (w.exactness) {
    case Exactness::Exact: o.passed = r.verdict == V::Exact; break;
    case Exactness::LowerBound: o.passed = r.verdict == V::Exact || r.verdict == V::LowerBound; break;
    case Exactness::UpperBound: o.passed = r.verdict == V::Exact || r.verdict == V::UpperBound; break;
    case Exactness::Unclaimed: o.passed = r.verdict != V::Fail; break;
  }
  o.summary["inequality"] = "qcond";
  o.summary["Q_claimed"] = r.Q_claimed;
  o.summary["Q_estimate"] = r.Q_estimate;
  o.summary["max_defect"] = r.max_defect;
  o.summary["claim"] = to_string(w.exactness);
  o.summary["qcond_verdict"] = to_string(r.verdict);
  o.summary["tolerance"] = tol;
  return o;
}

Outcome op_suffcond(const Context& c, const GridSetup& gs) {
  const auto [W, wname] = parse_W(c);
  const double gamma = num(c.params, "gamma", 0.0), tol = num(c.params, "tol", 1e-10);
  const SuffcondResult r = check_suffcond(c.geo.diffusion, W, gs.grid, gamma, tol);
  Outcome o;
  o.table.columns = {"W", "gamma", "inf_value", "passes"};
  o.table.rows.push_back({wname, gamma, r.inf_value, static_cast<long long>(r.passes)});
  o.passed = r.passes;
  o.summary["inequality"] = "suffcond";
  o.summary["W"] = wname;
  o.summary["gamma"] = gamma;
  o.summary["inf_value"] = r.inf_value;
  return o;
}

Outcome op_curvature(const Context& c, const GridSetup& gs) {
  const auto [W, wname] = parse_W(c);
  const double gamma = num(c.params, "gamma", 0.0), tol = num(c.params, "tol", 1e-8);
  const auto corpus = build_corpus(c, gs);
  std::vector<double> mins(corpus.size());
  for_each_block(corpus.size(), 1, [&](std::size_t, std::size_t b, std::size_t) {
    mins[b] = check_curvature(c.geo.diffusion, W, corpus[b].f, gamma, gs.grid);
  });
  Outcome o;
  o.table.columns = {"index", "function", "min_defect"};
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    o.table.rows.push_back({static_cast<long long>(i), corpus[i].label, mins[i]});
    worst = std::min(worst, mins[i]);
  }
  o.passed = worst >= -tol;
  o.summary["inequality"] = "curvature";
  o.summary["W"] = wname;
  o.summary["gamma"] = gamma;
  o.summary["min_defect"] = worst;
  o.summary["corpus_size"] = corpus.size();
  return o;
}

Outcome op_hardy_family(const Context& c, const GridSetup& gs) {
  const Weight& psi = need_weight(c);
  const double Q = num(c.params, "Q", psi.claimed_Q), alpha = num(c.params, "alpha", 0.0);
  const double tol = num(c.params, "tol", 1e-6);
  const bool log_form = flag(c.params, "log");
  // Excluded parameters fail before any grid work.
  if (c.op == "hardy") (void)hardy_constant(Q, alpha);
  if (c.op == "log-hardy" || c.op == "weighted-log-hardy") (void)log_hardy_constant(alpha);
  if (c.op == "radial") (void)(log_form ? log_hardy_constant(alpha) : hardy_constant(Q, alpha));
  const auto corpus = build_corpus(c, gs);
  const GeometrySpec& geo = c.geo;
  const Grid& grid = gs.grid;
  std::function<HardyReport(const ScalarField&)> fn;
  if (c.op == "hardy") fn = [&](const ScalarField& f) { return hardy_report(geo, psi, Q, alpha, f, grid); };
  else if (c.op == "log-hardy") fn = [&](const ScalarField& f) { return log_hardy_report(geo, psi, alpha, f, grid); };
  else if (c.op == "weighted-log-hardy")
    fn = [&](const ScalarField& f) { return weighted_log_hardy_report(geo, psi, Q, alpha, f, grid); };
  else if (c.op == "radial")
    fn = [&](const ScalarField& f) {
      return log_form ? radial_log_hardy_report(geo, psi, Q, alpha, f, grid)
                      : radial_hardy_report(geo, psi, Q, alpha, f, grid);
    };
  else if (c.op == "dilation")
    fn = [&](const ScalarField& f) {
      return log_form ? dilation_log_hardy_report(geo, psi, alpha, f, grid)
                      : dilation_hardy_report(geo, psi, alpha, f, grid);
    };
  else fn = [&](const ScalarField& f) { return homogeneous_norm_report(geo, psi, f, grid, grid); };
  Outcome o = ratio_outcome(corpus, over_corpus(corpus, fn), tol);
  o.summary["Q"] = Q;
  o.summary["alpha"] = alpha;
  return o;
}

Outcome op_funcineq(const Context& c, const GridSetup& gs) {
  const auto [W, wname] = parse_W(c);
  const double tol = num(c.params, "tol", 1e-8);
  const auto corpus = build_corpus(c, gs);
  const Diffusion& d = c.geo.diffusion;
  Outcome o;
  if (c.params.contains("beta")) {
    const double beta = num(c.params, "beta", 0.0);
    o = comparison_outcome(corpus, over_corpus(corpus, [&](const ScalarField& f) {
                             return funcineqgeneral_report(d, W, beta, f, gs.grid);
                           }),
                           tol);
    o.summary["beta"] = beta;
  } else {
    const double gamma = num(c.params, "gamma", 0.0);
    o = comparison_outcome(
        corpus, over_corpus(corpus, [&](const ScalarField& f) { return funcineq_report(d, W, gamma, f, gs.grid); }), tol);
    o.summary["gamma"] = gamma;
  }
  o.summary["W"] = wname;
  return o;
}

Outcome op_best_constant(const Context& c, const GridSetup& gs) {
  const Weight& psi = need_weight(c);
  const double alpha = num(c.params, "alpha", 0.0);
  json fam = c.params.contains("family") ? c.params.at("family") : json::object();
  check_keys(fam, {"a", "eps", "widths", "ramp_fractions"}, "params.family");
  TrialFamily family;
  family.a = num(fam, "a", 1.0);
  family.eps = fam.contains("eps") ? vec(fam, "eps") : std::vector<double>{0.02, 0.01, 0.005};
  family.widths = fam.contains("widths") ? vec(fam, "widths") : std::vector<double>{10.0, 20.0, 40.0};
  if (fam.contains("ramp_fractions")) family.ramp_fractions = vec(fam, "ramp_fractions");
  Outcome o;
  o.table.columns = {"width", "sup_ratio", "sharp_constant", "eps", "ramp_fraction", "trials"};
  BestConstantEstimate best;
  for (double width : family.widths) {
    TrialFamily one = family;
    one.widths = {width};
    const auto est = estimate_best_constant(c.geo, psi, alpha, one, gs.grid);
    o.table.rows.push_back(
        {width, est.sup_ratio, est.sharp_constant, est.eps, est.ramp_fraction, static_cast<long long>(est.trials)});
    if (est.sup_ratio > best.sup_ratio || best.trials == 0) best = est;
  }
  const double tol = num(c.params, "tol", 1e-6);
  o.passed = best.sup_ratio <= best.sharp_constant * (1.0 + tol);
  o.summary["inequality"] = "hardy";
  o.summary["constant"] = best.sharp_constant;
  o.summary["sup_ratio"] = best.sup_ratio;
  o.summary["fraction_of_sharp"] = best.sup_ratio / best.sharp_constant;
  o.summary["worst_ratio"] = best.sup_ratio / best.sharp_constant;
  o.summary["alpha"] = alpha;
  return o;
}

std::pair<double, double> time_params(const Context& c, const char* horizon, double scale) {
  const double t = num_required(c.params, horizon, "operation '" + c.op + "'");
  const double dt = num_required(c.params, "dt", "operation '" + c.op + "'") * scale;
  if (!(t >= 0.0) || !(dt > 0.0)) config_error(std::string(horizon) + " must be >= 0 and dt > 0");
  return {t, dt};
}

Outcome op_evolve(const Context& c, const GridSetup& gs, double scale) {
  const auto [t_max, dt] = time_params(c, "t_max", scale);
  const double gamma = num(c.params, "gamma", 0.0), tol = num(c.params, "tol", 1e-8);
  const int stride = integer(c.params, "stride", 1);
  if (stride < 1) config_error("params.stride must be at least 1");
  ScalarField W = constant_field(c.geo.dim, 1.0);
  std::string wname = "constant 1";
  if (c.params.contains("W")) std::tie(W, wname) = parse_W(c);
  const ScalarField f0 = parse_initial(c, gs);
  const ContractionTrace tr = contraction_trace(c.geo.diffusion, W, f0, gs.grid, t_max, dt, gamma, tol);
  Outcome o;
  o.table.columns = {"t", "I", "mass"};
  for (std::size_t k = 0; k < tr.times.size(); ++k)
    if (k % static_cast<std::size_t>(stride) == 0 || k + 1 == tr.times.size())
      o.table.rows.push_back({tr.times[k], tr.I_values[k], tr.mass_values[k]});
  // A flagged trace carries no contraction claim.
  o.passed = tr.passes || tr.flagged;
  o.verdict = tr.passes ? "pass" : tr.flagged ? "flagged" : "violation";
  o.summary["inequality"] = "contraction";
  o.summary["W"] = wname;
  o.summary["gamma"] = gamma;
  o.summary["worst_increase"] = finite_or_null(tr.worst_increase);
  o.summary["trace_passes"] = tr.passes;
  o.summary["funcineq_holds"] = !tr.flagged;
  o.summary["dt"] = dt;
  return o;
}

Outcome op_subcommutation(const Context& c, const GridSetup& gs, double scale) {
  const auto [t, dt] = time_params(c, "t", scale);
  const double gamma = num(c.params, "gamma", 0.0);
  ScalarField W = constant_field(c.geo.dim, 1.0);
  std::string wname = "constant 1";
  if (c.params.contains("W")) std::tie(W, wname) = parse_W(c);
  const ScalarField f0 = parse_initial(c, gs);
  const double d = subcommutation_check(c.geo.diffusion, W, f0, gs.grid, t, dt, gamma);
  const double bound = -(num(c.params, "C1", 1.0) * gs.h * gs.h + num(c.params, "C2", 1.0) * dt);
  Outcome o;
  o.table.columns = {"t", "dt", "h", "min_defect", "bound"};
  o.table.rows.push_back({t, dt, gs.h, d, bound});
  o.passed = d >= bound;
  o.summary["inequality"] = "subcommutation";
  o.summary["W"] = wname;
  o.summary["gamma"] = gamma;
  o.summary["min_defect"] = d;
  o.summary["bound"] = bound;
  return o;
}

const std::set<std::string>& operations() {
  static const std::set<std::string> ops = {"qcond",    "suffcond",       "curvature",  "hardy",    "log-hardy",
                                            "weighted-log-hardy", "radial", "dilation",   "homo-norm", "funcineq",
                                            "best-constant",      "evolve", "subcommutation"};
  return ops;
}

Outcome execute(const Context& c, double scale) {
  const GridSetup gs = build_grid(c, scale);
  require(!gs.grid.empty(), ErrorKind::Degenerate, "grid has no nodes inside the domain");
  Outcome o;
  if (c.op == "qcond") o = op_qcond(c, gs);
  else if (c.op == "suffcond") o = op_suffcond(c, gs);
  else if (c.op == "curvature") o = op_curvature(c, gs);
  else if (c.op == "funcineq") o = op_funcineq(c, gs);
  else if (c.op == "best-constant") o = op_best_constant(c, gs);
  else if (c.op == "evolve") o = op_evolve(c, gs, scale);
  else if (c.op == "subcommutation") o = op_subcommutation(c, gs, scale);
  else o = op_hardy_family(c, gs);
  if (o.verdict.empty()) o.verdict = o.passed ? "pass" : "violation";
  o.summary["h"] = gs.h;
  o.summary["nodes"] = gs.grid.size();
  return o;
}

Context parse_context(std::string_view text, const RunOptions& opts) {
  Context c;
  try {
    c.cfg = json::parse(text);
  } catch (const json::parse_error& e) {
    config_error(std::string("invalid JSON: ") + e.what());
  }
  check_keys(c.cfg, {"schema", "operation", "geometry", "weight", "params", "grid", "corpus", "output"}, "config");
  const std::string schema = str(c.cfg, "schema", "");
  if (schema != kRunSchema) config_error("schema must be \"" + std::string(kRunSchema) + "\"");
  c.op = str(c.cfg, "operation", "");
  if (!operations().count(c.op)) config_error("unknown operation '" + c.op + "'");
  if (!c.cfg.contains("geometry")) config_error("missing geometry");
  c.geo = parse_geometry(c.cfg.at("geometry"));
  if (c.cfg.contains("weight")) c.psi = parse_weight(c.geo, c.cfg.at("weight"));
  if (c.cfg.contains("params")) c.params = c.cfg.at("params");
  check_keys(c.params,
             {"Q", "alpha", "beta", "gamma", "tol", "W", "log", "t", "t_max", "dt", "stride", "initial", "family", "C1",
              "C2"},
             "params");
  if (c.cfg.contains("grid")) c.grid = c.cfg.at("grid");
  check_keys(c.grid, {"kind", "lo", "hi", "h", "excision", "r_min", "r_max", "nodes", "angular"}, "grid");
  if (c.cfg.contains("corpus")) c.corpus = c.cfg.at("corpus");
  check_keys(c.corpus, {"seed", "size", "psi_range", "lo", "hi"}, "corpus");
  if (c.cfg.contains("output")) check_keys(c.cfg.at("output"), {"path", "format"}, "output");
  const double seed = num(c.corpus, "seed", 1.0);
  if (seed < 0 || seed != std::floor(seed) || seed > 9007199254740992.0) config_error("corpus.seed must be a nonnegative integer");
  c.seed = opts.seed ? *opts.seed : static_cast<std::uint64_t>(seed);
  return c;
}

}  // namespace

RunResult run_config(std::string_view config_json, const RunOptions& options) {
  RunResult res;
  try {
    const Context c = parse_context(config_json, options);
    ReportFormat format = ReportFormat::Csv;
    if (options.format) {
      format = *options.format;
    } else if (c.cfg.contains("output")) {
      const std::string f = str(c.cfg.at("output"), "format", "csv");
      if (f == "json-lines") format = ReportFormat::JsonLines;
      else if (f != "csv") config_error("output.format must be csv or json-lines");
    }
    if (c.cfg.contains("output")) res.output_path = str(c.cfg.at("output"), "path", "");
    const double scale = options.refine ? 0.5 : 1.0;
    Outcome o = execute(c, scale);
    ojson summary = ojson::object();
    summary["schema"] = kReportSchema;
    summary["operation"] = c.op;
    summary["geometry"] = c.geo.name;
    summary["weight"] = c.psi ? ojson(c.psi->name) : ojson();
    summary["seed"] = c.seed;
    for (auto& [k, v] : o.summary.items()) summary[k] = v;
    res.exit_code = 0;
    if (!o.passed) {
      // Re-check at halved h before reporting a violation.
      const Outcome again = execute(c, 0.5 * scale);
      summary["recheck"] = {{"h", again.summary["h"]}, {"verdict", again.verdict}};
      res.exit_code = again.passed ? 0 : 1;
      if (again.passed) o.verdict = "pass-after-refinement";
    }
    summary["verdict"] = o.verdict;
    summary["exit_code"] = res.exit_code;
    res.report = render(o.table, format);
    res.summary = summary.dump();
    res.message = res.exit_code == 1 ? c.op + ": violation confirmed at halved h" : c.op + ": " + o.verdict;
  } catch (const Error& e) {
    res.report.clear();
    res.summary.clear();
    res.exit_code = 2;
    res.message = std::string(to_string(e.kind())) + ": " + e.what();
  } catch (const std::exception& e) {
    res.report.clear();
    res.summary.clear();
    res.exit_code = 2;
    res.message = std::string("internal error: ") + e.what();
  }
  return res;
}

}  // namespace hardylab
