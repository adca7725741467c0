#include "hardylab/hardylab.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include "hardylab/catalog.hpp"
#include "hardylab/conditions.hpp"
#include "hardylab/core/error.hpp"
#include "hardylab/run.hpp"

struct hl_geometry {
  hardylab::GeometrySpec spec;
};

struct hl_weight {
  hardylab::Weight weight;
  int dim = 0;
};

struct hl_run {
  hardylab::RunResult result;
};

namespace {

thread_local std::string last_error;

hl_status status_of(hardylab::ErrorKind kind) {
  switch (kind) {
    case hardylab::ErrorKind::Usage: return HL_E_USAGE;
    case hardylab::ErrorKind::Domain: return HL_E_DOMAIN;
    case hardylab::ErrorKind::Numeric: return HL_E_NUMERIC;
    case hardylab::ErrorKind::Precondition: return HL_E_PRECONDITION;
    case hardylab::ErrorKind::Degenerate: return HL_E_DEGENERATE;
  }
  return HL_E_INTERNAL;
}

template <class Fn>
hl_status guarded(Fn fn) {
  try {
    fn();
    last_error.clear();
    return HL_OK;
  } catch (const hardylab::Error& e) {
    last_error = e.what();
    return status_of(e.kind());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
  } catch (const std::exception& e) {
    last_error = e.what();
  } catch (...) {
    last_error = "unknown exception";
  }
  return HL_E_INTERNAL;
}

void need(const void* p, const char* what) {
  if (!p) hardylab::fail(hardylab::ErrorKind::Usage, std::string(what) + " is null");
}

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

std::span<const double> point_of(const double* p, std::size_t dim, int expected) {
  need(p, "point");
  if (dim != static_cast<std::size_t>(expected))
    hardylab::fail(hardylab::ErrorKind::Usage, "point dimension does not match the geometry");
  return {p, dim};
}

}  // namespace

extern "C" {

const char* hl_last_error(void) { return last_error.c_str(); }

const char* hl_status_name(hl_status status) {
  switch (status) {
    case HL_OK: return "ok";
    case HL_E_USAGE: return "usage";
    case HL_E_DOMAIN: return "domain";
    case HL_E_NUMERIC: return "numeric";
    case HL_E_PRECONDITION: return "precondition";
    case HL_E_DEGENERATE: return "degenerate";
    case HL_E_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* hl_version(void) { return "0.1.0"; }

void hl_string_free(char* s) { std::free(s); }

hl_status hl_catalog_listing(char** out) {
  return guarded([&] {
    need(out, "out");
    *out = copy_string(hardylab::catalog_listing());
  });
}

hl_status hl_geometry_create(const char* name, int m, hl_geometry** out) {
  return guarded([&] {
    need(name, "name");
    need(out, "out");
    *out = nullptr;
    *out = new hl_geometry{hardylab::make_geometry(name, {.m = m})};
  });
}

void hl_geometry_free(hl_geometry* geo) { delete geo; }

int hl_geometry_dim(const hl_geometry* geo) { return geo ? geo->spec.dim : 0; }

hl_status hl_weight_create(const hl_geometry* geo, const char* name, hl_weight** out) {
  return guarded([&] {
    need(geo, "geometry");
    need(name, "name");
    need(out, "out");
    *out = nullptr;
    std::string n = name;
    hardylab::WeightParams params;
    if (const auto open = n.find('('); open != std::string::npos) {
      const auto close = n.find(')', open);
      if (close == std::string::npos || close + 1 != n.size())
        hardylab::fail(hardylab::ErrorKind::Usage, "cannot parse weight name '" + n + "'");
      params.axis = std::stoi(n.substr(open + 1, close - open - 1));
      n = n.substr(0, open);
    }
    *out = new hl_weight{hardylab::make_weight(geo->spec, n, params), geo->spec.dim};
  });
}

void hl_weight_free(hl_weight* w) { delete w; }

double hl_weight_claimed_q(const hl_weight* w) { return w ? w->weight.claimed_Q : 0.0; }

hl_status hl_weight_eval(const hl_weight* w, const double* point, size_t dim, double* value) {
  return guarded([&] {
    need(w, "weight");
    need(value, "value");
    const auto p = point_of(point, dim, w->dim);
    if (!w->weight.psi.in_domain(p)) hardylab::fail(hardylab::ErrorKind::Domain, "point is outside the weight's domain");
    *value = w->weight.psi(p);
  });
}

hl_status hl_eval_L(const hl_geometry* geo, const hl_weight* w, const double* point, size_t dim, double* value) {
  return guarded([&] {
    need(geo, "geometry");
    need(w, "weight");
    need(value, "value");
    const auto p = point_of(point, dim, geo->spec.dim);
    *value = hardylab::eval_L(geo->spec.diffusion, w->weight.psi, hardylab::Point(std::vector<double>(p.begin(), p.end())));
  });
}

hl_status hl_eval_gamma(const hl_geometry* geo, const hl_weight* w, const double* point, size_t dim, double* value) {
  return guarded([&] {
    need(geo, "geometry");
    need(w, "weight");
    need(value, "value");
    const auto p = point_of(point, dim, geo->spec.dim);
    const hardylab::Point q(std::vector<double>(p.begin(), p.end()));
    *value = hardylab::gamma(geo->spec.diffusion, w->weight.psi, w->weight.psi, q);
  });
}

hl_status hl_qcond(const hl_geometry* geo, const hl_weight* w, const double* lo, const double* hi, size_t dim, double h,
                   double excision, double tol, hl_qcond_result* out) {
  return guarded([&] {
    need(geo, "geometry");
    need(w, "weight");
    need(lo, "lo");
    need(hi, "hi");
    need(out, "out");
    if (dim != static_cast<std::size_t>(geo->spec.dim))
      hardylab::fail(hardylab::ErrorKind::Usage, "box dimension does not match the geometry");
    const auto box = hardylab::Box::with_spacing(std::vector<double>(lo, lo + dim), std::vector<double>(hi, hi + dim), h);
    const auto grid = hardylab::make_grid(geo->spec, box,
                                          excision > 0.0 ? hardylab::excise_near(w->weight, excision) : hardylab::Excision{});
    const double t = tol < 0.0 ? hardylab::default_qcond_tolerance(w->weight.psi) : tol;
    const auto r = hardylab::qcond_report(geo->spec.diffusion, w->weight, grid, t);
    out->Q_claimed = r.Q_claimed;
    out->Q_estimate = r.Q_estimate;
    out->max_defect = r.max_defect;
    out->inf_ratio = r.inf_ratio;
    out->sup_ratio = r.sup_ratio;
    out->evaluated = r.evaluated;
    out->skipped = r.skipped;
    out->verdict = static_cast<hl_verdict>(static_cast<int>(r.verdict));
  });
}

hl_status hl_run_config(const char* config_json, const hl_run_options* options, hl_run** out) {
  return guarded([&] {
    need(config_json, "config");
    need(out, "out");
    *out = nullptr;
    hardylab::RunOptions opts;
    if (options) {
      if (options->format == HL_FORMAT_CSV) opts.format = hardylab::ReportFormat::Csv;
      else if (options->format == HL_FORMAT_JSON_LINES) opts.format = hardylab::ReportFormat::JsonLines;
      else if (options->format != HL_FORMAT_DEFAULT) hardylab::fail(hardylab::ErrorKind::Usage, "unknown report format");
      if (options->has_seed) opts.seed = options->seed;
      opts.refine = options->refine != 0;
    }
    *out = new hl_run{hardylab::run_config(config_json, opts)};
  });
}

int hl_run_exit_code(const hl_run* run) { return run ? run->result.exit_code : 2; }
const char* hl_run_report(const hl_run* run) { return run ? run->result.report.c_str() : ""; }
const char* hl_run_summary(const hl_run* run) { return run ? run->result.summary.c_str() : ""; }
const char* hl_run_message(const hl_run* run) { return run ? run->result.message.c_str() : ""; }
const char* hl_run_output_path(const hl_run* run) { return run ? run->result.output_path.c_str() : ""; }
void hl_run_free(hl_run* run) { delete run; }

}  // extern "C"
