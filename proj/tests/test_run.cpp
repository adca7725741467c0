#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>
#include <sstream>
#include <string>

#include "hardylab/run.hpp"

using namespace hardylab;
using json = nlohmann::json;

namespace {

const char* kE3Grid = R"("grid": {"lo": [-1, -1, -1], "hi": [1, 1, 1], "h": 0.1})";

std::string config(const std::string& op, const std::string& geometry, const std::string& weight,
                   const std::string& rest) {
  return R"({"schema": "hardylab-run/1", "operation": ")" + op + R"(", "geometry": )" + geometry +
         R"(, "weight": )" + weight + (rest.empty() ? "" : ", " + rest) + "}";
}

json summary_of(const RunResult& r) {
  REQUIRE(!r.summary.empty());
  return json::parse(r.summary);
}

RunResult run_ok(const std::string& cfg, const RunOptions& opts = {}) {
  const RunResult r = run_config(cfg, opts);
  INFO(r.message);
  CHECK(r.exit_code == 0);
  return r;
}

}  // namespace

TEST_CASE("qcond on euclidean(3) with |x| reports Q = 3") {
  const auto r = run_ok(config("qcond", "\"euclidean(3)\"", R"("euclid-norm")", kE3Grid));
  const json s = summary_of(r);
  CHECK(s["Q_estimate"].get<double>() == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(s["verdict"] == "pass");
  CHECK(s["schema"] == "hardylab-report/1");
  CHECK(r.report.rfind("Q_claimed,Q_estimate,", 0) == 0);
}

TEST_CASE("hardy on heisenberg(1) with the Koranyi gauge and 20 bumps") {
  const auto r = run_ok(config("hardy", R"({"name": "heisenberg", "m": 1})", R"("koranyi-gauge")",
                               R"("params": {"alpha": 0},
                                  "grid": {"lo": [-1.5, -1.5, -1.5], "hi": [1.5, 1.5, 1.5], "h": 0.1, "excision": 0.1},
                                  "corpus": {"size": 20, "psi_range": [1.0, 1.4], "lo": [-1.4, -1.4, -1.4], "hi": [1.4, 1.4, 1.4]})"));
  const json s = summary_of(r);
  CHECK(s["worst_ratio"].get<double>() <= 1.0);
  CHECK(s["corpus_size"] == 20);
  std::istringstream rows(r.report);
  std::string line;
  int n = 0;
  while (std::getline(rows, line)) ++n;
  CHECK(n == 21);
}

TEST_CASE("Q + alpha = 2 is a usage error naming the log variant") {
  const auto r = run_config(config("hardy", "\"euclidean(3)\"", R"("euclid-norm")", R"("params": {"alpha": -1}, )" +
                                                                                             std::string(kE3Grid)));
  CHECK(r.exit_code == 2);
  CHECK(r.message.find("log-hardy") != std::string::npos);
  CHECK(r.report.empty());
}

TEST_CASE("configuration errors exit with 2") {
  const std::string grid = kE3Grid;
  CHECK(run_config("not json").exit_code == 2);
  CHECK(run_config(R"({"operation": "qcond"})").exit_code == 2);
  CHECK(run_config(config("qcond", "\"euclidian(3)\"", R"("euclid-norm")", grid)).exit_code == 2);
  CHECK(run_config(config("qcond", "\"euclidean(3)\"", R"("koranyi-gauge")", grid)).exit_code == 2);
  CHECK(run_config(config("hardyy", "\"euclidean(3)\"", R"("euclid-norm")", grid)).exit_code == 2);
  CHECK(run_config(config("qcond", "\"euclidean(3)\"", R"("euclid-norm")", grid + R"(, "colour": 1)")).exit_code == 2);
  CHECK(run_config(config("qcond", "\"euclidean(3)\"", R"("euclid-norm")", "")).exit_code == 2);
  const auto r = run_config(config("qcond", "\"euclidean(3)\"", R"("euclid-norm")",
                                   R"("grid": {"lo": [-1, -1], "hi": [1, 1], "h": 0.1})"));
  CHECK(r.exit_code == 2);
  CHECK(r.message.find("3 entries") != std::string::npos);
}

TEST_CASE("a confirmed violation exits with 1") {
  // |x| satisfies qcond with Q = 3 exactly, so claiming Q = 5 must fail at every h.
  const auto r = run_config(config("qcond", "\"euclidean(3)\"", R"("euclid-norm")",
                                   R"("params": {"Q": 5}, )" + std::string(kE3Grid)));
  CHECK(r.exit_code == 1);
  const json s = summary_of(r);
  CHECK(s["verdict"] == "violation");
  CHECK(s["recheck"]["verdict"] == "violation");
  CHECK(s["recheck"]["h"].get<double>() < s["h"].get<double>());
}

TEST_CASE("identical config and seed give byte-identical reports") {
  const auto cfg = config("hardy", "\"euclidean(3)\"", R"("euclid-norm")",
                          R"("grid": {"lo": [-1, -1, -1], "hi": [1, 1, 1], "h": 0.1},
                             "corpus": {"size": 5, "psi_range": [0.4, 0.9]})");
  const auto a = run_ok(cfg), b = run_ok(cfg);
  CHECK(a.report == b.report);
  CHECK(a.summary == b.summary);
  RunOptions other;
  other.seed = 99;
  const auto c = run_ok(cfg, other);
  CHECK(c.report != a.report);
  CHECK(summary_of(c)["seed"] == 99);
  CHECK(a.report.find('\r') == std::string::npos);
  CHECK(a.report.back() == '\n');
}

TEST_CASE("json-lines rows carry the CSV columns") {
  RunOptions opts;
  opts.format = ReportFormat::JsonLines;
  const auto r = run_ok(config("hardy", "\"euclidean(3)\"", R"("euclid-norm")",
                               R"("grid": {"lo": [-1, -1, -1], "hi": [1, 1, 1], "h": 0.1},
                                  "corpus": {"size": 3, "psi_range": [0.4, 0.9]},
                                  "output": {"path": "x.csv", "format": "csv"})"),
                        opts);
  CHECK(r.output_path == "x.csv");
  std::istringstream rows(r.report);
  std::string line;
  int n = 0;
  while (std::getline(rows, line)) {
    const json row = json::parse(line);
    CHECK(row.contains("ratio"));
    CHECK(row["index"] == n);
    ++n;
  }
  CHECK(n == 3);
}

TEST_CASE("refine halves h") {
  const auto cfg = config("qcond", "\"euclidean(2)\"", R"("euclid-norm")",
                          R"("grid": {"lo": [-1, -1], "hi": [1, 1], "h": 0.1})");
  RunOptions fine;
  fine.refine = true;
  CHECK(summary_of(run_ok(cfg, fine))["h"].get<double>() == doctest::Approx(0.05));
}

TEST_CASE("default grid doubles the corpus box") {
  const auto r = run_ok(config("hardy", "\"euclidean(2)\"", R"("euclid-norm")",
                               R"("params": {"alpha": 1}, "corpus": {"size": 2, "psi_range": [0.5, 1.5], "lo": [-1, -1], "hi": [1, 1]})"));
  const json s = summary_of(r);
  CHECK(s["h"].get<double>() <= 2.0 / 63.0 + 1e-12);
  CHECK(s["nodes"].get<int>() >= 127 * 127 - 50);
}

TEST_CASE("every operation runs on a small configuration") {
  const std::string e3 = "\"euclidean(3)\"", norm = R"("euclid-norm")";
  const std::string e3corpus = std::string(kE3Grid) + R"(, "corpus": {"size": 4, "psi_range": [0.4, 0.9]})";
  const std::string e3outer = R"("grid": {"lo": [-2, -2, -2], "hi": [2, 2, 2], "h": 0.1},
                                 "corpus": {"size": 4, "psi_range": [1.2, 1.8]})";
  const std::string radial = R"("grid": {"lo": [0.5], "hi": [4], "h": 0.02})";
  struct Case {
    const char* op;
    std::string geometry, weight, rest;
  };
  const Case cases[] = {
      {"suffcond", e3, norm, R"("params": {"W": {"power": 0.5}}, )" + std::string(kE3Grid)},
      {"curvature", e3, norm, R"("params": {"W": {"power": 0.5}}, )" + e3corpus},
      {"log-hardy", "\"euclidean(2)\"", norm,
       R"("grid": {"lo": [-2, -2], "hi": [2, 2], "h": 0.05}, "corpus": {"size": 4, "psi_range": [1.2, 1.8]})"},
      {"weighted-log-hardy", e3, norm, e3outer},
      {"radial", e3, norm, e3corpus},
      {"radial", e3, norm, R"("params": {"log": true}, )" + e3outer},
      {"dilation", e3, norm, e3corpus},
      {"dilation", "\"heisenberg(1)\"", R"("koranyi-gauge")",
       R"("grid": {"lo": [-1.5, -1.5, -1.5], "hi": [1.5, 1.5, 1.5], "h": 0.1, "excision": 0.1},
          "corpus": {"size": 3, "psi_range": [1.0, 1.4]})"},
      {"homo-norm", e3, norm, e3corpus},
      {"funcineq", e3, norm, R"("params": {"W": {"power": 0.5}, "gamma": 0}, )" + e3corpus},
      {"funcineq", e3, norm, R"("params": {"W": {"power": 0.5}, "beta": -1}, )" + e3corpus},
      {"best-constant", e3, norm,
       R"("params": {"family": {"eps": [0.01], "widths": [6, 10], "ramp_fractions": [0.4]}},
          "grid": {"kind": "radial", "r_min": 0.5, "r_max": 30000, "nodes": 1500})"},
      {"evolve", "\"radial-euclidean(3)\"", norm,
       R"("params": {"W": {"power": 0.5}, "t_max": 0.05, "dt": 0.001, "initial": {"kind": "radial-bump", "a": 1, "b": 3}}, )" +
           radial},
      {"subcommutation", "\"radial-euclidean(3)\"", norm,
       R"("params": {"W": {"power": 0.5}, "t": 0.05, "dt": 0.001, "initial": {"kind": "radial-bump", "a": 1, "b": 3}}, )" +
           radial},
  };
  for (const auto& c : cases) {
    CAPTURE(c.op);
    CAPTURE(c.rest);
    const auto r = run_ok(config(c.op, c.geometry, c.weight, c.rest));
    const json s = summary_of(r);
    CHECK(s["operation"] == c.op);
    CHECK(s["verdict"] == "pass");
    if (std::string(c.op) == "evolve") {
      CHECK(r.report.rfind("t,I,mass\n", 0) == 0);
      CHECK(s["trace_passes"] == true);
    }
    if (std::string(c.op) == "best-constant") {
      CHECK(s["sup_ratio"].get<double>() <= 4.0);
      CHECK(s["sup_ratio"].get<double>() > 2.0);
    }
  }
}
