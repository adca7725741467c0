#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace hardylab {

inline constexpr const char* kRunSchema = "hardylab-run/1";
inline constexpr const char* kReportSchema = "hardylab-report/1";

enum class ReportFormat { Csv, JsonLines };

struct RunOptions {
  std::optional<ReportFormat> format;  // default: output.format, else csv
  std::optional<std::uint64_t> seed;  // overrides corpus.seed
  bool refine = false;                // halve h (and dt) before running
};

/// exit_code: 0 all checks pass, 1 violation confirmed at halved h, 2 usage,
/// config or evaluation error (`message` says which).
struct RunResult {
  std::string output_path;  // output.path from the config, may be empty
  int exit_code = 2;
  std::string report;   // CSV or json-lines rows
  std::string summary;  // one JSON object
  std::string message;
};

/// Parses a JSON run configuration, dispatches it and renders the report.
/// Never throws.
RunResult run_config(std::string_view config_json, const RunOptions& options = {});

}  // namespace hardylab
