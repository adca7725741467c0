// Command-line front end. Links only the C API.

#include <CLI11.hpp>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include "hardylab/hardylab.h"

namespace {

bool write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  return static_cast<bool>(out);
}

int run_command(const std::string& config_path, std::string out_path, const std::string& format,
                const std::optional<std::uint64_t>& seed, bool refine) {
  std::ifstream in(config_path, std::ios::binary);
  if (!in) {
    std::cerr << "cannot read config '" << config_path << "'\n";
    return 2;
  }
  std::stringstream text;
  text << in.rdbuf();

  hl_run_options opts{};
  opts.format = format == "csv" ? HL_FORMAT_CSV : format == "json-lines" ? HL_FORMAT_JSON_LINES : HL_FORMAT_DEFAULT;
  opts.has_seed = seed.has_value();
  opts.seed = seed.value_or(0);
  opts.refine = refine;
  hl_run* raw = nullptr;
  if (hl_run_config(text.str().c_str(), &opts, &raw) != HL_OK) {
    std::cerr << "error: " << hl_last_error() << "\n";
    return 2;
  }
  const std::unique_ptr<hl_run, decltype(&hl_run_free)> run(raw, hl_run_free);
  const int code = hl_run_exit_code(run.get());
  std::cerr << hl_run_message(run.get()) << "\n";
  if (code == 2) return 2;

  if (out_path.empty()) out_path = hl_run_output_path(run.get());
  const std::string summary = std::string(hl_run_summary(run.get())) + "\n";
  if (out_path.empty()) {
    std::cout << hl_run_report(run.get());
    std::cerr << summary;
  } else {
    if (!write_file(out_path, hl_run_report(run.get())) || !write_file(out_path + ".summary.json", summary)) {
      std::cerr << "cannot write '" << out_path << "'\n";
      return 2;
    }
    std::cout << summary;
  }
  return code;
}

int list_command() {
  char* text = nullptr;
  if (hl_catalog_listing(&text) != HL_OK) {
    std::cerr << "error: " << hl_last_error() << "\n";
    return 2;
  }
  std::cout << text;
  hl_string_free(text);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hardylab: Hardy-type inequalities for diffusion operators"};
  app.require_subcommand(1);

  std::string config, out, format;
  std::optional<std::uint64_t> seed;
  bool refine = false;
  auto* run = app.add_subcommand("run", "Run a JSON configuration");
  run->add_option("--config", config, "Configuration file")->required();
  run->add_option("--out", out, "Report path (default: output.path, else stdout)");
  run->add_option("--format", format, "Report format")->check(CLI::IsMember({"csv", "json-lines"}));
  run->add_option("--seed", seed, "Corpus seed, overrides corpus.seed");
  run->add_flag("--refine", refine, "Halve h (and dt) before running");

  app.add_subcommand("list", "List geometries, weights and inequalities");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  if (app.got_subcommand("list")) return list_command();
  return run_command(config, out, format, seed, refine);
}
