#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "uamo/cli/config.hpp"

namespace uamo::cli {

enum ExitCode { exit_ok = 0, exit_validation = 1, exit_invalid_config = 2, exit_numerical = 3 };

struct CommandOutput {
  int exit_code = exit_ok;
  json summary;
  std::vector<std::string> files;
};

// All commands take a resolved config and write into config.out.
CommandOutput cmd_evolve(const RunConfig& c);
CommandOutput cmd_spectrum(const RunConfig& c);
CommandOutput cmd_winding(const RunConfig& c);
CommandOutput cmd_phase_diagram(const RunConfig& c);
CommandOutput cmd_critical(const RunConfig& c);
CommandOutput cmd_validate(const RunConfig& c);
CommandOutput cmd_reproduce(const RunConfig& c);
CommandOutput run_command(const RunConfig& c);

struct ValidationCheck {
  std::string name;
  double residual = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  std::string detail;
};

const std::vector<std::string>& validation_check_names();
// `only` empty runs every check.
std::vector<ValidationCheck> run_validation(bool inject_fault, const std::vector<std::string>& only = {});

// Canned (subdirectory, config) pairs behind `reproduce <figure>`.
std::vector<std::pair<std::string, RunConfig>> figure_configs(const std::string& figure);

// Full command-line entry point; returns the process exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace uamo::cli
