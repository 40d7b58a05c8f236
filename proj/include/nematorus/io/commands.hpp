#ifndef NEMATORUS_IO_COMMANDS_HPP
#define NEMATORUS_IO_COMMANDS_HPP

#include <ostream>

#include "config.hpp"

namespace nematorus::io {

enum ExitCode : int {
  exit_ok = 0,
  exit_not_converged = 1,
  exit_config_error = 2,
  exit_numerical_failure = 3,
  exit_bracket_invalid = 4,
};

int cmd_constant_analysis(const RunConfig& cfg, std::ostream& log);
int cmd_flow(const RunConfig& cfg, std::ostream& log);
int cmd_sweep_mu(const RunConfig& cfg, std::ostream& log);
int cmd_winding_table(const RunConfig& cfg, std::ostream& log);
int cmd_geometry_dump(const RunConfig& cfg, std::ostream& log);

/// Dispatch on cfg.command and map library exceptions to exit codes.
int run(const RunConfig& cfg, std::ostream& log, std::ostream& err);

}  // namespace nematorus::io

#endif
