#pragma once

#include <string>

#include "rcm/config.hpp"

namespace rcm {

// Each command reads its section of the config, writes its outputs under
// out_dir, and throws on failure (domain_error for bad configuration,
// numeric_error and infeasible_error from the underlying computations).
void cmd_analyze(const RunConfig& cfg, const std::string& out_dir);
void cmd_simulate(const RunConfig& cfg, const std::string& out_dir);
void cmd_qsd(const RunConfig& cfg, const std::string& out_dir);
void cmd_sweep(const RunConfig& cfg, const std::string& out_dir);
void cmd_cycles(const RunConfig& cfg, const std::string& out_dir);

}  // namespace rcm
