#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rcm/branching.hpp"
#include "rcm/params.hpp"

namespace rcm {

struct AnalyzeSection {
  bool find_box = true;
  int max_n = 3;
  std::optional<NormedState> cycle_start;
  long cycle_burn_in = 10000;
  int cycle_max_period = 64;
  double cycle_tol = 1e-8;
};

struct SimulateSection {
  long m0 = 0;
  long n0 = 0;
  long steps = 0;
  std::optional<PopulationState> pmf_state;
};

struct QsdSection {
  long cap = 0;  // 0 picks default_cap
  bool adaptive = true;
  double tol = 1e-10;
  long max_iter = 100000;
  double overflow_budget = 1e-8;
  bool monte_carlo = false;
  long mc_particles = 10000;
  long mc_burn_in = 100;
  long mc_steps = 400;
};

struct SweepSection {
  std::vector<double> ks;
  double strip_width = 0.05;
  long cap0 = 0;
  bool allow_monte_carlo = true;
  long mc_particles = 10000;
  long mc_burn_in = 100;
  long mc_steps = 400;
};

struct CyclesSection {
  std::vector<double> ks;
  double radius = 0.25;
  NormedState start{0.9, 1.1};
  long burn_in = 10000;
  int max_period = 64;
  double tol = 1e-8;
  long cap0 = 0;
  bool allow_monte_carlo = true;
  long mc_particles = 10000;
  long mc_burn_in = 100;
  long mc_steps = 400;
};

struct RunConfig {
  ModelParams model;
  OffspringConfig offspring_u;
  OffspringConfig offspring_v;
  std::uint64_t seed = 0;
  std::uint64_t config_hash = 0;  // FNV-1a of the raw config bytes

  std::optional<AnalyzeSection> analyze;
  std::optional<SimulateSection> simulate;
  std::optional<QsdSection> qsd;
  std::optional<SweepSection> sweep;
  std::optional<CyclesSection> cycles;
};

// Parses and validates the JSON config. Unknown keys and type mismatches
// are rejected with the dotted field path in the message.
RunConfig load_run_config(const std::string& path);
RunConfig parse_run_config(const std::string& text);

}  // namespace rcm
