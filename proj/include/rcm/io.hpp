#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "rcm/asymptotics.hpp"
#include "rcm/branching.hpp"

namespace rcm {

std::uint64_t fnv1a64(std::string_view bytes);

// Shortest exact decimal round-trip is not needed; %.17g guarantees the
// value reparses bit-identically and formats deterministically.
std::string format_double(double v);

std::string hex16(std::uint64_t v);

struct Provenance {
  std::string version;
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;
};

// Three comment lines: version, config hash, seed. Deliberately nothing
// environment- or time-dependent, so reruns are byte-identical.
std::string provenance_csv_header(const Provenance& prov);

std::string trajectory_csv(const Provenance& prov, const Trajectory& traj);
std::string pmf_csv(const Provenance& prov, const TransitionPmf& pmf);
std::string qsd_csv(const Provenance& prov, const Eigen::VectorXd& pi,
                    long cap);
std::string sweep_csv(const Provenance& prov,
                      const std::vector<SweepRecord>& records);
std::string cycles_csv(const Provenance& prov,
                       const std::vector<CycleSupportRecord>& records);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace rcm
