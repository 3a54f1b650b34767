#include "rcm/io.hpp"

#include <cstdio>
#include <fstream>

namespace rcm {

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string hex16(std::uint64_t v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string provenance_csv_header(const Provenance& prov) {
  std::string out;
  out += "# version: " + prov.version + "\n";
  out += "# config: " + hex16(prov.config_hash) + "\n";
  out += "# seed: " + std::to_string(prov.seed) + "\n";
  return out;
}

std::string trajectory_csv(const Provenance& prov, const Trajectory& traj) {
  std::string out = provenance_csv_header(prov);
  out += "t,m,n\n";
  for (std::size_t t = 0; t < traj.states.size(); ++t) {
    out += std::to_string(t) + "," + std::to_string(traj.states[t].m) + "," +
           std::to_string(traj.states[t].n) + "\n";
  }
  return out;
}

std::string pmf_csv(const Provenance& prov, const TransitionPmf& pmf) {
  std::string out = provenance_csv_header(prov);
  out += "k,prob\n";
  for (std::size_t k = 0; k < pmf.probs.size(); ++k)
    out += std::to_string(k) + "," + format_double(pmf.probs[k]) + "\n";
  return out;
}

std::string qsd_csv(const Provenance& prov, const Eigen::VectorXd& pi,
                    long cap) {
  std::string out = provenance_csv_header(prov);
  out += "m,n,pi\n";
  for (long idx = 0; idx < pi.size(); ++idx) {
    out += std::to_string(idx / cap + 1) + "," + std::to_string(idx % cap + 1) +
           "," + format_double(pi(idx)) + "\n";
  }
  return out;
}

std::string sweep_csv(const Provenance& prov,
                      const std::vector<SweepRecord>& records) {
  std::string out = provenance_csv_header(prov);
  out +=
      "K,lambda,lifetime,qsd_mean_x,qsd_mean_y,cov_xx,cov_xy,cov_yy,"
      "dist_to_fp,strip_mass_x,strip_mass_y,box_mass\n";
  for (const SweepRecord& r : records) {
    out += format_double(r.K) + "," + format_double(r.lambda) + "," +
           format_double(r.lifetime) + "," + format_double(r.qsd_mean_x) + "," +
           format_double(r.qsd_mean_y) + "," + format_double(r.cov_xx) + "," +
           format_double(r.cov_xy) + "," + format_double(r.cov_yy) + "," +
           format_double(r.dist_to_fp) + "," + format_double(r.strip_mass_x) +
           "," + format_double(r.strip_mass_y) + "," +
           format_double(r.box_mass) + "\n";
  }
  return out;
}

std::string cycles_csv(const Provenance& prov,
                       const std::vector<CycleSupportRecord>& records) {
  std::string out = provenance_csv_header(prov);
  out += "K,lambda,mass_near_cycle\n";
  for (const CycleSupportRecord& r : records) {
    out += format_double(r.K) + "," + format_double(r.lambda) + "," +
           format_double(r.mass_near_cycle) + "\n";
  }
  return out;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw error("cannot open '" + path + "' for writing");
  out << content;
  if (!out) throw error("failed writing '" + path + "'");
}

}  // namespace rcm
