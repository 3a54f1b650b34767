#include "rcm/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "rcm/io.hpp"

namespace rcm {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw domain_error(path + ": " + what);
}

std::string join(const std::string& base, const std::string& key) {
  return base.empty() ? key : base + "." + key;
}

const json& expect_object(const json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
  return j;
}

void reject_unknown(const json& obj, const std::string& path,
                    const std::set<std::string>& allowed) {
  for (const auto& item : obj.items()) {
    if (!allowed.count(item.key())) fail(join(path, item.key()), "unknown key");
  }
}

double get_double(const json& obj, const std::string& path,
                  const std::string& key, double fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number()) fail(join(path, key), "expected a number");
  return v.get<double>();
}

double require_double(const json& obj, const std::string& path,
                      const std::string& key) {
  if (!obj.contains(key)) fail(join(path, key), "missing required key");
  return get_double(obj, path, key, 0.0);
}

long get_long(const json& obj, const std::string& path, const std::string& key,
              long fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_integer()) fail(join(path, key), "expected an integer");
  return v.get<long>();
}

long require_long(const json& obj, const std::string& path,
                  const std::string& key) {
  if (!obj.contains(key)) fail(join(path, key), "missing required key");
  return get_long(obj, path, key, 0);
}

bool get_bool(const json& obj, const std::string& path, const std::string& key,
              bool fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_boolean()) fail(join(path, key), "expected a boolean");
  return v.get<bool>();
}

std::string get_string(const json& obj, const std::string& path,
                       const std::string& key, const std::string& fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_string()) fail(join(path, key), "expected a string");
  return v.get<std::string>();
}

std::vector<double> require_double_array(const json& obj,
                                         const std::string& path,
                                         const std::string& key) {
  if (!obj.contains(key)) fail(join(path, key), "missing required key");
  const json& v = obj.at(key);
  if (!v.is_array() || v.empty()) fail(join(path, key), "expected a nonempty array");
  std::vector<double> out;
  for (const json& e : v) {
    if (!e.is_number()) fail(join(path, key), "expected numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

std::pair<double, double> get_pair(const json& obj, const std::string& path,
                                   const std::string& key) {
  const json& v = obj.at(key);
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
    fail(join(path, key), "expected a pair of numbers");
  return {v[0].get<double>(), v[1].get<double>()};
}

ModelParams parse_model(const json& j) {
  const json& obj = expect_object(j, "model");
  reject_unknown(obj, "model", {"r", "r_tilde", "K", "K_tilde", "a", "b"});
  ModelParams p;
  p.r = require_double(obj, "model", "r");
  p.r_tilde = require_double(obj, "model", "r_tilde");
  p.K = require_double(obj, "model", "K");
  p.K_tilde = get_double(obj, "model", "K_tilde", p.K);
  p.a = require_double(obj, "model", "a");
  p.b = require_double(obj, "model", "b");
  p.validate();
  return p;
}

OffspringConfig parse_offspring_one(const json& j, const std::string& path) {
  const json& obj = expect_object(j, path);
  reject_unknown(obj, path, {"kind", "pmf"});
  OffspringConfig cfg;
  cfg.kind = get_string(obj, path, "kind", "poisson");
  if (obj.contains(("pmf"))) cfg.pmf = require_double_array(obj, path, "pmf");
  if (cfg.kind == "finite" && cfg.pmf.empty())
    fail(join(path, "pmf"), "finite offspring needs a pmf array");
  if (cfg.kind != "finite" && !cfg.pmf.empty())
    fail(join(path, "pmf"), "pmf only applies to kind 'finite'");
  return cfg;
}

AnalyzeSection parse_analyze(const json& j) {
  const json& obj = expect_object(j, "analyze");
  reject_unknown(obj, "analyze",
                 {"find_box", "max_n", "cycle_start", "cycle_burn_in",
                  "cycle_max_period", "cycle_tol"});
  AnalyzeSection s;
  s.find_box = get_bool(obj, "analyze", "find_box", s.find_box);
  s.max_n = static_cast<int>(get_long(obj, "analyze", "max_n", s.max_n));
  if (obj.contains("cycle_start")) {
    const auto [x, y] = get_pair(obj, "analyze", "cycle_start");
    s.cycle_start = NormedState(x, y);
  }
  s.cycle_burn_in = get_long(obj, "analyze", "cycle_burn_in", s.cycle_burn_in);
  s.cycle_max_period = static_cast<int>(
      get_long(obj, "analyze", "cycle_max_period", s.cycle_max_period));
  s.cycle_tol = get_double(obj, "analyze", "cycle_tol", s.cycle_tol);
  return s;
}

SimulateSection parse_simulate(const json& j) {
  const json& obj = expect_object(j, "simulate");
  reject_unknown(obj, "simulate", {"m0", "n0", "steps", "pmf_state"});
  SimulateSection s;
  s.m0 = require_long(obj, "simulate", "m0");
  s.n0 = require_long(obj, "simulate", "n0");
  s.steps = require_long(obj, "simulate", "steps");
  if (s.m0 < 0 || s.n0 < 0) fail("simulate.m0", "counts must be >= 0");
  if (s.steps < 0) fail("simulate.steps", "must be >= 0");
  if (obj.contains("pmf_state")) {
    const auto [m, n] = get_pair(obj, "simulate", "pmf_state");
    if (m < 0 || n < 0 || m != std::floor(m) || n != std::floor(n))
      fail("simulate.pmf_state", "expected nonnegative integer counts");
    s.pmf_state = PopulationState{static_cast<long>(m), static_cast<long>(n)};
  }
  return s;
}

QsdSection parse_qsd(const json& j) {
  const json& obj = expect_object(j, "qsd");
  reject_unknown(obj, "qsd",
                 {"cap", "adaptive", "tol", "max_iter", "overflow_budget",
                  "monte_carlo", "mc_particles", "mc_burn_in", "mc_steps"});
  QsdSection s;
  s.cap = get_long(obj, "qsd", "cap", s.cap);
  s.adaptive = get_bool(obj, "qsd", "adaptive", s.adaptive);
  s.tol = get_double(obj, "qsd", "tol", s.tol);
  s.max_iter = get_long(obj, "qsd", "max_iter", s.max_iter);
  s.overflow_budget = get_double(obj, "qsd", "overflow_budget", s.overflow_budget);
  s.monte_carlo = get_bool(obj, "qsd", "monte_carlo", s.monte_carlo);
  s.mc_particles = get_long(obj, "qsd", "mc_particles", s.mc_particles);
  s.mc_burn_in = get_long(obj, "qsd", "mc_burn_in", s.mc_burn_in);
  s.mc_steps = get_long(obj, "qsd", "mc_steps", s.mc_steps);
  return s;
}

SweepSection parse_sweep(const json& j) {
  const json& obj = expect_object(j, "sweep");
  reject_unknown(obj, "sweep",
                 {"ks", "strip_width", "cap0", "allow_monte_carlo",
                  "mc_particles", "mc_burn_in", "mc_steps"});
  SweepSection s;
  s.ks = require_double_array(obj, "sweep", "ks");
  s.strip_width = get_double(obj, "sweep", "strip_width", s.strip_width);
  s.cap0 = get_long(obj, "sweep", "cap0", s.cap0);
  s.allow_monte_carlo =
      get_bool(obj, "sweep", "allow_monte_carlo", s.allow_monte_carlo);
  s.mc_particles = get_long(obj, "sweep", "mc_particles", s.mc_particles);
  s.mc_burn_in = get_long(obj, "sweep", "mc_burn_in", s.mc_burn_in);
  s.mc_steps = get_long(obj, "sweep", "mc_steps", s.mc_steps);
  return s;
}

CyclesSection parse_cycles(const json& j) {
  const json& obj = expect_object(j, "cycles");
  reject_unknown(obj, "cycles",
                 {"ks", "radius", "start", "burn_in", "max_period", "tol",
                  "cap0", "allow_monte_carlo", "mc_particles", "mc_burn_in",
                  "mc_steps"});
  CyclesSection s;
  s.ks = require_double_array(obj, "cycles", "ks");
  s.radius = get_double(obj, "cycles", "radius", s.radius);
  if (obj.contains("start")) {
    const auto [x, y] = get_pair(obj, "cycles", "start");
    s.start = NormedState(x, y);
  }
  s.burn_in = get_long(obj, "cycles", "burn_in", s.burn_in);
  s.max_period =
      static_cast<int>(get_long(obj, "cycles", "max_period", s.max_period));
  s.tol = get_double(obj, "cycles", "tol", s.tol);
  s.cap0 = get_long(obj, "cycles", "cap0", s.cap0);
  s.allow_monte_carlo =
      get_bool(obj, "cycles", "allow_monte_carlo", s.allow_monte_carlo);
  s.mc_particles = get_long(obj, "cycles", "mc_particles", s.mc_particles);
  s.mc_burn_in = get_long(obj, "cycles", "mc_burn_in", s.mc_burn_in);
  s.mc_steps = get_long(obj, "cycles", "mc_steps", s.mc_steps);
  return s;
}

}  // namespace

RunConfig parse_run_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw domain_error(std::string("config: ") + e.what());
  }
  expect_object(j, "config");
  reject_unknown(j, "",
                 {"model", "offspring", "seed", "analyze", "simulate", "qsd",
                  "sweep", "cycles"});

  RunConfig cfg;
  cfg.config_hash = fnv1a64(text);
  if (!j.contains("model")) fail("model", "missing required key");
  cfg.model = parse_model(j.at("model"));

  if (j.contains("offspring")) {
    const json& off = expect_object(j.at("offspring"), "offspring");
    reject_unknown(off, "offspring", {"u", "v"});
    if (off.contains("u"))
      cfg.offspring_u = parse_offspring_one(off.at("u"), "offspring.u");
    if (off.contains("v"))
      cfg.offspring_v = parse_offspring_one(off.at("v"), "offspring.v");
  }

  if (j.contains("seed")) {
    const json& v = j.at("seed");
    if (v.is_number_unsigned()) {
      cfg.seed = v.get<std::uint64_t>();
    } else if (v.is_number_integer() && v.get<long long>() >= 0) {
      cfg.seed = static_cast<std::uint64_t>(v.get<long long>());
    } else {
      fail("seed", "expected a nonnegative integer");
    }
  }

  if (j.contains("analyze")) cfg.analyze = parse_analyze(j.at("analyze"));
  if (j.contains("simulate")) cfg.simulate = parse_simulate(j.at("simulate"));
  if (j.contains("qsd")) cfg.qsd = parse_qsd(j.at("qsd"));
  if (j.contains("sweep")) cfg.sweep = parse_sweep(j.at("sweep"));
  if (j.contains("cycles")) cfg.cycles = parse_cycles(j.at("cycles"));
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw domain_error("config: cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_run_config(buf.str());
}

}  // namespace rcm
