#include "rcm/commands.hpp"

#include <filesystem>
#include <iostream>

#include "json.hpp"
#include "rcm/asymptotics.hpp"
#include "rcm/io.hpp"
#include "rcm/version.hpp"

namespace rcm {

namespace {

using nlohmann::json;

Provenance provenance_of(const RunConfig& cfg) {
  return Provenance{kVersion, cfg.config_hash, cfg.seed};
}

json provenance_json(const Provenance& prov) {
  return json{{"version", prov.version},
              {"config", hex16(prov.config_hash)},
              {"seed", prov.seed}};
}

json point_json(const NormedState& p) { return json::array({p.x(), p.y()}); }

json matrix_json(const Eigen::Matrix2d& m) {
  return json::array({json::array({m(0, 0), m(0, 1)}),
                      json::array({m(1, 0), m(1, 1)})});
}

std::string out_path(const std::string& out_dir, const std::string& name) {
  return (std::filesystem::path(out_dir) / name).string();
}

void emit(const std::string& path, const std::string& content) {
  write_text_file(path, content);
  std::cout << "wrote " << path << "\n";
}

void emit_json(const std::string& path, const json& j) {
  emit(path, j.dump(2) + "\n");
}

McQsdOptions mc_options(long particles, long burn_in, long steps, long cap,
                        std::uint64_t seed) {
  McQsdOptions mc;
  mc.particles = particles;
  mc.burn_in = burn_in;
  mc.steps = steps;
  mc.cap = cap;
  mc.seed = seed;
  return mc;
}

}  // namespace

void cmd_analyze(const RunConfig& cfg, const std::string& out_dir) {
  const AnalyzeSection sec = cfg.analyze.value_or(AnalyzeSection{});
  const StochasticModel model =
      make_model(cfg.model, cfg.offspring_u, cfg.offspring_v);
  const ModelParams& p = cfg.model;

  json j;
  j["provenance"] = provenance_json(provenance_of(cfg));

  const FixedPointReport fps = fixed_points(p);
  json jf;
  jf["origin"] = point_json(fps.origin);
  jf["axis_x"] = point_json(fps.axis_x);
  jf["axis_y"] = point_json(fps.axis_y);
  if (fps.coexistence) jf["coexistence"] = point_json(*fps.coexistence);
  jf["max_residual"] = fps.max_residual;
  j["fixed_points"] = jf;

  const bool invasible = mutual_invasibility(p);
  j["mutual_invasibility"] = invasible;

  bool attracting = false;
  if (invasible) {
    const StabilityClass cls = classify_coexistence(p);
    const char* verdict = cls.verdict == Stability::Attracting ? "attracting"
                          : cls.verdict == Stability::Repelling
                              ? "repelling"
                              : "non_hyperbolic";
    j["classification"] = json{
        {"verdict", verdict},
        {"spectral_radius", cls.jacobian_spectral_radius},
        {"condition_satisfied", cls.condition_satisfied},
        {"routes_disagree", cls.routes_disagree}};
    attracting = cls.verdict == Stability::Attracting;

    if (sec.find_box) {
      if (const auto inv = find_contracting_set(p, sec.max_n)) {
        j["invariant_box"] = json{{"x_lo", inv->box.x_lo},
                                  {"x_hi", inv->box.x_hi},
                                  {"y_lo", inv->box.y_lo},
                                  {"y_hi", inv->box.y_hi},
                                  {"iterate_n", inv->iterate_n},
                                  {"margin", inv->margin}};
      }
    }
  }

  if (attracting) {
    const ArApproximation ar = ar_approximation(model);
    j["ar"] = json{{"A", matrix_json(ar.A)},
                   {"noise_cov", matrix_json(ar.noise_cov)},
                   {"stationary_cov", matrix_json(ar.stationary_cov)},
                   {"lyapunov_residual", ar.lyapunov_residual}};
  }

  j["one_step_origin_bound"] = one_step_origin_bound(p);
  j["lambda_upper_bound"] = lambda_upper_bound(p);

  if (sec.cycle_start) {
    CycleOptions copts;
    copts.burn_in = sec.cycle_burn_in;
    copts.max_period = sec.cycle_max_period;
    copts.tol = sec.cycle_tol;
    if (const auto cyc = detect_cycle(p, *sec.cycle_start, copts)) {
      json pts = json::array();
      for (const NormedState& pt : cyc->points) pts.push_back(point_json(pt));
      j["cycle"] = json{{"period", cyc->period}, {"points", pts}};
    }
  }

  emit_json(out_path(out_dir, "analysis.json"), j);
}

void cmd_simulate(const RunConfig& cfg, const std::string& out_dir) {
  if (!cfg.simulate) throw domain_error("simulate: section missing from config");
  const SimulateSection& sec = *cfg.simulate;
  const StochasticModel model =
      make_model(cfg.model, cfg.offspring_u, cfg.offspring_v);
  const Provenance prov = provenance_of(cfg);

  const Trajectory traj = simulate(model, PopulationState{sec.m0, sec.n0},
                                   sec.steps, cfg.seed, 0);
  emit(out_path(out_dir, "trajectory.csv"), trajectory_csv(prov, traj));

  json j;
  j["provenance"] = provenance_json(prov);
  j["absorbed"] = traj.absorbed;
  j["lifetime"] = traj.lifetime;
  j["steps_run"] = static_cast<long>(traj.states.size()) - 1;

  if (sec.pmf_state) {
    const TransitionPmf pu =
        exact_transition_pmf(model, *sec.pmf_state, Species::U);
    const TransitionPmf pv =
        exact_transition_pmf(model, *sec.pmf_state, Species::V);
    emit(out_path(out_dir, "pmf_u.csv"), pmf_csv(prov, pu));
    emit(out_path(out_dir, "pmf_v.csv"), pmf_csv(prov, pv));
    j["pmf_beyond_u"] = pu.beyond;
    j["pmf_beyond_v"] = pv.beyond;
  }
  emit_json(out_path(out_dir, "simulate.json"), j);
}

void cmd_qsd(const RunConfig& cfg, const std::string& out_dir) {
  const QsdSection sec = cfg.qsd.value_or(QsdSection{});
  const StochasticModel model =
      make_model(cfg.model, cfg.offspring_u, cfg.offspring_v);
  const Provenance prov = provenance_of(cfg);

  ChainOptions copts;
  copts.overflow_budget = sec.overflow_budget;
  const long cap0 = sec.cap > 0 ? sec.cap : default_cap(cfg.model);
  const TruncatedChain chain =
      sec.adaptive ? build_truncated_chain_adaptive(model, cap0, copts)
                   : build_truncated_chain(model, cap0, copts);

  QsdOptions qopts;
  qopts.tol = sec.tol;
  qopts.max_iter = sec.max_iter;
  const QsdResult qsd = power_iterate_qsd(chain, qopts);

  emit(out_path(out_dir, "qsd.csv"), qsd_csv(prov, qsd.pi, chain.cap));

  json j;
  j["provenance"] = provenance_json(prov);
  j["lambda"] = qsd.lambda;
  j["residual"] = qsd.residual;
  j["iterations"] = qsd.iterations;
  j["degenerate"] = qsd.degenerate;
  j["cap"] = chain.cap;
  j["max_overflow"] = chain.max_overflow;
  j["lifetime"] = expected_lifetime(qsd.lambda);
  j["lambda_upper_bound"] = lambda_upper_bound(cfg.model);

  const QsdMoments mom = qsd_moments(qsd.pi, chain.cap, cfg.model);
  j["mean"] = json::array({mom.mean.x(), mom.mean.y()});
  j["cov"] = matrix_json(mom.cov);

  if (sec.monte_carlo) {
    const McQsdResult mc = monte_carlo_qsd(
        model, mc_options(sec.mc_particles, sec.mc_burn_in, sec.mc_steps,
                          chain.cap, cfg.seed));
    j["monte_carlo"] = json{
        {"lambda_hat", mc.lambda_hat},
        {"lambda_se", mc.lambda_se},
        {"attempts", mc.attempts},
        {"out_of_cap_fraction", mc.out_of_cap_fraction},
        {"tv_distance", 0.5 * (mc.occupation - qsd.pi).lpNorm<1>()}};
  }
  emit_json(out_path(out_dir, "qsd.json"), j);
}

void cmd_sweep(const RunConfig& cfg, const std::string& out_dir) {
  if (!cfg.sweep) throw domain_error("sweep: section missing from config");
  const SweepSection& sec = *cfg.sweep;
  const StochasticModel model =
      make_model(cfg.model, cfg.offspring_u, cfg.offspring_v);
  const Provenance prov = provenance_of(cfg);

  SweepOptions opts;
  opts.Ks = sec.ks;
  opts.cap0 = sec.cap0;
  opts.strip_width = sec.strip_width;
  opts.allow_monte_carlo = sec.allow_monte_carlo;
  opts.mc = mc_options(sec.mc_particles, sec.mc_burn_in, sec.mc_steps, 0, 0);
  opts.seed = cfg.seed;
  const std::vector<SweepRecord> records = sweep_K(model, opts);

  emit(out_path(out_dir, "sweep.csv"), sweep_csv(prov, records));

  const LinearFit fit = fit_lambda_scaling(records);
  json j;
  j["provenance"] = provenance_json(prov);
  j["fit"] = json{{"slope", fit.slope},
                  {"intercept", fit.intercept},
                  {"r_squared", fit.r_squared}};
  json caps = json::array(), mc_flags = json::array();
  for (const SweepRecord& r : records) {
    caps.push_back(r.cap);
    mc_flags.push_back(r.monte_carlo);
  }
  j["caps"] = caps;
  j["monte_carlo"] = mc_flags;
  emit_json(out_path(out_dir, "sweep.json"), j);
}

void cmd_cycles(const RunConfig& cfg, const std::string& out_dir) {
  if (!cfg.cycles) throw domain_error("cycles: section missing from config");
  const CyclesSection& sec = *cfg.cycles;
  const StochasticModel model =
      make_model(cfg.model, cfg.offspring_u, cfg.offspring_v);
  const Provenance prov = provenance_of(cfg);

  CycleSupportOptions opts;
  opts.Ks = sec.ks;
  opts.radius = sec.radius;
  opts.start = sec.start;
  opts.cycle.burn_in = sec.burn_in;
  opts.cycle.max_period = sec.max_period;
  opts.cycle.tol = sec.tol;
  opts.cap0 = sec.cap0;
  opts.allow_monte_carlo = sec.allow_monte_carlo;
  opts.mc = mc_options(sec.mc_particles, sec.mc_burn_in, sec.mc_steps, 0, 0);
  opts.seed = cfg.seed;
  const CycleSupportStudy study = cycle_support_study(model, opts);

  emit(out_path(out_dir, "cycles.csv"), cycles_csv(prov, study.records));

  json j;
  j["provenance"] = provenance_json(prov);
  j["period"] = study.cycle.period;
  json pts = json::array();
  for (const NormedState& pt : study.cycle.points) pts.push_back(point_json(pt));
  j["points"] = pts;
  j["multiplier"] = study.cycle_multiplier;
  j["tau"] = study.tau;
  emit_json(out_path(out_dir, "cycles.json"), j);
}

}  // namespace rcm
