#include "rcm/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace rcm {

QsdMoments qsd_moments(const Eigen::VectorXd& pi, long cap,
                       const ModelParams& params) {
  if (pi.size() != cap * cap)
    throw domain_error("qsd_moments: pi size does not match cap^2");
  QsdMoments out;
  Eigen::Matrix2d second = Eigen::Matrix2d::Zero();
  for (long idx = 0; idx < pi.size(); ++idx) {
    const double w = pi(idx);
    if (w == 0.0) continue;
    const Eigen::Vector2d z(params.K * static_cast<double>(idx / cap + 1),
                            params.K_tilde * static_cast<double>(idx % cap + 1));
    out.mean += w * z;
    second += w * z * z.transpose();
  }
  out.cov = second - out.mean * out.mean.transpose();
  return out;
}

TightnessReport tightness_report(const Eigen::VectorXd& pi, long cap,
                                 const ModelParams& params,
                                 double strip_width) {
  if (pi.size() != cap * cap)
    throw domain_error("tightness_report: pi size does not match cap^2");
  if (!(strip_width >= 0.0))
    throw domain_error("tightness_report: strip_width must be >= 0");
  const auto fp = fixed_points(params).coexistence;
  if (!fp)
    throw domain_error("tightness_report needs a coexistence fixed point");
  const Box box{0.5 * fp->x(), 1.5 * fp->x(), 0.5 * fp->y(), 1.5 * fp->y()};

  TightnessReport rep;
  for (long idx = 0; idx < pi.size(); ++idx) {
    const double w = pi(idx);
    if (w == 0.0) continue;
    const double x = params.K * static_cast<double>(idx / cap + 1);
    const double y = params.K_tilde * static_cast<double>(idx % cap + 1);
    if (x <= strip_width) {
      rep.strip_mass_x += w;
    } else if (y <= strip_width) {
      rep.strip_mass_y += w;
    } else if (box.contains(NormedState(x, y))) {
      rep.box_mass += w;
    } else {
      rep.remainder += w;
    }
  }
  return rep;
}

namespace {

struct QsdAtK {
  Eigen::VectorXd pi;
  double lambda = 0.0;
  long cap = 0;
  bool monte_carlo = false;
};

// Matrix route when the truncated chain fits its budgets, particle fallback
// otherwise.
QsdAtK qsd_at_k(const StochasticModel& model, long cap0,
                const ChainOptions& chain_opts, const QsdOptions& qsd_opts,
                bool allow_mc, McQsdOptions mc, std::uint64_t seed,
                std::uint64_t k_index) {
  const long start_cap = cap0 > 0 ? cap0 : default_cap(model.params);
  try {
    const TruncatedChain chain =
        build_truncated_chain_adaptive(model, start_cap, chain_opts);
    const QsdResult qsd = power_iterate_qsd(chain, qsd_opts);
    return {qsd.pi, qsd.lambda, chain.cap, false};
  } catch (const infeasible_error&) {
    if (!allow_mc) throw;
  }
  if (mc.cap == 0) mc.cap = default_cap(model.params);
  mc.seed = SplitRng::derive(SplitRng::mix(seed), k_index);
  const McQsdResult res = monte_carlo_qsd(model, mc);
  return {res.occupation, res.lambda_hat, mc.cap, true};
}

StochasticModel at_scale(const StochasticModel& base, double K) {
  return StochasticModel{base.params.with_K(K), base.offspring_u,
                         base.offspring_v};
}

}  // namespace

std::vector<SweepRecord> sweep_K(const StochasticModel& base,
                                 const SweepOptions& opts) {
  base.validate();
  if (opts.Ks.empty()) throw domain_error("sweep_K: no K values given");
  std::vector<SweepRecord> records;
  records.reserve(opts.Ks.size());
  for (std::size_t i = 0; i < opts.Ks.size(); ++i) {
    const double K = opts.Ks[i];
    if (!(K > 0.0)) throw domain_error("sweep_K: K values must be > 0");
    const StochasticModel model = at_scale(base, K);
    const QsdAtK q = qsd_at_k(model, opts.cap0, opts.chain, opts.qsd,
                              opts.allow_monte_carlo, opts.mc, opts.seed, i);

    SweepRecord rec;
    rec.K = K;
    rec.lambda = q.lambda;
    rec.lifetime = expected_lifetime(q.lambda);
    rec.cap = q.cap;
    rec.monte_carlo = q.monte_carlo;

    const QsdMoments mom = qsd_moments(q.pi, q.cap, model.params);
    rec.qsd_mean_x = mom.mean.x();
    rec.qsd_mean_y = mom.mean.y();
    rec.cov_xx = mom.cov(0, 0);
    rec.cov_xy = mom.cov(0, 1);
    rec.cov_yy = mom.cov(1, 1);

    const auto fp = fixed_points(model.params).coexistence;
    rec.dist_to_fp = fp ? (mom.mean - *fp).norm()
                        : std::numeric_limits<double>::quiet_NaN();

    const TightnessReport t =
        tightness_report(q.pi, q.cap, model.params, opts.strip_width);
    rec.strip_mass_x = t.strip_mass_x;
    rec.strip_mass_y = t.strip_mass_y;
    rec.box_mass = t.box_mass;
    records.push_back(rec);
  }
  return records;
}

LinearFit fit_lambda_scaling(const std::vector<SweepRecord>& records) {
  std::vector<double> x, y;
  for (const SweepRecord& rec : records) {
    x.push_back(1.0 / rec.K);
    y.push_back(-std::log1p(-rec.lambda));
  }
  return fit_line(x, y);
}

RetentionPoint retention_check(const StochasticModel& model, const Box& c_box,
                               const RetentionOptions& opts) {
  model.validate();
  if (opts.steps < 1 || opts.repeats < 1 || opts.max_starts < 1)
    throw domain_error("retention_check: steps, repeats, max_starts >= 1");
  const ModelParams& p = model.params;
  const Box u_box = c_box.inflated(opts.inflate_frac * c_box.diagonal());

  std::vector<PopulationState> starts;
  const long m_lo = static_cast<long>(std::ceil(c_box.x_lo / p.K));
  const long m_hi = static_cast<long>(std::floor(c_box.x_hi / p.K));
  const long n_lo = static_cast<long>(std::ceil(c_box.y_lo / p.K_tilde));
  const long n_hi = static_cast<long>(std::floor(c_box.y_hi / p.K_tilde));
  for (long m = std::max<long>(1, m_lo); m <= m_hi; ++m)
    for (long n = std::max<long>(1, n_lo); n <= n_hi; ++n)
      starts.push_back(PopulationState{m, n});
  if (starts.empty()) {
    starts.push_back(PopulationState{
        std::max<long>(1, std::lround(0.5 * (c_box.x_lo + c_box.x_hi) / p.K)),
        std::max<long>(1, std::lround(0.5 * (c_box.y_lo + c_box.y_hi) / p.K_tilde))});
  }
  if (static_cast<long>(starts.size()) > opts.max_starts) {
    std::vector<PopulationState> kept;
    const double stride = static_cast<double>(starts.size()) /
                          static_cast<double>(opts.max_starts);
    for (long j = 0; j < opts.max_starts; ++j)
      kept.push_back(starts[static_cast<std::size_t>(j * stride)]);
    starts = std::move(kept);
  }

  RetentionPoint point;
  point.K = p.K;
  point.trials = static_cast<long>(starts.size()) * opts.repeats;
  for (std::size_t i = 0; i < starts.size(); ++i) {
    for (long rep = 0; rep < opts.repeats; ++rep) {
      PopulationState s = starts[i];
      for (long t = 0; t < opts.steps; ++t) {
        SplitRng rng = SplitRng::from(
            opts.seed, {static_cast<std::uint64_t>(i),
                        static_cast<std::uint64_t>(rep),
                        static_cast<std::uint64_t>(t)});
        s = step(model, s, rng);
        if (s.absorbed() || !u_box.contains(model.normed(s))) {
          ++point.escapes;
          break;
        }
      }
    }
  }
  point.retention = 1.0 - static_cast<double>(point.escapes) /
                              static_cast<double>(point.trials);
  point.retention_lower =
      binomial_lower_bound(point.trials - point.escapes, point.trials, 0.95);
  return point;
}

RetentionStudy retention_sweep(const StochasticModel& base,
                               const std::vector<double>& Ks,
                               const RetentionOptions& opts) {
  if (Ks.size() < 2) throw domain_error("retention_sweep needs >= 2 K values");
  const auto contracting = find_contracting_set(base.params, 4);
  if (!contracting)
    throw numeric_error("retention_sweep: no contracting box found");

  RetentionStudy study;
  study.c_box = contracting->box;
  std::vector<double> xs, ys;
  study.w_min = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < Ks.size(); ++i) {
    RetentionOptions per = opts;
    per.seed = SplitRng::derive(SplitRng::mix(opts.seed), i);
    RetentionPoint point =
        retention_check(at_scale(base, Ks[i]), study.c_box, per);
    const double y = -std::log1p(-point.retention_lower);
    xs.push_back(1.0 / Ks[i]);
    ys.push_back(y);
    study.w_min = std::min(study.w_min, Ks[i] * y);
    study.points.push_back(point);
  }
  study.w_hat = fit_line(xs, ys).slope;
  return study;
}

ArApproximation ar_approximation(const StochasticModel& model) {
  model.validate();
  const auto fp = fixed_points(model.params).coexistence;
  if (!fp)
    throw domain_error("ar_approximation needs a coexistence fixed point");

  ArApproximation ar;
  ar.A = jacobian_F(*fp, model.params);
  if (spectral_radius(ar.A) >= 1.0)
    throw numeric_error("ar_approximation: fixed point is not attracting");
  ar.noise_cov = Eigen::Matrix2d::Zero();
  ar.noise_cov(0, 0) = conditional_variance(model, *fp, Species::U);
  ar.noise_cov(1, 1) = conditional_variance(model, *fp, Species::V);

  Eigen::Matrix2d sigma = ar.noise_cov;
  for (long it = 0; it < 1000000; ++it) {
    const Eigen::Matrix2d next = ar.A * sigma * ar.A.transpose() + ar.noise_cov;
    const double delta = (next - sigma).cwiseAbs().maxCoeff();
    sigma = next;
    if (delta <= 1e-13 * std::max(1.0, sigma.cwiseAbs().maxCoeff())) break;
  }
  ar.stationary_cov = sigma;
  ar.lyapunov_residual =
      (ar.A * sigma * ar.A.transpose() + ar.noise_cov - sigma)
          .cwiseAbs()
          .maxCoeff();
  if (ar.lyapunov_residual > 1e-10)
    throw numeric_error("ar_approximation: Lyapunov iteration did not settle");
  return ar;
}

CycleSupportStudy cycle_support_study(const StochasticModel& base,
                                      const CycleSupportOptions& opts) {
  base.validate();
  if (opts.Ks.size() < 2)
    throw domain_error("cycle_support_study needs >= 2 K values");
  const auto cycle = detect_cycle(base.params, opts.start, opts.cycle);
  if (!cycle)
    throw numeric_error("cycle_support_study: no cycle detected from start");

  CycleSupportStudy study;
  study.cycle = *cycle;
  Eigen::Matrix2d prod = Eigen::Matrix2d::Identity();
  for (const NormedState& pt : cycle->points)
    prod = jacobian_F(pt, base.params) * prod;
  study.cycle_multiplier = spectral_radius(prod);

  std::vector<double> xs, masses;
  for (std::size_t i = 0; i < opts.Ks.size(); ++i) {
    const double K = opts.Ks[i];
    if (!(K > 0.0))
      throw domain_error("cycle_support_study: K values must be > 0");
    const StochasticModel model = at_scale(base, K);
    const QsdAtK q = qsd_at_k(model, opts.cap0, opts.chain, opts.qsd,
                              opts.allow_monte_carlo, opts.mc, opts.seed, i);

    CycleSupportRecord rec;
    rec.K = K;
    rec.lambda = q.lambda;
    rec.cap = q.cap;
    rec.monte_carlo = q.monte_carlo;
    for (long idx = 0; idx < q.pi.size(); ++idx) {
      const double w = q.pi(idx);
      if (w == 0.0) continue;
      const NormedState z(model.params.K * static_cast<double>(idx / q.cap + 1),
                          model.params.K_tilde * static_cast<double>(idx % q.cap + 1));
      for (const NormedState& pt : cycle->points) {
        if ((z - pt).norm() <= opts.radius) {
          rec.mass_near_cycle += w;
          break;
        }
      }
    }
    xs.push_back(1.0 / K);
    masses.push_back(rec.mass_near_cycle);
    study.records.push_back(rec);
  }
  study.tau = kendall_tau(xs, masses);
  return study;
}

}  // namespace rcm
