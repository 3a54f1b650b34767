#include "rcm/branching.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

namespace rcm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

void StochasticModel::validate() const {
  params.validate();
  if (std::abs(offspring_u.mean() - std::exp(params.r)) > 1e-9)
    throw domain_error("offspring_u mean must equal exp(r)");
  if (std::abs(offspring_v.mean() - std::exp(params.r_tilde)) > 1e-9)
    throw domain_error("offspring_v mean must equal exp(r_tilde)");
}

StochasticModel make_model(const ModelParams& params,
                           const OffspringConfig& offspring_u,
                           const OffspringConfig& offspring_v) {
  StochasticModel m{params, make_offspring(offspring_u, params.r),
                    make_offspring(offspring_v, params.r_tilde)};
  m.validate();
  return m;
}

double survival_prob_normed(const StochasticModel& model, const NormedState& p,
                            Species sp) {
  if (!(p.x() >= 0.0) || !(p.y() >= 0.0))
    throw domain_error("survival probability needs a nonnegative state");
  const double e = sp == Species::U
                       ? p.x() + model.params.b_eff() * p.y()
                       : model.params.a_eff() * p.x() + p.y();
  return std::exp(-e);
}

double litter_survival_prob(const StochasticModel& model,
                            const PopulationState& s, Species sp) {
  if (s.m < 0 || s.n < 0)
    throw domain_error("population counts must be nonnegative");
  return survival_prob_normed(model, model.normed(s), sp);
}

double offspring_pmf_conditional(const StochasticModel& model,
                                 const PopulationState& s, Species sp,
                                 long k) {
  if (k < 0) return 0.0;
  const double p = litter_survival_prob(model, s, sp);
  const OffspringDistribution& q = model.offspring(sp);
  if (k == 0) return 1.0 - p * (1.0 - q.q0());
  return p * q.pmf(k);
}

PopulationState step(const StochasticModel& model, const PopulationState& s,
                     SplitRng& rng) {
  const double pu = litter_survival_prob(model, s, Species::U);
  const double pv = litter_survival_prob(model, s, Species::V);
  PopulationState next;
  if (s.m > 0) {
    const long su = std::binomial_distribution<long>(s.m, pu)(rng);
    next.m = model.offspring_u.sample_sum(rng, su);
  }
  if (s.n > 0) {
    const long sv = std::binomial_distribution<long>(s.n, pv)(rng);
    next.n = model.offspring_v.sample_sum(rng, sv);
  }
  return next;
}

Eigen::Vector2d conditional_mean(const StochasticModel& model,
                                 const PopulationState& s) {
  const double pu = litter_survival_prob(model, s, Species::U);
  const double pv = litter_survival_prob(model, s, Species::V);
  return Eigen::Vector2d(
      static_cast<double>(s.m) * pu * model.offspring_u.mean(),
      static_cast<double>(s.n) * pv * model.offspring_v.mean());
}

double conditional_variance(const StochasticModel& model, const NormedState& p,
                            Species sp) {
  const double surv = survival_prob_normed(model, p, sp);
  const OffspringDistribution& q = model.offspring(sp);
  const double coord = sp == Species::U ? p.x() : p.y();
  const double scale = sp == Species::U ? model.params.K : model.params.K_tilde;
  const double mu = q.mean();
  return scale * coord * surv * (q.variance() + mu * mu * (1.0 - surv));
}

TransitionKernel::TransitionKernel(const OffspringDistribution& q, long cap,
                                   long max_parents)
    : cap_(cap), max_parents_(max_parents) {
  if (cap < 0 || max_parents < 0)
    throw domain_error("transition kernel needs cap >= 0, max_parents >= 0");
  log_fact_.resize(static_cast<std::size_t>(std::max(cap, max_parents)) + 1);
  log_fact_[0] = 0.0;
  for (std::size_t k = 1; k < log_fact_.size(); ++k)
    log_fact_[k] = log_fact_[k - 1] + std::log(static_cast<double>(k));

  powers_.setZero(max_parents + 1, cap + 1);
  powers_(0, 0) = 1.0;
  if (q.kind() == OffspringKind::Poisson) {
    const double nu = q.mean();
    const double log_nu = std::log(nu);
    for (long j = 1; j <= max_parents; ++j) {
      const double jnu = static_cast<double>(j) * nu;
      const double log_jnu = std::log(static_cast<double>(j)) + log_nu;
      for (long k = 0; k <= cap; ++k)
        powers_(j, k) = std::exp(-jnu + k * log_jnu - log_fact_[k]);
    }
  } else {
    const std::vector<double> qv = q.pmf_vector(cap);
    for (long j = 1; j <= max_parents; ++j) {
      for (long k = 0; k <= cap; ++k) {
        double acc = 0.0;
        for (long i = 0; i <= k; ++i) acc += powers_(j - 1, k - i) * qv[i];
        powers_(j, k) = acc;
      }
    }
  }
}

Eigen::RowVectorXd TransitionKernel::row(long m, double p) const {
  if (m < 0 || m > max_parents_)
    throw domain_error("transition kernel parent count out of range");
  if (!(p >= 0.0) || !(p <= 1.0))
    throw domain_error("survival probability out of [0,1]");
  if (m == 0 || p == 0.0) {
    Eigen::RowVectorXd out = Eigen::RowVectorXd::Zero(cap_ + 1);
    out(0) = 1.0;
    return out;
  }
  Eigen::RowVectorXd w(m + 1);
  if (p == 1.0) {
    w.setZero();
    w(m) = 1.0;
  } else {
    const double lp = std::log(p), lq = std::log1p(-p);
    for (long j = 0; j <= m; ++j) {
      const double lchoose =
          log_fact_[m] - log_fact_[j] - log_fact_[m - j];
      w(j) = std::exp(lchoose + j * lp + (m - j) * lq);
    }
  }
  return w * powers_.topRows(m + 1);
}

TransitionPmf exact_transition_pmf(const StochasticModel& model,
                                   const PopulationState& s, Species sp,
                                   long cap) {
  const double p = litter_survival_prob(model, s, sp);
  const long parents = sp == Species::U ? s.m : s.n;
  TransitionKernel kernel(model.offspring(sp), cap, parents);
  const Eigen::RowVectorXd probs = kernel.row(parents, p);
  TransitionPmf out;
  out.probs.assign(probs.data(), probs.data() + probs.size());
  out.beyond = std::max(0.0, 1.0 - probs.sum());
  return out;
}

TransitionPmf exact_transition_pmf(const StochasticModel& model,
                                   const PopulationState& s, Species sp) {
  const long parents = sp == Species::U ? s.m : s.n;
  const double mu = model.offspring(sp).mean();
  long cap = std::max<long>(
      16, static_cast<long>(std::ceil(static_cast<double>(parents) * mu +
                                      10.0 * std::sqrt(parents * mu + 1.0))));
  for (;;) {
    TransitionPmf pmf = exact_transition_pmf(model, s, sp, cap);
    if (pmf.beyond < 1e-14) return pmf;
    if (cap > 2'000'000)
      throw infeasible_error("transition pmf support exceeds the cap budget");
    cap *= 2;
  }
}

double delta_constant() { return std::pow(2.0, -std::log(2.0)); }

double one_step_origin_bound(const ModelParams& params) {
  params.validate();
  return std::pow(delta_constant(), 1.0 / params.K + 1.0 / params.K_tilde);
}

namespace {

// c(s), c'(s), c''(s) in forms that survive mgf overflow: with
// E = p + (1-p) e^{-L} and L = ln S(s),
//   c   = L + ln E,  c' = p R1 / E,  c'' = p (R2 E - p R1^2) / E^2.
struct ThinnedCumulant {
  const OffspringDistribution* q;
  double p;

  double value(double s) const {
    const double L = q->log_mgf(s);
    return L + std::log(p + (1.0 - p) * std::exp(-L));
  }
  double d1(double s) const {
    const double e = std::exp(-q->log_mgf(s));
    const double E = p + (1.0 - p) * e;
    return p * q->mgf_ratio1(s) / E;
  }
  double d2(double s) const {
    const double e = std::exp(-q->log_mgf(s));
    const double E = p + (1.0 - p) * e;
    const double r1 = q->mgf_ratio1(s);
    return p * (q->mgf_ratio2(s) * E - p * r1 * r1) / (E * E);
  }
};

}  // namespace

double mgf_conditional(const StochasticModel& model, const NormedState& p,
                       Species sp, double s) {
  const ThinnedCumulant c{&model.offspring(sp),
                          survival_prob_normed(model, p, sp)};
  return c.value(s);
}

double entropy_function(const StochasticModel& model, const NormedState& p,
                        Species sp, double z) {
  if (!std::isfinite(z)) throw domain_error("entropy_function: z not finite");
  if (z < 0.0) return kInf;
  const OffspringDistribution& q = model.offspring(sp);
  const double surv = survival_prob_normed(model, p, sp);
  const ThinnedCumulant c{&q, surv};

  if (z == 0.0) {
    const double mass0 = 1.0 - surv * (1.0 - q.q0());
    return -std::log(mass0);
  }
  if (const auto top = q.support_max()) {
    const double zmax = static_cast<double>(*top);
    if (z > zmax) return kInf;
    if (z == zmax) return -std::log(surv * q.pmf(*top));
  }

  const double s_sup = q.mgf_domain_sup();

  // Bracket c'(s) around z; c' is increasing.
  double lo, hi;
  if (c.d1(0.0) >= z) {
    hi = 0.0;
    lo = -1.0;
    for (int it = 0;; ++it) {
      if (c.d1(lo) < z) break;
      if (it > 200) return kInf;
      lo *= 2.0;
    }
  } else {
    lo = 0.0;
    hi = std::isfinite(s_sup) ? 0.5 * s_sup : 1.0;
    for (int it = 0;; ++it) {
      if (c.d1(hi) > z) break;
      if (it > 500) return kInf;
      hi = std::isfinite(s_sup) ? 0.5 * (hi + s_sup) : hi * 2.0;
    }
  }

  double s = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    const double g = c.d1(s) - z;
    if (std::abs(g) <= 1e-12 * std::max(1.0, std::abs(z))) break;
    (g > 0.0 ? hi : lo) = s;
    const double curv = c.d2(s);
    double next = curv > 0.0 ? s - g / curv : s;
    if (!(next > lo) || !(next < hi)) next = 0.5 * (lo + hi);
    if (hi - lo < 1e-15 * std::max(1.0, std::abs(s))) {
      s = next;
      break;
    }
    s = next;
  }
  return z * s - c.value(s);
}

double deviation_bound(const StochasticModel& model, const NormedState& p,
                       Species sp, double dev) {
  if (!(dev >= 0.0)) throw domain_error("deviation_bound: dev must be >= 0");
  const double coord = sp == Species::U ? p.x() : p.y();
  if (!(coord > 0.0))
    throw domain_error("deviation_bound needs a positive coordinate");
  const double scale = sp == Species::U ? model.params.K : model.params.K_tilde;
  const double map_rate =
      survival_prob_normed(model, p, sp) * model.offspring(sp).mean();
  const double z = dev / coord + map_rate;
  const double rate = entropy_function(model, p, sp, z);
  return std::exp(-(coord / scale) * rate);
}

Trajectory simulate(const StochasticModel& model, const PopulationState& init,
                    long max_steps, std::uint64_t seed,
                    std::uint64_t traj_id) {
  if (max_steps < 0) throw domain_error("simulate: max_steps must be >= 0");
  Trajectory traj;
  traj.states.reserve(static_cast<std::size_t>(std::min<long>(max_steps, 4096)) + 1);
  traj.states.push_back(init);
  PopulationState s = init;
  for (long t = 0; t < max_steps && !s.absorbed(); ++t) {
    SplitRng rng = SplitRng::from(seed, {traj_id, static_cast<std::uint64_t>(t)});
    s = step(model, s, rng);
    traj.states.push_back(s);
  }
  traj.absorbed = s.absorbed();
  traj.lifetime =
      traj.absorbed ? static_cast<long>(traj.states.size()) - 1 : max_steps;
  return traj;
}

long simulate_lifetime(const StochasticModel& model,
                       const PopulationState& init, long max_steps,
                       std::uint64_t seed, std::uint64_t traj_id) {
  if (max_steps < 0) throw domain_error("simulate: max_steps must be >= 0");
  PopulationState s = init;
  if (s.absorbed()) return 0;
  for (long t = 0; t < max_steps; ++t) {
    SplitRng rng = SplitRng::from(seed, {traj_id, static_cast<std::uint64_t>(t)});
    s = step(model, s, rng);
    if (s.absorbed()) return t + 1;
  }
  return -1;
}

}  // namespace rcm
