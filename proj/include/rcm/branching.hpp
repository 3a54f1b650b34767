#pragma once

#include <Eigen/Core>
#include <vector>

#include "rcm/offspring.hpp"
#include "rcm/params.hpp"
#include "rcm/rng.hpp"

namespace rcm {

// Individual counts. The process is absorbed once either species is gone:
// a count of zero never regenerates.
struct PopulationState {
  long m = 0;
  long n = 0;

  bool absorbed() const { return m == 0 || n == 0; }
  bool operator==(const PopulationState&) const = default;
};

// Branching dynamics: each of the m parents of species U throws a litter
// drawn from offspring_u, and the whole litter survives with probability
// exp(-K(m + b n)) or dies with the complement, independently per parent.
// Species V mirrors this with exp(-K_tilde(a m + n)).
struct StochasticModel {
  ModelParams params;
  OffspringDistribution offspring_u;
  OffspringDistribution offspring_v;

  void validate() const;

  NormedState normed(const PopulationState& s) const {
    return NormedState(params.K * static_cast<double>(s.m),
                       params.K_tilde * static_cast<double>(s.n));
  }
  const OffspringDistribution& offspring(Species sp) const {
    return sp == Species::U ? offspring_u : offspring_v;
  }
};

StochasticModel make_model(const ModelParams& params,
                           const OffspringConfig& offspring_u,
                           const OffspringConfig& offspring_v);

// Survival probability of one whole litter at the given state.
double litter_survival_prob(const StochasticModel& model,
                            const PopulationState& s, Species sp);
// Same, with the state given in normed coordinates (x + b_eff y exponent).
double survival_prob_normed(const StochasticModel& model,
                            const NormedState& p, Species sp);

// Pmf of a single parent's post-thinning litter: p*q_k for k >= 1 and
// 1 - p(1 - q_0) at k = 0.
double offspring_pmf_conditional(const StochasticModel& model,
                                 const PopulationState& s, Species sp, long k);

// One generation. Consumes the rng sequentially (U litters, then V), so a
// fresh per-step substream gives scheduling-independent reproducibility.
PopulationState step(const StochasticModel& model, const PopulationState& s,
                     SplitRng& rng);

// Expected next counts (m e^{r-K(m+bn)}, n e^{rt-Kt(am+n)}); K times this is
// the deterministic competition map applied to the normed state.
Eigen::Vector2d conditional_mean(const StochasticModel& model,
                                 const PopulationState& s);

// Variance of the normed next coordinate given a (continuous) normed state:
// K x p (sigma^2 + e^{2r}(1 - p)) for species U with p = e^{-x-b_eff y}.
double conditional_variance(const StochasticModel& model, const NormedState& p,
                            Species sp);

// Exact one-species transition pmf: the next count is a Binomial(m, p)
// mixture of offspring-sum convolutions.
struct TransitionPmf {
  std::vector<double> probs;  // probs[k] = P(next count = k), k = 0..cap
  double beyond = 0.0;        // mass above cap
};

// Precomputed convolution powers of one offspring law, shared across many
// mixture evaluations at a common cap.
class TransitionKernel {
 public:
  TransitionKernel(const OffspringDistribution& q, long cap, long max_parents);

  // P(next count = k | m parents, litter survival p) for k = 0..cap.
  Eigen::RowVectorXd row(long m, double p) const;

  long cap() const { return cap_; }
  long max_parents() const { return max_parents_; }

 private:
  long cap_ = 0;
  long max_parents_ = 0;
  Eigen::MatrixXd powers_;       // powers_(j, k) = j-fold convolution at k
  std::vector<double> log_fact_;
};

TransitionPmf exact_transition_pmf(const StochasticModel& model,
                                   const PopulationState& s, Species sp,
                                   long cap);
// Grows the cap until the mass above it drops below 1e-14.
TransitionPmf exact_transition_pmf(const StochasticModel& model,
                                   const PopulationState& s, Species sp);

// (1 - e^{-u})^u has a positive minimum over u > 0; its value 2^{-ln 2}.
double delta_constant();

// Lower bound, uniform over positive states, for the probability that both
// species die out in one generation: delta^{1/K + 1/K_tilde}.
double one_step_origin_bound(const ModelParams& params);

// Log-mgf of one parent's thinned litter: c(s) = ln(1 + p(S(s) - 1)).
double mgf_conditional(const StochasticModel& model, const NormedState& p,
                       Species sp, double s);

// Legendre transform c*(z) = sup_s (z s - c(s)), solved to 1e-12 by a
// bracketed Newton iteration on c'(s) = z. Returns +infinity where the
// supremum diverges (z < 0, or z above the top of the support).
double entropy_function(const StochasticModel& model, const NormedState& p,
                        Species sp, double z);

// Chernoff bound on P(next normed coordinate >= map value + dev):
// exp(-(x/K) c*(dev/x + e^{r-x-b_eff y})) for species U.
double deviation_bound(const StochasticModel& model, const NormedState& p,
                       Species sp, double dev);

struct Trajectory {
  std::vector<PopulationState> states;  // states[0] is the initial state
  bool absorbed = false;
  long lifetime = 0;  // index of the first absorbed state, or steps taken
};

// Runs max_steps generations or until absorption, whichever comes first.
// Step t uses the substream (seed, traj_id, t), so trajectories can be
// reproduced in isolation.
Trajectory simulate(const StochasticModel& model, const PopulationState& init,
                    long max_steps, std::uint64_t seed, std::uint64_t traj_id);

// Lifetime only, without storing the path; -1 when censored at max_steps.
long simulate_lifetime(const StochasticModel& model,
                       const PopulationState& init, long max_steps,
                       std::uint64_t seed, std::uint64_t traj_id);

}  // namespace rcm
