#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "rcm/branching.hpp"

namespace rcm {

struct ChainOptions {
  double entry_cutoff = 1e-14;   // per-species pmf entries below this are dust
  double overflow_budget = 1e-8; // max tolerated per-row non-absorbed leak
  long nnz_budget = 50'000'000;
};

// Sub-stochastic transition matrix of the process restricted to the states
// {1..cap} x {1..cap}. Mass leaving a row is split into absorption (either
// next count zero) and overflow (past the cap, plus truncation dust).
struct TruncatedChain {
  long cap = 0;
  Eigen::SparseMatrix<double, Eigen::RowMajor> Q;
  Eigen::VectorXd absorption;
  Eigen::VectorXd overflow;
  double max_overflow = 0.0;

  long size() const { return cap * cap; }
  long index(long m, long n) const { return (m - 1) * cap + (n - 1); }
  PopulationState state(long idx) const {
    return PopulationState{idx / cap + 1, idx % cap + 1};
  }
};

// The state space must stay small enough for dense-vector iteration:
// cap^2 <= 4e5, else infeasible_error.
TruncatedChain build_truncated_chain(const StochasticModel& model, long cap,
                                     const ChainOptions& opts = {});

// Grows the cap by factors of 1.3 until every row leaks at most
// overflow_budget, within the same feasibility limit.
TruncatedChain build_truncated_chain_adaptive(const StochasticModel& model,
                                              long cap0,
                                              const ChainOptions& opts = {});

// Rough cap to start from, a few multiples of the largest normed density
// the map can reach.
long default_cap(const ModelParams& params);

struct QsdOptions {
  double tol = 1e-10;
  long max_iter = 100000;
  bool check_uniqueness = true;
};

struct QsdResult {
  Eigen::VectorXd pi;   // nonnegative, sums to 1
  double lambda = 0.0;  // decay parameter, pi Q = lambda pi
  long iterations = 0;
  double residual = 0.0;   // |pi Q - lambda pi|_1 at exit
  bool degenerate = false; // restarts converged to different vectors
};

// Left power iteration with L1 normalization; converges when the update and
// the eigen-residual both drop below tol. A second run from a skewed start
// flags chains without a unique dominant left eigenvector.
QsdResult power_iterate_qsd(const Eigen::SparseMatrix<double, Eigen::RowMajor>& Q,
                            const QsdOptions& opts = {});
QsdResult power_iterate_qsd(const TruncatedChain& chain,
                            const QsdOptions& opts = {});

// 1 - delta^{1/K + 1/K_tilde}: every positive state reaches the origin in one
// step with at least the complementary probability, so the decay parameter
// of the killed chain cannot exceed this.
double lambda_upper_bound(const ModelParams& params);

// Mean absorption time 1/(1 - lambda) of a geometric lifetime started from
// the quasi-stationary distribution.
double expected_lifetime(double lambda);

// CDF-inversion sampler over the states of a truncated chain.
class DiscreteSampler {
 public:
  explicit DiscreteSampler(const Eigen::VectorXd& weights);
  long draw(SplitRng& rng) const;

 private:
  std::vector<double> cdf_;
};

struct McQsdOptions {
  long particles = 10000;
  long burn_in = 100;
  long steps = 400;     // post-burn-in sampling steps
  long cap = 0;         // histogram extent; must be > 0
  std::uint64_t seed = 0;
  int max_attempts = 8;
};

struct McQsdResult {
  Eigen::VectorXd occupation;  // time-averaged ensemble histogram, sums to 1
  double lambda_hat = 0.0;     // mean per-step survival fraction
  double lambda_se = 0.0;      // batch-means standard error
  long attempts = 1;
  long resampled_total = 0;
  double out_of_cap_fraction = 0.0;
};

// Particle ensemble with uniform resampling of absorbed particles from the
// survivors. A fully extinct ensemble restarts the attempt with twice the
// particles. All particles start at the count state nearest the
// deterministic coexistence point.
McQsdResult monte_carlo_qsd(const StochasticModel& model,
                            const McQsdOptions& opts);

}  // namespace rcm
