#pragma once

#include <Eigen/Core>
#include <vector>

#include "rcm/deterministic.hpp"
#include "rcm/qsd.hpp"
#include "rcm/stats.hpp"

namespace rcm {

// First and second normed moments of a distribution over chain states.
struct QsdMoments {
  Eigen::Vector2d mean = Eigen::Vector2d::Zero();
  Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
};

QsdMoments qsd_moments(const Eigen::VectorXd& pi, long cap,
                       const ModelParams& params);

// Mass split of a distribution over chain states: strips hug the two
// absorbing boundaries (normed coordinate at most strip_width, x taking
// priority), the box covers [x*/2, 3x*/2] x [y*/2, 3y*/2] around the
// coexistence point, the remainder is everything else.
struct TightnessReport {
  double strip_mass_x = 0.0;
  double strip_mass_y = 0.0;
  double box_mass = 0.0;
  double remainder = 0.0;
};

TightnessReport tightness_report(const Eigen::VectorXd& pi, long cap,
                                 const ModelParams& params,
                                 double strip_width);

struct SweepOptions {
  std::vector<double> Ks;  // applied to both species
  long cap0 = 0;           // starting cap; 0 picks default_cap per K
  double strip_width = 0.05;
  ChainOptions chain{};
  QsdOptions qsd{};
  bool allow_monte_carlo = true;  // fall back when the matrix is infeasible
  McQsdOptions mc{};              // mc.cap of 0 picks default_cap per K
  std::uint64_t seed = 0;
};

struct SweepRecord {
  double K = 0.0;
  double lambda = 0.0;
  double lifetime = 0.0;
  double qsd_mean_x = 0.0;
  double qsd_mean_y = 0.0;
  double cov_xx = 0.0;
  double cov_xy = 0.0;
  double cov_yy = 0.0;
  double dist_to_fp = 0.0;
  double strip_mass_x = 0.0;
  double strip_mass_y = 0.0;
  double box_mass = 0.0;
  long cap = 0;
  bool monte_carlo = false;
};

// Quasi-stationary summary at each K, holding the normed map fixed. Exact
// matrix route when the truncated chain fits the budgets, particle route
// otherwise.
std::vector<SweepRecord> sweep_K(const StochasticModel& base,
                                 const SweepOptions& opts);

// Least squares of -log(1 - lambda) against 1/K.
LinearFit fit_lambda_scaling(const std::vector<SweepRecord>& records);

struct RetentionPoint {
  double K = 0.0;
  long trials = 0;
  long escapes = 0;
  double retention = 0.0;        // fraction of trials that never left U(C)
  double retention_lower = 0.0;  // one-sided 95% lower confidence bound
};

struct RetentionOptions {
  long steps = 10;
  long repeats = 20;      // trajectories per start state
  long max_starts = 100;  // lattice starts kept inside C
  double inflate_frac = 0.05;  // U(C) margin, as a fraction of C's diagonal
  std::uint64_t seed = 0;
};

// Fraction of stochastic paths started on a count lattice inside C that stay
// in the inflated box U(C) for all of the first `steps` generations.
RetentionPoint retention_check(const StochasticModel& model, const Box& c_box,
                               const RetentionOptions& opts);

struct RetentionStudy {
  Box c_box;
  std::vector<RetentionPoint> points;
  double w_hat = 0.0;  // slope of -log(1 - retention_lower) against 1/K
  double w_min = 0.0;  // min over K of K * (-log(1 - retention_lower))
};

// Runs retention_check across Ks with a shared contracting box found from
// the normed map (which does not change with K when both scales move
// together).
RetentionStudy retention_sweep(const StochasticModel& base,
                               const std::vector<double>& Ks,
                               const RetentionOptions& opts);

// Linearization of the normed process at the coexistence point: next
// deviation = A deviation + noise, noise covariance diagonal from the
// one-step conditional variances, stationary covariance from the discrete
// Lyapunov equation.
struct ArApproximation {
  Eigen::Matrix2d A = Eigen::Matrix2d::Zero();
  Eigen::Matrix2d noise_cov = Eigen::Matrix2d::Zero();
  Eigen::Matrix2d stationary_cov = Eigen::Matrix2d::Zero();
  double lyapunov_residual = 0.0;
};

ArApproximation ar_approximation(const StochasticModel& model);

struct CycleSupportRecord {
  double K = 0.0;
  double lambda = 0.0;
  double mass_near_cycle = 0.0;
  long cap = 0;
  bool monte_carlo = false;
};

struct CycleSupportOptions {
  std::vector<double> Ks;
  double radius = 0.25;  // Euclidean capture distance around cycle points
  NormedState start{0.9, 1.1};
  CycleOptions cycle{};
  long cap0 = 0;
  ChainOptions chain{};
  QsdOptions qsd{};
  bool allow_monte_carlo = true;
  McQsdOptions mc{};
  std::uint64_t seed = 0;
};

struct CycleSupportStudy {
  CycleResult cycle;
  double cycle_multiplier = 0.0;  // spectral radius of the period-product DF
  std::vector<CycleSupportRecord> records;
  double tau = 0.0;  // Kendall trend of mass_near_cycle against 1/K
};

// For parameter sets whose coexistence point repels but whose map has an
// attracting cycle, tracks how much quasi-stationary mass sits near the
// cycle as K shrinks.
CycleSupportStudy cycle_support_study(const StochasticModel& base,
                                      const CycleSupportOptions& opts);

}  // namespace rcm
