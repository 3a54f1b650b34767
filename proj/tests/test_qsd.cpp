#include "doctest.h"

#include "rcm/qsd.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <vector>

using namespace rcm;

namespace {

StochasticModel poisson_model(double r, double ab, double K) {
  ModelParams p;
  p.r = p.r_tilde = r;
  p.a = p.b = ab;
  p.K = p.K_tilde = K;
  OffspringConfig cfg;
  cfg.kind = "poisson";
  return make_model(p, cfg, cfg);
}

Eigen::SparseMatrix<double, Eigen::RowMajor> sparse2x2(double a, double b,
                                                       double c, double d) {
  Eigen::SparseMatrix<double, Eigen::RowMajor> Q(2, 2);
  Q.insert(0, 0) = a;
  Q.insert(0, 1) = b;
  Q.insert(1, 0) = c;
  Q.insert(1, 1) = d;
  Q.makeCompressed();
  return Q;
}

}  // namespace

TEST_SUITE("qsd") {

TEST_CASE("power iteration recovers a hand-solved eigenpair") {
  // [[0.5, 0.2], [0.3, 0.4]] has left eigenvector (0.6, 0.4) at 0.7.
  const auto Q = sparse2x2(0.5, 0.2, 0.3, 0.4);
  const QsdResult res = power_iterate_qsd(Q);
  CHECK(res.lambda == doctest::Approx(0.7).epsilon(1e-10));
  CHECK(res.pi(0) == doctest::Approx(0.6).epsilon(1e-9));
  CHECK(res.pi(1) == doctest::Approx(0.4).epsilon(1e-9));
  CHECK(res.residual <= 1e-10);
  CHECK_FALSE(res.degenerate);
  CHECK(res.pi.sum() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("identity matrix trips the degeneracy flag") {
  const auto Q = sparse2x2(1.0, 0.0, 0.0, 1.0);
  const QsdResult res = power_iterate_qsd(Q);
  CHECK(res.degenerate);
}

TEST_CASE("uniqueness probe can be switched off") {
  const auto Q = sparse2x2(1.0, 0.0, 0.0, 1.0);
  QsdOptions opts;
  opts.check_uniqueness = false;
  CHECK_FALSE(power_iterate_qsd(Q, opts).degenerate);
}

TEST_CASE("chain rows plus leaks account for all probability") {
  const StochasticModel model = poisson_model(1.2, 0.5, 0.3);
  const TruncatedChain chain = build_truncated_chain(model, 18);
  REQUIRE(chain.size() == 18 * 18);
  const Eigen::VectorXd row_sums = chain.Q * Eigen::VectorXd::Ones(chain.size());
  for (long i = 0; i < chain.size(); ++i) {
    const double total = row_sums(i) + chain.absorption(i) + chain.overflow(i);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(chain.absorption(i) >= 0.0);
    CHECK(chain.overflow(i) >= -1e-15);
  }
  CHECK(chain.max_overflow == doctest::Approx(chain.overflow.maxCoeff()));
}

TEST_CASE("chain entries factor into per-species transition pmfs") {
  const StochasticModel model = poisson_model(1.2, 0.5, 0.3);
  const long cap = 14;
  const TruncatedChain chain = build_truncated_chain(model, cap);
  const Eigen::MatrixXd dense = Eigen::MatrixXd(chain.Q);
  for (const PopulationState s :
       {PopulationState{1, 1}, PopulationState{4, 7}, PopulationState{14, 14}}) {
    const TransitionPmf pu = exact_transition_pmf(model, s, Species::U, cap);
    const TransitionPmf pv = exact_transition_pmf(model, s, Species::V, cap);
    const long row = chain.index(s.m, s.n);
    for (long m2 : {1L, 2L, 6L, 14L}) {
      for (long n2 : {1L, 3L, 14L}) {
        const double want = pu.probs[m2] * pv.probs[n2];
        const double got = dense(row, chain.index(m2, n2));
        CHECK(got == doctest::Approx(want).epsilon(1e-11));
      }
    }
    // Absorption at this row is the closed-form product of zero landings.
    const double a0 = pu.probs[0], b0 = pv.probs[0];
    CHECK(chain.absorption(row) ==
          doctest::Approx(a0 + b0 - a0 * b0).epsilon(1e-12));
  }
}

TEST_CASE("state indexing round-trips") {
  TruncatedChain chain;
  chain.cap = 9;
  for (long m : {1L, 4L, 9L}) {
    for (long n : {1L, 2L, 9L}) {
      const long idx = chain.index(m, n);
      const PopulationState s = chain.state(idx);
      CHECK(s.m == m);
      CHECK(s.n == n);
    }
  }
}

TEST_CASE("adaptive cap growth pushes overflow under the budget") {
  const StochasticModel model = poisson_model(1.2, 0.5, 0.25);
  ChainOptions opts;
  opts.overflow_budget = 1e-8;
  const TruncatedChain chain = build_truncated_chain_adaptive(model, 8, opts);
  CHECK(chain.max_overflow <= 1e-8);
  CHECK(chain.cap > 8);
}

TEST_CASE("infeasible state spaces are refused") {
  const StochasticModel model = poisson_model(1.2, 0.5, 0.001);
  CHECK_THROWS_AS(build_truncated_chain(model, 2000), infeasible_error);
  CHECK(default_cap(model.params) > 1000);
}

TEST_CASE("qsd of a small chain is a genuine left eigenvector") {
  const StochasticModel model = poisson_model(1.2, 0.5, 0.3);
  const TruncatedChain chain = build_truncated_chain_adaptive(model, 12);
  const QsdResult res = power_iterate_qsd(chain);
  CHECK(res.lambda > 0.0);
  CHECK(res.lambda < 1.0);
  CHECK(res.residual <= 1e-10);
  CHECK_FALSE(res.degenerate);
  CHECK(res.pi.minCoeff() >= 0.0);
  CHECK(res.pi.sum() == doctest::Approx(1.0).epsilon(1e-12));
  const Eigen::VectorXd left = chain.Q.transpose() * res.pi;
  CHECK((left - res.lambda * res.pi).lpNorm<1>() <= 1e-10);
  CHECK(res.lambda <= lambda_upper_bound(model.params));
}

TEST_CASE("decay parameter bound and lifetime formula") {
  ModelParams p;
  p.r = p.r_tilde = 1.0;
  p.a = p.b = 0.4;
  p.K = 0.2;
  p.K_tilde = 0.5;
  const double d = delta_constant();
  CHECK(lambda_upper_bound(p) ==
        doctest::Approx(1.0 - std::pow(d, 5.0 + 2.0)).epsilon(1e-13));
  CHECK(expected_lifetime(0.75) == doctest::Approx(4.0).epsilon(1e-13));
  CHECK(expected_lifetime(0.0) == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("discrete sampler reproduces its weights") {
  Eigen::VectorXd w(4);
  w << 0.1, 0.0, 0.6, 0.3;
  const DiscreteSampler sampler(w);
  SplitRng rng = SplitRng::from(31, {0});
  std::vector<long> counts(4, 0);
  const int n = 200000;
  for (int i = 0; i < n; ++i) ++counts[sampler.draw(rng)];
  CHECK(counts[1] == 0);
  for (int k : {0, 2, 3}) {
    const double phat = double(counts[k]) / n;
    CHECK(std::abs(phat - w(k)) < 5 * std::sqrt(w(k) * (1 - w(k)) / n));
  }
}

TEST_CASE("particle ensemble tracks the matrix qsd") {
  const StochasticModel model = poisson_model(1.2, 0.5, 0.3);
  const TruncatedChain chain = build_truncated_chain_adaptive(model, 12);
  const QsdResult exact = power_iterate_qsd(chain);

  McQsdOptions opts;
  opts.particles = 4000;
  opts.cap = chain.cap;
  opts.seed = 2718;
  const McQsdResult mc = monte_carlo_qsd(model, opts);

  CHECK(mc.occupation.size() == chain.size());
  CHECK(mc.occupation.sum() == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(std::abs(mc.lambda_hat - exact.lambda) <
        std::max(5 * mc.lambda_se, 0.02));
  const double tv = 0.5 * (mc.occupation - exact.pi).lpNorm<1>();
  CHECK(tv < 0.1);
  CHECK(mc.out_of_cap_fraction < 0.01);
  CHECK(mc.attempts >= 1);
}

TEST_CASE("lifetimes from a qsd start are geometric") {
  const StochasticModel model = poisson_model(1.2, 0.5, 0.3);
  const TruncatedChain chain = build_truncated_chain_adaptive(model, 12);
  const QsdResult res = power_iterate_qsd(chain);
  const DiscreteSampler sampler(res.pi);

  // Bin absorbed-at-step counts and chi-square them against the geometric
  // law with the chain's own decay parameter (no fitted quantities).
  const int n = 6000;
  const int tail_bin = 6;
  std::vector<long> counts(tail_bin + 1, 0);
  SplitRng pick = SplitRng::from(515, {0});
  for (int i = 0; i < n; ++i) {
    const PopulationState start = chain.state(sampler.draw(pick));
    const long life = simulate_lifetime(model, start, 4000, 515, i);
    REQUIRE(life >= 1);
    ++counts[std::min<long>(life, tail_bin)];
  }
  double chi2 = 0.0;
  for (int t = 1; t <= tail_bin; ++t) {
    const double p = t < tail_bin
                         ? std::pow(res.lambda, t - 1) * (1.0 - res.lambda)
                         : std::pow(res.lambda, tail_bin - 1);
    const double expect = n * p;
    chi2 += (counts[t] - expect) * (counts[t] - expect) / expect;
  }
  // Five degrees of freedom at the 5% level.
  CHECK(chi2 < 11.0705);
}

TEST_CASE("particle ensemble is reproducible for a fixed seed") {
  const StochasticModel model = poisson_model(1.2, 0.5, 0.3);
  McQsdOptions opts;
  opts.particles = 500;
  opts.steps = 60;
  opts.burn_in = 20;
  opts.cap = 15;
  opts.seed = 99;
  const McQsdResult a = monte_carlo_qsd(model, opts);
  const McQsdResult b = monte_carlo_qsd(model, opts);
  CHECK(a.lambda_hat == b.lambda_hat);
  CHECK((a.occupation - b.occupation).lpNorm<1>() == 0.0);
  CHECK(a.resampled_total == b.resampled_total);
}

}  // TEST_SUITE
