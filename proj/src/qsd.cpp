#include "rcm/qsd.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "rcm/deterministic.hpp"

namespace rcm {

namespace {

using SpMat = Eigen::SparseMatrix<double, Eigen::RowMajor>;

// v_j = sum_i pi_i Q_ij, accumulated row by row in a fixed order so repeated
// runs are bit-identical.
Eigen::VectorXd left_apply(const SpMat& Q, const Eigen::VectorXd& pi) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(Q.cols());
  for (long i = 0; i < Q.outerSize(); ++i) {
    const double w = pi(i);
    if (w == 0.0) continue;
    for (SpMat::InnerIterator it(Q, i); it; ++it) out(it.col()) += w * it.value();
  }
  return out;
}

struct IterationOutcome {
  Eigen::VectorXd pi;
  double lambda = 0.0;
  long iterations = 0;
  double residual = 0.0;
};

IterationOutcome run_power_iteration(const SpMat& Q, Eigen::VectorXd pi,
                                     const QsdOptions& opts) {
  pi /= pi.sum();
  double lambda_prev = -1.0;
  for (long it = 1; it <= opts.max_iter; ++it) {
    const Eigen::VectorXd v = left_apply(Q, pi);
    const double lambda = v.sum();
    if (!(lambda > 1e-300))
      throw numeric_error("power iteration: mass vanished, no positive eigenvector");
    const double residual = (v - lambda * pi).lpNorm<1>();
    const Eigen::VectorXd next = v / lambda;
    const double step = (next - pi).lpNorm<1>();
    pi = next;
    if (std::abs(lambda - lambda_prev) < opts.tol && step < opts.tol &&
        residual <= opts.tol) {
      // Re-evaluate at the returned vector so the reported pair is coherent.
      const Eigen::VectorXd vf = left_apply(Q, pi);
      const double lf = vf.sum();
      return {pi, lf, it, (vf - lf * pi).lpNorm<1>()};
    }
    lambda_prev = lambda;
  }
  throw numeric_error("power iteration did not converge within max_iter");
}

}  // namespace

QsdResult power_iterate_qsd(const SpMat& Q, const QsdOptions& opts) {
  if (Q.rows() != Q.cols() || Q.rows() < 1)
    throw domain_error("power iteration needs a square nonempty matrix");
  const long n = Q.rows();

  IterationOutcome first =
      run_power_iteration(Q, Eigen::VectorXd::Ones(n), opts);
  QsdResult res;
  res.pi = first.pi;
  res.lambda = first.lambda;
  res.iterations = first.iterations;
  res.residual = first.residual;

  if (opts.check_uniqueness && n > 1) {
    Eigen::VectorXd ramp(n);
    for (long i = 0; i < n; ++i) ramp(i) = static_cast<double>(i + 1);
    IterationOutcome second = run_power_iteration(Q, ramp, opts);
    res.degenerate =
        (second.pi - first.pi).lpNorm<1>() > std::max(1e-6, 1000.0 * opts.tol);
  }
  return res;
}

QsdResult power_iterate_qsd(const TruncatedChain& chain,
                            const QsdOptions& opts) {
  return power_iterate_qsd(chain.Q, opts);
}

double lambda_upper_bound(const ModelParams& params) {
  return 1.0 - one_step_origin_bound(params);
}

double expected_lifetime(double lambda) {
  if (!(lambda >= 0.0) || !(lambda < 1.0))
    throw domain_error("expected_lifetime needs lambda in [0, 1)");
  return 1.0 / (1.0 - lambda);
}

long default_cap(const ModelParams& params) {
  const double r = std::max(params.r, params.r_tilde);
  const double k = std::min(params.K, params.K_tilde);
  const long cap = static_cast<long>(std::ceil(3.0 * r / k));
  return std::max<long>(8, cap);
}

TruncatedChain build_truncated_chain(const StochasticModel& model, long cap,
                                     const ChainOptions& opts) {
  model.validate();
  if (cap < 1) throw domain_error("chain cap must be >= 1");
  if (cap * cap > 400000)
    throw infeasible_error("state space " + std::to_string(cap) + "^2 exceeds the 4e5 budget");

  TruncatedChain chain;
  chain.cap = cap;
  const long size = cap * cap;
  chain.absorption.resize(size);
  chain.overflow.resize(size);

  const TransitionKernel ku(model.offspring_u, cap, cap);
  const TransitionKernel kv(model.offspring_v, cap, cap);

  std::vector<Eigen::Triplet<double>> triplets;
  std::vector<std::pair<long, double>> ia, ib;
  long nnz = 0;
  for (long m = 1; m <= cap; ++m) {
    for (long n = 1; n <= cap; ++n) {
      const PopulationState s{m, n};
      const long row = chain.index(m, n);
      const Eigen::RowVectorXd A =
          ku.row(m, litter_survival_prob(model, s, Species::U));
      const Eigen::RowVectorXd B =
          kv.row(n, litter_survival_prob(model, s, Species::V));

      ia.clear();
      ib.clear();
      double sum_a = 0.0, sum_b = 0.0;
      for (long k = 1; k <= cap; ++k) {
        if (A(k) > opts.entry_cutoff) {
          ia.emplace_back(k, A(k));
          sum_a += A(k);
        }
        if (B(k) > opts.entry_cutoff) {
          ib.emplace_back(k, B(k));
          sum_b += B(k);
        }
      }
      chain.absorption(row) = A(0) + B(0) - A(0) * B(0);
      chain.overflow(row) =
          std::max(0.0, 1.0 - chain.absorption(row) - sum_a * sum_b);

      nnz += static_cast<long>(ia.size()) * static_cast<long>(ib.size());
      if (nnz > opts.nnz_budget)
        throw infeasible_error("chain would exceed the nonzero budget");
      for (const auto& [k, va] : ia)
        for (const auto& [l, vb] : ib)
          triplets.emplace_back(row, chain.index(k, l), va * vb);
    }
  }

  chain.Q.resize(size, size);
  chain.Q.setFromTriplets(triplets.begin(), triplets.end());
  chain.Q.makeCompressed();
  chain.max_overflow = chain.overflow.maxCoeff();
  return chain;
}

TruncatedChain build_truncated_chain_adaptive(const StochasticModel& model,
                                              long cap0,
                                              const ChainOptions& opts) {
  long cap = std::max<long>(1, cap0);
  for (;;) {
    TruncatedChain chain = build_truncated_chain(model, cap, opts);
    if (chain.max_overflow <= opts.overflow_budget) return chain;
    const long next = static_cast<long>(std::ceil(1.3 * static_cast<double>(cap)));
    cap = std::max(next, cap + 1);
  }
}

DiscreteSampler::DiscreteSampler(const Eigen::VectorXd& weights) {
  cdf_.resize(static_cast<std::size_t>(weights.size()));
  double acc = 0.0;
  for (long i = 0; i < weights.size(); ++i) {
    if (!(weights(i) >= 0.0))
      throw domain_error("sampler weights must be nonnegative");
    acc += weights(i);
    cdf_[i] = acc;
  }
  if (!(acc > 0.0)) throw domain_error("sampler weights must not all vanish");
}

long DiscreteSampler::draw(SplitRng& rng) const {
  const double u = rng.uniform01() * cdf_.back();
  const auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
  return std::min<long>(it - cdf_.begin(), static_cast<long>(cdf_.size()) - 1);
}

McQsdResult monte_carlo_qsd(const StochasticModel& model,
                            const McQsdOptions& opts) {
  model.validate();
  if (opts.cap < 1) throw domain_error("monte_carlo_qsd needs cap >= 1");
  if (opts.particles < 2 || opts.steps < 1 || opts.burn_in < 0)
    throw domain_error("monte_carlo_qsd needs particles >= 2, steps >= 1");

  const ModelParams& mp = model.params;
  const FixedPointReport fps = fixed_points(mp);
  double x0 = mp.r > 0.0 ? mp.r : 1.0;
  double y0 = mp.r_tilde > 0.0 ? mp.r_tilde : 1.0;
  if (fps.coexistence) {
    x0 = fps.coexistence->x();
    y0 = fps.coexistence->y();
  }
  const PopulationState init{
      std::max<long>(1, std::lround(x0 / mp.K)),
      std::max<long>(1, std::lround(y0 / mp.K_tilde))};

  const long size = opts.cap * opts.cap;
  for (int attempt = 0; attempt < opts.max_attempts; ++attempt) {
    const long N = opts.particles << attempt;
    std::vector<PopulationState> alive(static_cast<std::size_t>(N), init);
    std::vector<PopulationState> next(alive.size());
    std::vector<long> survivors;
    survivors.reserve(alive.size());

    McQsdResult res;
    res.occupation = Eigen::VectorXd::Zero(size);
    res.attempts = attempt + 1;
    std::vector<double> fracs;
    fracs.reserve(static_cast<std::size_t>(opts.steps));
    long out_of_cap = 0;
    bool extinct = false;

    const long total_steps = opts.burn_in + opts.steps;
    for (long t = 0; t < total_steps; ++t) {
      survivors.clear();
      for (long i = 0; i < N; ++i) {
        SplitRng rng = SplitRng::from(
            opts.seed, {static_cast<std::uint64_t>(attempt),
                        static_cast<std::uint64_t>(t),
                        2 * static_cast<std::uint64_t>(i)});
        next[i] = step(model, alive[i], rng);
        if (!next[i].absorbed()) survivors.push_back(i);
      }
      if (survivors.empty()) {
        extinct = true;
        break;
      }
      for (long i = 0; i < N; ++i) {
        if (!next[i].absorbed()) continue;
        SplitRng rng = SplitRng::from(
            opts.seed, {static_cast<std::uint64_t>(attempt),
                        static_cast<std::uint64_t>(t),
                        2 * static_cast<std::uint64_t>(i) + 1});
        next[i] = next[survivors[rng.below(survivors.size())]];
        ++res.resampled_total;
      }
      alive.swap(next);

      if (t >= opts.burn_in) {
        fracs.push_back(static_cast<double>(survivors.size()) /
                        static_cast<double>(N));
        for (const PopulationState& s : alive) {
          if (s.m <= opts.cap && s.n <= opts.cap) {
            res.occupation((s.m - 1) * opts.cap + (s.n - 1)) += 1.0;
          } else {
            ++out_of_cap;
          }
        }
      }
    }
    if (extinct) continue;

    res.lambda_hat =
        std::accumulate(fracs.begin(), fracs.end(), 0.0) /
        static_cast<double>(fracs.size());

    const long B = std::max<long>(2, std::min<long>(20, fracs.size() / 2));
    const long per = static_cast<long>(fracs.size()) / B;
    if (per >= 1) {
      std::vector<double> means;
      for (long b = 0; b < B; ++b) {
        double s = 0.0;
        for (long j = b * per; j < (b + 1) * per; ++j) s += fracs[j];
        means.push_back(s / static_cast<double>(per));
      }
      const double mbar =
          std::accumulate(means.begin(), means.end(), 0.0) / means.size();
      double var = 0.0;
      for (double m : means) var += (m - mbar) * (m - mbar);
      var /= static_cast<double>(means.size() - 1);
      res.lambda_se = std::sqrt(var / static_cast<double>(means.size()));
    }

    const double mass = res.occupation.sum();
    if (mass > 0.0) res.occupation /= mass;
    res.out_of_cap_fraction =
        static_cast<double>(out_of_cap) /
        (static_cast<double>(N) * static_cast<double>(opts.steps));
    return res;
  }
  throw numeric_error("monte_carlo_qsd: ensemble went extinct in every attempt");
}

}  // namespace rcm
