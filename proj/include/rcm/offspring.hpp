#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rcm/params.hpp"
#include "rcm/rng.hpp"

namespace rcm {

enum class OffspringKind { Poisson, Geometric, Finite, ZeroTruncatedPoisson };

// Litter-size law of a single parent, supported on {0, 1, 2, ...}. The
// branching model requires mean e^r so that conditional means reproduce the
// competition map; factories take the mean directly.
class OffspringDistribution {
 public:
  static OffspringDistribution poisson(double mean);
  // q_k = (1-c) c^k with continuation c = mean/(1+mean).
  static OffspringDistribution geometric(double mean);
  // Explicit pmf q_0..q_max; must be nonnegative and sum to 1 within 1e-9.
  static OffspringDistribution finite(std::vector<double> q);
  // Poisson conditioned on {k >= 1}, rate solved so the mean comes out as
  // requested; needs mean > 1.
  static OffspringDistribution zero_truncated_poisson(double mean);

  OffspringKind kind() const { return kind_; }
  std::string name() const;

  double pmf(long k) const;
  double mean() const { return mean_; }
  double variance() const;
  double q0() const { return pmf(0); }

  // Largest k with positive mass, empty if the support is unbounded.
  std::optional<long> support_max() const;

  // q_0..q_cap as a dense vector.
  std::vector<double> pmf_vector(long cap) const;

  // Moment generating function S(s) = E e^{sX} and derivatives in s.
  // Finite for s < mgf_domain_sup() only; out-of-domain arguments throw.
  double mgf(double s) const;
  double mgf_d1(double s) const;
  double mgf_d2(double s) const;
  double mgf_domain_sup() const;

  // Overflow-stable forms: ln S(s), S'(s)/S(s), S''(s)/S(s). These stay
  // finite long after S itself leaves double range, which the tilted-measure
  // solve needs.
  double log_mgf(double s) const;
  double mgf_ratio1(double s) const;
  double mgf_ratio2(double s) const;

  // Smallest k with positive mass.
  long support_min() const;

  long sample(SplitRng& rng) const;
  // Total litter of n independent parents.
  long sample_sum(SplitRng& rng, long n) const;

 private:
  OffspringDistribution() = default;

  OffspringKind kind_ = OffspringKind::Poisson;
  double mean_ = 0.0;
  double nu_ = 0.0;  // underlying Poisson rate (Poisson / zero-truncated)
  std::vector<double> q_;    // Finite only
  std::vector<double> cdf_;  // Finite only
};

struct OffspringConfig {
  std::string kind = "poisson";
  std::vector<double> pmf;  // "finite" only
};

// Builds the law with mean e^growth_rate. For "finite" the supplied pmf is
// used as-is and its mean must match e^growth_rate within 1e-9.
OffspringDistribution make_offspring(const OffspringConfig& cfg,
                                     double growth_rate);

}  // namespace rcm
