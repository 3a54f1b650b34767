#pragma once

#include <vector>

namespace rcm {

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

// Ordinary least squares y on x; needs at least two distinct x values.
LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

// Kendall's tau-b, with the usual tie correction.
double kendall_tau(const std::vector<double>& x, const std::vector<double>& y);

// Standard normal quantile.
double probit(double p);

// One-sided lower confidence bound for a binomial success probability.
// All-success samples use the exact Clopper-Pearson form (1-conf)^(1/n);
// otherwise the Wilson score bound.
double binomial_lower_bound(long successes, long n, double conf);

}  // namespace rcm
