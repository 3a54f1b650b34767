#include "doctest.h"

#include "rcm/offspring.hpp"
#include "rcm/rng.hpp"

#include <cmath>
#include <numeric>
#include <vector>

using namespace rcm;

namespace {

// Direct moment sums from the pmf, independent of the analytic accessors.
std::pair<double, double> pmf_moments(const OffspringDistribution& q, int cap) {
  const std::vector<double> p = q.pmf_vector(cap);
  double m1 = 0.0, m2 = 0.0;
  for (int k = 0; k <= cap; ++k) {
    m1 += k * p[k];
    m2 += double(k) * k * p[k];
  }
  return {m1, m2 - m1 * m1};
}

}  // namespace

TEST_SUITE("offspring") {

TEST_CASE("poisson law exposes its textbook moments") {
  const auto q = OffspringDistribution::poisson(std::exp(1.3));
  const double mu = std::exp(1.3);
  CHECK(q.mean() == doctest::Approx(mu).epsilon(1e-15));
  CHECK(q.variance() == doctest::Approx(mu).epsilon(1e-15));
  CHECK(q.q0() == doctest::Approx(std::exp(-mu)).epsilon(1e-14));
  CHECK(q.pmf(0) == doctest::Approx(std::exp(-mu)).epsilon(1e-14));
  CHECK(q.pmf(3) ==
        doctest::Approx(std::exp(-mu) * mu * mu * mu / 6.0).epsilon(1e-13));
  const auto [m1, v] = pmf_moments(q, 200);
  CHECK(m1 == doctest::Approx(mu).epsilon(1e-12));
  CHECK(v == doctest::Approx(mu).epsilon(1e-10));
}

TEST_CASE("geometric law has the right mean, variance and tail") {
  const double mu = 2.5;
  const auto q = OffspringDistribution::geometric(mu);
  const double c = mu / (1.0 + mu);
  CHECK(q.mean() == doctest::Approx(mu).epsilon(1e-14));
  CHECK(q.variance() == doctest::Approx(mu * (1.0 + mu)).epsilon(1e-14));
  CHECK(q.q0() == doctest::Approx(1.0 - c).epsilon(1e-14));
  for (int k : {0, 1, 5, 9})
    CHECK(q.pmf(k) ==
          doctest::Approx((1.0 - c) * std::pow(c, k)).epsilon(1e-13));
  const auto [m1, v] = pmf_moments(q, 400);
  CHECK(m1 == doctest::Approx(mu).epsilon(1e-10));
  CHECK(v == doctest::Approx(mu * (1.0 + mu)).epsilon(1e-8));
}

TEST_CASE("finite law keeps the table it was given") {
  const std::vector<double> table{0.1, 0.3, 0.4, 0.2};
  const auto q = OffspringDistribution::finite(table);
  CHECK(q.mean() == doctest::Approx(1.7).epsilon(1e-14));
  CHECK(q.q0() == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(q.support_max() == 3);
  CHECK(q.pmf(2) == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(q.pmf(7) == 0.0);
  const auto [m1, v] = pmf_moments(q, 3);
  CHECK(v == doctest::Approx(q.variance()).epsilon(1e-12));
  CHECK(m1 == doctest::Approx(1.7).epsilon(1e-14));
}

TEST_CASE("finite law rejects bad tables") {
  CHECK_THROWS_AS(OffspringDistribution::finite({0.5, 0.4}), domain_error);
  CHECK_THROWS_AS(OffspringDistribution::finite({0.5, -0.1, 0.6}),
                  domain_error);
  CHECK_THROWS_AS(OffspringDistribution::finite({}), domain_error);
}

TEST_CASE("zero truncated poisson hits the requested mean with no zeros") {
  const double mu = std::exp(1.2);
  const auto q = OffspringDistribution::zero_truncated_poisson(mu);
  CHECK(q.q0() == 0.0);
  CHECK(q.pmf(0) == 0.0);
  CHECK(q.support_min() == 1);
  const auto [m1, v] = pmf_moments(q, 300);
  CHECK(m1 == doctest::Approx(mu).epsilon(1e-11));
  CHECK(q.mean() == doctest::Approx(mu).epsilon(1e-11));
  CHECK(v == doctest::Approx(q.variance()).epsilon(1e-9));
  // Requested means at or below one offspring per parent are unreachable.
  CHECK_THROWS_AS(OffspringDistribution::zero_truncated_poisson(1.0),
                  domain_error);
}

TEST_CASE("every law's pmf sums to one") {
  for (const auto& q : {OffspringDistribution::poisson(3.0),
                        OffspringDistribution::geometric(3.0),
                        OffspringDistribution::zero_truncated_poisson(3.0),
                        OffspringDistribution::finite({0.25, 0.5, 0.25})}) {
    const std::vector<double> p = q.pmf_vector(500);
    const double total = std::accumulate(p.begin(), p.end(), 0.0);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("generating function derivatives match the pmf sums") {
  // S(s) = sum q_k e^{sk}; check S, S', S'' against direct summation at a
  // point inside every law's domain.
  const double s = 0.21;
  for (const auto& q : {OffspringDistribution::poisson(2.2),
                        OffspringDistribution::geometric(1.4),
                        OffspringDistribution::zero_truncated_poisson(2.2),
                        OffspringDistribution::finite({0.2, 0.3, 0.5})}) {
    double S = 0.0, S1 = 0.0, S2 = 0.0;
    const std::vector<double> p = q.pmf_vector(400);
    for (int k = 0; k < static_cast<int>(p.size()); ++k) {
      const double w = p[k] * std::exp(s * k);
      S += w;
      S1 += k * w;
      S2 += double(k) * k * w;
    }
    CHECK(q.mgf(s) == doctest::Approx(S).epsilon(1e-11));
    CHECK(q.mgf_d1(s) == doctest::Approx(S1).epsilon(1e-11));
    CHECK(q.mgf_d2(s) == doctest::Approx(S2).epsilon(1e-11));
    CHECK(q.mgf(0.0) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(q.mgf_d1(0.0) == doctest::Approx(q.mean()).epsilon(1e-12));
  }
}

TEST_CASE("geometric generating function blows up at its domain edge") {
  const auto q = OffspringDistribution::geometric(2.0);
  const double edge = q.mgf_domain_sup();
  CHECK(edge == doctest::Approx(-std::log(2.0 / 3.0)).epsilon(1e-13));
  CHECK(std::isfinite(q.mgf(edge - 1e-6)));
  CHECK(q.mgf(edge - 1e-6) > 1e4);
  CHECK(std::isinf(OffspringDistribution::poisson(2.0).mgf_domain_sup()));
}

TEST_CASE("sampling reproduces the mean and variance") {
  SplitRng rng = SplitRng::from(2024, {9});
  for (const auto& q : {OffspringDistribution::poisson(3.3),
                        OffspringDistribution::geometric(2.1),
                        OffspringDistribution::zero_truncated_poisson(3.3),
                        OffspringDistribution::finite({0.1, 0.2, 0.3, 0.4})}) {
    const int n = 200000;
    double sum = 0.0, sumsq = 0.0;
    long minv = 1 << 30;
    for (int i = 0; i < n; ++i) {
      const long k = q.sample(rng);
      sum += k;
      sumsq += double(k) * k;
      minv = std::min(minv, k);
    }
    const double m = sum / n;
    const double v = sumsq / n - m * m;
    const double se_mean = std::sqrt(q.variance() / n);
    CHECK(std::abs(m - q.mean()) < 5 * se_mean);
    CHECK(std::abs(v - q.variance()) < 0.05 * (q.variance() + 1.0));
    CHECK(minv >= q.support_min());
  }
}

TEST_CASE("litter sums collapse to a single draw for poisson parents") {
  SplitRng a = SplitRng::from(77, {1});
  SplitRng b = SplitRng::from(77, {1});
  const auto q = OffspringDistribution::poisson(2.7);
  // Identical substreams must give identical sums, and the sum over n
  // parents has mean n mu within Monte Carlo error.
  const long s1 = q.sample_sum(a, 6);
  const long s2 = q.sample_sum(b, 6);
  CHECK(s1 == s2);
  SplitRng rng = SplitRng::from(77, {2});
  double acc = 0.0;
  const int n = 50000;
  for (int i = 0; i < n; ++i) acc += q.sample_sum(rng, 6);
  CHECK(std::abs(acc / n - 6 * 2.7) < 5 * std::sqrt(6 * 2.7 / n));
}

TEST_CASE("factory ties the law mean to the growth rate") {
  OffspringConfig cfg;
  cfg.kind = "poisson";
  const auto q = make_offspring(cfg, 1.4);
  CHECK(q.mean() == doctest::Approx(std::exp(1.4)).epsilon(1e-13));

  OffspringConfig bad;
  bad.kind = "finite";
  bad.pmf = {0.5, 0.5};  // mean 0.5, nowhere near exp(1.4)
  CHECK_THROWS_AS(make_offspring(bad, 1.4), domain_error);

  OffspringConfig zt;
  zt.kind = "zero_truncated_poisson";
  CHECK(make_offspring(zt, 1.4).q0() == 0.0);

  OffspringConfig unknown;
  unknown.kind = "negative_binomial";
  CHECK_THROWS_AS(make_offspring(unknown, 1.4), domain_error);
}

TEST_CASE("counter rng is reproducible and splits cleanly") {
  SplitRng a = SplitRng::from(123, {4, 5});
  SplitRng b = SplitRng::from(123, {4, 5});
  for (int i = 0; i < 16; ++i) CHECK(a() == b());
  // Disjoint paths should decorrelate instantly; check first outputs differ.
  CHECK(SplitRng::from(123, {4, 6})() != SplitRng::from(123, {4, 5})());
  CHECK(SplitRng::from(124, {4, 5})() != SplitRng::from(123, {4, 5})());
  const double u = SplitRng::from(9, {0}).uniform01();
  CHECK(u >= 0.0);
  CHECK(u < 1.0);
}

}  // TEST_SUITE
