#include "rcm/offspring.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace rcm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double poisson_log_pmf(long k, double nu) {
  return -nu + k * std::log(nu) - std::lgamma(k + 1.0);
}

// Mean of a zero-truncated Poisson as a function of the rate.
double ztp_mean(double nu) { return nu / -std::expm1(-nu); }

double solve_ztp_rate(double target_mean) {
  if (!(target_mean > 1.0 + 1e-12))
    throw domain_error("zero-truncated law needs mean > 1");
  double lo = 1e-12, hi = target_mean;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (ztp_mean(mid) < target_mean ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

OffspringDistribution OffspringDistribution::poisson(double mean) {
  if (!(mean > 0.0) || !std::isfinite(mean))
    throw domain_error("offspring mean must be finite and > 0");
  OffspringDistribution d;
  d.kind_ = OffspringKind::Poisson;
  d.mean_ = mean;
  d.nu_ = mean;
  return d;
}

OffspringDistribution OffspringDistribution::geometric(double mean) {
  if (!(mean > 0.0) || !std::isfinite(mean))
    throw domain_error("offspring mean must be finite and > 0");
  OffspringDistribution d;
  d.kind_ = OffspringKind::Geometric;
  d.mean_ = mean;
  return d;
}

OffspringDistribution OffspringDistribution::finite(std::vector<double> q) {
  if (q.empty()) throw domain_error("finite offspring pmf is empty");
  double sum = 0.0, mean = 0.0;
  for (std::size_t k = 0; k < q.size(); ++k) {
    if (!(q[k] >= 0.0) || !std::isfinite(q[k]))
      throw domain_error("finite offspring pmf entries must be >= 0");
    sum += q[k];
    mean += static_cast<double>(k) * q[k];
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw domain_error("finite offspring pmf must sum to 1");
  OffspringDistribution d;
  d.kind_ = OffspringKind::Finite;
  d.mean_ = mean;
  d.q_ = std::move(q);
  d.cdf_.resize(d.q_.size());
  std::partial_sum(d.q_.begin(), d.q_.end(), d.cdf_.begin());
  return d;
}

OffspringDistribution OffspringDistribution::zero_truncated_poisson(
    double mean) {
  OffspringDistribution d;
  d.kind_ = OffspringKind::ZeroTruncatedPoisson;
  d.nu_ = solve_ztp_rate(mean);
  d.mean_ = ztp_mean(d.nu_);
  return d;
}

std::string OffspringDistribution::name() const {
  switch (kind_) {
    case OffspringKind::Poisson: return "poisson";
    case OffspringKind::Geometric: return "geometric";
    case OffspringKind::Finite: return "finite";
    case OffspringKind::ZeroTruncatedPoisson: return "zero_truncated_poisson";
  }
  return "";
}

double OffspringDistribution::pmf(long k) const {
  if (k < 0) return 0.0;
  switch (kind_) {
    case OffspringKind::Poisson:
      return std::exp(poisson_log_pmf(k, nu_));
    case OffspringKind::Geometric: {
      const double c = mean_ / (1.0 + mean_);
      return std::exp(std::log1p(-c) + k * std::log(c));
    }
    case OffspringKind::Finite:
      return k < static_cast<long>(q_.size()) ? q_[k] : 0.0;
    case OffspringKind::ZeroTruncatedPoisson:
      if (k == 0) return 0.0;
      return std::exp(poisson_log_pmf(k, nu_) - std::log(-std::expm1(-nu_)));
  }
  return 0.0;
}

double OffspringDistribution::variance() const {
  switch (kind_) {
    case OffspringKind::Poisson:
      return mean_;
    case OffspringKind::Geometric:
      return mean_ * (1.0 + mean_);
    case OffspringKind::Finite: {
      double m2 = 0.0;
      for (std::size_t k = 0; k < q_.size(); ++k)
        m2 += static_cast<double>(k) * static_cast<double>(k) * q_[k];
      return m2 - mean_ * mean_;
    }
    case OffspringKind::ZeroTruncatedPoisson:
      return (nu_ + nu_ * nu_) / -std::expm1(-nu_) - mean_ * mean_;
  }
  return 0.0;
}

std::optional<long> OffspringDistribution::support_max() const {
  if (kind_ != OffspringKind::Finite) return std::nullopt;
  for (long k = static_cast<long>(q_.size()) - 1; k >= 0; --k)
    if (q_[k] > 0.0) return k;
  return 0;
}

std::vector<double> OffspringDistribution::pmf_vector(long cap) const {
  if (cap < 0) throw domain_error("pmf_vector: cap must be >= 0");
  std::vector<double> out(static_cast<std::size_t>(cap) + 1);
  for (long k = 0; k <= cap; ++k) out[k] = pmf(k);
  return out;
}

double OffspringDistribution::mgf_domain_sup() const {
  if (kind_ == OffspringKind::Geometric)
    return -std::log(mean_ / (1.0 + mean_));
  return kInf;
}

double OffspringDistribution::mgf(double s) const {
  if (s >= mgf_domain_sup()) throw domain_error("mgf argument out of domain");
  const double es = std::exp(s);
  switch (kind_) {
    case OffspringKind::Poisson:
      return std::exp(nu_ * (es - 1.0));
    case OffspringKind::Geometric: {
      const double c = mean_ / (1.0 + mean_);
      return (1.0 - c) / (1.0 - c * es);
    }
    case OffspringKind::Finite: {
      double sum = 0.0;
      for (std::size_t k = 0; k < q_.size(); ++k)
        sum += q_[k] * std::exp(s * static_cast<double>(k));
      return sum;
    }
    case OffspringKind::ZeroTruncatedPoisson:
      return (std::exp(nu_ * (es - 1.0)) - std::exp(-nu_)) / -std::expm1(-nu_);
  }
  return 0.0;
}

double OffspringDistribution::mgf_d1(double s) const {
  if (s >= mgf_domain_sup()) throw domain_error("mgf argument out of domain");
  const double es = std::exp(s);
  switch (kind_) {
    case OffspringKind::Poisson:
      return nu_ * es * std::exp(nu_ * (es - 1.0));
    case OffspringKind::Geometric: {
      const double c = mean_ / (1.0 + mean_);
      const double den = 1.0 - c * es;
      return (1.0 - c) * c * es / (den * den);
    }
    case OffspringKind::Finite: {
      double sum = 0.0;
      for (std::size_t k = 0; k < q_.size(); ++k)
        sum += static_cast<double>(k) * q_[k] * std::exp(s * static_cast<double>(k));
      return sum;
    }
    case OffspringKind::ZeroTruncatedPoisson:
      return nu_ * es * std::exp(nu_ * (es - 1.0)) / -std::expm1(-nu_);
  }
  return 0.0;
}

double OffspringDistribution::mgf_d2(double s) const {
  if (s >= mgf_domain_sup()) throw domain_error("mgf argument out of domain");
  const double es = std::exp(s);
  switch (kind_) {
    case OffspringKind::Poisson: {
      const double ne = nu_ * es;
      return (ne + ne * ne) * std::exp(nu_ * (es - 1.0));
    }
    case OffspringKind::Geometric: {
      const double c = mean_ / (1.0 + mean_);
      const double den = 1.0 - c * es;
      return (1.0 - c) * c * es * (1.0 + c * es) / (den * den * den);
    }
    case OffspringKind::Finite: {
      double sum = 0.0;
      for (std::size_t k = 0; k < q_.size(); ++k) {
        const double kk = static_cast<double>(k);
        sum += kk * kk * q_[k] * std::exp(s * kk);
      }
      return sum;
    }
    case OffspringKind::ZeroTruncatedPoisson: {
      const double ne = nu_ * es;
      return (ne + ne * ne) * std::exp(nu_ * (es - 1.0)) / -std::expm1(-nu_);
    }
  }
  return 0.0;
}

long OffspringDistribution::support_min() const {
  switch (kind_) {
    case OffspringKind::Poisson:
    case OffspringKind::Geometric:
      return 0;
    case OffspringKind::ZeroTruncatedPoisson:
      return 1;
    case OffspringKind::Finite:
      for (std::size_t k = 0; k < q_.size(); ++k)
        if (q_[k] > 0.0) return static_cast<long>(k);
      return 0;
  }
  return 0;
}

double OffspringDistribution::log_mgf(double s) const {
  if (s >= mgf_domain_sup()) throw domain_error("mgf argument out of domain");
  switch (kind_) {
    case OffspringKind::Poisson:
      return nu_ * std::expm1(s);
    case OffspringKind::Geometric: {
      const double c = mean_ / (1.0 + mean_);
      return std::log1p(-c) - std::log1p(-c * std::exp(s));
    }
    case OffspringKind::Finite: {
      const double shift = s > 0.0 ? s * support_max().value() : s * support_min();
      double sum = 0.0;
      for (std::size_t k = 0; k < q_.size(); ++k)
        sum += q_[k] * std::exp(s * static_cast<double>(k) - shift);
      return shift + std::log(sum);
    }
    case OffspringKind::ZeroTruncatedPoisson: {
      const double ne = nu_ * std::exp(s);
      const double tail = ne < 1e-8 ? std::log(ne) + std::log1p(-0.5 * ne)
                                    : std::log1p(-std::exp(-ne));
      return nu_ * std::expm1(s) + tail - std::log(-std::expm1(-nu_));
    }
  }
  return 0.0;
}

double OffspringDistribution::mgf_ratio1(double s) const {
  if (s >= mgf_domain_sup()) throw domain_error("mgf argument out of domain");
  const double es = std::exp(s);
  switch (kind_) {
    case OffspringKind::Poisson:
      return nu_ * es;
    case OffspringKind::Geometric: {
      const double c = mean_ / (1.0 + mean_);
      return c * es / (1.0 - c * es);
    }
    case OffspringKind::Finite: {
      const double shift = s > 0.0 ? s * support_max().value() : s * support_min();
      double num = 0.0, den = 0.0;
      for (std::size_t k = 0; k < q_.size(); ++k) {
        const double w = q_[k] * std::exp(s * static_cast<double>(k) - shift);
        num += static_cast<double>(k) * w;
        den += w;
      }
      return num / den;
    }
    case OffspringKind::ZeroTruncatedPoisson: {
      const double ne = nu_ * es;
      return ne < 1e-290 ? 1.0 : ne / -std::expm1(-ne);
    }
  }
  return 0.0;
}

double OffspringDistribution::mgf_ratio2(double s) const {
  if (s >= mgf_domain_sup()) throw domain_error("mgf argument out of domain");
  const double es = std::exp(s);
  switch (kind_) {
    case OffspringKind::Poisson: {
      const double ne = nu_ * es;
      return ne + ne * ne;
    }
    case OffspringKind::Geometric: {
      const double c = mean_ / (1.0 + mean_);
      const double ce = c * es;
      return ce * (1.0 + ce) / ((1.0 - ce) * (1.0 - ce));
    }
    case OffspringKind::Finite: {
      const double shift = s > 0.0 ? s * support_max().value() : s * support_min();
      double num = 0.0, den = 0.0;
      for (std::size_t k = 0; k < q_.size(); ++k) {
        const double kk = static_cast<double>(k);
        const double w = q_[k] * std::exp(s * kk - shift);
        num += kk * kk * w;
        den += w;
      }
      return num / den;
    }
    case OffspringKind::ZeroTruncatedPoisson: {
      const double ne = nu_ * es;
      return ne < 1e-290 ? 1.0 : (ne + ne * ne) / -std::expm1(-ne);
    }
  }
  return 0.0;
}

long OffspringDistribution::sample(SplitRng& rng) const {
  switch (kind_) {
    case OffspringKind::Poisson:
      return std::poisson_distribution<long>(nu_)(rng);
    case OffspringKind::Geometric:
      return std::geometric_distribution<long>(1.0 / (1.0 + mean_))(rng);
    case OffspringKind::Finite: {
      const double u = rng.uniform01();
      const auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
      return std::min<long>(it - cdf_.begin(),
                            static_cast<long>(cdf_.size()) - 1);
    }
    case OffspringKind::ZeroTruncatedPoisson: {
      std::poisson_distribution<long> pois(nu_);
      long k = 0;
      do {
        k = pois(rng);
      } while (k == 0);
      return k;
    }
  }
  return 0;
}

long OffspringDistribution::sample_sum(SplitRng& rng, long n) const {
  if (n <= 0) return 0;
  if (kind_ == OffspringKind::Poisson)
    return std::poisson_distribution<long>(n * nu_)(rng);
  long total = 0;
  for (long i = 0; i < n; ++i) total += sample(rng);
  return total;
}

OffspringDistribution make_offspring(const OffspringConfig& cfg,
                                     double growth_rate) {
  const double mean = std::exp(growth_rate);
  if (cfg.kind == "poisson") return OffspringDistribution::poisson(mean);
  if (cfg.kind == "geometric") return OffspringDistribution::geometric(mean);
  if (cfg.kind == "zero_truncated_poisson")
    return OffspringDistribution::zero_truncated_poisson(mean);
  if (cfg.kind == "finite") {
    auto d = OffspringDistribution::finite(cfg.pmf);
    if (std::abs(d.mean() - mean) > 1e-9)
      throw domain_error("finite offspring pmf mean must equal exp(r)");
    return d;
  }
  throw domain_error("unknown offspring kind '" + cfg.kind + "'");
}

}  // namespace rcm
