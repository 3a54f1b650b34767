#pragma once

#include <Eigen/Core>
#include <cmath>
#include <stdexcept>
#include <string>

namespace rcm {

// Normed densities (x, y) = (K*m, K_tilde*n).
using NormedState = Eigen::Vector2d;

struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
// Violated precondition or out-of-domain argument.
struct domain_error : error {
  using error::error;
};
// Non-convergence, divergence, resolution failure.
struct numeric_error : error {
  using error::error;
};
// Instance cannot be handled within the configured budgets.
struct infeasible_error : error {
  using error::error;
};

// The six model constants of the two-species competition map. a scales the
// influence of species 1 on species 2's litters, b the reverse.
struct ModelParams {
  double r = 1.0;
  double r_tilde = 1.0;
  double K = 1.0;
  double K_tilde = 1.0;
  double a = 0.0;
  double b = 0.0;

  // Coefficients of the normed map: b_eff = b*K/K_tilde, a_eff = a*K_tilde/K.
  double a_eff() const { return a * K_tilde / K; }
  double b_eff() const { return b * K / K_tilde; }

  void validate() const {
    auto bad = [](double v) { return !std::isfinite(v); };
    if (bad(r)) throw domain_error("model.r must be finite");
    if (bad(r_tilde)) throw domain_error("model.r_tilde must be finite");
    if (bad(K) || K <= 0.0) throw domain_error("model.K must be finite and > 0");
    if (bad(K_tilde) || K_tilde <= 0.0)
      throw domain_error("model.K_tilde must be finite and > 0");
    if (bad(a) || a < 0.0) throw domain_error("model.a must be finite and >= 0");
    if (bad(b) || b < 0.0) throw domain_error("model.b must be finite and >= 0");
    if (!std::isfinite(a_eff()) || !std::isfinite(b_eff()))
      throw domain_error("effective coefficients a*K_tilde/K, b*K/K_tilde must be finite");
  }

  ModelParams with_K(double k) const {
    ModelParams p = *this;
    p.K = k;
    p.K_tilde = k;
    return p;
  }
};

enum class Species { U, V };

}  // namespace rcm
