#pragma once

#include <Eigen/Core>
#include <optional>
#include <vector>

#include "rcm/params.hpp"

namespace rcm {

// One step of the unnormed 1-D Ricker map x -> x*exp(r - K*x).
double step_1d(double x, double r, double K);

// The normed competition map F(x,y) = (x e^{r-x-b_eff y}, y e^{rt-a_eff x-y}).
NormedState map_F(const NormedState& p, const ModelParams& params);

// Analytic Jacobian of F.
Eigen::Matrix2d jacobian_F(const NormedState& p, const ModelParams& params);

// Spectral radius of a real 2x2 matrix.
double spectral_radius(const Eigen::Matrix2d& m);

struct FixedPointReport {
  NormedState origin;
  NormedState axis_x;   // (r, 0)
  NormedState axis_y;   // (0, r_tilde)
  std::optional<NormedState> coexistence;
  double max_residual = 0.0;  // max over reported points of |F(p)-p|_inf
  bool degenerate_ab = false; // ab == 1, coexistence formula undefined
};

// All fixed points of F with residual check |F(p)-p|_inf <= 1e-10. The
// coexistence entry is present iff both components of the closed-form
// candidate are strictly positive (and ab != 1).
FixedPointReport fixed_points(const ModelParams& params);

// ab < 1 and r > b_eff*r_tilde and r_tilde > a_eff*r.
bool mutual_invasibility(const ModelParams& params);

enum class Stability { Attracting, Repelling, NonHyperbolic };

struct StabilityClass {
  Stability verdict = Stability::NonHyperbolic;
  double jacobian_spectral_radius = 0.0;
  bool condition_satisfied = false;  // the two-sided inequality chain
  bool routes_disagree = false;      // chain vs spectral radius, off-band
};

// Classifies the coexistence fixed point. The inequality chain is evaluated
// with the effective coefficients a_eff, b_eff; the verdict comes from the
// spectral radius of the analytic Jacobian, with a NonHyperbolic band of
// width 1e-6 around radius 1. Requires mutual invasibility.
StabilityClass classify_coexistence(const ModelParams& params);

// [p0, F(p0), ..., F^T(p0)]. Throws numeric_error naming the step index if
// the orbit leaves the finite range.
std::vector<NormedState> iterate_orbit(const NormedState& p0,
                                       const ModelParams& params, long T);

// F^T(p0) without storing the orbit.
NormedState iterate_to(const NormedState& p0, const ModelParams& params,
                       long T);

struct CycleOptions {
  long burn_in = 10000;
  int max_period = 64;
  double tol = 1e-8;
};

struct CycleResult {
  int period = 0;
  std::vector<NormedState> points;
};

// Smallest period <= max_period with |F^period(p)-p|_inf < tol after burn-in.
std::optional<CycleResult> detect_cycle(const ModelParams& params,
                                        const NormedState& p0,
                                        const CycleOptions& opts = {});

struct Box {
  double x_lo = 0, x_hi = 0, y_lo = 0, y_hi = 0;

  bool contains(const NormedState& p) const {
    return p.x() >= x_lo && p.x() <= x_hi && p.y() >= y_lo && p.y() <= y_hi;
  }
  // Distance from an interior point to the complement; negative outside.
  double inner_distance(const NormedState& p) const {
    double d = p.x() - x_lo;
    d = std::min(d, x_hi - p.x());
    d = std::min(d, p.y() - y_lo);
    d = std::min(d, y_hi - p.y());
    return d;
  }
  double diagonal() const {
    return std::hypot(x_hi - x_lo, y_hi - y_lo);
  }
  Box inflated(double margin) const {
    return Box{x_lo - margin, x_hi + margin, y_lo - margin, y_hi + margin};
  }
};

struct GridSpec {
  int nx = 160;
  int ny = 160;
};

struct InvariantSetResult {
  Box box;
  int iterate_n = 1;     // N with F^N(C) strictly inside C
  double margin = 0.0;   // d(C^c, F^N(C)) lower bound from the grid check
};

// Searches a deterministic family of candidate rectangles strictly inside the
// open first quadrant and returns the first one verified invariant by a grid
// evaluation with a Lipschitz safety margin. Requires mutual invasibility.
std::optional<InvariantSetResult> find_invariant_box(const ModelParams& params,
                                                     const GridSpec& grid = {});

// C1 and smallest N <= max_N with F^N(C1) at verified positive distance from
// the complement of C1.
std::optional<InvariantSetResult> find_contracting_set(
    const ModelParams& params, int max_N, const GridSpec& grid = {});

// (1/T) * sum_{t=0}^{T-1} x_t for the unnormed 1-D Ricker orbit from x0.
double time_average_1d(double x0, double r, double K, long T);

}  // namespace rcm
