#include "rcm/deterministic.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace rcm {

double step_1d(double x, double r, double K) {
  if (!(x >= 0.0)) throw domain_error("step_1d: x must be >= 0");
  return x * std::exp(r - K * x);
}

NormedState map_F(const NormedState& p, const ModelParams& params) {
  const double x = p.x(), y = p.y();
  const double gx = std::exp(params.r - x - params.b_eff() * y);
  const double gy = std::exp(params.r_tilde - params.a_eff() * x - y);
  return NormedState(x * gx, y * gy);
}

Eigen::Matrix2d jacobian_F(const NormedState& p, const ModelParams& params) {
  const double x = p.x(), y = p.y();
  const double ae = params.a_eff(), be = params.b_eff();
  const double gx = std::exp(params.r - x - be * y);
  const double gy = std::exp(params.r_tilde - ae * x - y);
  Eigen::Matrix2d j;
  j << (1.0 - x) * gx, -be * x * gx, -ae * y * gy, (1.0 - y) * gy;
  return j;
}

double spectral_radius(const Eigen::Matrix2d& m) {
  const double tr = m.trace();
  const double det = m.determinant();
  const double disc = tr * tr - 4.0 * det;
  if (disc >= 0.0) {
    const double s = std::sqrt(disc);
    return std::max(std::abs(tr + s), std::abs(tr - s)) / 2.0;
  }
  return std::sqrt(det);
}

// Largest singular value, used as a local Lipschitz bound for F.
static double operator_norm(const Eigen::Matrix2d& m) {
  const Eigen::Matrix2d a = m.transpose() * m;
  const double tr = a.trace();
  const double det = a.determinant();
  const double disc = std::max(0.0, tr * tr - 4.0 * det);
  return std::sqrt((tr + std::sqrt(disc)) / 2.0);
}

static double residual_at(const NormedState& p, const ModelParams& params) {
  return (map_F(p, params) - p).cwiseAbs().maxCoeff();
}

// One damped Newton step on F(p) - p = 0, kept only if it shrinks the
// residual. The closed forms below are exact in real arithmetic, so this
// just trims floating-point error near ill-conditioned parameter sets.
static NormedState polish_fixed_point(NormedState p, const ModelParams& params) {
  for (int it = 0; it < 4; ++it) {
    const double res = residual_at(p, params);
    if (res <= 1e-13) break;
    const Eigen::Matrix2d jg = jacobian_F(p, params) - Eigen::Matrix2d::Identity();
    if (std::abs(jg.determinant()) < 1e-14) break;
    const NormedState q = p - jg.inverse() * (map_F(p, params) - p);
    if (!q.allFinite() || residual_at(q, params) >= res) break;
    p = q;
  }
  return p;
}

FixedPointReport fixed_points(const ModelParams& params) {
  params.validate();
  FixedPointReport rep;
  rep.origin = NormedState(0.0, 0.0);
  rep.axis_x = NormedState(params.r, 0.0);
  rep.axis_y = NormedState(0.0, params.r_tilde);

  const double ab = params.a * params.b;
  rep.degenerate_ab = (ab == 1.0);
  if (!rep.degenerate_ab) {
    const double xs = (params.r - params.b_eff() * params.r_tilde) / (1.0 - ab);
    const double ys = (params.r_tilde - params.a_eff() * params.r) / (1.0 - ab);
    if (xs > 0.0 && ys > 0.0) {
      rep.coexistence = polish_fixed_point(NormedState(xs, ys), params);
    }
  }

  rep.max_residual = std::max({residual_at(rep.origin, params),
                               residual_at(rep.axis_x, params),
                               residual_at(rep.axis_y, params)});
  if (rep.coexistence) {
    rep.max_residual =
        std::max(rep.max_residual, residual_at(*rep.coexistence, params));
  }
  return rep;
}

bool mutual_invasibility(const ModelParams& params) {
  params.validate();
  return params.a * params.b < 1.0 &&
         params.r > params.b_eff() * params.r_tilde &&
         params.r_tilde > params.a_eff() * params.r;
}

StabilityClass classify_coexistence(const ModelParams& params) {
  if (!mutual_invasibility(params))
    throw domain_error("classify_coexistence needs mutual invasibility");
  const FixedPointReport rep = fixed_points(params);
  if (!rep.coexistence)
    throw numeric_error("coexistence fixed point not located");

  StabilityClass out;
  const double ae = params.a_eff(), be = params.b_eff();
  const double r = params.r, rt = params.r_tilde;
  const double ab = params.a * params.b;
  const double prod = (r - be * rt) * (rt - ae * r);
  const double upper = (1.0 - be) * rt + (1.0 - ae) * r;
  const double lower = 2.0 * (1.0 - be) * rt + 2.0 * (1.0 - ae) * r - 4.0 * (1.0 - ab);
  out.condition_satisfied = (lower <= prod) && (prod < upper);

  out.jacobian_spectral_radius =
      spectral_radius(jacobian_F(*rep.coexistence, params));
  const double rho = out.jacobian_spectral_radius;
  if (std::abs(rho - 1.0) < 1e-6) {
    out.verdict = Stability::NonHyperbolic;
  } else {
    out.verdict = rho < 1.0 ? Stability::Attracting : Stability::Repelling;
    out.routes_disagree = out.condition_satisfied != (rho < 1.0);
  }
  return out;
}

std::vector<NormedState> iterate_orbit(const NormedState& p0,
                                       const ModelParams& params, long T) {
  params.validate();
  if (T < 0) throw domain_error("iterate_orbit: T must be >= 0");
  std::vector<NormedState> orbit;
  orbit.reserve(static_cast<std::size_t>(T) + 1);
  orbit.push_back(p0);
  NormedState p = p0;
  for (long t = 0; t < T; ++t) {
    p = map_F(p, params);
    if (!p.allFinite())
      throw numeric_error("orbit left the finite range at step " +
                          std::to_string(t + 1));
    orbit.push_back(p);
  }
  return orbit;
}

NormedState iterate_to(const NormedState& p0, const ModelParams& params,
                       long T) {
  params.validate();
  if (T < 0) throw domain_error("iterate_to: T must be >= 0");
  NormedState p = p0;
  for (long t = 0; t < T; ++t) {
    p = map_F(p, params);
    if (!p.allFinite())
      throw numeric_error("orbit left the finite range at step " +
                          std::to_string(t + 1));
  }
  return p;
}

std::optional<CycleResult> detect_cycle(const ModelParams& params,
                                        const NormedState& p0,
                                        const CycleOptions& opts) {
  if (opts.max_period < 1) throw domain_error("detect_cycle: max_period >= 1");
  const NormedState base = iterate_to(p0, params, opts.burn_in);
  NormedState p = base;
  std::vector<NormedState> points;
  for (int k = 1; k <= opts.max_period; ++k) {
    points.push_back(p);
    p = map_F(p, params);
    if ((p - base).cwiseAbs().maxCoeff() < opts.tol) {
      CycleResult res;
      res.period = k;
      res.points = std::move(points);
      return res;
    }
  }
  return std::nullopt;
}

namespace {

struct GridCheck {
  double min_inner = 0.0;  // min over grid of d(F^N(g), complement of box)
  double lipschitz = 0.0;  // max over grid of the N-step chain-rule bound
};

GridCheck check_box(const Box& box, const ModelParams& params, int N,
                    const GridSpec& grid) {
  GridCheck out;
  out.min_inner = std::numeric_limits<double>::infinity();
  const double dx = (box.x_hi - box.x_lo) / grid.nx;
  const double dy = (box.y_hi - box.y_lo) / grid.ny;
  for (int i = 0; i <= grid.nx; ++i) {
    for (int j = 0; j <= grid.ny; ++j) {
      NormedState p(box.x_lo + i * dx, box.y_lo + j * dy);
      double lip = 1.0;
      for (int n = 0; n < N; ++n) {
        lip *= operator_norm(jacobian_F(p, params));
        p = map_F(p, params);
      }
      out.min_inner = std::min(out.min_inner, box.inner_distance(p));
      out.lipschitz = std::max(out.lipschitz, lip);
    }
  }
  return out;
}

// Margin certified for every point of the box: grid spacing covers the box
// with balls of radius h, and the image moves by at most lipschitz * h,
// doubled for safety against curvature between grid points.
double certified_margin(const Box& box, const GridCheck& chk,
                        const GridSpec& grid) {
  const double dx = (box.x_hi - box.x_lo) / grid.nx;
  const double dy = (box.y_hi - box.y_lo) / grid.ny;
  const double h = 0.5 * std::hypot(dx, dy);
  return chk.min_inner - 2.0 * chk.lipschitz * h;
}

Box orbit_hull(const ModelParams& params) {
  const FixedPointReport rep = fixed_points(params);
  const NormedState fp = rep.coexistence.value();
  Box hull{fp.x(), fp.x(), fp.y(), fp.y()};
  for (double sx : {0.5, 1.0, 1.5}) {
    for (double sy : {0.5, 1.0, 1.5}) {
      NormedState p(sx * fp.x(), sy * fp.y());
      p = iterate_to(p, params, 500);
      for (int t = 0; t < 2000; ++t) {
        p = map_F(p, params);
        hull.x_lo = std::min(hull.x_lo, p.x());
        hull.x_hi = std::max(hull.x_hi, p.x());
        hull.y_lo = std::min(hull.y_lo, p.y());
        hull.y_hi = std::max(hull.y_hi, p.y());
      }
    }
  }
  return hull;
}

}  // namespace

std::optional<InvariantSetResult> find_invariant_box(const ModelParams& params,
                                                     const GridSpec& grid) {
  if (!mutual_invasibility(params))
    throw domain_error("find_invariant_box needs mutual invasibility");
  const Box hull = orbit_hull(params);
  const double center_min =
      std::min(0.5 * (hull.x_lo + hull.x_hi), 0.5 * (hull.y_lo + hull.y_hi));
  const double scale = std::max(hull.diagonal(), 0.75 * center_min);

  // Largest verified candidate wins: a generous box is what downstream
  // retention experiments need, and over-inflated candidates simply fail
  // the grid check and fall through to the next size.
  for (double frac : {1.0, 0.75, 0.5, 0.35, 0.2, 0.1, 0.05}) {
    Box cand = hull.inflated(frac * scale);
    cand.x_lo = std::max(cand.x_lo, 0.05 * hull.x_lo);
    cand.y_lo = std::max(cand.y_lo, 0.05 * hull.y_lo);
    if (cand.x_lo <= 0.0 || cand.y_lo <= 0.0) continue;
    const GridCheck chk = check_box(cand, params, 1, grid);
    const double margin = certified_margin(cand, chk, grid);
    if (margin > 0.0) return InvariantSetResult{cand, 1, margin};
  }
  return std::nullopt;
}

std::optional<InvariantSetResult> find_contracting_set(
    const ModelParams& params, int max_N, const GridSpec& grid) {
  if (max_N < 1) throw domain_error("find_contracting_set: max_N >= 1");
  const auto inv = find_invariant_box(params, grid);
  if (!inv) return std::nullopt;
  for (int N = 1; N <= max_N; ++N) {
    const GridCheck chk = check_box(inv->box, params, N, grid);
    const double margin = certified_margin(inv->box, chk, grid);
    if (margin > 0.0) return InvariantSetResult{inv->box, N, margin};
  }
  return std::nullopt;
}

double time_average_1d(double x0, double r, double K, long T) {
  if (!(x0 > 0.0)) throw domain_error("time_average_1d: x0 must be > 0");
  if (T < 1) throw domain_error("time_average_1d: T must be >= 1");
  double x = x0;
  double sum = 0.0, comp = 0.0;
  for (long t = 0; t < T; ++t) {
    const double term = x - comp;
    const double next = sum + term;
    comp = (next - sum) - term;
    sum = next;
    x = step_1d(x, r, K);
    if (!std::isfinite(x))
      throw numeric_error("orbit left the finite range at step " +
                          std::to_string(t + 1));
  }
  return sum / static_cast<double>(T);
}

}  // namespace rcm
