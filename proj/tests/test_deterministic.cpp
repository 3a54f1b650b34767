#include "doctest.h"

#include "rcm/deterministic.hpp"

#include <cmath>
#include <random>

using namespace rcm;

namespace {

ModelParams symmetric_params(double r, double ab, double K) {
  ModelParams p;
  p.r = p.r_tilde = r;
  p.a = p.b = ab;
  p.K = p.K_tilde = K;
  return p;
}

// Central-difference Jacobian, step chosen for ~1e-10 truncation error.
Eigen::Matrix2d fd_jacobian(const NormedState& p, const ModelParams& params) {
  const double h = 1e-6;
  Eigen::Matrix2d J;
  for (int j = 0; j < 2; ++j) {
    NormedState lo = p, hi = p;
    lo[j] -= h;
    hi[j] += h;
    const NormedState d = map_F(hi, params) - map_F(lo, params);
    J(0, j) = d.x() / (2 * h);
    J(1, j) = d.y() / (2 * h);
  }
  return J;
}

}  // namespace

TEST_SUITE("deterministic") {

TEST_CASE("one dimensional step matches closed form") {
  CHECK(step_1d(0.5, 1.0, 1.0) == doctest::Approx(0.5 * std::exp(0.5)).epsilon(1e-15));
  CHECK(step_1d(2.0, 1.5, 0.25) == doctest::Approx(2.0 * std::exp(1.0)).epsilon(1e-15));
  CHECK(step_1d(0.0, 1.0, 1.0) == 0.0);
  CHECK_THROWS_AS(step_1d(-0.1, 1.0, 1.0), domain_error);
}

TEST_CASE("map matches closed form at a hand point") {
  const ModelParams p = symmetric_params(2.0, 0.5, 1.0);
  const NormedState out = map_F(NormedState(1.0, 1.0), p);
  const double expected = std::exp(0.5);
  CHECK(out.x() == doctest::Approx(expected).epsilon(1e-15));
  CHECK(out.y() == doctest::Approx(expected).epsilon(1e-15));
}

TEST_CASE("effective coefficients rescale with carrying capacities") {
  ModelParams p = symmetric_params(1.0, 0.4, 0.2);
  p.K_tilde = 0.1;
  CHECK(p.a_eff() == doctest::Approx(0.4 * 0.1 / 0.2).epsilon(1e-15));
  CHECK(p.b_eff() == doctest::Approx(0.4 * 0.2 / 0.1).epsilon(1e-15));
  CHECK(p.a_eff() * p.b_eff() == doctest::Approx(0.16).epsilon(1e-14));

  // Normalized dynamics must not depend on K at all.
  const NormedState z(0.7, 1.3);
  const NormedState base = map_F(z, symmetric_params(1.0, 0.4, 1.0));
  ModelParams q = symmetric_params(1.0, 0.4, 0.01);
  CHECK((map_F(z, q) - base).norm() < 1e-14);
}

TEST_CASE("jacobian agrees with finite differences") {
  std::mt19937 gen(321);
  std::uniform_real_distribution<double> unif(0.1, 2.5);
  for (int trial = 0; trial < 25; ++trial) {
    ModelParams p;
    p.r = unif(gen);
    p.r_tilde = unif(gen);
    p.a = 0.4 * unif(gen);
    p.b = 0.4 * unif(gen);
    p.K = p.K_tilde = 1.0;
    const NormedState z(unif(gen), unif(gen));
    const Eigen::Matrix2d J = jacobian_F(z, p);
    const Eigen::Matrix2d Jfd = fd_jacobian(z, p);
    CHECK((J - Jfd).cwiseAbs().maxCoeff() < 1e-6);
  }
}

TEST_CASE("spectral radius of simple matrices") {
  Eigen::Matrix2d m;
  m << 0.5, 0.0, 0.0, -0.75;
  CHECK(spectral_radius(m) == doctest::Approx(0.75).epsilon(1e-14));
  m << 0.0, 1.0, -1.0, 0.0;  // rotation: complex pair on the unit circle
  CHECK(spectral_radius(m) == doctest::Approx(1.0).epsilon(1e-14));
  m << 1.0 / 3, -1.0 / 3, -1.0 / 3, 1.0 / 3;
  CHECK(spectral_radius(m) == doctest::Approx(2.0 / 3).epsilon(1e-13));
}

TEST_CASE("fixed points land where the algebra says") {
  ModelParams p = symmetric_params(2.0, 0.5, 1.0);
  p.r_tilde = 1.8;
  const FixedPointReport rep = fixed_points(p);
  CHECK(rep.origin.norm() == 0.0);
  CHECK(rep.axis_x.x() == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(rep.axis_x.y() == 0.0);
  CHECK(rep.axis_y.y() == doctest::Approx(1.8).epsilon(1e-12));
  REQUIRE(rep.coexistence.has_value());
  CHECK(rep.coexistence->x() == doctest::Approx(1.1 / 0.75).epsilon(1e-12));
  CHECK(rep.coexistence->y() == doctest::Approx(0.8 / 0.75).epsilon(1e-12));
  CHECK(rep.max_residual <= 1e-10);

  // Every reported point must actually be fixed under the map.
  for (const NormedState& fp :
       {rep.origin, rep.axis_x, rep.axis_y, *rep.coexistence}) {
    CHECK((map_F(fp, p) - fp).norm() <= 1e-10);
  }
}

TEST_CASE("degenerate interaction product is flagged") {
  ModelParams p = symmetric_params(1.5, 1.0, 1.0);  // ab of exactly 1
  const FixedPointReport rep = fixed_points(p);
  CHECK(rep.degenerate_ab);
  CHECK_FALSE(rep.coexistence.has_value());
}

TEST_CASE("mutual invasibility requires both invasion rates positive") {
  CHECK(mutual_invasibility(symmetric_params(1.0, 0.5, 1.0)));
  ModelParams p = symmetric_params(1.0, 0.9, 1.0);
  p.r = 0.4;
  p.r_tilde = 2.0;  // b_eff * r_tilde = 1.8 > r
  CHECK_FALSE(mutual_invasibility(p));
  // Scaling K breaks symmetry of the effective coefficients but not the test.
  ModelParams q = symmetric_params(1.0, 0.5, 0.2);
  q.K_tilde = 0.4;
  CHECK(mutual_invasibility(q) == (q.r > q.b_eff() * q.r_tilde &&
                                   q.r_tilde > q.a_eff() * q.r));
}

TEST_CASE("attracting coexistence: both classification routes agree") {
  const ModelParams p = symmetric_params(1.0, 0.5, 1.0);
  const StabilityClass sc = classify_coexistence(p);
  CHECK(sc.verdict == Stability::Attracting);
  CHECK(sc.jacobian_spectral_radius == doctest::Approx(2.0 / 3).epsilon(1e-12));
  CHECK(sc.condition_satisfied);
  CHECK_FALSE(sc.routes_disagree);
}

TEST_CASE("repelling coexistence: both classification routes agree") {
  const ModelParams p = symmetric_params(2.2, 0.1, 1.0);
  const StabilityClass sc = classify_coexistence(p);
  CHECK(sc.verdict == Stability::Repelling);
  CHECK(sc.jacobian_spectral_radius == doctest::Approx(1.2).epsilon(1e-12));
  CHECK_FALSE(sc.condition_satisfied);
  CHECK_FALSE(sc.routes_disagree);
}

TEST_CASE("classification routes agree across random invasible parameters") {
  std::mt19937 gen(98765);
  std::uniform_real_distribution<double> rr(0.2, 2.8), cc(0.0, 0.95);
  int checked = 0;
  while (checked < 300) {
    ModelParams p;
    p.r = rr(gen);
    p.r_tilde = rr(gen);
    p.a = cc(gen);
    p.b = cc(gen);
    p.K = p.K_tilde = 1.0;
    if (!mutual_invasibility(p)) continue;
    ++checked;
    const StabilityClass sc = classify_coexistence(p);
    if (sc.verdict == Stability::NonHyperbolic) continue;
    CHECK_FALSE(sc.routes_disagree);
    CHECK(sc.condition_satisfied == (sc.verdict == Stability::Attracting));
  }
}

TEST_CASE("orbit iteration composes the map") {
  const ModelParams p = symmetric_params(1.3, 0.3, 1.0);
  NormedState z(0.4, 1.7);
  const auto orbit = iterate_orbit(z, p, 10);
  REQUIRE(orbit.size() == 11);
  CHECK((orbit.front() - z).norm() == 0.0);
  for (int t = 0; t < 10; ++t)
    CHECK((orbit[t + 1] - map_F(orbit[t], p)).norm() == 0.0);
  CHECK((iterate_to(z, p, 10) - orbit.back()).norm() == 0.0);
}

TEST_CASE("two cycle on the diagonal is detected") {
  const ModelParams p = symmetric_params(2.2, 0.1, 1.0);
  const auto cyc = detect_cycle(p, NormedState(0.9, 1.1), CycleOptions{});
  REQUIRE(cyc.has_value());
  CHECK(cyc->period == 2);
  REQUIRE(cyc->points.size() == 2);
  for (const NormedState& q : cyc->points) {
    CHECK(q.x() == doctest::Approx(q.y()).epsilon(1e-9));
    CHECK((iterate_to(q, p, 2) - q).norm() < 1e-6);
  }
  // On the diagonal the two cycle values of the reduced map sum to twice the
  // growth rate, which in these coordinates is 2r/(1+a).
  const double sum = cyc->points[0].x() + cyc->points[1].x();
  CHECK(sum == doctest::Approx(2.0 * 2.2 / 1.1).epsilon(1e-8));
}

TEST_CASE("fixed point reported as period one cycle") {
  const ModelParams p = symmetric_params(1.0, 0.5, 1.0);
  const auto cyc = detect_cycle(p, NormedState(0.5, 0.9), CycleOptions{});
  REQUIRE(cyc.has_value());
  CHECK(cyc->period == 1);
  CHECK((cyc->points[0] - NormedState(2.0 / 3, 2.0 / 3)).norm() < 1e-6);
}

TEST_CASE("invariant box certified by the grid really maps into itself") {
  const ModelParams p = symmetric_params(1.2, 0.5, 1.0);
  const auto inv = find_invariant_box(p);
  REQUIRE(inv.has_value());
  CHECK(inv->margin > 0.0);
  const Box& box = inv->box;
  REQUIRE(rcm::fixed_points(p).coexistence.has_value());
  CHECK(box.contains(*fixed_points(p).coexistence));

  // Brute check on a fine random cloud, independent of the grid ordering.
  std::mt19937 gen(777);
  std::uniform_real_distribution<double> ux(box.x_lo, box.x_hi);
  std::uniform_real_distribution<double> uy(box.y_lo, box.y_hi);
  for (int i = 0; i < 20000; ++i) {
    const NormedState z(ux(gen), uy(gen));
    CHECK(box.contains(map_F(z, p)));
  }
}

TEST_CASE("invariant box is macroscopic, not a sliver around the attractor") {
  const ModelParams p = symmetric_params(1.2, 0.5, 1.0);
  const auto inv = find_invariant_box(p);
  REQUIRE(inv.has_value());
  CHECK(inv->box.x_hi - inv->box.x_lo > 0.5);
  CHECK(inv->box.y_hi - inv->box.y_lo > 0.5);
}

TEST_CASE("contracting set carries a positive certified margin") {
  const ModelParams p = symmetric_params(1.2, 0.5, 1.0);
  const auto c = find_contracting_set(p, 4);
  REQUIRE(c.has_value());
  CHECK(c->margin > 0.0);
  CHECK(c->iterate_n >= 1);
  CHECK(c->iterate_n <= 4);
}

TEST_CASE("box helpers behave") {
  const Box b{0.0, 2.0, 1.0, 4.0};
  CHECK(b.contains(NormedState(1.0, 2.0)));
  CHECK_FALSE(b.contains(NormedState(2.1, 2.0)));
  CHECK(b.inner_distance(NormedState(0.5, 2.0)) == doctest::Approx(0.5));
  CHECK(b.diagonal() == doctest::Approx(std::hypot(2.0, 3.0)).epsilon(1e-15));
  const Box wide = b.inflated(0.25);
  CHECK(wide.x_lo == doctest::Approx(-0.25));
  CHECK(wide.y_hi == doctest::Approx(4.25));
}

TEST_CASE("long run average tracks r over K via telescoping") {
  // Summing x_{t+1} = x_t exp(r - K x_t) over an orbit telescopes the logs:
  // the running average equals r/K up to a boundary term ln(x_T/x_0)/(TK).
  for (double r : {0.8, 1.7, 2.6}) {
    for (double K : {0.5, 2.0}) {
      const double x0 = 0.37;
      const long T = 20000;
      double x = x0;
      for (long t = 0; t < T; ++t) x = step_1d(x, r, K);
      const double avg = time_average_1d(x0, r, K, T);
      const double expected = r / K - std::log(x / x0) / (K * T);
      CHECK(avg == doctest::Approx(expected).epsilon(1e-12));
    }
  }
}

TEST_CASE("iteration rejects exploding orbits") {
  // The one-step maximum from x = 1 is e^{r-1}, which overflows past
  // r = 711; the iterator must throw instead of propagating infinities.
  const ModelParams p = symmetric_params(712.0, 0.0, 1.0);
  CHECK_THROWS_AS(iterate_to(NormedState(1.0, 1.0), p, 50), numeric_error);
}

}  // TEST_SUITE
