#include <doctest.h>

#include <random>

#include "swarm/trajectory.hpp"

using namespace swarm;

namespace {

GoalTrajectory random_goal(std::mt19937_64& rng, int eta) {
  std::uniform_real_distribution<double> cd(-1.0, 1.0);
  GoalTrajectory g{1, {}};
  for (int l = 0; l <= eta; ++l) g.coeffs.push_back({cd(rng), cd(rng)});
  return g;
}

AgentState random_state(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> pd(-3.0, 3.0), vd(-1.0, 1.0);
  return {1, {pd(rng), pd(rng)}, {vd(rng), vd(rng)}};
}

// Simpson quadrature of ||u||^2 over the segment.
double quadrature_effort(const TrajectorySegment& seg, int n = 2000) {
  const double h = (seg.tf - seg.t0) / n;
  double sum = 0.0;
  for (int k = 0; k < n; ++k) {
    const double a = seg.t0 + k * h;
    const double m = a + 0.5 * h;
    sum += (seg.acc(a).norm2() + 4.0 * seg.acc(m).norm2() + seg.acc(a + h).norm2()) * h / 6.0;
  }
  return sum;
}

}  // namespace

TEST_CASE("plan_unconstrained: on-trajectory agent follows the goal exactly") {
  const AgentState s{1, {0, 0}, {0, 0}};
  const GoalTrajectory g{1, {{0, 0}, {0, 0}, {1, 0}}};
  const auto seg = plan_unconstrained(s, g, 1.0);
  for (double t : {0.0, 0.25, 0.5, 1.0}) {
    CHECK(seg.pos(t).x == doctest::Approx(t * t).epsilon(1e-12));
    CHECK(seg.acc(t).x == doctest::Approx(2.0).epsilon(1e-12));
  }
}

TEST_CASE("plan_unconstrained: boundary residuals and closed-form energy") {
  const AgentState s{1, {0, 0}, {0, 0}};
  const GoalTrajectory g{1, {{1, 0}, {0, 0}, {1, 0}}};
  const double T = std::sqrt(3.0);
  const auto seg = plan_unconstrained(s, g, T);
  const auto [pg, vg] = eval_goal(g, T);
  CHECK((seg.pos(T) - pg).norm() < 1e-9);
  CHECK((seg.vel(T) - vg).norm() < 1e-9);
  CHECK(seg.energy == doctest::Approx(16.0 / std::sqrt(3.0)).epsilon(1e-6));
  CHECK_THROWS_AS(plan_unconstrained(s, g, 0.0), std::domain_error);
}

TEST_CASE("reversal symmetry for static goals") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> pd(-3.0, 3.0), Td(0.5, 5.0);
  for (int trial = 0; trial < 30; ++trial) {
    const Vec2 start{pd(rng), pd(rng)}, end{pd(rng), pd(rng)};
    const double T = Td(rng);
    // static goal at `end`, padded to the minimum degree
    const GoalTrajectory fwd{1, {end, {0, 0}, {0, 0}}};
    const GoalTrajectory bwd{1, {start, {0, 0}, {0, 0}}};
    const auto f = plan_unconstrained({1, start, {0, 0}}, fwd, T);
    const auto b = plan_unconstrained({1, end, {0, 0}}, bwd, T);
    CHECK(f.energy == doctest::Approx(b.energy).epsilon(1e-9));
  }
}

TEST_CASE("random plans satisfy boundaries and quadrature-consistent energy") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> Td(0.3, 6.0);
  for (int trial = 0; trial < 200; ++trial) {
    const auto s = random_state(rng);
    const auto g = random_goal(rng, 2 + static_cast<int>(rng() % 3));
    const double T = Td(rng);
    const auto seg = plan_unconstrained(s, g, T);
    const auto [pg, vg] = eval_goal(g, T);
    CHECK((seg.pos(T) - pg).norm() <= 1e-9 * (1.0 + pg.norm()));
    CHECK((seg.vel(T) - vg).norm() <= 1e-9 * (1.0 + vg.norm()));
    CHECK((seg.pos(0.0) - s.p).norm() <= 1e-12);
    const double quad = quadrature_effort(seg);
    CHECK(std::abs(quad - seg.energy) <= 1e-8 * (1.0 + seg.energy));
  }
}

TEST_CASE("check_limits: constant control below the bound") {
  const AgentState s{1, {0, 0}, {0, 0}};
  const GoalTrajectory g{1, {{0, 0}, {0, 0}, {1, 0}}};
  const auto seg = plan_unconstrained(s, g, 1.0);  // u = (2, 0)
  CHECK(check_limits(seg, 100.0, 3.0).feasible());
  const auto rep = check_limits(seg, 100.0, 1.0);
  REQUIRE(rep.u_violations.size() == 1);
  CHECK(rep.u_violations[0].peak == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(rep.u_violations[0].t_start == doctest::Approx(0.0));
  CHECK(rep.u_violations[0].t_end == doctest::Approx(1.0));
}

TEST_CASE("check_limits: v(t) = 2t against v_max = 1") {
  // p(t) = t^2 on [0,1]
  PolyPiece piece{0.0, 1.0, {{0, 0}, {0, 0}, {1, 0}}};
  const auto rep = check_limits(piece, 1.0, 100.0);
  REQUIRE(rep.v_violations.size() == 1);
  CHECK(rep.v_violations[0].t_start == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(rep.v_violations[0].t_end == doctest::Approx(1.0));
  CHECK(rep.v_violations[0].peak == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("check_limits agrees with dense sampling on random segments") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> Td(0.3, 4.0);
  for (int trial = 0; trial < 200; ++trial) {
    const auto s = random_state(rng);
    const auto g = random_goal(rng, 2);
    const auto seg = plan_unconstrained(s, g, Td(rng));
    const double v_max = 1.5, u_max = 6.0;
    const auto rep = check_limits(seg, v_max, u_max);
    bool sampled_v = false, sampled_u = false;
    for (int k = 0; k <= 10000; ++k) {
      const double t = seg.t0 + (seg.tf - seg.t0) * k / 10000.0;
      if (seg.vel(t).norm() > v_max * (1.0 + 1e-9)) sampled_v = true;
      if (seg.acc(t).norm() > u_max * (1.0 + 1e-9)) sampled_u = true;
    }
    CHECK(sampled_v == !rep.v_violations.empty());
    CHECK(sampled_u == !rep.u_violations.empty());
  }
}

TEST_CASE("check_safety: parallel offset trajectories never violate") {
  PolyPiece a{0.0, 2.0, {{0, 0}, {1, 0}, {0.5, 0}}};
  PolyPiece b{0.0, 2.0, {{0, 0.3}, {1, 0}, {0.5, 0}}};  // offset 3R for R = 0.1
  const auto res = separation(a, b, 0.2);
  CHECK(res.violations.empty());
  CHECK(res.min_distance == doctest::Approx(0.3).epsilon(1e-12));
}

TEST_CASE("check_safety: head-on swap crosses at the midpoint") {
  // Symmetric cubics swapping (0,0) <-> (1,0) over [0,1]: p(t) = 3t^2 - 2t^3.
  PolyPiece a{0.0, 1.0, {{0, 0}, {0, 0}, {3, 0}, {-2, 0}}};
  PolyPiece b{0.0, 1.0, {{1, 0}, {0, 0}, {-3, 0}, {2, 0}}};
  const auto rep = check_safety(a, b, 0.1, 2);
  REQUIRE(rep.safety_violations.size() == 1);
  CHECK(rep.safety_violations[0].other_agent == 2);
  CHECK(rep.safety_violations[0].min_distance == doctest::Approx(0.0).epsilon(1e-9));
  const auto res = separation(a, b, 0.0);
  CHECK(res.t_at == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("check_safety agrees with dense sampling on random pairs") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> Td(0.5, 3.0);
  const double R = 0.15;
  for (int trial = 0; trial < 100; ++trial) {
    const auto sa = random_state(rng);
    auto sb = random_state(rng);
    sb.id = 2;
    const auto ga = random_goal(rng, 2);
    const auto gb = random_goal(rng, 2);
    const double T = Td(rng);
    const auto pa = plan_unconstrained(sa, ga, T).piece();
    const auto pb = plan_unconstrained(sb, gb, T).piece();
    const auto rep = check_safety(pa, pb, R);
    bool sampled = false;
    for (int k = 0; k <= 10000; ++k) {
      const double t = T * k / 10000.0;
      if ((pa.pos(t) - pb.pos(t)).norm() < 2.0 * R * (1.0 - 1e-9)) sampled = true;
    }
    CHECK(sampled == !rep.safety_violations.empty());
  }
}

TEST_CASE("repair_trajectory refuses an empty report") {
  const AgentState s{1, {0, 0}, {0, 0}};
  const GoalTrajectory g{1, {{1, 0}, {0, 0}, {1, 0}}};
  const auto seg = plan_unconstrained(s, g, 1.0);
  CHECK_THROWS_AS(repair_trajectory(seg, ConstraintReport{}, RepairContext{}),
                  std::invalid_argument);
}

TEST_CASE("repair_trajectory: time dilation clears a control violation") {
  const AgentState s{1, {0, 0}, {0, 0}};
  const GoalTrajectory g{1, {{1, 0}, {0, 0}, {0.01, 0}}};  // mostly static displacement
  const double T = 1.0;
  const auto seg = plan_unconstrained(s, g, T);
  const double peak_u = std::max(seg.acc(seg.t0).norm(), seg.acc(seg.tf).norm());
  RepairContext ctx{s, g, 0.0, 100.0, peak_u / 2.0, 0.05, {}};
  const auto rep = check_limits(seg, ctx.v_max, ctx.u_max);
  REQUIRE(!rep.u_violations.empty());
  const auto fixed = repair_trajectory(seg, rep, ctx);
  REQUIRE(fixed.has_value());
  CHECK(fixed->time_dilation >= 1.1);
  CHECK(check_limits(fixed->segment, ctx.v_max, ctx.u_max).feasible());
  // continuity at the re-plan point
  CHECK((fixed->segment.pos(0.0) - s.p).norm() < 1e-12);
}

TEST_CASE("repair_trajectory: departure delay clears a safety violation") {
  // Higher-priority agent crosses our straight-line path near t = 0.5.
  const AgentState s{1, {0, 0}, {0, 0}};
  const GoalTrajectory g{1, {{1, 0}, {0, 0}, {0, 0}}};
  const auto seg = plan_unconstrained(s, g, 1.0);
  PolyPiece other{0.0, 1.0, {{0.5, -0.5}, {0, 1.0}}};  // moving up through (0.5, 0)
  RepairContext ctx{s, g, 0.0, 100.0, 1000.0, 0.1, {other}};
  auto rep = check_safety(seg.piece(), other, ctx.R, 2);
  REQUIRE(!rep.safety_violations.empty());
  const auto fixed = repair_trajectory(seg, rep, ctx);
  REQUIRE(fixed.has_value());
  CHECK(fixed->departure_delay > 0.0);
  CHECK(check_safety(fixed->segment.piece(), other, ctx.R).safety_violations.empty());
  if (fixed->hold) CHECK(check_safety(*fixed->hold, other, ctx.R).safety_violations.empty());
}

TEST_CASE("repair exhaustion returns failure, not a bad plan") {
  const AgentState s{1, {0, 0}, {0, 0}};
  const GoalTrajectory g{1, {{100, 0}, {0, 0}, {0, 0}}};  // far away
  const auto seg = plan_unconstrained(s, g, 0.1);
  RepairContext ctx{s, g, 0.0, 0.01, 0.01, 0.05, {}};  // impossible limits
  const auto rep = check_limits(seg, ctx.v_max, ctx.u_max);
  REQUIRE(!rep.feasible());
  CHECK(!repair_trajectory(seg, rep, ctx).has_value());
}
