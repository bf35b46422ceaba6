#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "swarm/energy.hpp"
#include "swarm/poly.hpp"
#include "swarm/world.hpp"

namespace swarm {

// One committed trajectory piece: position polynomial in local time s = t - t0.
// Cubic for planned arcs; arbitrary degree for goal-tracking arcs.
struct PolyPiece {
  double t0 = 0.0;
  double tf = 0.0;
  PolyVec2 coef;

  double duration() const { return tf - t0; }
  Vec2 pos(double t) const { return poly_eval(coef, t - t0); }
  Vec2 vel(double t) const { return poly_eval(poly_derivative(coef), t - t0); }
  Vec2 acc(double t) const { return poly_eval(poly_derivative(poly_derivative(coef)), t - t0); }

  // Integral of ||acc||^2 over [a, b] (absolute times clipped to the piece).
  double control_effort(double a, double b) const {
    a = std::max(a, t0);
    b = std::min(b, tf);
    if (!(b > a)) return 0.0;
    const PolyVec2 acc2 = poly_derivative(poly_derivative(coef));
    const Poly ux = poly_axis(acc2, 0), uy = poly_axis(acc2, 1);
    const Poly integ = poly_integral(poly_add(poly_mul(ux, ux), poly_mul(uy, uy)));
    return poly_eval(integ, b - t0) - poly_eval(integ, a - t0);
  }
};

struct TrajectorySegment {
  double t0 = 0.0;
  double tf = 0.0;
  std::array<Vec2, 4> coef{};  // p(s) = c0 + c1 s + c2 s^2 + c3 s^3
  Vec2 p0, v0, p1, v1;
  double energy = 0.0;  // integral-of-||u||^2 convention

  Vec2 pos(double t) const {
    const double s = t - t0;
    return coef[0] + coef[1] * s + coef[2] * (s * s) + coef[3] * (s * s * s);
  }
  Vec2 vel(double t) const {
    const double s = t - t0;
    return coef[1] + coef[2] * (2.0 * s) + coef[3] * (3.0 * s * s);
  }
  Vec2 acc(double t) const {
    const double s = t - t0;
    return coef[2] * 2.0 + coef[3] * (6.0 * s);
  }

  PolyPiece piece() const { return {t0, tf, {coef[0], coef[1], coef[2], coef[3]}}; }
};

struct IntervalViolation {
  double t_start = 0.0;
  double t_end = 0.0;
  double peak = 0.0;
};

struct SafetyViolation {
  int other_agent = -1;
  double t_start = 0.0;
  double t_end = 0.0;
  double min_distance = 0.0;
};

struct ConstraintReport {
  std::vector<IntervalViolation> v_violations;
  std::vector<IntervalViolation> u_violations;
  std::vector<SafetyViolation> safety_violations;

  bool feasible() const {
    return v_violations.empty() && u_violations.empty() && safety_violations.empty();
  }
};

// Minimum-energy cubic from the agent's current state to the goal state at
// arrival time t_star, in the planning frame (goal already rebased so that
// local time 0 is "now"). t0 is the absolute time of the frame origin.
inline TrajectorySegment plan_unconstrained(const AgentState& state, const GoalTrajectory& goal,
                                            double t_star, double t0 = 0.0) {
  if (!(t_star > 0.0)) throw std::domain_error("plan_unconstrained: t_star must be > 0");
  const auto bc = boundary_coefficients(state, goal, t_star);
  TrajectorySegment seg;
  seg.t0 = t0;
  seg.tf = t0 + t_star;
  seg.coef = {state.p, state.v, bc.b * 0.5, bc.a / 6.0};
  seg.p0 = state.p;
  seg.v0 = state.v;
  const auto [pg, vg] = eval_goal(goal, t_star);
  seg.p1 = pg;
  seg.v1 = vg;
  seg.energy = energy_from_coefficients(bc.a, bc.b, t_star);
  return seg;
}

namespace detail {

// Intervals inside [0, dur] where poly f > 0, with the peak value of f+bound
// reinterpreted by the caller. f is the constraint excess in local time.
inline std::vector<IntervalViolation> positive_intervals(const Poly& f, double t0, double dur,
                                                         const Poly& magnitude_sq) {
  std::vector<double> cuts{0.0};
  if (poly_degree(f, 1e-14) >= 1) {
    for (double r : real_roots_in(f, 0.0, dur)) cuts.push_back(r);
  }
  cuts.push_back(dur);
  std::sort(cuts.begin(), cuts.end());

  // Peak of magnitude_sq within an interval: endpoints plus critical points.
  auto peak_in = [&](double a, double b) {
    double best = std::max(poly_eval(magnitude_sq, a), poly_eval(magnitude_sq, b));
    const Poly d = poly_derivative(magnitude_sq);
    if (poly_degree(d, 1e-14) >= 1 && b > a) {
      for (double r : real_roots_in(d, a, b)) best = std::max(best, poly_eval(magnitude_sq, r));
    }
    return std::sqrt(std::max(0.0, best));
  };

  std::vector<IntervalViolation> out;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double a = cuts[k], b = cuts[k + 1];
    if (!(b > a)) continue;
    const double mid = 0.5 * (a + b);
    if (poly_eval(f, mid) > 0.0) {
      if (!out.empty() && std::abs(out.back().t_end - (t0 + a)) < 1e-12) {
        out.back().t_end = t0 + b;
        out.back().peak = std::max(out.back().peak, peak_in(a, b));
      } else {
        out.push_back({t0 + a, t0 + b, peak_in(a, b)});
      }
    }
  }
  return out;
}

inline Poly speed_sq_poly(const PolyVec2& coef) {
  const PolyVec2 v = poly_derivative(coef);
  return poly_add(poly_mul(poly_axis(v, 0), poly_axis(v, 0)),
                  poly_mul(poly_axis(v, 1), poly_axis(v, 1)));
}

inline Poly accel_sq_poly(const PolyVec2& coef) {
  const PolyVec2 u = poly_derivative(poly_derivative(coef));
  return poly_add(poly_mul(poly_axis(u, 0), poly_axis(u, 0)),
                  poly_mul(poly_axis(u, 1), poly_axis(u, 1)));
}

}  // namespace detail

// Analytic speed/control limit check over one piece.
inline ConstraintReport check_limits(const PolyPiece& piece, double v_max, double u_max) {
  ConstraintReport rep;
  const double dur = piece.duration();
  if (!(dur > 0.0)) return rep;
  const Poly v2 = detail::speed_sq_poly(piece.coef);
  const Poly u2 = detail::accel_sq_poly(piece.coef);
  rep.v_violations =
      detail::positive_intervals(poly_add(v2, {-v_max * v_max}), piece.t0, dur, v2);
  rep.u_violations =
      detail::positive_intervals(poly_add(u2, {-u_max * u_max}), piece.t0, dur, u2);
  return rep;
}

inline ConstraintReport check_limits(const TrajectorySegment& seg, double v_max, double u_max) {
  return check_limits(seg.piece(), v_max, u_max);
}

struct SeparationResult {
  double min_distance = std::numeric_limits<double>::infinity();
  double t_at = 0.0;
  std::vector<SafetyViolation> violations;
};

// Exact pairwise-separation analysis over the overlap of two pieces. The
// squared distance is a polynomial; its minimum lies at an endpoint or a
// derivative root.
inline SeparationResult separation(const PolyPiece& a, const PolyPiece& b, double two_R,
                                   int other_id = -1) {
  SeparationResult res;
  const double lo = std::max(a.t0, b.t0);
  const double hi = std::min(a.tf, b.tf);
  if (!(hi > lo)) return res;

  // Rebase both to local time s in [0, hi-lo].
  const PolyVec2 pa = poly_shift(a.coef, lo - a.t0);
  const PolyVec2 pb = poly_shift(b.coef, lo - b.t0);
  PolyVec2 diff(std::max(pa.size(), pb.size()), Vec2{});
  for (std::size_t i = 0; i < pa.size(); ++i) diff[i] += pa[i];
  for (std::size_t i = 0; i < pb.size(); ++i) diff[i] += -pb[i];
  const Poly d2 = poly_add(poly_mul(poly_axis(diff, 0), poly_axis(diff, 0)),
                           poly_mul(poly_axis(diff, 1), poly_axis(diff, 1)));
  const double dur = hi - lo;

  std::vector<double> candidates{0.0, dur};
  const Poly dd = poly_derivative(d2);
  if (poly_degree(dd, 1e-14) >= 1) {
    for (double r : real_roots_in(dd, 0.0, dur)) candidates.push_back(r);
  }
  for (double s : candidates) {
    const double d = std::sqrt(std::max(0.0, poly_eval(d2, s)));
    if (d < res.min_distance) {
      res.min_distance = d;
      res.t_at = lo + s;
    }
  }

  if (two_R > 0.0) {
    const Poly excess = poly_add({two_R * two_R}, poly_mul({-1.0}, d2));  // >0 where d < 2R
    for (auto& iv : detail::positive_intervals(excess, lo, dur, d2)) {
      SafetyViolation sv;
      sv.other_agent = other_id;
      sv.t_start = iv.t_start;
      sv.t_end = iv.t_end;
      // Minimum distance inside the violating interval.
      double dmin = std::min(poly_eval(d2, iv.t_start - lo), poly_eval(d2, iv.t_end - lo));
      if (poly_degree(dd, 1e-14) >= 1 && iv.t_end > iv.t_start) {
        for (double r : real_roots_in(dd, iv.t_start - lo, iv.t_end - lo))
          dmin = std::min(dmin, poly_eval(d2, r));
      }
      sv.min_distance = std::sqrt(std::max(0.0, dmin));
      res.violations.push_back(sv);
    }
  }
  return res;
}

inline ConstraintReport check_safety(const PolyPiece& seg_i, const PolyPiece& seg_j, double R,
                                     int other_id = -1) {
  ConstraintReport rep;
  rep.safety_violations = separation(seg_i, seg_j, 2.0 * R, other_id).violations;
  return rep;
}

inline ConstraintReport check_safety(const TrajectorySegment& seg_i,
                                     const TrajectorySegment& seg_j, double R,
                                     int other_id = -1) {
  return check_safety(seg_i.piece(), seg_j.piece(), R, other_id);
}

struct RepairContext {
  AgentState state;           // at the planning frame origin
  GoalTrajectory goal;        // rebased to the frame
  double t0 = 0.0;            // absolute frame origin
  double v_max = 0.0;
  double u_max = 0.0;
  double R = 0.0;
  // Committed higher-priority pieces the repaired plan must stay clear of.
  std::vector<PolyPiece> higher_priority;
};

struct RepairResult {
  // Optional hold at the departure state before the planned arc.
  std::optional<PolyPiece> hold;
  TrajectorySegment segment;
  double time_dilation = 1.0;
  double departure_delay = 0.0;
};

namespace detail {

inline bool plan_clear(const RepairResult& r, const RepairContext& ctx) {
  const auto lim = check_limits(r.segment, ctx.v_max, ctx.u_max);
  if (!lim.v_violations.empty() || !lim.u_violations.empty()) return false;
  for (const auto& hp : ctx.higher_priority) {
    if (!check_safety(r.segment.piece(), hp, ctx.R).safety_violations.empty()) return false;
    if (r.hold && !check_safety(*r.hold, hp, ctx.R).safety_violations.empty()) return false;
  }
  return true;
}

}  // namespace detail

// Deterministic repair: arrival-time dilation for speed/control violations,
// departure delay (position hold) for safety violations. Non-optimal by
// construction; failures are reported, never silently dropped.
inline std::optional<RepairResult> repair_trajectory(const TrajectorySegment& seg,
                                                     const ConstraintReport& violations,
                                                     const RepairContext& ctx) {
  if (violations.feasible())
    throw std::invalid_argument("repair_trajectory: report has no violations");
  const double T = seg.tf - seg.t0;

  const bool limit_viol = !violations.v_violations.empty() || !violations.u_violations.empty();
  if (limit_viol) {
    for (int k = 1; k <= 20; ++k) {
      const double s = 1.0 + 0.1 * k;
      RepairResult r;
      r.segment = plan_unconstrained(ctx.state, ctx.goal, T * s, ctx.t0);
      r.time_dilation = s;
      if (detail::plan_clear(r, ctx)) return r;
    }
    return std::nullopt;
  }

  // Safety-only violation: hold position, replan from the hold point. The hold
  // freezes position; departures are assumed at (near) rest.
  for (int k = 1; k <= 50; ++k) {
    const double delay = 0.1 * k;
    RepairResult r;
    r.departure_delay = delay;
    r.hold = PolyPiece{ctx.t0, ctx.t0 + delay, {ctx.state.p}};
    AgentState held = ctx.state;
    held.v = {0.0, 0.0};
    r.segment = plan_unconstrained(held, GoalTrajectory{ctx.goal.id, poly_shift(ctx.goal.coeffs, delay)},
                                   T, ctx.t0 + delay);
    if (detail::plan_clear(r, ctx)) return r;
  }
  return std::nullopt;
}

}  // namespace swarm
