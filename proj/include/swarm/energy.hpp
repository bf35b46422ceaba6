#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "swarm/poly.hpp"
#include "swarm/world.hpp"

namespace swarm {

// Jerk/acceleration coefficients of the minimum-energy cubic reaching the goal
// state at arrival time T, in the planning frame where the agent's clock is 0.
struct BoundaryCoefficients {
  Vec2 a;          // [m/s^3]
  Vec2 b;          // [m/s^2]
  double arrival;  // [s]
};

struct EnergyProfile {
  std::vector<double> alphas;  // E(t) = sum_l alphas[l] * t^(l-3)
  double t_star = 0.0;
  double e_star = 0.0;  // unconstrained-integral convention
};

inline BoundaryCoefficients boundary_coefficients(const AgentState& state,
                                                  const GoalTrajectory& goal, double T) {
  if (!(T > 0.0)) throw std::domain_error("boundary_coefficients: arrival time must be > 0");
  const auto [pg, vg] = eval_goal(goal, T);
  const Vec2 dp = state.p - pg;
  const Vec2 sv = state.v + vg;
  BoundaryCoefficients bc;
  bc.a = (12.0 / (T * T * T)) * dp + (6.0 / (T * T)) * sv;
  bc.b = (-6.0 / (T * T)) * dp - (2.0 / T) * (state.v * 2.0 + vg);
  bc.arrival = T;
  return bc;
}

// Integral of ||u||^2 over [0, T] for the optimal cubic (no 1/2 factor; the
// reported-energy convention halves this uniformly at the metrics layer).
inline double energy_from_coefficients(const Vec2& a, const Vec2& b, double T) {
  return a.norm2() * T * T * T / 3.0 + a.dot(b) * T * T + b.norm2() * T;
}

inline double energy_at(const AgentState& state, const GoalTrajectory& goal, double T) {
  const auto bc = boundary_coefficients(state, goal, T);
  return energy_from_coefficients(bc.a, bc.b, T);
}

// Exact expansion of the energy cost into E(T) = sum_l alpha_l T^(l-3).
//
// Writing a(T) = sum_l A_l T^(l-3) and b(T) = sum_l B_l T^(l-2) with
//   A_0 = 12(p0 - c0), A_1 = 6(v0 - c1), A_l = (6l-12) c_l,
//   B_0 = -6(p0 - c0),  B_1 = -4 v0 + 4 c_1, B_l = (6-2l) c_l,
// the quadratic form a^2 T^3/3 + a.b T^2 + b^2 T collects into alpha_{l+m}.
inline std::vector<double> energy_poly(const AgentState& state, const GoalTrajectory& goal) {
  const int eta = goal.degree();
  if (eta < 2) throw std::invalid_argument("energy_poly: goal degree eta < 2");
  const auto& c = goal.coeffs;
  std::vector<Vec2> A(eta + 1), B(eta + 1);
  A[0] = 12.0 * (state.p - c[0]);
  A[1] = 6.0 * (state.v - c[1]);
  B[0] = -6.0 * (state.p - c[0]);
  B[1] = -4.0 * state.v + 4.0 * c[1];
  for (int l = 2; l <= eta; ++l) {
    A[l] = (6.0 * l - 12.0) * c[l];
    B[l] = (6.0 - 2.0 * l) * c[l];
  }
  std::vector<double> alpha(2 * eta + 1, 0.0);
  for (int l = 0; l <= eta; ++l)
    for (int m = 0; m <= eta; ++m)
      alpha[l + m] += A[l].dot(A[m]) / 3.0 + A[l].dot(B[m]) + B[l].dot(B[m]);
  return alpha;
}

inline double energy_poly_eval(const std::vector<double>& alpha, double t) {
  return poly_eval(alpha, t) / (t * t * t);
}

// Global minimizer of E(t) = P(t)/t^3 on [t_min, t_max], where P has the alpha
// coefficients. Critical points are roots of Q(t) = t P'(t) - 3 P(t); the
// minimum over roots plus both endpoints is global on the interval.
inline EnergyProfile minimize_energy(const AgentState& state, const GoalTrajectory& goal,
                                     double t_min, double t_max) {
  if (!(t_min > 0.0) || !(t_max > t_min))
    throw std::domain_error("minimize_energy: need 0 < t_min < t_max");
  EnergyProfile prof;
  prof.alphas = energy_poly(state, goal);
  for (double a : prof.alphas)
    if (!std::isfinite(a)) throw std::runtime_error("minimize_energy: non-finite alpha");

  const Poly& P = prof.alphas;
  Poly Q = poly_add(poly_mul({0.0, 1.0}, poly_derivative(P)), poly_mul({-3.0}, P));

  std::vector<double> candidates{t_min, t_max};
  if (poly_degree(Q, 1e-14) >= 1) {
    for (double r : real_roots_in(Q, t_min, t_max)) candidates.push_back(r);
  }
  double best_t = t_min;
  double best_e = std::numeric_limits<double>::infinity();
  for (double t : candidates) {
    const double e = energy_poly_eval(P, t);
    if (e < best_e) {
      best_e = e;
      best_t = t;
    }
  }
  prof.t_star = best_t;
  prof.e_star = std::max(0.0, best_e);
  return prof;
}

}  // namespace swarm
