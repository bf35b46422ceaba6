#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "swarm/poly.hpp"
#include "swarm/vec2.hpp"

namespace swarm {

struct AgentState {
  int id = 0;
  Vec2 p;  // [m]
  Vec2 v;  // [m/s]
};

struct GoalTrajectory {
  int id = 0;
  PolyVec2 coeffs;  // position polynomial, degree >= 2

  int degree() const { return static_cast<int>(coeffs.size()) - 1; }
};

// Analytic position/velocity of a goal at time t.
inline std::pair<Vec2, Vec2> eval_goal(const GoalTrajectory& g, double t) {
  return {poly_eval(g.coeffs, t), poly_eval(poly_derivative(g.coeffs), t)};
}

inline double distance(const AgentState& a, const AgentState& b) { return (a.p - b.p).norm(); }

// Optional request to draw agent initial positions from a box.
struct RandomAgentSpec {
  int count = 0;
  double x0 = 0, y0 = 0, x1 = 1, y1 = 1;
};

struct ScenarioConfig {
  std::vector<AgentState> agents;
  std::vector<GoalTrajectory> goals;
  double h = std::numeric_limits<double>::infinity();  // sensing horizon [m]
  double R = 0.05;                                     // safety radius [m]
  double v_max = 10.0;
  double u_max = 100.0;
  double t_min = 1e-3;
  double t_max = 1e4;
  double dt_scan = 0.01;
  std::uint64_t seed = 0;

  int n_agents() const { return static_cast<int>(agents.size()); }
  int n_goals() const { return static_cast<int>(goals.size()); }
};

class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void validate_scenario(const ScenarioConfig& cfg) {
  if (cfg.agents.empty()) throw ValidationError("scenario has no agents");
  if (cfg.n_goals() < cfg.n_agents()) throw ValidationError("M >= N violated");
  if (!(cfg.t_min > 0.0)) throw ValidationError("t_min must be > 0");
  if (!(cfg.t_max > cfg.t_min)) throw ValidationError("t_max must exceed t_min");
  if (!(cfg.dt_scan > 0.0)) throw ValidationError("dt_scan must be > 0");
  if (!(cfg.R > 0.0)) throw ValidationError("R must be > 0");
  if (std::isfinite(cfg.h) && cfg.h < 4.0 * cfg.R) throw ValidationError("h >= 4R violated");

  std::set<int> agent_ids, goal_ids;
  for (const auto& a : cfg.agents) {
    require_finite(a.p, "agent position");
    require_finite(a.v, "agent velocity");
    if (a.v.norm() > cfg.v_max * (1.0 + 1e-12))
      throw ValidationError("agent " + std::to_string(a.id) + " exceeds v_max");
    if (!agent_ids.insert(a.id).second)
      throw ValidationError("duplicate agent id " + std::to_string(a.id));
  }
  for (const auto& g : cfg.goals) {
    if (g.degree() < 2) throw ValidationError("goal degree eta < 2 (goal " + std::to_string(g.id) + ")");
    for (const auto& c : g.coeffs) require_finite(c, "goal coefficient");
    if (!goal_ids.insert(g.id).second)
      throw ValidationError("duplicate goal id " + std::to_string(g.id));
  }
  for (std::size_t i = 0; i < cfg.agents.size(); ++i)
    for (std::size_t j = i + 1; j < cfg.agents.size(); ++j)
      if (distance(cfg.agents[i], cfg.agents[j]) < 2.0 * cfg.R)
        throw ValidationError("initial overlap < 2R between agents " +
                              std::to_string(cfg.agents[i].id) + " and " +
                              std::to_string(cfg.agents[j].id));
}

// Positions taken from a snapshot of agent states (ids must match cfg ordering).
inline std::vector<int> neighborhood(const std::vector<AgentState>& states, int agent_id, double h) {
  const AgentState* self = nullptr;
  for (const auto& s : states)
    if (s.id == agent_id) self = &s;
  if (!self) throw std::invalid_argument("unknown agent id " + std::to_string(agent_id));
  std::vector<int> out;
  for (const auto& s : states)
    if (distance(*self, s) <= h) out.push_back(s.id);
  return out;
}

}  // namespace swarm
