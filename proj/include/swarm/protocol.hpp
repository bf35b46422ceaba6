#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "swarm/world.hpp"

namespace swarm {

class ProtocolViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct AssignmentRecord {
  double t = 0.0;
  int goal = -1;
  double e_star = 0.0;
};

struct EventRecord {
  double t = 0.0;
  std::string type;  // assign | ban | conflict | arrive
  int agent = -1;
  int goal = -1;
  double e_star = 0.0;
  std::vector<int> competing;
};

struct AgentProtocol {
  int prescribed = -1;  // goal id, -1 before first assignment
  double prescribed_e_star = 0.0;
  std::set<int> banned;
  std::vector<AssignmentRecord> history;
  bool arrived = false;
};

struct ProtocolState {
  std::map<int, AgentProtocol> agents;
  std::vector<EventRecord> log;
  int total_bans = 0;

  AgentProtocol& at(int id) {
    auto it = agents.find(id);
    if (it == agents.end()) throw std::invalid_argument("unknown agent id " + std::to_string(id));
    return it->second;
  }
  const AgentProtocol& at(int id) const { return const_cast<ProtocolState*>(this)->at(id); }
};

// Neighbors currently prescribed the same goal as agent i.
inline std::vector<int> competing_set(int i, const ProtocolState& state,
                                      const std::vector<int>& nbhd) {
  const auto& self = state.at(i);
  std::vector<int> out;
  if (self.prescribed < 0) return out;
  for (int j : nbhd) {
    if (j == i) continue;
    const auto& other = state.at(j);
    if (other.prescribed == self.prescribed) out.push_back(j);
  }
  std::sort(out.begin(), out.end());
  return out;
}

struct PriorityContext {
  int id = -1;
  int nbhd_size = 0;
  double e_star = 0.0;  // to the contested goal
};

// 1 iff i has priority over j: larger neighborhood, then lower energy to the
// contested goal, then lower id. Strict total order, so antisymmetric.
inline int priority(const PriorityContext& i, const PriorityContext& j) {
  if (i.id == j.id) throw std::domain_error("priority: identical agent ids");
  if (i.nbhd_size != j.nbhd_size) return i.nbhd_size > j.nbhd_size ? 1 : 0;
  if (i.e_star != j.e_star) return i.e_star < j.e_star ? 1 : 0;
  return i.id < j.id ? 1 : 0;
}

// Callbacks the conflict-resolution loop needs from the surrounding run.
struct ConflictOps {
  // Neighborhood member ids at the event time, self included.
  std::function<std::vector<int>(int)> neighborhood;
  // Re-solve the local assignment for an agent whose goal was just banned,
  // update its prescription, and re-plan its trajectory.
  std::function<void(int)> reassign;
};

// One banning/reassignment cascade at time t over the given agent ids.
// Snapshot semantics: losers for the current prescriptions are identified
// first, then every loser bans and reassigns; repeats until quiescent.
// Returns the number of bans issued.
inline int resolve_conflicts(ProtocolState& state, const std::vector<int>& agent_ids,
                             const ConflictOps& ops, double t) {
  int bans_issued = 0;
  const int max_rounds = 1 + static_cast<int>(state.agents.size() * state.agents.size() * 4 + 64);
  for (int round = 0; round < max_rounds; ++round) {
    struct Loser {
      int id;
      int goal;
      std::vector<int> competing;
    };
    std::vector<Loser> losers;
    for (int i : agent_ids) {
      const auto& self = state.at(i);
      if (self.prescribed < 0) continue;
      const auto nbhd = ops.neighborhood(i);
      const auto comp = competing_set(i, state, nbhd);
      if (comp.empty()) continue;
      state.log.push_back({t, "conflict", i, self.prescribed, self.prescribed_e_star, comp});
      const PriorityContext mine{i, static_cast<int>(nbhd.size()), self.prescribed_e_star};
      bool lost = false;
      for (int j : comp) {
        const auto& other = state.at(j);
        const PriorityContext theirs{j, static_cast<int>(ops.neighborhood(j).size()),
                                     other.prescribed_e_star};
        if (priority(mine, theirs) == 0) lost = true;
      }
      if (lost) losers.push_back({i, self.prescribed, comp});
    }
    if (losers.empty()) return bans_issued;
    for (const auto& l : losers) {
      auto& ap = state.at(l.id);
      if (ap.prescribed != l.goal) continue;  // already moved by an earlier loser this round
      ap.banned.insert(l.goal);
      ++state.total_bans;
      ++bans_issued;
      state.log.push_back({t, "ban", l.id, l.goal, ap.prescribed_e_star, l.competing});
      ops.reassign(l.id);
    }
  }
  throw ProtocolViolation("conflict resolution did not reach quiescence");
}

struct ConvergenceReport {
  bool unique_arrival = false;
  double final_arrival_time = 0.0;
  int total_bans = 0;
  bool premise_held = true;
  // (agent, goal, earlier E*, later E*) whenever a later prescription of the
  // same goal cost more; monotone costs are what guarantee termination.
  std::vector<std::tuple<int, int, double, double>> premise_violations;
};

// Post-run audit: unique arrivals, final arrival time, and whether sequential
// reassignments of the same agent-goal pair ever increased the optimal energy.
inline ConvergenceReport convergence_audit(const ProtocolState& state, double final_time) {
  ConvergenceReport rep;
  rep.total_bans = state.total_bans;
  rep.final_arrival_time = final_time;
  std::set<int> goals_taken;
  bool all_arrived = true, injective = true;
  for (const auto& [id, ap] : state.agents) {
    if (!ap.arrived || ap.prescribed < 0) all_arrived = false;
    if (ap.prescribed >= 0 && !goals_taken.insert(ap.prescribed).second) injective = false;
    std::map<int, double> last_e;
    for (const auto& rec : ap.history) {
      auto it = last_e.find(rec.goal);
      if (it != last_e.end() && rec.e_star > it->second * (1.0 + 1e-12)) {
        rep.premise_held = false;
        rep.premise_violations.emplace_back(id, rec.goal, it->second, rec.e_star);
      }
      last_e[rec.goal] = rec.e_star;
    }
  }
  rep.unique_arrival = all_arrived && injective;
  return rep;
}

}  // namespace swarm
