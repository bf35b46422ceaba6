#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "swarm/assignment.hpp"
#include "swarm/energy.hpp"
#include "swarm/protocol.hpp"
#include "swarm/trajectory.hpp"
#include "swarm/world.hpp"

namespace swarm {

struct SimOptions {
  // Previous-method mode: every arrival forced to this duration.
  std::optional<double> fixed_arrival;
  // Audit hook: for every optimized pair, require E*(t_star) <= E(T).
  std::optional<double> dominance_check_T;
  double tail = 0.5;  // post-arrival tracking window [s]
};

struct RunMetrics {
  std::map<int, double> per_agent_energy;  // [kJ/kg], reported-energy convention
  double total_energy = 0.0;               // [kJ/kg]
  double max_arrival = 0.0;                // [s]
  double min_separation = 0.0;             // [m]
  int total_bans = 0;
  bool premise_held = true;
  bool unique_arrival = false;
  bool safety_ok = true;
  bool dominance_ok = true;
  double max_arrival_pos_err = 0.0;
  std::vector<std::string> repair_failures;
};

struct ExecPiece {
  PolyPiece piece;
  int goal = -1;
  bool tracking = false;
};

struct RunResult {
  ScenarioConfig cfg;
  ProtocolState protocol;
  std::vector<std::vector<ExecPiece>> executed;  // per agent, in cfg order
  RunMetrics metrics;
  double horizon = 0.0;
};

namespace detail {

class Simulator {
 public:
  Simulator(const ScenarioConfig& cfg, const SimOptions& opt) : cfg_(cfg), opt_(opt) {
    const int n = cfg_.n_agents();
    executed_.resize(n);
    arrival_tf_.assign(n, std::numeric_limits<double>::infinity());
    for (int i = 0; i < n; ++i) {
      idx_of_id_[cfg_.agents[i].id] = i;
      proto_.agents[cfg_.agents[i].id] = {};
    }
    for (const auto& g : cfg_.goals) goal_of_id_[g.id] = &g;
  }

  RunResult run() {
    init_memberships();
    const double t0 = 0.0;
    // Algorithm start: every agent solves its local assignment, plans, then
    // conflicts are resolved to quiescence.
    for (int i = 0; i < cfg_.n_agents(); ++i) assign_and_plan(cfg_.agents[i].id, t0);
    cascade(t0);
    main_loop();
    return finalize();
  }

 private:
  ScenarioConfig cfg_;
  SimOptions opt_;
  ProtocolState proto_;
  std::vector<std::vector<ExecPiece>> executed_;
  std::vector<double> arrival_tf_;
  std::map<int, int> idx_of_id_;
  std::map<int, const GoalTrajectory*> goal_of_id_;
  std::map<std::pair<int, int>, bool> in_nbhd_;  // pair (i<j) -> membership
  bool dominance_ok_ = true;
  std::vector<std::string> repair_failures_;
  double now_ = 0.0;

  int idx(int id) const { return idx_of_id_.at(id); }

  AgentState state_at(int id, double t) const {
    const int i = idx(id);
    const auto& pieces = executed_[i];
    if (pieces.empty()) return cfg_.agents[i];
    const PolyPiece* active = &pieces.back().piece;
    for (const auto& ep : pieces) {
      if (t <= ep.piece.tf + 1e-15) {
        active = &ep.piece;
        break;
      }
    }
    AgentState s = cfg_.agents[i];
    s.p = active->pos(t);
    s.v = active->vel(t);
    return s;
  }

  std::vector<AgentState> snapshot(double t) const {
    std::vector<AgentState> out;
    out.reserve(cfg_.agents.size());
    for (const auto& a : cfg_.agents) out.push_back(state_at(a.id, t));
    return out;
  }

  std::vector<int> nbhd_at(int id, double t) const {
    return neighborhood(snapshot(t), id, cfg_.h);
  }

  void init_memberships() {
    if (!std::isfinite(cfg_.h)) return;
    for (std::size_t i = 0; i < cfg_.agents.size(); ++i)
      for (std::size_t j = i + 1; j < cfg_.agents.size(); ++j)
        in_nbhd_[{cfg_.agents[i].id, cfg_.agents[j].id}] =
            distance(cfg_.agents[i], cfg_.agents[j]) <= cfg_.h;
  }

  // Local Problem 2 solve for one agent at time t; adopts its own row only.
  void assign_and_plan(int id, double t) {
    const auto member_ids = nbhd_at(id, t);
    std::vector<AgentState> members;
    for (int m : member_ids) members.push_back(state_at(m, t));
    std::sort(members.begin(), members.end(),
              [](const AgentState& a, const AgentState& b) { return a.id < b.id; });

    // Goals rebased to the planning frame (local time 0 = now).
    std::vector<GoalTrajectory> goals;
    for (const auto& g : cfg_.goals) goals.push_back({g.id, poly_shift(g.coeffs, t)});

    CostMatrix c;
    std::map<std::pair<int, int>, double> tstar_of;
    for (const auto& m : members) c.agent_ids.push_back(m.id);
    for (const auto& g : goals) c.goal_ids.push_back(g.id);
    c.cost.assign(members.size(), std::vector<double>(goals.size(), CostMatrix::BANNED));
    for (std::size_t r = 0; r < members.size(); ++r) {
      const auto& bans = proto_.at(members[r].id).banned;
      for (std::size_t k = 0; k < goals.size(); ++k) {
        if (bans.count(goals[k].id)) continue;
        if (opt_.fixed_arrival) {
          c.cost[r][k] = energy_at(members[r], goals[k], *opt_.fixed_arrival);
          tstar_of[{members[r].id, goals[k].id}] = *opt_.fixed_arrival;
        } else {
          const auto prof = minimize_energy(members[r], goals[k], cfg_.t_min, cfg_.t_max);
          c.cost[r][k] = prof.e_star;
          tstar_of[{members[r].id, goals[k].id}] = prof.t_star;
          if (opt_.dominance_check_T) {
            const double T = *opt_.dominance_check_T;
            if (T >= cfg_.t_min && T <= cfg_.t_max) {
              const double e_fixed = energy_at(members[r], goals[k], T);
              if (prof.e_star > e_fixed * (1.0 + 1e-9) + 1e-12) dominance_ok_ = false;
            }
          }
        }
      }
    }

    Assignment sol;
    try {
      sol = solve_assignment(c);
    } catch (const InfeasibleAssignment& e) {
      throw ProtocolViolation(std::string("assignment infeasible during protocol: ") + e.what());
    }

    const int my_goal = sol.pairs.at(id);
    int my_row = -1;
    for (std::size_t r = 0; r < members.size(); ++r)
      if (members[r].id == id) my_row = static_cast<int>(r);
    int my_col = -1;
    for (std::size_t k = 0; k < goals.size(); ++k)
      if (goals[k].id == my_goal) my_col = static_cast<int>(k);
    const double my_e = c.cost[my_row][my_col];
    const double my_T = tstar_of.at({id, my_goal});

    auto& ap = proto_.at(id);
    if (ap.arrived) ap.arrived = false;  // evicted after arrival: lift off again
    ap.prescribed = my_goal;
    ap.prescribed_e_star = my_e;
    ap.history.push_back({t, my_goal, my_e});
    proto_.log.push_back({t, "assign", id, my_goal, my_e, {}});

    commit_plan(id, t, goals[my_col], my_T, my_e);
  }

  // Plan the cubic, check limits and safety against committed higher-priority
  // neighbors, repair if needed, and commit.
  void commit_plan(int id, double t, const GoalTrajectory& rebased_goal, double T, double e_star) {
    const AgentState s = state_at(id, t);
    TrajectorySegment seg = plan_unconstrained(s, rebased_goal, T, t);

    RepairContext ctx;
    ctx.state = s;
    ctx.goal = rebased_goal;
    ctx.t0 = t;
    ctx.v_max = cfg_.v_max;
    ctx.u_max = cfg_.u_max;
    ctx.R = cfg_.R;
    const auto my_nbhd = nbhd_at(id, t);
    const PriorityContext mine{id, static_cast<int>(my_nbhd.size()),
                               proto_.at(id).prescribed_e_star};
    for (int j : my_nbhd) {
      if (j == id) continue;
      const auto& op = proto_.at(j);
      if (op.prescribed < 0) continue;
      const PriorityContext theirs{j, static_cast<int>(nbhd_at(j, t).size()), op.prescribed_e_star};
      if (priority(mine, theirs) == 1) continue;  // only lower priority yields
      for (const auto& ep : executed_[idx(j)])
        if (ep.piece.tf > t) ctx.higher_priority.push_back(ep.piece);
    }

    ConstraintReport rep = check_limits(seg, cfg_.v_max, cfg_.u_max);
    for (const auto& hp : ctx.higher_priority) {
      const auto sv = check_safety(seg.piece(), hp, cfg_.R).safety_violations;
      rep.safety_violations.insert(rep.safety_violations.end(), sv.begin(), sv.end());
    }

    std::optional<PolyPiece> hold;
    if (!rep.feasible()) {
      const auto repaired = repair_trajectory(seg, rep, ctx);
      if (repaired) {
        seg = repaired->segment;
        hold = repaired->hold;
      } else {
        repair_failures_.push_back("agent " + std::to_string(id) + " at t=" + std::to_string(t));
      }
    }

    truncate_at(id, t);
    if (hold) executed_[idx(id)].push_back({*hold, proto_.at(id).prescribed, false});
    executed_[idx(id)].push_back({seg.piece(), proto_.at(id).prescribed, false});
    arrival_tf_[idx(id)] = seg.tf;
    (void)e_star;
  }

  void truncate_at(int id, double t) {
    auto& pieces = executed_[idx(id)];
    while (!pieces.empty() && pieces.back().piece.t0 >= t - 1e-15) pieces.pop_back();
    if (!pieces.empty() && pieces.back().piece.tf > t) pieces.back().piece.tf = t;
  }

  void cascade(double t) {
    std::vector<int> ids;
    for (const auto& a : cfg_.agents) ids.push_back(a.id);
    ConflictOps ops;
    ops.neighborhood = [this, t](int i) { return nbhd_at(i, t); };
    ops.reassign = [this, t](int i) { assign_and_plan(i, t); };
    resolve_conflicts(proto_, ids, ops, t);
  }

  double pair_distance(int a, int b, double t) const {
    return (state_at(a, t).p - state_at(b, t).p).norm();
  }

  // Bisect the crossing time of d_ab(t) = h inside (lo, hi].
  double refine_crossing(int a, int b, double lo, double hi) const {
    double flo = pair_distance(a, b, lo) - cfg_.h;
    for (int it = 0; it < 80; ++it) {
      const double m = 0.5 * (lo + hi);
      const double fm = pair_distance(a, b, m) - cfg_.h;
      if ((flo < 0.0) == (fm < 0.0)) {
        lo = m;
        flo = fm;
      } else {
        hi = m;
      }
      if (hi - lo < 1e-9) break;
    }
    // hi sits on the post-crossing side, so neighborhood tests at the
    // returned time agree with the flipped membership.
    return hi;
  }

  void process_arrivals(double ta) {
    for (const auto& a : cfg_.agents) {
      const int i = idx(a.id);
      auto& ap = proto_.at(a.id);
      if (ap.arrived || std::abs(arrival_tf_[i] - ta) > 1e-9) continue;
      ap.arrived = true;
      const auto& goal = *goal_of_id_.at(ap.prescribed);
      // Post-arrival: track the goal exactly; clipped to the horizon later.
      PolyPiece track{ta, std::numeric_limits<double>::infinity(), poly_shift(goal.coeffs, ta)};
      executed_[i].push_back({track, ap.prescribed, true});
      proto_.log.push_back({ta, "arrive", a.id, ap.prescribed, ap.prescribed_e_star, {}});
    }
  }

  void main_loop() {
    double t = 0.0;
    const double guard_limit = cfg_.t_max * 10.0;
    while (true) {
      double ta = std::numeric_limits<double>::infinity();
      for (const auto& a : cfg_.agents)
        if (!proto_.at(a.id).arrived) ta = std::min(ta, arrival_tf_[idx(a.id)]);
      if (!std::isfinite(ta)) break;  // everyone arrived
      if (t > guard_limit) throw ProtocolViolation("simulation exceeded time guard");

      bool event_processed = false;
      if (std::isfinite(cfg_.h)) {
        double tcur = t;
        while (tcur < ta - 1e-12) {
          const double tnext = std::min(tcur + cfg_.dt_scan, ta);
          double tc_min = std::numeric_limits<double>::infinity();
          std::pair<int, int> who{-1, -1};
          for (auto& [pr, inside] : in_nbhd_) {
            const bool now_inside = pair_distance(pr.first, pr.second, tnext) <= cfg_.h;
            if (now_inside == inside) continue;
            const double tc = refine_crossing(pr.first, pr.second, tcur, tnext);
            if (tc < tc_min) {
              tc_min = tc;
              who = pr;
            }
          }
          if (who.first >= 0) {
            in_nbhd_[who] = !in_nbhd_[who];
            cascade(tc_min);
            t = std::max(tc_min, t + 1e-9);
            event_processed = true;
            break;
          }
          tcur = tnext;
        }
      }
      if (event_processed) continue;

      process_arrivals(ta);
      t = ta;
    }
    now_ = t;
  }

  RunResult finalize() {
    RunResult res;
    res.cfg = cfg_;

    double max_arrival = 0.0;
    for (const auto& a : cfg_.agents) max_arrival = std::max(max_arrival, arrival_tf_[idx(a.id)]);
    res.horizon = max_arrival + opt_.tail;

    for (auto& pieces : executed_)
      for (auto& ep : pieces)
        if (!std::isfinite(ep.piece.tf)) ep.piece.tf = res.horizon;

    RunMetrics& m = res.metrics;
    m.max_arrival = max_arrival;
    m.total_bans = proto_.total_bans;
    m.dominance_ok = dominance_ok_;
    m.repair_failures = repair_failures_;

    for (const auto& a : cfg_.agents) {
      double effort = 0.0;
      for (const auto& ep : executed_[idx(a.id)])
        if (!ep.tracking) effort += ep.piece.control_effort(ep.piece.t0, ep.piece.tf);
      m.per_agent_energy[a.id] = 0.5 * effort / 1000.0;  // reported-energy, kJ/kg
      m.total_energy += m.per_agent_energy[a.id];
    }

    // Exact pairwise minimum separation over the whole run.
    double min_sep = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < cfg_.agents.size(); ++i) {
      for (std::size_t j = i + 1; j < cfg_.agents.size(); ++j) {
        for (const auto& pa : executed_[i])
          for (const auto& pb : executed_[j]) {
            const auto sep = separation(pa.piece, pb.piece, 0.0);
            min_sep = std::min(min_sep, sep.min_distance);
          }
      }
    }
    if (cfg_.agents.size() == 1) min_sep = std::numeric_limits<double>::infinity();
    m.min_separation = min_sep;
    m.safety_ok = !(min_sep < 2.0 * cfg_.R - 1e-9) && repair_failures_.empty();

    // Arrival fidelity: sampled position vs analytic goal position.
    for (const auto& a : cfg_.agents) {
      const auto& ap = proto_.at(a.id);
      if (!ap.arrived || ap.prescribed < 0) continue;
      const double ta = arrival_tf_[idx(a.id)];
      const auto [pg, vg] = eval_goal(*goal_of_id_.at(ap.prescribed), ta);
      m.max_arrival_pos_err =
          std::max(m.max_arrival_pos_err, (state_at(a.id, ta).p - pg).norm());
    }

    const auto audit = convergence_audit(proto_, max_arrival);
    m.premise_held = audit.premise_held;
    m.unique_arrival = audit.unique_arrival;

    res.protocol = std::move(proto_);
    res.executed = std::move(executed_);
    return res;
  }
};

}  // namespace detail

inline RunResult run_simulation(const ScenarioConfig& cfg, const SimOptions& opt = {}) {
  validate_scenario(cfg);
  detail::Simulator sim(cfg, opt);
  return sim.run();
}

struct CompareResult {
  RunMetrics optimized;
  RunMetrics fixed;
  double reduction_pct = 0.0;  // total-energy reduction of optimized vs fixed
  bool dominance_ok = true;    // per-pair E*(t_star) <= E(T_fixed)
};

inline CompareResult compare_fixed_T(const ScenarioConfig& cfg, double T_fixed,
                                     const SimOptions& base = {}) {
  if (!(T_fixed > 0.0)) throw std::domain_error("compare_fixed_T: T must be > 0");
  SimOptions opt_optimized = base;
  opt_optimized.dominance_check_T = T_fixed;
  SimOptions opt_fixed = base;
  opt_fixed.fixed_arrival = T_fixed;

  CompareResult out;
  out.optimized = run_simulation(cfg, opt_optimized).metrics;
  out.fixed = run_simulation(cfg, opt_fixed).metrics;
  out.dominance_ok = out.optimized.dominance_ok;
  if (out.fixed.total_energy > 0.0)
    out.reduction_pct = 100.0 * (1.0 - out.optimized.total_energy / out.fixed.total_energy);
  return out;
}

struct SweepRow {
  double h = 0.0;  // infinity allowed
  double min_separation = 0.0;
  double total_energy = 0.0;
  double max_arrival = 0.0;
  int total_bans = 0;
  std::string error;
};

inline std::vector<SweepRow> sweep_h(const ScenarioConfig& cfg, const std::vector<double>& h_values,
                                     const SimOptions& opt = {}) {
  if (h_values.empty()) throw std::invalid_argument("sweep_h: empty h list");
  std::vector<SweepRow> rows;
  for (double h : h_values) {
    SweepRow row;
    row.h = h;
    try {
      ScenarioConfig c = cfg;
      c.h = h;
      const auto res = run_simulation(c, opt);
      row.min_separation = res.metrics.min_separation;
      row.total_energy = res.metrics.total_energy;
      row.max_arrival = res.metrics.max_arrival;
      row.total_bans = res.metrics.total_bans;
    } catch (const std::exception& e) {
      row.error = e.what();
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace swarm
