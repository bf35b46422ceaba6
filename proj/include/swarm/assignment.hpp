#pragma once

#include <algorithm>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "swarm/energy.hpp"
#include "swarm/world.hpp"

namespace swarm {

class InfeasibleAssignment : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Local cost matrix for one neighborhood: rows are agents, cols are goals.
// Banned pairs are deleted edges, marked with the infinity sentinel and never
// used in arithmetic.
struct CostMatrix {
  static constexpr double BANNED = std::numeric_limits<double>::infinity();

  std::vector<int> agent_ids;
  std::vector<int> goal_ids;
  std::vector<std::vector<double>> cost;  // [row][col]

  int rows() const { return static_cast<int>(agent_ids.size()); }
  int cols() const { return static_cast<int>(goal_ids.size()); }
  bool banned(int r, int c) const { return !(cost[r][c] < BANNED); }
};

struct Assignment {
  std::map<int, int> pairs;  // agent id -> goal id
  double objective = 0.0;
};

namespace detail {

// Kuhn's matching on non-banned edges; returns the first row that cannot be
// matched, or -1 when a full row matching exists.
inline int unmatchable_row(const CostMatrix& c) {
  const int n = c.rows(), m = c.cols();
  std::vector<int> match_col(m, -1);
  for (int r = 0; r < n; ++r) {
    std::vector<char> used(m, 0);
    std::vector<int> stack;
    bool ok = false;
    std::function<bool(int)> tryk = [&](int row) -> bool {
      for (int j = 0; j < m; ++j) {
        if (used[j] || c.banned(row, j)) continue;
        used[j] = 1;
        if (match_col[j] == -1 || tryk(match_col[j])) {
          match_col[j] = row;
          return true;
        }
      }
      return false;
    };
    ok = tryk(r);
    if (!ok) return r;
  }
  return -1;
}

// Shortest-augmenting-path assignment with potentials. forced[r] >= 0 pins
// row r to that column. Returns row -> column, or empty on infeasibility.
inline std::vector<int> sap_solve(const CostMatrix& c, const std::vector<int>& forced) {
  const int n = c.rows(), m = c.cols();
  const double INF = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
  std::vector<int> p(m + 1, 0), way(m + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(m + 1, INF);
    std::vector<char> used(m + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = INF;
      int j1 = -1;
      for (int j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const int r = i0 - 1, col = j - 1;
        if (!c.banned(r, col) && (forced[r] < 0 || forced[r] == col)) {
          const double cur = c.cost[r][col] - u[i0] - v[j];
          if (cur < minv[j]) {
            minv[j] = cur;
            way[j] = j0;
          }
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      if (j1 < 0 || !(delta < INF)) return {};
      for (int j = 0; j <= m; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else if (minv[j] < INF) {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> row_to_col(n, -1);
  for (int j = 1; j <= m; ++j)
    if (p[j] != 0) row_to_col[p[j] - 1] = j - 1;
  return row_to_col;
}

// Objective summed in fixed row order so equal pair sets give identical floats.
inline double row_order_objective(const CostMatrix& c, const std::vector<int>& row_to_col) {
  double s = 0.0;
  for (int r = 0; r < c.rows(); ++r) s += c.cost[r][row_to_col[r]];
  return s;
}

}  // namespace detail

// Exact minimum-cost assignment with deterministic lexicographic tie-breaking:
// among all optimal solutions, each row in order takes the lowest feasible
// goal column that still permits an optimal completion.
inline Assignment solve_assignment(const CostMatrix& c) {
  const int n = c.rows(), m = c.cols();
  if (n == 0) throw InfeasibleAssignment("empty cost matrix");
  {
    const int bad = detail::unmatchable_row(c);
    if (bad >= 0)
      throw InfeasibleAssignment("no feasible goal for agent " +
                                 std::to_string(c.agent_ids[bad]));
  }
  std::vector<int> forced(n, -1);
  for (int r = 0; r < n; ++r) {
    int best_col = -1;
    double best_obj = std::numeric_limits<double>::infinity();
    for (int g = 0; g < m; ++g) {
      if (c.banned(r, g)) continue;
      bool taken = false;
      for (int q = 0; q < r; ++q)
        if (forced[q] == g) taken = true;
      if (taken) continue;
      forced[r] = g;
      const auto sol = detail::sap_solve(c, forced);
      forced[r] = -1;
      if (sol.empty()) continue;
      const double obj = detail::row_order_objective(c, sol);
      if (obj < best_obj) {
        best_obj = obj;
        best_col = g;
      }
    }
    if (best_col < 0)
      throw InfeasibleAssignment("no feasible completion for agent " +
                                 std::to_string(c.agent_ids[r]));
    forced[r] = best_col;
  }
  Assignment out;
  for (int r = 0; r < n; ++r) out.pairs[c.agent_ids[r]] = c.goal_ids[forced[r]];
  out.objective = detail::row_order_objective(c, forced);
  return out;
}

// Exhaustive oracle with the same tie-break (first optimum in lexicographic
// enumeration order). Guarded to small instances.
inline Assignment brute_force_assignment(const CostMatrix& c) {
  const int n = c.rows(), m = c.cols();
  if (n > 9) throw std::invalid_argument("brute_force_assignment: more than 9 rows");
  if (n == 0) throw InfeasibleAssignment("empty cost matrix");

  std::vector<int> chosen(n, -1), best;
  std::vector<char> col_used(m, 0);
  double best_obj = std::numeric_limits<double>::infinity();

  std::function<void(int, double)> rec = [&](int r, double acc) {
    if (acc >= best_obj) return;
    if (r == n) {
      best_obj = acc;
      best = chosen;
      return;
    }
    for (int g = 0; g < m; ++g) {
      if (col_used[g] || c.banned(r, g)) continue;
      col_used[g] = 1;
      chosen[r] = g;
      rec(r + 1, acc + c.cost[r][g]);
      col_used[g] = 0;
    }
  };
  rec(0, 0.0);
  if (best.empty()) throw InfeasibleAssignment("brute force: no feasible assignment");

  Assignment out;
  for (int r = 0; r < n; ++r) out.pairs[c.agent_ids[r]] = c.goal_ids[best[r]];
  out.objective = detail::row_order_objective(c, best);
  return out;
}

// Cost matrix for one neighborhood solve: unconstrained optimal energies for
// non-banned pairs, deleted edges for bans.
inline CostMatrix build_cost_matrix(const std::vector<AgentState>& members,
                                    const std::vector<GoalTrajectory>& goals,
                                    const std::map<int, std::set<int>>& bans, double t_min,
                                    double t_max) {
  if (members.empty()) throw std::invalid_argument("build_cost_matrix: no members");
  CostMatrix c;
  for (const auto& a : members) c.agent_ids.push_back(a.id);
  for (const auto& g : goals) c.goal_ids.push_back(g.id);
  c.cost.assign(members.size(), std::vector<double>(goals.size(), CostMatrix::BANNED));
  for (std::size_t r = 0; r < members.size(); ++r) {
    const auto it = bans.find(members[r].id);
    for (std::size_t k = 0; k < goals.size(); ++k) {
      if (it != bans.end() && it->second.count(goals[k].id)) continue;
      c.cost[r][k] = minimize_energy(members[r], goals[k], t_min, t_max).e_star;
    }
  }
  const int bad = detail::unmatchable_row(c);
  if (bad >= 0)
    throw InfeasibleAssignment("agent " + std::to_string(c.agent_ids[bad]) +
                               " has no feasible goal");
  return c;
}

}  // namespace swarm
