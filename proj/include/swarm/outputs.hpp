#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "swarm/sim.hpp"

namespace swarm {

namespace detail {

inline std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace detail

// Trace CSV sampled at dt_scan: one row per (sample, agent).
inline std::string render_trace_csv(const RunResult& res) {
  std::string out = "t,agent,px,py,vx,vy,ux,uy,goal\n";
  const double dt = res.cfg.dt_scan;
  const int steps = static_cast<int>(std::ceil(res.horizon / dt));
  for (int k = 0; k <= steps; ++k) {
    const double t = k * dt;
    for (std::size_t i = 0; i < res.cfg.agents.size(); ++i) {
      const int id = res.cfg.agents[i].id;
      const auto& pieces = res.executed[i];
      const PolyPiece* active = pieces.empty() ? nullptr : &pieces.back().piece;
      int goal = -1;
      for (const auto& ep : pieces) {
        if (t <= ep.piece.tf + 1e-15) {
          active = &ep.piece;
          goal = ep.goal;
          break;
        }
      }
      if (goal < 0 && !pieces.empty()) goal = pieces.back().goal;
      Vec2 p, v, u;
      if (active) {
        p = active->pos(t);
        v = active->vel(t);
        u = active->acc(t);
      }
      out += detail::fmt(t) + "," + std::to_string(id) + "," + detail::fmt(p.x) + "," +
             detail::fmt(p.y) + "," + detail::fmt(v.x) + "," + detail::fmt(v.y) + "," +
             detail::fmt(u.x) + "," + detail::fmt(u.y) + "," + std::to_string(goal) + "\n";
    }
  }
  return out;
}

// One JSON object per protocol event, in processing order.
inline std::string render_event_log(const RunResult& res) {
  std::string out;
  for (const auto& ev : res.protocol.log) {
    nlohmann::json j;
    j["t"] = ev.t;
    j["type"] = ev.type;
    j["agent"] = ev.agent;
    j["goal"] = ev.goal;
    j["E_star"] = ev.e_star;
    j["competing_ids"] = ev.competing;
    out += j.dump() + "\n";
  }
  return out;
}

inline nlohmann::json metrics_to_json(const RunMetrics& m) {
  nlohmann::json j;
  auto& per = j["per_agent_energy_kJ_per_kg"];
  per = nlohmann::json::object();
  for (const auto& [id, e] : m.per_agent_energy) per[std::to_string(id)] = e;
  j["total_energy_kJ_per_kg"] = m.total_energy;
  j["max_arrival_s"] = m.max_arrival;
  if (std::isfinite(m.min_separation))
    j["min_separation_cm"] = m.min_separation * 100.0;
  else
    j["min_separation_cm"] = nullptr;
  j["total_bans"] = m.total_bans;
  j["premise_held"] = m.premise_held;
  j["unique_arrival"] = m.unique_arrival;
  j["safety_ok"] = m.safety_ok;
  j["repair_failures"] = m.repair_failures;
  return j;
}

inline RunMetrics metrics_from_json(const nlohmann::json& j) {
  RunMetrics m;
  for (const auto& [k, v] : j.at("per_agent_energy_kJ_per_kg").items())
    m.per_agent_energy[std::stoi(k)] = v.get<double>();
  m.total_energy = j.at("total_energy_kJ_per_kg").get<double>();
  m.max_arrival = j.at("max_arrival_s").get<double>();
  if (j.at("min_separation_cm").is_null())
    m.min_separation = std::numeric_limits<double>::infinity();
  else
    m.min_separation = j.at("min_separation_cm").get<double>() / 100.0;
  m.total_bans = j.at("total_bans").get<int>();
  m.premise_held = j.at("premise_held").get<bool>();
  m.unique_arrival = j.at("unique_arrival").get<bool>();
  m.safety_ok = j.at("safety_ok").get<bool>();
  for (const auto& s : j.at("repair_failures")) m.repair_failures.push_back(s.get<std::string>());
  return m;
}

struct OutputPaths {
  std::string trace_csv;
  std::string event_log;
  std::string metrics_json;
};

inline void emit_outputs(const RunResult& res, const OutputPaths& paths, bool with_trace = true) {
  try {
    if (with_trace && !paths.trace_csv.empty())
      detail::write_file(paths.trace_csv, render_trace_csv(res));
    if (!paths.event_log.empty()) detail::write_file(paths.event_log, render_event_log(res));
    if (!paths.metrics_json.empty())
      detail::write_file(paths.metrics_json, metrics_to_json(res.metrics).dump(2) + "\n");
  } catch (const std::exception& e) {
    throw std::runtime_error(std::string("emit_outputs: ") + e.what());
  }
}

inline std::string render_sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out = "h_m,min_separation_cm,E_kJ_per_kg,t_f_s,total_bans,error\n";
  for (const auto& r : rows) {
    out += (std::isfinite(r.h) ? detail::fmt(r.h) : std::string("inf")) + ",";
    if (r.error.empty()) {
      out += (std::isfinite(r.min_separation) ? detail::fmt(r.min_separation * 100.0)
                                              : std::string("")) +
             "," + detail::fmt(r.total_energy) + "," + detail::fmt(r.max_arrival) + "," +
             std::to_string(r.total_bans) + ",\n";
    } else {
      out += ",,,," + r.error + "\n";
    }
  }
  return out;
}

inline nlohmann::json compare_to_json(const CompareResult& c, double T_fixed) {
  nlohmann::json j;
  j["T_fixed_s"] = T_fixed;
  j["optimized"] = metrics_to_json(c.optimized);
  j["fixed"] = metrics_to_json(c.fixed);
  j["reduction_pct"] = c.reduction_pct;
  j["per_pair_dominance"] = c.dominance_ok;
  return j;
}

}  // namespace swarm
