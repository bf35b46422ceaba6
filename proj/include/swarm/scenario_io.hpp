#pragma once

#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include <json.hpp>

#include "swarm/world.hpp"

namespace swarm {

namespace detail {

inline double parse_h(const nlohmann::json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() == "inf") return std::numeric_limits<double>::infinity();
    throw ValidationError("params.h: expected number or \"inf\"");
  }
  return j.get<double>();
}

inline Vec2 parse_vec2(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 2) throw ValidationError("expected [x, y] pair");
  return {j[0].get<double>(), j[1].get<double>()};
}

// Rejection sampling keeps every pair at least 2R apart.
inline std::vector<AgentState> draw_agents(const RandomAgentSpec& spec, double R,
                                           std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dx(spec.x0, spec.x1), dy(spec.y0, spec.y1);
  std::vector<AgentState> agents;
  int attempts = 0;
  while (static_cast<int>(agents.size()) < spec.count) {
    if (++attempts > 100000)
      throw ValidationError("could not place random agents with 2R separation");
    AgentState a;
    a.id = static_cast<int>(agents.size()) + 1;
    a.p = {dx(rng), dy(rng)};
    bool ok = true;
    for (const auto& b : agents)
      if (distance(a, b) < 2.0 * R) ok = false;
    if (ok) agents.push_back(a);
  }
  return agents;
}

}  // namespace detail

inline ScenarioConfig parse_scenario(const nlohmann::json& j) {
  ScenarioConfig cfg;
  if (!j.contains("params")) throw ValidationError("missing params");
  const auto& p = j.at("params");
  if (p.contains("h")) cfg.h = detail::parse_h(p.at("h"));
  if (p.contains("R")) cfg.R = p.at("R").get<double>();
  if (p.contains("v_max")) cfg.v_max = p.at("v_max").get<double>();
  if (p.contains("u_max")) cfg.u_max = p.at("u_max").get<double>();
  if (p.contains("t_min")) cfg.t_min = p.at("t_min").get<double>();
  if (p.contains("t_max")) cfg.t_max = p.at("t_max").get<double>();
  if (p.contains("dt_scan")) cfg.dt_scan = p.at("dt_scan").get<double>();
  if (p.contains("seed")) cfg.seed = p.at("seed").get<std::uint64_t>();

  if (!j.contains("goals")) throw ValidationError("missing goals");
  for (const auto& gj : j.at("goals")) {
    GoalTrajectory g;
    g.id = gj.at("id").get<int>();
    for (const auto& cj : gj.at("coeffs")) g.coeffs.push_back(detail::parse_vec2(cj));
    cfg.goals.push_back(g);
  }

  if (!j.contains("agents")) throw ValidationError("missing agents");
  const auto& aj = j.at("agents");
  if (aj.is_object() && aj.contains("random")) {
    const auto& rj = aj.at("random");
    RandomAgentSpec spec;
    spec.count = rj.at("count").get<int>();
    if (rj.contains("box")) {
      const auto& b = rj.at("box");
      spec.x0 = b[0].get<double>();
      spec.y0 = b[1].get<double>();
      spec.x1 = b[2].get<double>();
      spec.y1 = b[3].get<double>();
    }
    cfg.agents = detail::draw_agents(spec, cfg.R, cfg.seed);
  } else {
    for (const auto& av : aj) {
      AgentState a;
      a.id = av.at("id").get<int>();
      a.p = detail::parse_vec2(av.at("p"));
      a.v = detail::parse_vec2(av.at("v"));
      cfg.agents.push_back(a);
    }
  }

  validate_scenario(cfg);
  return cfg;
}

inline ScenarioConfig load_scenario(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(std::string("scenario parse error: ") + e.what());
  }
  return parse_scenario(j);
}

inline ScenarioConfig load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open scenario file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return load_scenario(ss.str());
}

inline nlohmann::json scenario_to_json(const ScenarioConfig& cfg) {
  nlohmann::json j;
  for (const auto& a : cfg.agents)
    j["agents"].push_back({{"id", a.id}, {"p", {a.p.x, a.p.y}}, {"v", {a.v.x, a.v.y}}});
  for (const auto& g : cfg.goals) {
    nlohmann::json coeffs = nlohmann::json::array();
    for (const auto& c : g.coeffs) coeffs.push_back({c.x, c.y});
    j["goals"].push_back({{"id", g.id}, {"coeffs", coeffs}});
  }
  auto& p = j["params"];
  if (std::isfinite(cfg.h))
    p["h"] = cfg.h;
  else
    p["h"] = "inf";
  p["R"] = cfg.R;
  p["v_max"] = cfg.v_max;
  p["u_max"] = cfg.u_max;
  p["t_min"] = cfg.t_min;
  p["t_max"] = cfg.t_max;
  p["dt_scan"] = cfg.dt_scan;
  p["seed"] = cfg.seed;
  return j;
}

inline std::string save_scenario(const ScenarioConfig& cfg) { return scenario_to_json(cfg).dump(2); }

}  // namespace swarm
