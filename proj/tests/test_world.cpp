#include <doctest.h>

#include <random>

#include "swarm/scenario_io.hpp"
#include "swarm/world.hpp"

using namespace swarm;

namespace {

const char* kValidScenario = R"({
  "agents": [
    {"id": 1, "p": [0.0, 0.0], "v": [0.0, 0.0]},
    {"id": 2, "p": [1.0, 0.0], "v": [0.0, 0.0]}
  ],
  "goals": [
    {"id": 1, "coeffs": [[0.0, 0.0], [0.0, 0.0], [1.0, 0.0]]},
    {"id": 2, "coeffs": [[2.0, 2.0], [0.0, 0.0], [0.5, 0.5]]}
  ],
  "params": {"h": "inf", "R": 0.1, "v_max": 5.0, "u_max": 50.0,
             "t_min": 0.001, "t_max": 10000.0, "dt_scan": 0.01, "seed": 1}
})";

}  // namespace

TEST_CASE("eval_goal at t=0 returns c0 and c1") {
  GoalTrajectory g{1, {{1, 0}, {0, 0}, {1, 0}}};
  const auto [p, v] = eval_goal(g, 0.0);
  CHECK(p == Vec2{1, 0});
  CHECK(v == Vec2{0, 0});
}

TEST_CASE("eval_goal at t=2") {
  GoalTrajectory g{1, {{1, 0}, {0, 0}, {1, 0}}};
  const auto [p, v] = eval_goal(g, 2.0);
  CHECK(p.x == doctest::Approx(5.0));
  CHECK(v.x == doctest::Approx(4.0));
}

TEST_CASE("eval_goal matches the reference goal velocity polynomial at t=1") {
  // position = integral of v*(t) = (0.05t^3 - 0.3t^2 + 0.45t, 0.02t + 0.05)
  GoalTrajectory g{1, {{0, 0}, {0, 0.05}, {0.225, 0.01}, {-0.1, 0}, {0.0125, 0}}};
  const auto [p, v] = eval_goal(g, 1.0);
  CHECK(v.x == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(v.y == doctest::Approx(0.07).epsilon(1e-12));
}

TEST_CASE("eval_goal velocity equals central finite difference") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> cd(-2.0, 2.0), td(0.1, 5.0);
  for (int trial = 0; trial < 50; ++trial) {
    GoalTrajectory g{1, {}};
    const int eta = 2 + static_cast<int>(rng() % 3);
    for (int l = 0; l <= eta; ++l) g.coeffs.push_back({cd(rng), cd(rng)});
    const double t = td(rng);
    const auto [p, v] = eval_goal(g, t);
    const double eps = 1e-6;
    const Vec2 fd = (eval_goal(g, t + eps).first - eval_goal(g, t - eps).first) / (2.0 * eps);
    CHECK((v - fd).norm() <= 1e-6 * (1.0 + v.norm()));
  }
}

TEST_CASE("distance basics and symmetry") {
  AgentState a{1, {0, 0}, {}}, b{2, {3, 4}, {}};
  CHECK(distance(a, a) == 0.0);
  CHECK(distance(a, b) == doctest::Approx(5.0));
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> d(-10, 10);
  for (int k = 0; k < 100; ++k) {
    AgentState x{1, {d(rng), d(rng)}, {}}, y{2, {d(rng), d(rng)}, {}};
    CHECK(distance(x, y) == distance(y, x));
  }
}

TEST_CASE("neighborhood membership and self-inclusion") {
  std::vector<AgentState> states{{1, {0, 0}, {}}, {2, {0.4, 0}, {}}};
  auto n1 = neighborhood(states, 1, 0.5);
  CHECK(n1 == std::vector<int>{1, 2});
  states[1].p = {0.6, 0};
  n1 = neighborhood(states, 1, 0.5);
  CHECK(n1 == std::vector<int>{1});
  // symmetric membership
  auto n2 = neighborhood(states, 2, 0.5);
  CHECK(n2 == std::vector<int>{2});
  // unbounded horizon covers everyone
  const double inf = std::numeric_limits<double>::infinity();
  CHECK(neighborhood(states, 1, inf).size() == 2);
  CHECK_THROWS_AS(neighborhood(states, 99, 0.5), std::invalid_argument);
}

TEST_CASE("load_scenario accepts a valid file") {
  const auto cfg = load_scenario(kValidScenario);
  CHECK(cfg.n_agents() == 2);
  CHECK(cfg.n_goals() == 2);
  CHECK(!std::isfinite(cfg.h));
}

TEST_CASE("load_scenario rejects a degree-1 goal") {
  std::string bad = kValidScenario;
  const auto pos = bad.find("[[0.0, 0.0], [0.0, 0.0], [1.0, 0.0]]");
  bad.replace(pos, std::string("[[0.0, 0.0], [0.0, 0.0], [1.0, 0.0]]").size(),
              "[[0.0, 0.0], [1.0, 0.0]]");
  CHECK_THROWS_WITH_AS(load_scenario(bad), doctest::Contains("eta < 2"), ValidationError);
}

TEST_CASE("load_scenario rejects M < N") {
  auto j = nlohmann::json::parse(kValidScenario);
  j["goals"].erase(1);
  CHECK_THROWS_WITH_AS(load_scenario(j.dump()), doctest::Contains("M >= N"), ValidationError);
}

TEST_CASE("load_scenario rejects initial overlap") {
  std::string bad = kValidScenario;
  const auto pos = bad.find("[1.0, 0.0]");
  bad.replace(pos, std::string("[1.0, 0.0]").size(), "[0.05, 0.0]");
  CHECK_THROWS_WITH_AS(load_scenario(bad), doctest::Contains("overlap"), ValidationError);
}

TEST_CASE("load_scenario rejects malformed text") {
  CHECK_THROWS_AS(load_scenario("{not json"), ValidationError);
}

TEST_CASE("scenario round-trips through save/load") {
  const auto cfg = load_scenario(kValidScenario);
  const auto cfg2 = load_scenario(save_scenario(cfg));
  REQUIRE(cfg2.n_agents() == cfg.n_agents());
  REQUIRE(cfg2.n_goals() == cfg.n_goals());
  for (int i = 0; i < cfg.n_agents(); ++i) {
    CHECK(cfg2.agents[i].id == cfg.agents[i].id);
    CHECK(cfg2.agents[i].p == cfg.agents[i].p);
    CHECK(cfg2.agents[i].v == cfg.agents[i].v);
  }
  for (int k = 0; k < cfg.n_goals(); ++k) {
    CHECK(cfg2.goals[k].id == cfg.goals[k].id);
    REQUIRE(cfg2.goals[k].coeffs.size() == cfg.goals[k].coeffs.size());
    for (std::size_t l = 0; l < cfg.goals[k].coeffs.size(); ++l)
      CHECK(cfg2.goals[k].coeffs[l] == cfg.goals[k].coeffs[l]);
  }
  CHECK(cfg2.h == cfg.h);
  CHECK(cfg2.R == cfg.R);
  CHECK(cfg2.seed == cfg.seed);
}

TEST_CASE("random agents are materialized deterministically from the seed") {
  const char* spec = R"({
    "agents": {"random": {"count": 5, "box": [-1.0, -1.0, 1.0, 1.0]}},
    "goals": [
      {"id": 1, "coeffs": [[0,0],[0,0],[1,0]]},
      {"id": 2, "coeffs": [[1,0],[0,0],[1,0]]},
      {"id": 3, "coeffs": [[2,0],[0,0],[1,0]]},
      {"id": 4, "coeffs": [[3,0],[0,0],[1,0]]},
      {"id": 5, "coeffs": [[4,0],[0,0],[1,0]]}
    ],
    "params": {"h": "inf", "R": 0.05, "seed": 42}
  })";
  const auto a = load_scenario(spec);
  const auto b = load_scenario(spec);
  REQUIRE(a.n_agents() == 5);
  for (int i = 0; i < 5; ++i) CHECK(a.agents[i].p == b.agents[i].p);
}
