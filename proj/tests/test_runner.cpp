#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>
#include <string>

#include "uavsim/agents.hpp"
#include "uavsim/channel.hpp"
#include "uavsim/runner.hpp"

using namespace uavsim;

namespace {

ScenarioConfig hand_trace_config() {
  ScenarioConfig c = default_config();
  c.num_uavs = 1;
  c.num_tasks = 2;
  c.task_targets = {{1, Vec3{0, 0, 0}}, {2, Vec3{300, 0, 0}}};
  c.sensing_lambda = 1e-300;
  c.episode_cycles = 1500;
  return c;
}

ScenarioConfig quick_config(int m = 2, int n = 5) {
  ScenarioConfig c = desk_config(2);
  c.num_uavs = m;
  c.num_tasks = n;
  Rng rng(9);
  c.task_targets = sample_task_targets(n, c.cell_radius, rng);
  c.episode_cycles = 150;
  c.hidden_width = 8;
  c.batch_size = 8;
  return c;
}

struct TraceResult {
  double reward = 0.0;
  std::vector<int> executions;
};

// Event-level walk of the protocol for one UAV under the greedy rule with
// always-valid sensing: decide (1 cycle), fly, sense (1 cycle), transmit.
TraceResult hand_trace(const ScenarioConfig& c) {
  const channel::ChannelParams ch = channel::ChannelParams::from_config(c);
  const double r_s = c.uav_altitude * std::tan(c.max_sensing_angle_rad);
  const double step = c.max_speed * c.cycle_duration_s;
  const int n = c.num_tasks;
  std::vector<int> anchor(n, 1);  // task AoI at cycle k is k - anchor
  TraceResult out;
  out.executions.assign(n, 0);
  double x = 0.0, y = 0.0;
  int cycle = 1;
  while (true) {
    int task = 0;
    for (int j = 1; j < n; ++j)
      if (anchor[j] < anchor[task]) task = j;
    const Vec3 t = c.task_targets[task].target;
    const double rho = std::hypot(x - t.x, y - t.y);
    double lx = x, ly = y;
    if (rho > r_s) {
      lx = t.x + (x - t.x) * r_s / rho;
      ly = t.y + (y - t.y) * r_s / rho;
    }
    const double d = std::hypot(lx - x, ly - y);
    const int fly = static_cast<int>(std::ceil(d / step));
    const double per_cycle = channel::data_per_cycle(c.num_subcarriers, Vec3{lx, ly, c.uav_altitude}, ch);
    int tx = 0;
    for (double pending = c.sensing_data_bits; pending > 0.0; ++tx) pending = std::max(pending - per_cycle, 0.0);
    const int executed = cycle + fly + 1 + tx;
    if (executed > c.episode_cycles) break;
    out.reward += (executed - anchor[task]) * c.cycle_duration_s * (c.episode_cycles - executed);
    ++out.executions[task];
    anchor[task] = executed;
    x = lx;
    y = ly;
    cycle = executed + 1;
  }
  return out;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

}  // namespace

TEST_CASE("single-UAV greedy episode matches a hand trace") {
  const ScenarioConfig c = hand_trace_config();
  const Environment env(c);
  AgentList agents = make_agents(env, AgentKind::kGreedy, 1);
  const EpisodeRecord rec = run_episode(env, agents, Mode::kEval, 0, 1, 0.0);
  const TraceResult trace = hand_trace(c);
  REQUIRE(trace.executions[0] + trace.executions[1] >= 4);
  CHECK(rec.executions == trace.executions);
  CHECK(rec.reward == doctest::Approx(trace.reward).epsilon(1e-12));
  const double psi = (2.0 * 1500 * 1501 * 0.1 / 2 - trace.reward) / (2.0 * 1500);
  CHECK(std::abs(rec.psi_s - psi) < 1e-9);
  CHECK(std::abs(rec.direct_aoi_sum / (2.0 * 1500) - psi) < 1e-9);
}

TEST_CASE("no executions gives the bound") {
  ScenarioConfig c = quick_config();
  c.sensing_lambda = 10.0;
  const Environment env(c);
  AgentList agents = make_agents(env, AgentKind::kGreedy, 1);
  const EpisodeRecord rec = run_episode(env, agents, Mode::kEval, 0, 1, 0.0);
  CHECK(rec.reward == 0.0);
  CHECK(rec.psi_s == doctest::Approx((150 + 1) * 0.1 / 2).epsilon(1e-14));
  for (int e : rec.executions) CHECK(e == 0);
}

TEST_CASE("AoI log sums to the accounting identity") {
  for (AgentKind kind : {AgentKind::kGreedy, AgentKind::kRandom, AgentKind::kShortestRoute}) {
    ScenarioConfig c = quick_config(2, 4);
    c.episode_cycles = 300;
    c.sensing_lambda = 1e-3;
    const Environment env(c);
    AgentList agents = make_agents(env, kind, 3);
    std::ostringstream aoi, traj;
    const EpisodeLogs logs{&traj, &aoi};
    const EpisodeRecord rec = run_episode(env, agents, Mode::kEval, 2, 3, 0.0, &logs);
    double sum = 0.0;
    const auto rows = lines(aoi.str());
    CHECK(rows.size() == 300u * 4u);
    for (const auto& r : rows) sum += std::stod(r.substr(r.rfind(',') + 1));
    const double closed = 4 * 300.0 * 301.0 * 0.1 / 2 - rec.reward;
    CHECK(std::abs(sum - closed) < 1e-6);
    CHECK(std::abs(rec.direct_aoi_sum - closed) < 1e-6);
    CHECK(rows.front() == "2,1,1,0.1");
    CHECK(lines(traj.str()).size() == 300u * 2u);
    int execs = 0;
    for (int e : rec.executions) execs += e;
    CHECK(execs > 0);
  }
}

TEST_CASE("trajectory rows") {
  const Environment env(hand_trace_config());
  AgentList agents = make_agents(env, AgentKind::kGreedy, 1);
  std::ostringstream traj;
  const EpisodeLogs logs{&traj, nullptr};
  run_episode(env, agents, Mode::kEval, 0, 1, 0.0, &logs);
  const auto rows = lines(traj.str());
  REQUIRE(rows.size() == 1500);
  CHECK(rows[0] == "0,1,1,0,0,200,decision,1,0,0");
  CHECK(rows[1] == "0,2,1,0,0,200,sensing,1,8e+06,0");
  CHECK(rows[2].find(",transmission,1,") != std::string::npos);
  CHECK(std::string(kTrajectoryHeader).find("selected_task") != std::string::npos);
}

TEST_CASE("episodes are deterministic per seed") {
  const Environment env(quick_config());
  for (AgentKind kind : {AgentKind::kGreedy, AgentKind::kRandom, AgentKind::kCa2c}) {
    AgentList a = make_agents(env, kind, 4), b = make_agents(env, kind, 4);
    const EpisodeRecord x = run_episode(env, a, Mode::kEval, 5, 4, 0.0);
    const EpisodeRecord y = run_episode(env, b, Mode::kEval, 5, 4, 0.0);
    CHECK(x.reward == y.reward);
    CHECK(x.executions == y.executions);
  }
  ScenarioConfig busy = quick_config();
  busy.episode_cycles = 400;
  busy.sensing_lambda = 1e-4;
  const Environment env2(busy);
  AgentList a = make_agents(env2, AgentKind::kRandom, 4);
  const EpisodeRecord x = run_episode(env2, a, Mode::kEval, 5, 4, 0.0);
  const EpisodeRecord y = run_episode(env2, a, Mode::kEval, 5, 5, 0.0);
  const EpisodeRecord z = run_episode(env2, a, Mode::kEval, 6, 4, 0.0);
  CHECK(x.reward > 0.0);
  CHECK((x.reward != y.reward || x.executions != y.executions));
  CHECK((x.reward != z.reward || x.executions != z.executions));
}

TEST_CASE("evaluation leaves learning agents untouched") {
  const Environment env(quick_config());
  for (AgentKind kind : {AgentKind::kCa2c, AgentKind::kDqn, AgentKind::kDdpg}) {
    AgentList agents = make_agents(env, kind, 2);
    run_training(env, agents, 2, 2);
    std::ostringstream before;
    std::vector<std::size_t> sizes;
    for (auto& ag : agents) {
      ag->save(before);
      sizes.push_back(static_cast<LearningAgent&>(*ag).replay().size());
    }
    run_evaluation(env, agents, 3, 2);
    std::ostringstream after;
    for (std::size_t i = 0; i < agents.size(); ++i) {
      agents[i]->save(after);
      CHECK(static_cast<LearningAgent&>(*agents[i]).replay().size() == sizes[i]);
    }
    CHECK(before.str() == after.str());
  }
}

TEST_CASE("training changes parameters and records every episode") {
  const Environment env(quick_config());
  AgentList agents = make_agents(env, AgentKind::kCa2c, 2);
  std::ostringstream before;
  agents[0]->save(before);
  int calls = 0;
  const TrainingResult r = run_training(env, agents, 4, 2, 2, [&](const EpisodeRecord& rec) { CHECK(rec.episode == calls++); });
  CHECK(calls == 4);
  CHECK(r.records.size() == 4);
  CHECK(r.rolling_mean.size() == 4);
  CHECK(r.rolling_mean[1] == doctest::Approx((r.records[0].psi_s + r.records[1].psi_s) / 2));
  CHECK(r.rolling_mean[3] == doctest::Approx((r.records[2].psi_s + r.records[3].psi_s) / 2));
  std::ostringstream after;
  agents[0]->save(after);
  CHECK(before.str() != after.str());
}

TEST_CASE("rolling mean") {
  const auto r = rolling_mean({1, 2, 3, 4, 5}, 2);
  CHECK(r == std::vector<double>{1, 1.5, 2.5, 3.5, 4.5});
  CHECK(rolling_mean({4, 8}, 100) == std::vector<double>{4, 6});
  CHECK(rolling_mean({}, 3).empty());
  CHECK_THROWS(rolling_mean({1}, 0));
}

TEST_CASE("mean_psi ranges") {
  std::vector<EpisodeRecord> recs(4);
  for (int k = 0; k < 4; ++k) recs[k].psi_s = k;
  CHECK(mean_psi(recs, 1, 2) == 1.5);
  CHECK_THROWS(mean_psi(recs, 3, 2));
  CHECK_THROWS(mean_psi(recs, 0, 0));
}

TEST_CASE("sweeps") {
  ScenarioConfig c = quick_config();
  SweepOptions opt;
  opt.eval_episodes = 2;
  opt.replicas = 2;
  const auto rows = run_sweep(c, SweepAxis::kAltitude, {100, 150, 200}, AgentKind::kGreedy, 1, opt);
  REQUIRE(rows.size() == 3);
  CHECK(rows[1].value == 150);
  CHECK(rows[1].replicas == 2);
  for (const auto& r : rows) CHECK(r.mean_psi > 0);

  opt.paired = true;
  opt.replicas = 1;
  const auto paired = run_sweep(c, SweepAxis::kSubcarriers, {40}, AgentKind::kRandom, 1, opt);
  REQUIRE(paired.size() == 2);
  CHECK(paired[0].cooperative);
  CHECK_FALSE(paired[1].cooperative);
  CHECK(paired[0].std_psi == 0.0);

  std::ostringstream out;
  write_sweep(out, SweepAxis::kSubcarriers, paired);
  const auto text = lines(out.str());
  CHECK(text[0] == "subcarriers,cooperative,mean_psi_s,std_psi_s,replicas");
  CHECK(text[1].rfind("40,1,", 0) == 0);
  CHECK(text[2].rfind("40,0,", 0) == 0);

  CHECK_THROWS_AS(apply_sweep_value(c, SweepAxis::kSubcarriers, 2), ConfigError);
  CHECK(apply_sweep_value(c, SweepAxis::kNumUavs, 3).num_uavs == 3);
  CHECK(parse_sweep_axis("altitude") == SweepAxis::kAltitude);
  CHECK_THROWS(parse_sweep_axis("height"));
  CHECK_THROWS(run_sweep(c, SweepAxis::kAltitude, {}, AgentKind::kGreedy, 1, opt));
}

TEST_CASE("cooperation flag couples reward and exclusivity") {
  const ScenarioConfig off = with_cooperation(default_config(), false);
  CHECK_FALSE(off.cooperative);
  CHECK_FALSE(off.exclusive_task_selection);
  const ScenarioConfig on = with_cooperation(off, true);
  CHECK(on.cooperative);
  CHECK(on.exclusive_task_selection);
}

TEST_CASE("output formats") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1e-300) == "1e-300");
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);

  std::vector<EpisodeRecord> recs(2);
  recs[0].episode = 0;
  recs[0].reward = 12.5;
  recs[0].psi_s = 3.25;
  recs[1].episode = 1;
  std::ostringstream curve;
  write_learning_curve(curve, recs, {3.25, 1.625});
  CHECK(curve.str() == "episode,reward,psi_s,rolling_mean\n0,12.5,3.25,3.25\n1,0,0,1.625\n");

  RunManifest m;
  m.config = quick_config();
  m.seed = 9;
  m.agent = AgentKind::kDdpg;
  m.episodes = 3;
  m.version = kVersionTag;
  m.outputs = {"learning_curve.csv"};
  std::ostringstream man;
  write_manifest(man, m);
  const std::string text = man.str();
  CHECK(text.find("agent=ddpg\n") != std::string::npos);
  CHECK(text.find("seed=9\n") != std::string::npos);
  const auto pos = text.find("# resolved config\n");
  REQUIRE(pos != std::string::npos);
  CHECK(parse_config(text.substr(pos + 18)) == m.config);
}

TEST_CASE("agent kind names") {
  for (AgentKind k : {AgentKind::kCa2c, AgentKind::kDqn, AgentKind::kDdpg, AgentKind::kGreedy,
                      AgentKind::kShortestRoute, AgentKind::kRandom})
    CHECK(parse_agent_kind(to_string(k)) == k);
  CHECK(std::string(to_string(AgentKind::kShortestRoute)) == "shortest-route");
  CHECK_THROWS(parse_agent_kind("ppo"));
}

TEST_CASE("run_episode rejects a wrong agent count") {
  const Environment env(quick_config());
  AgentList one;
  one.push_back(std::move(make_agents(env, AgentKind::kGreedy, 1).front()));
  CHECK_THROWS_AS(run_episode(env, one, Mode::kEval, 0, 1, 0.0), std::invalid_argument);
}
