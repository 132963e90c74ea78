// uavsim command line: simulate, channel-table, plan.
#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "uavsim/agents.hpp"
#include "uavsim/baselines.hpp"
#include "uavsim/channel.hpp"
#include "uavsim/config.hpp"
#include "uavsim/runner.hpp"

namespace fs = std::filesystem;
using namespace uavsim;

namespace {

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    std::size_t used = 0;
    out.push_back(std::stod(item, &used));
    if (used != item.size()) throw std::invalid_argument("malformed number in list: " + item);
  }
  if (out.empty()) throw std::invalid_argument("empty value list");
  return out;
}

bool parse_bool(const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw std::invalid_argument("expected a boolean, got '" + v + "'");
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + p.string());
  return f;
}

// Config file or desk scale, then --set overrides, then validation.
ScenarioConfig resolve_config(const std::string& path, const std::vector<std::string>& overrides, std::uint64_t seed) {
  ScenarioConfig c = path.empty() ? desk_config(seed) : load_config_file(path);
  bool targets_overridden = false;
  for (const auto& kv : overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("--set expects key=value, got '" + kv + "'");
    const std::string key = kv.substr(0, eq);
    if (key == "task_targets") targets_overridden = true;
    set_config_value(c, key, kv.substr(eq + 1));
  }
  if (!targets_overridden && static_cast<int>(c.task_targets.size()) != c.num_tasks && path.empty())
    set_config_value(c, "task_targets", "random");
  for (const auto& w : validate_config(c)) std::cerr << "warning: " << w << '\n';
  return c;
}

struct SimulateArgs {
  std::string config;
  std::vector<std::string> overrides;
  std::string agent = "ca2c";
  std::string mode = "train";
  std::uint64_t seed = 1;
  int episodes = -1;
  int eval_episodes = 10;
  int replicas = 1;
  bool paired = false;
  std::string out = "out";
  bool log_trajectories = false;
  std::string sweep;
  std::string cooperative;
  bool enable_3d = false;
  std::string checkpoint_dir;
};

int simulate(const SimulateArgs& a) {
  ScenarioConfig c = resolve_config(a.config, a.overrides, a.seed);
  if (!a.cooperative.empty()) c = with_cooperation(c, parse_bool(a.cooperative));
  if (a.enable_3d) c.enable_3d = true;
  validate_config(c);
  const AgentKind kind = parse_agent_kind(a.agent);
  if (a.mode != "train" && a.mode != "eval") throw std::invalid_argument("--mode must be train or eval");
  const Mode mode = a.mode == "train" ? Mode::kTrain : Mode::kEval;
  const int episodes = a.episodes >= 0 ? a.episodes : (mode == Mode::kTrain ? c.num_episodes : a.eval_episodes);

  const fs::path out(a.out);
  fs::create_directories(out);
  RunManifest manifest{c, a.seed, kind, mode, episodes, kVersionTag, {}};

  if (!a.sweep.empty()) {
    const auto eq = a.sweep.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("--sweep expects axis=v1,v2,...");
    const SweepAxis axis = parse_sweep_axis(a.sweep.substr(0, eq));
    SweepOptions opt;
    opt.train_episodes = mode == Mode::kTrain ? episodes : 0;
    opt.eval_episodes = a.eval_episodes;
    opt.replicas = a.replicas;
    opt.paired = a.paired;
    const auto rows = run_sweep(c, axis, parse_list(a.sweep.substr(eq + 1)), kind, a.seed, opt);
    auto f = open_out(out / "sweep.csv");
    write_sweep(f, axis, rows);
    manifest.outputs.push_back("sweep.csv");
  } else {
    const Environment env(c);
    AgentList agents = make_agents(env, kind, a.seed);
    if (!a.checkpoint_dir.empty()) {
      for (int i = 0; i < env.num_uavs(); ++i) {
        std::ifstream in(fs::path(a.checkpoint_dir) / ("checkpoint_uav" + std::to_string(i + 1) + ".txt"));
        if (!in) throw std::runtime_error("missing checkpoint for UAV " + std::to_string(i + 1));
        if (auto* p = dynamic_cast<Ca2cAgent*>(agents[i].get())) p->load(in);
        else if (auto* q = dynamic_cast<DqnAgent*>(agents[i].get())) q->load(in);
        else if (auto* r = dynamic_cast<DdpgAgent*>(agents[i].get())) r->load(in);
        else throw std::invalid_argument("--checkpoint-dir given for a non-learning agent");
      }
    }
    std::ofstream traj, aoi;
    EpisodeLogs logs;
    if (a.log_trajectories) {
      traj = open_out(out / "trajectory.csv");
      aoi = open_out(out / "aoi.csv");
      traj << kTrajectoryHeader << '\n';
      aoi << kAoiHeader << '\n';
      logs.trajectory = &traj;
      logs.aoi = &aoi;
      manifest.outputs.push_back("trajectory.csv");
      manifest.outputs.push_back("aoi.csv");
    }
    std::vector<EpisodeRecord> records;
    std::vector<double> rolling;
    if (mode == Mode::kTrain) {
      TrainingResult r = run_training(env, agents, episodes, a.seed, 100, {}, a.log_trajectories ? &logs : nullptr);
      records = std::move(r.records);
      rolling = std::move(r.rolling_mean);
    } else {
      records = run_evaluation(env, agents, episodes, a.seed, a.log_trajectories ? &logs : nullptr);
      std::vector<double> psi;
      for (const auto& r : records) psi.push_back(r.psi_s);
      rolling = rolling_mean(psi, 100);
    }
    auto f = open_out(out / "learning_curve.csv");
    write_learning_curve(f, records, rolling);
    manifest.outputs.push_back("learning_curve.csv");
    if (mode == Mode::kTrain && agents.front()->learns()) {
      for (int i = 0; i < env.num_uavs(); ++i) {
        const std::string name = "checkpoint_uav" + std::to_string(i + 1) + ".txt";
        auto ck = open_out(out / name);
        agents[i]->save(ck);
        manifest.outputs.push_back(name);
      }
    }
    if (!records.empty()) std::cout << "mean psi_s " << mean_psi(records, 0, records.size()) << '\n';
  }
  auto mf = open_out(out / "manifest.txt");
  write_manifest(mf, manifest);
  return 0;
}

int channel_table(const std::string& config, const std::vector<std::string>& overrides, const std::string& heights,
                  double r_max, double r_step, const std::string& out_path) {
  ScenarioConfig c = resolve_config(config, overrides, 1);
  const auto params = channel::ChannelParams::from_config(c);
  std::ofstream file;
  std::ostream* out = &std::cout;
  if (!out_path.empty()) {
    file = open_out(out_path);
    out = &file;
  }
  if (!(r_step > 0.0)) throw std::invalid_argument("--r-step must be positive");
  *out << "r_m,h_m,prob_los,pl_los_db,pl_nlos_db,pl_avg_db,snr_db\n";
  for (double h : parse_list(heights)) {
    for (long k = 0; k * r_step <= r_max + 1e-9; ++k) {
      const double r = k * r_step;
      const Vec3 uav{r, 0.0, h};
      const double pl = channel::avg_pathloss(uav, params);
      *out << format_double(r) << ',' << format_double(h) << ',' << format_double(channel::prob_los(uav, params)) << ','
           << format_double(channel::pathloss_los(uav, params)) << ','
           << format_double(channel::pathloss_nlos(uav, params)) << ',' << format_double(pl) << ','
           << format_double(10.0 * std::log10(channel::snr_from_pathloss(pl, params))) << '\n';
    }
  }
  return 0;
}

int plan(const std::string& config, const std::vector<std::string>& overrides, std::uint64_t seed,
         const std::string& out_path) {
  const Environment env(resolve_config(config, overrides, seed));
  const RoutePlan p = plan_route(env);
  std::ofstream file;
  std::ostream* out = &std::cout;
  if (!out_path.empty()) {
    file = open_out(out_path);
    out = &file;
  }
  *out << "order,x,y,leg_length\n";
  const std::size_t n = p.order.size();
  for (std::size_t k = 0; k < n; ++k) {
    const Vec3& a = p.points[p.order[k]];
    const Vec3& b = p.points[p.order[(k + 1) % n]];
    *out << (p.order[k] + 1) << ',' << format_double(a.x) << ',' << format_double(a.y) << ','
         << format_double(distance(a, b)) << '\n';
  }
  std::cerr << "tour length " << p.length << " m\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"UAV sense-and-send AoI simulator"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* s = app.add_subcommand("simulate", "Train or evaluate agents");
  s->add_option("--config", sim.config, "Config file (desk scale when omitted)");
  s->add_option("--set", sim.overrides, "Config override key=value (repeatable)");
  s->add_option("--agent", sim.agent, "ca2c|dqn|ddpg|greedy|shortest-route|random");
  s->add_option("--mode", sim.mode, "train|eval");
  s->add_option("--seed", sim.seed, "Master seed");
  s->add_option("--episodes", sim.episodes, "Episodes (default: num_episodes for train)");
  s->add_option("--eval-episodes", sim.eval_episodes, "Evaluation episodes per sweep point / eval run");
  s->add_option("--replicas", sim.replicas, "Seed replicas per sweep point");
  s->add_flag("--paired", sim.paired, "Sweep cooperative and non-cooperative at every point");
  s->add_option("--out", sim.out, "Output directory");
  s->add_flag("--log-trajectories", sim.log_trajectories, "Write trajectory.csv and aoi.csv");
  s->add_option("--sweep", sim.sweep, "axis=v1,v2,... with axis altitude|subcarriers|num_uavs");
  s->add_option("--cooperative", sim.cooperative, "true|false: shared reward with exclusive task selection");
  s->add_flag("--enable-3d", sim.enable_3d, "Let agents choose the sensing altitude");
  s->add_option("--checkpoint-dir", sim.checkpoint_dir, "Load checkpoint_uav<i>.txt from this directory");

  std::string ch_config, ch_heights = "50,100,150,200,250,300", ch_out;
  std::vector<std::string> ch_overrides;
  double r_max = 1000.0, r_step = 50.0;
  auto* ch = app.add_subcommand("channel-table", "Dump channel quantities over an (r, h) grid");
  ch->add_option("--config", ch_config);
  ch->add_option("--set", ch_overrides);
  ch->add_option("--heights", ch_heights, "Comma-separated altitudes, m");
  ch->add_option("--r-max", r_max, "Largest horizontal distance, m");
  ch->add_option("--r-step", r_step, "Grid spacing, m");
  ch->add_option("--out", ch_out, "CSV path (stdout when omitted)");

  std::string pl_config, pl_out;
  std::vector<std::string> pl_overrides;
  std::uint64_t pl_seed = 1;
  auto* pl = app.add_subcommand("plan", "Shortest-route plan as CSV");
  pl->add_option("--config", pl_config);
  pl->add_option("--set", pl_overrides);
  pl->add_option("--seed", pl_seed, "Seed for desk-scale targets");
  pl->add_option("--out", pl_out, "CSV path (stdout when omitted)");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*s) return simulate(sim);
    if (*ch) return channel_table(ch_config, ch_overrides, ch_heights, r_max, r_step, ch_out);
    if (*pl) return plan(pl_config, pl_overrides, pl_seed, pl_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
