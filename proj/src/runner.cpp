#include "uavsim/runner.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "uavsim/agents.hpp"
#include "uavsim/baselines.hpp"
#include "uavsim/mlp.hpp"

namespace uavsim {

const char* const kTrajectoryHeader = "episode,cycle,uav,x,y,z,cycle_type,selected_task,d_r_bits,reward_cum";
const char* const kAoiHeader = "episode,cycle,task,aoi_s";
const char* const kVersionTag = "uavsim-0.1.0";

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

AgentList make_agents(const Environment& env, AgentKind kind, std::uint64_t seed) {
  AgentList agents;
  switch (kind) {
    case AgentKind::kCa2c:
    case AgentKind::kDqn:
    case AgentKind::kDdpg:
      for (int i = 0; i < env.num_uavs(); ++i) {
        Rng rng = make_stream(seed, Stream::kNetInit, static_cast<std::uint64_t>(i));
        if (kind == AgentKind::kCa2c) agents.push_back(std::make_unique<Ca2cAgent>(env, i, rng));
        else if (kind == AgentKind::kDqn) agents.push_back(std::make_unique<DqnAgent>(env, i, rng));
        else agents.push_back(std::make_unique<DdpgAgent>(env, i, rng));
      }
      return agents;
    default:
      return make_baseline_agents(env, kind, seed);
  }
}

EpisodeRecord run_episode(const Environment& env, AgentList& agents, Mode mode, int episode, std::uint64_t seed,
                          double lr, const EpisodeLogs* logs) {
  const auto start = std::chrono::steady_clock::now();
  const ScenarioConfig& c = env.config();
  const int m = env.num_uavs();
  const int n_tasks = env.num_tasks();
  if (static_cast<int>(agents.size()) != m) throw std::invalid_argument("run_episode: one agent per UAV required");
  const bool training = mode == Mode::kTrain;
  // Evaluation streams are offset so they never coincide with training ones.
  const int stream_index = training ? episode : kEvalEpisodeOffset + episode;
  const auto ep = static_cast<std::uint64_t>(stream_index);

  Rng sensing_rng = make_stream(seed, Stream::kSensing, ep);
  std::vector<Rng> policy_rng;
  for (int i = 0; i < m; ++i) policy_rng.push_back(make_stream(seed, Stream::kPolicy, ep, static_cast<std::uint64_t>(i)));
  for (auto& a : agents) a->begin_episode(stream_index, training);

  EpisodeRecord rec;
  rec.episode = episode;
  rec.executions.assign(n_tasks, 0);
  EnvState state = env.initial_state();
  std::vector<Action> actions(m);

  for (int n = 1; n <= c.episode_cycles; ++n) {
    EnvState view = state;
    for (int i = 0; i < m; ++i) {
      if (env.cycle_type(view, i) == CycleType::kDecision) {
        actions[i] = agents[i]->decide(view, policy_rng[i]);
        UavRecord& u = view.uavs[i];
        u.task = actions[i].task;
        u.sensing_location = actions[i].location;
        u.pending_bits = 0.0;
      } else {
        actions[i] = Action{*state.uavs[i].task, *state.uavs[i].sensing_location};
      }
    }
    for (int j = 0; j < n_tasks; ++j) {
      const double a = (state.aoi_cycles[j] + 1) * c.cycle_duration_s;
      rec.direct_aoi_sum += a;
      if (logs && logs->aoi)
        *logs->aoi << episode << ',' << n << ',' << (j + 1) << ',' << format_double(a) << '\n';
    }

    StepOutcome out = env.step(state, actions, sensing_rng);
    rec.reward += out.shared_reward;
    for (int j = 0; j < n_tasks; ++j)
      if (out.executed[j]) ++rec.executions[j];
    for (int i = 0; i < m; ++i)
      agents[i]->observe(c.cooperative ? out.shared_reward : out.individual_reward[i], out.next_state);

    if (logs && logs->trajectory) {
      for (int i = 0; i < m; ++i) {
        const UavRecord& u = out.next_state.uavs[i];
        *logs->trajectory << episode << ',' << n << ',' << (i + 1) << ',' << format_double(u.position.x) << ','
                          << format_double(u.position.y) << ',' << format_double(u.position.z) << ','
                          << to_string(out.cycle_types[i]) << ',' << (u.task ? *u.task + 1 : 0) << ','
                          << format_double(u.pending_bits) << ',' << format_double(rec.reward) << '\n';
      }
    }
    state = std::move(out.next_state);
  }
  for (auto& a : agents) a->end_episode(state);
  if (training) {
    for (int i = 0; i < m; ++i) {
      if (!agents[i]->learns()) continue;
      Rng rng = make_stream(seed, Stream::kReplay, ep, static_cast<std::uint64_t>(i));
      agents[i]->train(lr, rng);
    }
  }
  rec.psi_s = normalized_accumulated_aoi(rec.reward, c);
  rec.wall_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

std::vector<double> rolling_mean(const std::vector<double>& values, int window) {
  if (window < 1) throw std::invalid_argument("rolling_mean: window must be >= 1");
  std::vector<double> out(values.size());
  double sum = 0.0;
  for (std::size_t k = 0; k < values.size(); ++k) {
    sum += values[k];
    if (k >= static_cast<std::size_t>(window)) sum -= values[k - window];
    const std::size_t count = std::min<std::size_t>(k + 1, window);
    out[k] = sum / static_cast<double>(count);
  }
  return out;
}

TrainingResult run_training(const Environment& env, AgentList& agents, int episodes, std::uint64_t seed, int window,
                            const EpisodeCallback& callback, const EpisodeLogs* logs) {
  const nn::LrSchedule schedule{env.config().initial_lr, env.config().lr_decay};
  TrainingResult out;
  std::vector<double> psi;
  for (int e = 0; e < episodes; ++e) {
    EpisodeRecord rec = run_episode(env, agents, Mode::kTrain, e, seed, nn::lr_at(schedule, e), logs);
    if (callback) callback(rec);
    psi.push_back(rec.psi_s);
    out.records.push_back(std::move(rec));
  }
  out.rolling_mean = rolling_mean(psi, window);
  return out;
}

std::vector<EpisodeRecord> run_evaluation(const Environment& env, AgentList& agents, int episodes, std::uint64_t seed,
                                          const EpisodeLogs* logs) {
  std::vector<EpisodeRecord> out;
  for (int e = 0; e < episodes; ++e) out.push_back(run_episode(env, agents, Mode::kEval, e, seed, 0.0, logs));
  return out;
}

double mean_psi(const std::vector<EpisodeRecord>& records, std::size_t first, std::size_t count) {
  if (count == 0 || first + count > records.size()) throw std::out_of_range("mean_psi: range outside records");
  double s = 0.0;
  for (std::size_t k = first; k < first + count; ++k) s += records[k].psi_s;
  return s / static_cast<double>(count);
}

SweepAxis parse_sweep_axis(const std::string& name) {
  if (name == "altitude") return SweepAxis::kAltitude;
  if (name == "subcarriers") return SweepAxis::kSubcarriers;
  if (name == "num_uavs") return SweepAxis::kNumUavs;
  throw std::invalid_argument("unknown sweep axis: " + name);
}

const char* to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::kAltitude: return "altitude";
    case SweepAxis::kSubcarriers: return "subcarriers";
    case SweepAxis::kNumUavs: return "num_uavs";
  }
  return "?";
}

ScenarioConfig apply_sweep_value(ScenarioConfig c, SweepAxis axis, double value) {
  switch (axis) {
    case SweepAxis::kAltitude: c.uav_altitude = value; break;
    case SweepAxis::kSubcarriers: c.num_subcarriers = static_cast<int>(std::lround(value)); break;
    case SweepAxis::kNumUavs: c.num_uavs = static_cast<int>(std::lround(value)); break;
  }
  validate_config(c);
  return c;
}

ScenarioConfig with_cooperation(ScenarioConfig c, bool cooperative) {
  c.cooperative = cooperative;
  c.exclusive_task_selection = cooperative;
  return c;
}

std::vector<SweepRow> run_sweep(const ScenarioConfig& base, SweepAxis axis, const std::vector<double>& values,
                                AgentKind kind, std::uint64_t seed, const SweepOptions& options) {
  if (values.empty()) throw std::invalid_argument("run_sweep: no values");
  std::vector<SweepRow> rows;
  std::vector<bool> modes = options.paired ? std::vector<bool>{true, false} : std::vector<bool>{base.cooperative};
  for (std::size_t v = 0; v < values.size(); ++v) {
    for (bool coop : modes) {
      ScenarioConfig cfg = apply_sweep_value(base, axis, values[v]);
      if (options.paired) cfg = with_cooperation(cfg, coop);
      const Environment env(cfg);
      std::vector<double> psi;
      for (int r = 0; r < options.replicas; ++r) {
        // Paired modes share the replica seed.
        const std::uint64_t s = derive_seed(seed, {static_cast<std::uint64_t>(Stream::kSweep), v, static_cast<std::uint64_t>(r)});
        AgentList agents = make_agents(env, kind, s);
        const bool learns = agents.front()->learns();
        if (learns && options.train_episodes > 0) run_training(env, agents, options.train_episodes, s);
        const auto recs = run_evaluation(env, agents, options.eval_episodes, s);
        psi.push_back(mean_psi(recs, 0, recs.size()));
      }
      SweepRow row;
      row.value = values[v];
      row.cooperative = coop;
      row.replicas = options.replicas;
      for (double p : psi) row.mean_psi += p;
      row.mean_psi /= static_cast<double>(psi.size());
      for (double p : psi) row.std_psi += (p - row.mean_psi) * (p - row.mean_psi);
      row.std_psi = psi.size() > 1 ? std::sqrt(row.std_psi / static_cast<double>(psi.size() - 1)) : 0.0;
      rows.push_back(row);
    }
  }
  return rows;
}

void write_learning_curve(std::ostream& out, const std::vector<EpisodeRecord>& records,
                          const std::vector<double>& rolling) {
  out << "episode,reward,psi_s,rolling_mean\n";
  for (std::size_t k = 0; k < records.size(); ++k)
    out << records[k].episode << ',' << format_double(records[k].reward) << ',' << format_double(records[k].psi_s) << ','
        << format_double(rolling[k]) << '\n';
}

void write_sweep(std::ostream& out, SweepAxis axis, const std::vector<SweepRow>& rows) {
  out << to_string(axis) << ",cooperative,mean_psi_s,std_psi_s,replicas\n";
  for (const auto& r : rows)
    out << format_double(r.value) << ',' << (r.cooperative ? 1 : 0) << ',' << format_double(r.mean_psi) << ','
        << format_double(r.std_psi) << ',' << r.replicas << '\n';
}

void write_manifest(std::ostream& out, const RunManifest& m) {
  out << "# run manifest\n";
  out << "version=" << m.version << '\n';
  out << "agent=" << to_string(m.agent) << '\n';
  out << "mode=" << (m.mode == Mode::kTrain ? "train" : "eval") << '\n';
  out << "seed=" << m.seed << '\n';
  out << "episodes=" << m.episodes << '\n';
  for (const auto& o : m.outputs) out << "output=" << o << '\n';
  out << "# resolved config\n" << serialize_config(m.config);
}

}  // namespace uavsim
