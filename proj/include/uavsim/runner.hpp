#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "uavsim/config.hpp"
#include "uavsim/env.hpp"
#include "uavsim/policy.hpp"

namespace uavsim {

enum class Mode { kTrain, kEval };

struct EpisodeRecord {
  int episode = 0;
  double reward = 0.0;          // total shared reward
  double psi_s = 0.0;           // normalized accumulated AoI
  double direct_aoi_sum = 0.0;  // sum over cycles and tasks of the per-cycle AoI, seconds
  std::vector<int> executions;  // per task
  double wall_s = 0.0;
};

// Optional per-cycle CSV sinks. Headers are written by the caller.
struct EpisodeLogs {
  std::ostream* trajectory = nullptr;  // episode,cycle,uav,x,y,z,cycle_type,selected_task,d_r_bits,reward_cum
  std::ostream* aoi = nullptr;         // episode,cycle,task,aoi_s
};

extern const char* const kTrajectoryHeader;
extern const char* const kAoiHeader;

using AgentList = std::vector<std::unique_ptr<Agent>>;

// One agent per UAV. Network initialisation and route offsets derive from `seed`.
AgentList make_agents(const Environment& env, AgentKind kind, std::uint64_t seed);

// One episode of N_c cycles. Decision-cycle UAVs decide in index order on a
// view carrying the commitments already made this cycle. In train mode every
// learning agent trains once after the last cycle with learning rate `lr`.
EpisodeRecord run_episode(const Environment& env, AgentList& agents, Mode mode, int episode, std::uint64_t seed,
                          double lr, const EpisodeLogs* logs = nullptr);

// Mean of values[max(0, k - window + 1) .. k] for every k.
std::vector<double> rolling_mean(const std::vector<double>& values, int window);

struct TrainingResult {
  std::vector<EpisodeRecord> records;
  std::vector<double> rolling_mean;
};

using EpisodeCallback = std::function<void(const EpisodeRecord&)>;

// `episodes` training episodes with lr_at(episode).
TrainingResult run_training(const Environment& env, AgentList& agents, int episodes, std::uint64_t seed,
                            int window = 100, const EpisodeCallback& callback = {},
                            const EpisodeLogs* logs = nullptr);

// Offset added to evaluation episode indices when deriving their streams.
constexpr int kEvalEpisodeOffset = 1 << 24;

std::vector<EpisodeRecord> run_evaluation(const Environment& env, AgentList& agents, int episodes,
                                          std::uint64_t seed, const EpisodeLogs* logs = nullptr);

double mean_psi(const std::vector<EpisodeRecord>& records, std::size_t first, std::size_t count);

enum class SweepAxis { kAltitude, kSubcarriers, kNumUavs };

SweepAxis parse_sweep_axis(const std::string& name);
const char* to_string(SweepAxis axis);
ScenarioConfig apply_sweep_value(ScenarioConfig config, SweepAxis axis, double value);

struct SweepOptions {
  int train_episodes = 0;  // ignored for non-learning agents
  int eval_episodes = 1;
  int replicas = 1;
  bool paired = false;     // run cooperative and non-cooperative at every point
};

struct SweepRow {
  double value = 0.0;
  bool cooperative = true;
  double mean_psi = 0.0;
  double std_psi = 0.0;
  int replicas = 0;
};

std::vector<SweepRow> run_sweep(const ScenarioConfig& base, SweepAxis axis, const std::vector<double>& values,
                                AgentKind kind, std::uint64_t seed, const SweepOptions& options);

// Cooperative mode: shared reward and exclusive task selection.
ScenarioConfig with_cooperation(ScenarioConfig config, bool cooperative);

std::string format_double(double v);

void write_learning_curve(std::ostream& out, const std::vector<EpisodeRecord>& records,
                          const std::vector<double>& rolling);
void write_sweep(std::ostream& out, SweepAxis axis, const std::vector<SweepRow>& rows);

struct RunManifest {
  ScenarioConfig config;
  std::uint64_t seed = 1;
  AgentKind agent = AgentKind::kCa2c;
  Mode mode = Mode::kTrain;
  int episodes = 0;
  std::string version;
  std::vector<std::string> outputs;
};

extern const char* const kVersionTag;

void write_manifest(std::ostream& out, const RunManifest& manifest);

}  // namespace uavsim
