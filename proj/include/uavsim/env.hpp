#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "uavsim/channel.hpp"
#include "uavsim/config.hpp"
#include "uavsim/geometry.hpp"
#include "uavsim/random.hpp"
#include "uavsim/sensing.hpp"

namespace uavsim {

enum class CycleType { kDecision, kEmpty, kSensing, kTransmission };

const char* to_string(CycleType type);

// Task indices are 0-based in code; TaskSpec::id and CSV outputs are 1-based.
struct Action {
  int task = 0;
  Vec3 location;

  friend bool operator==(const Action&, const Action&) = default;
};

struct UavRecord {
  Vec3 position;
  double pending_bits = 0.0;
  std::optional<int> task;
  std::optional<Vec3> sensing_location;
  // Outcome of the last sensing draw. Environment-private: never encoded.
  std::optional<bool> result_valid;
};

struct EnvState {
  int cycle = 1;  // 1-based, in [1, N_c + 1]
  std::vector<UavRecord> uavs;
  // AoI of each task at the start of the cycle, in whole cycles.
  std::vector<int> aoi_cycles;
  // Cycle in which each task was last executed; 0 when never.
  std::vector<int> last_execution;

  double aoi_s(int task, double cycle_duration_s) const { return aoi_cycles.at(task) * cycle_duration_s; }
};

// Either the singleton continuation of the current commitment or the set of
// admissible tasks with the sensing-disk location constraint.
struct ActionSet {
  bool singleton = false;
  Action commitment;          // valid when singleton
  std::vector<int> tasks;     // admissible task indices when !singleton
};

struct StepOutcome {
  EnvState next_state;
  double shared_reward = 0.0;
  std::vector<bool> executed;              // per task
  std::vector<double> individual_reward;   // per UAV: reductions from its own valid deliveries
  std::vector<CycleType> cycle_types;      // type of each UAV during the stepped cycle
  std::vector<int> subcarriers;            // allocation during the stepped cycle
};

class InfeasibleAction : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class NoFeasibleTask : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Next position of a UAV flying straight toward `sensing_location` for one cycle.
Vec3 move_step(const Vec3& position, const Vec3& sensing_location, double max_speed, double cycle_duration_s);

// Normalized accumulated AoI, seconds. Throws std::logic_error when the
// reward exceeds the no-execution bound.
double normalized_accumulated_aoi(double total_reward, const ScenarioConfig& config);

// Sense-and-send protocol environment. Holds the immutable scenario; states
// are passed by value.
class Environment {
 public:
  explicit Environment(ScenarioConfig config);

  const ScenarioConfig& config() const { return config_; }
  const channel::ChannelParams& channel_params() const { return channel_; }
  const sensing::SensingParams& sensing_params() const { return sensing_; }
  const Vec3& target(int task) const { return config_.task_targets.at(task).target; }
  int num_uavs() const { return config_.num_uavs; }
  int num_tasks() const { return config_.num_tasks; }

  EnvState initial_state() const;
  CycleType cycle_type(const EnvState& state, int uav) const;
  ActionSet available_actions(const EnvState& state, int uav) const;
  std::vector<int> allocate_subcarriers(const EnvState& state) const;

  // Sensing radius at the altitude of `location` and whether `action` meets
  // the location constraint for its task.
  double sensing_radius(double altitude) const;
  bool location_feasible(const Action& action) const;

  StepOutcome step(const EnvState& state, const std::vector<Action>& actions, Rng& rng) const;

  // Agent features, size 1 + 5M + N + M*N. UAV blocks start with `for_uav`,
  // followed by the others in index order.
  std::vector<double> encode_state(const EnvState& state, int for_uav) const;
  std::size_t state_size() const;

 private:
  ScenarioConfig config_;
  channel::ChannelParams channel_;
  sensing::SensingParams sensing_;
};

}  // namespace uavsim
