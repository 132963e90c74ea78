#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "uavsim/geometry.hpp"
#include "uavsim/random.hpp"

namespace uavsim {

// LoS probability variant ("paper" / "3gpp" in config files). kPaper is
// r_c / r + exp((r_c - r) / p_0) clamped to 1; k3gpp weights the exponential
// by (1 - r_c / r).
enum class LosModel { kPaper, k3gpp };

struct TaskSpec {
  int id = 0;  // 1-based
  Vec3 target;
};

// Scenario, protocol and training constants. Defaults are the reference
// simulation parameters; task targets have no default.
struct ScenarioConfig {
  int num_uavs = 2;
  int num_tasks = 10;
  std::vector<TaskSpec> task_targets;

  double cell_radius = 500.0;             // m
  double bs_height = 25.0;                // m
  double uav_altitude = 200.0;            // m
  double max_speed = 15.0;                // m/s
  double tx_power_dbm = 23.0;
  double noise_power_dbm = -96.0;
  double carrier_freq_ghz = 2.0;
  double subcarrier_bandwidth_hz = 12.5e3;
  int num_subcarriers = 80;
  double cycle_duration_s = 0.1;
  double info_exchange_s = 0.02;
  double sensing_lambda = 0.01;           // 1/m
  double max_sensing_angle_rad = 0.52359877559829882;  // 30 deg
  double sensing_data_bits = 8.0e6;       // 10^6 bytes
  LosModel los_model = LosModel::kPaper;

  int episode_cycles = 8000;
  int num_episodes = 10000;
  int batch_size = 256;
  double soft_update = 0.01;
  double exploration = 0.1;
  double initial_lr = 0.1;
  double lr_decay = 1e-3;
  int hidden_width = 512;
  int replay_capacity = 100000;
  int train_steps_per_episode = 1;        // critic+actor steps per training invocation

  bool cooperative = true;
  bool exclusive_task_selection = true;
  bool enable_3d = false;
  double altitude_min = 100.0;            // m, 3D mode only
  double altitude_max = 200.0;            // m, 3D mode only

  std::uint64_t rng_seed = 1;

  double step_length() const { return max_speed * cycle_duration_s; }
};

// Thrown by parse_config / validate_config. key() names the offending key
// (empty when the problem is not tied to one key).
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& what)
      : std::runtime_error(key.empty() ? what : key + ": " + what), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

ScenarioConfig default_config();

// Small scenario for quick training runs: M=2, N=5, R_c=200 m, N_c=500,
// 300 episodes, targets sampled from `seed`.
ScenarioConfig desk_config(std::uint64_t seed = 1);

// Checks every invariant; throws ConfigError on violation and returns
// advisory warnings otherwise.
std::vector<std::string> validate_config(const ScenarioConfig& config);

// Flat `key=value` document, `#` comments, unspecified keys keep defaults.
// `task_targets=x1,y1;x2,y2;...` lists targets explicitly; the value `random`
// samples them on the disk of radius cell_radius from rng_seed.
ScenarioConfig parse_config(std::string_view text);
ScenarioConfig load_config_file(const std::string& path);

// Inverse of parse_config: parse_config(serialize_config(c)) == c field for field.
std::string serialize_config(const ScenarioConfig& config);

bool operator==(const ScenarioConfig& a, const ScenarioConfig& b);

std::vector<TaskSpec> sample_task_targets(int n, double radius, Rng& rng);

// Sets a single key on an existing config (used by parse_config and by CLI
// overrides). Does not validate.
void set_config_value(ScenarioConfig& config, std::string_view key, std::string_view value);

}  // namespace uavsim
