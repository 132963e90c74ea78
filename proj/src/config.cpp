#include "uavsim/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace uavsim {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

[[noreturn]] void malformed(std::string_view key, std::string_view value) {
  throw ConfigError(std::string(key), "malformed value '" + std::string(value) + "'");
}

double to_double(std::string_view key, std::string_view v) {
  double out = 0.0;
  const auto* end = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end || v.empty()) malformed(key, v);
  return out;
}

template <typename Int>
Int to_int(std::string_view key, std::string_view v) {
  Int out = 0;
  const auto* end = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end || v.empty()) malformed(key, v);
  return out;
}

bool to_bool(std::string_view key, std::string_view v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  malformed(key, v);
}

std::string fmt(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::vector<TaskSpec> parse_targets(std::string_view key, std::string_view v) {
  std::vector<TaskSpec> out;
  int id = 1;
  for (auto item : split(v, ';')) {
    if (item.empty()) continue;
    auto xy = split(item, ',');
    if (xy.size() != 2) malformed(key, item);
    out.push_back({id++, Vec3{to_double(key, xy[0]), to_double(key, xy[1]), 0.0}});
  }
  if (out.empty()) malformed(key, v);
  return out;
}

void require(bool ok, const char* key, const std::string& what) {
  if (!ok) throw ConfigError(key, what);
}

void require_positive(double v, const char* key) {
  require(std::isfinite(v) && v > 0.0, key, "must be finite and > 0");
}

}  // namespace

ScenarioConfig default_config() { return ScenarioConfig{}; }

ScenarioConfig desk_config(std::uint64_t seed) {
  ScenarioConfig c;
  c.num_uavs = 2;
  c.num_tasks = 5;
  c.cell_radius = 200.0;
  c.episode_cycles = 500;
  c.num_episodes = 300;
  c.rng_seed = seed;
  set_config_value(c, "task_targets", "random");
  return c;
}

void set_config_value(ScenarioConfig& c, std::string_view key, std::string_view value) {
  const std::string_view v = trim(value);
  if (key == "num_uavs") c.num_uavs = to_int<int>(key, v);
  else if (key == "num_tasks") c.num_tasks = to_int<int>(key, v);
  else if (key == "task_targets") {
    if (v == "random") {
      if (c.num_tasks < 1 || !(c.cell_radius >= 0.0)) malformed(key, v);
      Rng rng = make_stream(c.rng_seed, Stream::kTargets);
      c.task_targets = sample_task_targets(c.num_tasks, c.cell_radius, rng);
    } else {
      c.task_targets = parse_targets(key, v);
    }
  }
  else if (key == "cell_radius") c.cell_radius = to_double(key, v);
  else if (key == "bs_height") c.bs_height = to_double(key, v);
  else if (key == "uav_altitude") c.uav_altitude = to_double(key, v);
  else if (key == "max_speed") c.max_speed = to_double(key, v);
  else if (key == "tx_power_dbm") c.tx_power_dbm = to_double(key, v);
  else if (key == "noise_power_dbm") c.noise_power_dbm = to_double(key, v);
  else if (key == "carrier_freq_ghz") c.carrier_freq_ghz = to_double(key, v);
  else if (key == "subcarrier_bandwidth_hz") c.subcarrier_bandwidth_hz = to_double(key, v);
  else if (key == "num_subcarriers") c.num_subcarriers = to_int<int>(key, v);
  else if (key == "cycle_duration_s") c.cycle_duration_s = to_double(key, v);
  else if (key == "info_exchange_s") c.info_exchange_s = to_double(key, v);
  else if (key == "sensing_lambda") c.sensing_lambda = to_double(key, v);
  else if (key == "max_sensing_angle_rad") c.max_sensing_angle_rad = to_double(key, v);
  else if (key == "max_sensing_angle_deg") c.max_sensing_angle_rad = to_double(key, v) * std::numbers::pi / 180.0;
  else if (key == "sensing_data_bits") c.sensing_data_bits = to_double(key, v);
  else if (key == "los_model") {
    if (v == "paper") c.los_model = LosModel::kPaper;
    else if (v == "3gpp") c.los_model = LosModel::k3gpp;
    else malformed(key, v);
  }
  else if (key == "episode_cycles") c.episode_cycles = to_int<int>(key, v);
  else if (key == "num_episodes") c.num_episodes = to_int<int>(key, v);
  else if (key == "batch_size") c.batch_size = to_int<int>(key, v);
  else if (key == "soft_update") c.soft_update = to_double(key, v);
  else if (key == "exploration") c.exploration = to_double(key, v);
  else if (key == "initial_lr") c.initial_lr = to_double(key, v);
  else if (key == "lr_decay") c.lr_decay = to_double(key, v);
  else if (key == "hidden_width") c.hidden_width = to_int<int>(key, v);
  else if (key == "replay_capacity") c.replay_capacity = to_int<int>(key, v);
  else if (key == "train_steps_per_episode") c.train_steps_per_episode = to_int<int>(key, v);
  else if (key == "cooperative") c.cooperative = to_bool(key, v);
  else if (key == "exclusive_task_selection") c.exclusive_task_selection = to_bool(key, v);
  else if (key == "enable_3d") c.enable_3d = to_bool(key, v);
  else if (key == "altitude_range") {
    auto parts = split(v, ',');
    if (parts.size() != 2) malformed(key, v);
    c.altitude_min = to_double(key, parts[0]);
    c.altitude_max = to_double(key, parts[1]);
  }
  else if (key == "rng_seed") c.rng_seed = to_int<std::uint64_t>(key, v);
  else throw ConfigError(std::string(key), "unknown key");
}

ScenarioConfig parse_config(std::string_view text) {
  ScenarioConfig c = default_config();
  std::vector<std::pair<std::string_view, std::string_view>> entries;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto nl = text.find('\n', start);
    std::string_view line = text.substr(start, nl == std::string_view::npos ? nl : nl - start);
    start = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(std::string(line), "expected key=value");
    entries.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  // Targets last: `random` depends on num_tasks, cell_radius and rng_seed.
  bool has_num_tasks = false;
  const std::pair<std::string_view, std::string_view>* targets = nullptr;
  for (const auto& e : entries) {
    if (e.first == "task_targets") {
      targets = &e;
      continue;
    }
    has_num_tasks = has_num_tasks || e.first == "num_tasks";
    set_config_value(c, e.first, e.second);
  }
  if (targets) {
    set_config_value(c, targets->first, targets->second);
    if (!has_num_tasks) c.num_tasks = static_cast<int>(c.task_targets.size());
  }
  validate_config(c);
  return c;
}

ScenarioConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::vector<std::string> validate_config(const ScenarioConfig& c) {
  std::vector<std::string> warnings;
  require(c.num_uavs >= 1, "num_uavs", "must be >= 1");
  require(c.num_tasks >= 1, "num_tasks", "must be >= 1");
  require(!c.task_targets.empty(), "task_targets", "task_targets required");
  require(static_cast<int>(c.task_targets.size()) == c.num_tasks, "task_targets",
          "count " + std::to_string(c.task_targets.size()) + " != num_tasks " + std::to_string(c.num_tasks));
  require(c.num_subcarriers > c.num_uavs, "num_subcarriers", "K > M violated");

  require_positive(c.cell_radius, "cell_radius");
  require_positive(c.bs_height, "bs_height");
  require_positive(c.uav_altitude, "uav_altitude");
  require_positive(c.max_speed, "max_speed");
  require(std::isfinite(c.tx_power_dbm), "tx_power_dbm", "must be finite");
  require(std::isfinite(c.noise_power_dbm), "noise_power_dbm", "must be finite");
  require_positive(c.carrier_freq_ghz, "carrier_freq_ghz");
  require_positive(c.subcarrier_bandwidth_hz, "subcarrier_bandwidth_hz");
  require_positive(c.cycle_duration_s, "cycle_duration_s");
  require_positive(c.info_exchange_s, "info_exchange_s");
  require(c.info_exchange_s < c.cycle_duration_s, "info_exchange_s", "0 < t_e < t_c violated");
  require_positive(c.sensing_lambda, "sensing_lambda");
  require(c.max_sensing_angle_rad > 0.0 && c.max_sensing_angle_rad < std::numbers::pi / 2, "max_sensing_angle_rad",
          "0 < phi < pi/2 violated");
  require_positive(c.sensing_data_bits, "sensing_data_bits");

  require(c.episode_cycles >= 1, "episode_cycles", "must be >= 1");
  require(c.num_episodes >= 0, "num_episodes", "must be >= 0");
  require(c.batch_size >= 1, "batch_size", "must be >= 1");
  require(c.soft_update >= 0.0 && c.soft_update <= 1.0, "soft_update", "must lie in [0, 1]");
  require(c.exploration >= 0.0 && c.exploration <= 1.0, "exploration", "must lie in [0, 1]");
  require(std::isfinite(c.initial_lr) && c.initial_lr >= 0.0, "initial_lr", "must be >= 0");
  require(std::isfinite(c.lr_decay) && c.lr_decay >= 0.0, "lr_decay", "must be >= 0");
  require(c.hidden_width >= 1, "hidden_width", "must be >= 1");
  require(c.replay_capacity >= 1, "replay_capacity", "must be >= 1");
  require(c.train_steps_per_episode >= 1, "train_steps_per_episode", "must be >= 1");

  if (c.enable_3d) {
    require_positive(c.altitude_min, "altitude_range");
    require(c.altitude_min <= c.uav_altitude && c.uav_altitude <= c.altitude_max, "altitude_range",
            "h_min <= h <= h_max violated");
  }

  for (std::size_t j = 0; j < c.task_targets.size(); ++j) {
    const auto& t = c.task_targets[j];
    require(t.id == static_cast<int>(j) + 1, "task_targets", "ids must be 1..N in order");
    require(t.target.finite() && t.target.z == 0.0, "task_targets", "targets must be finite ground points");
    require(t.target.horizontal_norm() <= c.cell_radius, "task_targets",
            "target " + std::to_string(t.id) + " lies outside the cell");
  }

  if (c.num_tasks < c.num_uavs)
    warnings.push_back("num_tasks < num_uavs: some UAVs may find no admissible task");
  return warnings;
}

std::string serialize_config(const ScenarioConfig& c) {
  std::ostringstream o;
  auto b = [](bool v) { return v ? "true" : "false"; };
  o << "num_uavs=" << c.num_uavs << '\n';
  o << "num_tasks=" << c.num_tasks << '\n';
  o << "task_targets=";
  for (std::size_t j = 0; j < c.task_targets.size(); ++j) {
    if (j) o << ';';
    o << fmt(c.task_targets[j].target.x) << ',' << fmt(c.task_targets[j].target.y);
  }
  o << '\n';
  o << "cell_radius=" << fmt(c.cell_radius) << '\n';
  o << "bs_height=" << fmt(c.bs_height) << '\n';
  o << "uav_altitude=" << fmt(c.uav_altitude) << '\n';
  o << "max_speed=" << fmt(c.max_speed) << '\n';
  o << "tx_power_dbm=" << fmt(c.tx_power_dbm) << '\n';
  o << "noise_power_dbm=" << fmt(c.noise_power_dbm) << '\n';
  o << "carrier_freq_ghz=" << fmt(c.carrier_freq_ghz) << '\n';
  o << "subcarrier_bandwidth_hz=" << fmt(c.subcarrier_bandwidth_hz) << '\n';
  o << "num_subcarriers=" << c.num_subcarriers << '\n';
  o << "cycle_duration_s=" << fmt(c.cycle_duration_s) << '\n';
  o << "info_exchange_s=" << fmt(c.info_exchange_s) << '\n';
  o << "sensing_lambda=" << fmt(c.sensing_lambda) << '\n';
  o << "max_sensing_angle_rad=" << fmt(c.max_sensing_angle_rad) << '\n';
  o << "sensing_data_bits=" << fmt(c.sensing_data_bits) << '\n';
  o << "los_model=" << (c.los_model == LosModel::kPaper ? "paper" : "3gpp") << '\n';
  o << "episode_cycles=" << c.episode_cycles << '\n';
  o << "num_episodes=" << c.num_episodes << '\n';
  o << "batch_size=" << c.batch_size << '\n';
  o << "soft_update=" << fmt(c.soft_update) << '\n';
  o << "exploration=" << fmt(c.exploration) << '\n';
  o << "initial_lr=" << fmt(c.initial_lr) << '\n';
  o << "lr_decay=" << fmt(c.lr_decay) << '\n';
  o << "hidden_width=" << c.hidden_width << '\n';
  o << "replay_capacity=" << c.replay_capacity << '\n';
  o << "train_steps_per_episode=" << c.train_steps_per_episode << '\n';
  o << "cooperative=" << b(c.cooperative) << '\n';
  o << "exclusive_task_selection=" << b(c.exclusive_task_selection) << '\n';
  o << "enable_3d=" << b(c.enable_3d) << '\n';
  o << "altitude_range=" << fmt(c.altitude_min) << ',' << fmt(c.altitude_max) << '\n';
  o << "rng_seed=" << c.rng_seed << '\n';
  return o.str();
}

bool operator==(const ScenarioConfig& a, const ScenarioConfig& b) {
  if (a.task_targets.size() != b.task_targets.size()) return false;
  for (std::size_t j = 0; j < a.task_targets.size(); ++j)
    if (a.task_targets[j].id != b.task_targets[j].id || !(a.task_targets[j].target == b.task_targets[j].target))
      return false;
  return a.num_uavs == b.num_uavs && a.num_tasks == b.num_tasks && a.cell_radius == b.cell_radius &&
         a.bs_height == b.bs_height && a.uav_altitude == b.uav_altitude && a.max_speed == b.max_speed &&
         a.tx_power_dbm == b.tx_power_dbm && a.noise_power_dbm == b.noise_power_dbm &&
         a.carrier_freq_ghz == b.carrier_freq_ghz && a.subcarrier_bandwidth_hz == b.subcarrier_bandwidth_hz &&
         a.num_subcarriers == b.num_subcarriers && a.cycle_duration_s == b.cycle_duration_s &&
         a.info_exchange_s == b.info_exchange_s && a.sensing_lambda == b.sensing_lambda &&
         a.max_sensing_angle_rad == b.max_sensing_angle_rad && a.sensing_data_bits == b.sensing_data_bits &&
         a.los_model == b.los_model && a.episode_cycles == b.episode_cycles && a.num_episodes == b.num_episodes &&
         a.batch_size == b.batch_size && a.soft_update == b.soft_update && a.exploration == b.exploration &&
         a.initial_lr == b.initial_lr && a.lr_decay == b.lr_decay && a.hidden_width == b.hidden_width &&
         a.replay_capacity == b.replay_capacity &&
         a.train_steps_per_episode == b.train_steps_per_episode && a.cooperative == b.cooperative &&
         a.exclusive_task_selection == b.exclusive_task_selection && a.enable_3d == b.enable_3d &&
         a.altitude_min == b.altitude_min && a.altitude_max == b.altitude_max && a.rng_seed == b.rng_seed;
}

std::vector<TaskSpec> sample_task_targets(int n, double radius, Rng& rng) {
  if (n < 1) throw std::invalid_argument("sample_task_targets: n must be >= 1");
  if (!(radius >= 0.0)) throw std::invalid_argument("sample_task_targets: radius must be >= 0");
  std::vector<TaskSpec> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    const double r = radius * std::sqrt(uniform01(rng));
    const double theta = 2.0 * std::numbers::pi * uniform01(rng);
    out.push_back({j + 1, Vec3{r * std::cos(theta), r * std::sin(theta), 0.0}});
  }
  return out;
}

}  // namespace uavsim
