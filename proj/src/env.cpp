#include "uavsim/env.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace uavsim {

const char* to_string(CycleType type) {
  switch (type) {
    case CycleType::kDecision: return "decision";
    case CycleType::kEmpty: return "empty";
    case CycleType::kSensing: return "sensing";
    case CycleType::kTransmission: return "transmission";
  }
  return "?";
}

Vec3 move_step(const Vec3& position, const Vec3& sensing_location, double max_speed, double cycle_duration_s) {
  const Vec3 delta = sensing_location - position;
  const double d = delta.norm();
  const double reach = max_speed * cycle_duration_s;
  if (d <= reach) return sensing_location;
  return position + delta * (reach / d);
}

double normalized_accumulated_aoi(double total_reward, const ScenarioConfig& c) {
  const double n = c.num_tasks;
  const double nc = c.episode_cycles;
  const double psi = (n * nc * (nc + 1.0) * c.cycle_duration_s / 2.0 - total_reward) / (n * nc);
  if (psi < 0.0) throw std::logic_error("normalized_accumulated_aoi: reward exceeds the no-execution bound");
  return psi;
}

Environment::Environment(ScenarioConfig config)
    : config_(std::move(config)),
      channel_(channel::ChannelParams::from_config(config_)),
      sensing_(sensing::SensingParams::from_config(config_)) {
  validate_config(config_);
}

EnvState Environment::initial_state() const {
  EnvState s;
  s.cycle = 1;
  s.uavs.assign(config_.num_uavs, UavRecord{Vec3{0.0, 0.0, config_.uav_altitude}, 0.0, {}, {}, {}});
  s.aoi_cycles.assign(config_.num_tasks, 0);
  s.last_execution.assign(config_.num_tasks, 0);
  return s;
}

CycleType Environment::cycle_type(const EnvState& state, int uav) const {
  const UavRecord& u = state.uavs.at(uav);
  if (!u.task) return CycleType::kDecision;
  const int t = *u.task;
  // AoI equal to one cycle marks an execution in the previous cycle; the
  // last_execution guard excludes the initial zero-AoI ramp.
  if (state.aoi_cycles[t] == 1 && state.last_execution[t] > 0) return CycleType::kDecision;
  if (!(u.position == *u.sensing_location)) return CycleType::kEmpty;
  if (u.pending_bits == 0.0) return CycleType::kSensing;
  return CycleType::kTransmission;
}

ActionSet Environment::available_actions(const EnvState& state, int uav) const {
  ActionSet set;
  if (cycle_type(state, uav) != CycleType::kDecision) {
    const UavRecord& u = state.uavs[uav];
    set.singleton = true;
    set.commitment = Action{*u.task, *u.sensing_location};
    return set;
  }
  std::vector<bool> held(config_.num_tasks, false);
  if (config_.exclusive_task_selection) {
    for (int i = 0; i < config_.num_uavs; ++i)
      if (i != uav && state.uavs[i].task) held[*state.uavs[i].task] = true;
  }
  for (int j = 0; j < config_.num_tasks; ++j)
    if (!held[j]) set.tasks.push_back(j);
  if (set.tasks.empty()) throw NoFeasibleTask("no feasible task for UAV " + std::to_string(uav));
  return set;
}

std::vector<int> Environment::allocate_subcarriers(const EnvState& state) const {
  std::vector<int> k(config_.num_uavs, 0);
  int transmitting = 0;
  for (int i = 0; i < config_.num_uavs; ++i)
    if (cycle_type(state, i) == CycleType::kTransmission) ++transmitting;
  if (transmitting == 0) return k;
  for (int i = 0; i < config_.num_uavs; ++i)
    if (cycle_type(state, i) == CycleType::kTransmission) k[i] = config_.num_subcarriers / transmitting;
  return k;
}

double Environment::sensing_radius(double altitude) const { return sensing::sensing_radius(altitude, sensing_); }

bool Environment::location_feasible(const Action& a) const {
  if (a.task < 0 || a.task >= config_.num_tasks || !a.location.finite()) return false;
  if (config_.enable_3d) {
    if (a.location.z < config_.altitude_min || a.location.z > config_.altitude_max) return false;
  } else if (a.location.z != config_.uav_altitude) {
    return false;
  }
  const double r_s = sensing_radius(a.location.z);
  return horizontal_distance(a.location, target(a.task)) <= r_s * (1.0 + 1e-12);
}

StepOutcome Environment::step(const EnvState& state, const std::vector<Action>& actions, Rng& rng) const {
  const int m = config_.num_uavs;
  const int n_tasks = config_.num_tasks;
  if (state.cycle > config_.episode_cycles) throw std::out_of_range("step: episode already finished");
  if (static_cast<int>(actions.size()) != m) throw InfeasibleAction("step: expected one action per UAV");

  StepOutcome out;
  out.cycle_types.resize(m);
  for (int i = 0; i < m; ++i) out.cycle_types[i] = cycle_type(state, i);
  out.subcarriers = allocate_subcarriers(state);

  EnvState next = state;

  // Commit decisions; other UAVs must continue their current commitment.
  for (int i = 0; i < m; ++i) {
    UavRecord& u = next.uavs[i];
    const Action& a = actions[i];
    if (out.cycle_types[i] == CycleType::kDecision) {
      if (!location_feasible(a))
        throw InfeasibleAction("UAV " + std::to_string(i) + ": sensing location outside the task's sensing disk");
      u.task = a.task;
      u.sensing_location = a.location;
      u.result_valid.reset();
      u.pending_bits = 0.0;
    } else if (!(a.task == *u.task && a.location == *u.sensing_location)) {
      throw InfeasibleAction("UAV " + std::to_string(i) + ": must continue its selected task");
    }
  }
  if (config_.exclusive_task_selection) {
    std::vector<bool> held(n_tasks, false);
    for (int i = 0; i < m; ++i) {
      const int t = *next.uavs[i].task;
      if (held[t]) throw InfeasibleAction("task " + std::to_string(t + 1) + " selected by two UAVs");
      held[t] = true;
    }
  }

  std::vector<bool> delivered_valid(m, false);
  for (int i = 0; i < m; ++i) {
    UavRecord& u = next.uavs[i];
    switch (out.cycle_types[i]) {
      case CycleType::kDecision:
        break;
      case CycleType::kEmpty:
        u.position = move_step(u.position, *u.sensing_location, config_.max_speed, config_.cycle_duration_s);
        break;
      case CycleType::kSensing:
        u.pending_bits = config_.sensing_data_bits;
        u.result_valid = sensing::draw_sensing(u.position, target(*u.task), sensing_, rng) == sensing::SensingResult::kValid;
        break;
      case CycleType::kTransmission: {
        const double sent = channel::data_per_cycle(out.subcarriers[i], u.position, channel_);
        u.pending_bits = std::max(u.pending_bits - sent, 0.0);
        if (u.pending_bits == 0.0) {
          delivered_valid[i] = u.result_valid.value_or(false);
          u.result_valid.reset();
        }
        break;
      }
    }
  }

  out.executed.assign(n_tasks, false);
  for (int i = 0; i < m; ++i)
    if (delivered_valid[i]) out.executed[*next.uavs[i].task] = true;

  const double remaining = static_cast<double>(config_.episode_cycles - state.cycle);
  out.individual_reward.assign(m, 0.0);
  for (int j = 0; j < n_tasks; ++j) {
    if (!out.executed[j]) {
      next.aoi_cycles[j] = state.aoi_cycles[j] + 1;
      continue;
    }
    const double reduction = state.aoi_s(j, config_.cycle_duration_s) * remaining;
    out.shared_reward += reduction;
    for (int i = 0; i < m; ++i)
      if (delivered_valid[i] && *next.uavs[i].task == j) out.individual_reward[i] += reduction;
    next.aoi_cycles[j] = 1;
    next.last_execution[j] = state.cycle;
    for (auto& u : next.uavs) {
      if (u.task == j) {
        u.result_valid.reset();
        u.pending_bits = 0.0;
      }
    }
  }

  next.cycle = state.cycle + 1;
  out.next_state = std::move(next);
  return out;
}

std::size_t Environment::state_size() const {
  const std::size_t m = config_.num_uavs, n = config_.num_tasks;
  return 1 + 5 * m + n + m * n;
}

std::vector<double> Environment::encode_state(const EnvState& state, int for_uav) const {
  const int m = config_.num_uavs;
  const int n = config_.num_tasks;
  const double rc = config_.cell_radius;
  std::vector<int> order;
  order.push_back(for_uav);
  for (int i = 0; i < m; ++i)
    if (i != for_uav) order.push_back(i);

  std::vector<double> f;
  f.reserve(state_size());
  f.push_back(static_cast<double>(state.cycle) / config_.episode_cycles);
  for (int i : order) {
    f.push_back(state.uavs[i].position.x / rc);
    f.push_back(state.uavs[i].position.y / rc);
  }
  for (int i : order) f.push_back(state.uavs[i].pending_bits / config_.sensing_data_bits);
  for (int j = 0; j < n; ++j) f.push_back(static_cast<double>(state.aoi_cycles[j]) / config_.episode_cycles);
  for (int i : order)
    for (int j = 0; j < n; ++j) f.push_back(state.uavs[i].task == j ? 1.0 : 0.0);
  for (int i : order) {
    const auto& loc = state.uavs[i].sensing_location;
    f.push_back(loc ? loc->x / rc : 0.0);
    f.push_back(loc ? loc->y / rc : 0.0);
  }
  return f;
}

}  // namespace uavsim
