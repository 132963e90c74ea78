#include "uavsim/channel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace uavsim::channel {
namespace {

double bs_distance(const Vec3& uav, const ChannelParams& params) {
  const double d = distance(uav, params.bs_position);
  if (!(d > 0.0)) throw std::domain_error("channel: UAV coincides with the BS");
  return d;
}

void check_altitude(const Vec3& uav) {
  if (!(uav.z > 0.0)) throw std::domain_error("channel: UAV altitude must be > 0");
}

}  // namespace

ChannelParams ChannelParams::from_config(const ScenarioConfig& c) {
  ChannelParams p;
  p.bs_position = Vec3{0.0, 0.0, c.bs_height};
  p.tx_power_dbm = c.tx_power_dbm;
  p.noise_power_dbm = c.noise_power_dbm;
  p.carrier_freq_ghz = c.carrier_freq_ghz;
  p.subcarrier_bandwidth_hz = c.subcarrier_bandwidth_hz;
  p.cycle_duration_s = c.cycle_duration_s;
  p.info_exchange_s = c.info_exchange_s;
  p.los_model = c.los_model;
  return p;
}

double los_critical_radius(double h) { return std::max(294.05 * std::log10(h) - 432.94, 18.0); }

double los_decay_length(double h) { return 233.98 * std::log10(h) - 0.95; }

double prob_los(const Vec3& uav, const ChannelParams& params) {
  check_altitude(uav);
  const double r = uav.horizontal_norm();
  const double rc = los_critical_radius(uav.z);
  if (r <= rc) return 1.0;
  const double p0 = los_decay_length(uav.z);
  if (params.los_model == LosModel::k3gpp) return rc / r + std::exp(-r / p0) * (1.0 - rc / r);
  // Without the clamp this form exceeds 1 for r slightly above r_c.
  return std::min(1.0, rc / r + std::exp(-r / p0 + rc / p0));
}

double pathloss_los(const Vec3& uav, const ChannelParams& params) {
  check_altitude(uav);
  const double d = bs_distance(uav, params);
  return 30.9 + (22.25 - 0.5 * std::log10(uav.z)) * std::log10(d) + 20.0 * std::log10(params.carrier_freq_ghz);
}

double pathloss_nlos(const Vec3& uav, const ChannelParams& params) {
  check_altitude(uav);
  const double d = bs_distance(uav, params);
  return 32.4 + (43.2 - 7.6 * std::log10(uav.z)) * std::log10(d) + 20.0 * std::log10(params.carrier_freq_ghz);
}

double avg_pathloss(const Vec3& uav, const ChannelParams& params) {
  const double p = prob_los(uav, params);
  return p * pathloss_los(uav, params) + (1.0 - p) * pathloss_nlos(uav, params);
}

double snr_from_pathloss(double pathloss_db, const ChannelParams& params) {
  return std::pow(10.0, (params.tx_power_dbm - params.noise_power_dbm - pathloss_db) / 10.0);
}

double snr(const Vec3& uav, const ChannelParams& params) { return snr_from_pathloss(avg_pathloss(uav, params), params); }

double rate(int subcarriers, const Vec3& uav, const ChannelParams& params) {
  if (subcarriers < 0) throw std::invalid_argument("channel::rate: negative subcarrier count");
  if (subcarriers == 0) return 0.0;
  return subcarriers * params.subcarrier_bandwidth_hz * std::log2(1.0 + snr(uav, params));
}

double data_per_cycle(int subcarriers, const Vec3& uav, const ChannelParams& params) {
  if (subcarriers == 0) return 0.0;
  return rate(subcarriers, uav, params) * (params.cycle_duration_s - params.info_exchange_s);
}

}  // namespace uavsim::channel
