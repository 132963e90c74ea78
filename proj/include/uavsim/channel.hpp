#pragma once

#include "uavsim/config.hpp"
#include "uavsim/geometry.hpp"

namespace uavsim::channel {

struct ChannelParams {
  Vec3 bs_position{0.0, 0.0, 25.0};
  double tx_power_dbm = 23.0;
  double noise_power_dbm = -96.0;
  double carrier_freq_ghz = 2.0;
  double subcarrier_bandwidth_hz = 12.5e3;
  double cycle_duration_s = 0.1;
  double info_exchange_s = 0.02;
  LosModel los_model = LosModel::kPaper;

  static ChannelParams from_config(const ScenarioConfig& config);
};

// Altitude-dependent constants of the LoS probability model.
double los_critical_radius(double altitude);  // r_c, m
double los_decay_length(double altitude);     // p_0, m

// Probability of a line-of-sight link from a UAV at `uav` to the BS.
double prob_los(const Vec3& uav, const ChannelParams& params);

// LoS / NLoS pathloss in dB; f_c enters in GHz.
double pathloss_los(const Vec3& uav, const ChannelParams& params);
double pathloss_nlos(const Vec3& uav, const ChannelParams& params);

// LoS-probability-weighted mixture of the two pathlosses, dB.
double avg_pathloss(const Vec3& uav, const ChannelParams& params);

// Received SNR at the BS, linear.
double snr(const Vec3& uav, const ChannelParams& params);
double snr_from_pathloss(double pathloss_db, const ChannelParams& params);

// Uplink rate in bit/s over `subcarriers` orthogonal subcarriers.
double rate(int subcarriers, const Vec3& uav, const ChannelParams& params);

// Bits delivered in one cycle (payload window t_c - t_e).
double data_per_cycle(int subcarriers, const Vec3& uav, const ChannelParams& params);

}  // namespace uavsim::channel
