#pragma once

#include "uavsim/config.hpp"
#include "uavsim/geometry.hpp"
#include "uavsim/random.hpp"

namespace uavsim::sensing {

struct SensingParams {
  double lambda = 0.01;          // 1/m; 0 is allowed for synthetic always-valid sensing
  double max_angle_rad = 0.52359877559829882;

  static SensingParams from_config(const ScenarioConfig& config);
};

enum class SensingResult { kValid, kInvalid };

// Radius of the ground footprint seen from altitude h.
double sensing_radius(double altitude, const SensingParams& params);

// exp(-lambda * d) inside the footprint (boundary inclusive), 0 outside.
double success_prob(const Vec3& uav, const Vec3& target, const SensingParams& params);

// One Bernoulli draw from `rng`.
SensingResult draw_sensing(const Vec3& uav, const Vec3& target, const SensingParams& params, Rng& rng);

}  // namespace uavsim::sensing
