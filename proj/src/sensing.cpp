#include "uavsim/sensing.hpp"

#include <cmath>

namespace uavsim::sensing {

SensingParams SensingParams::from_config(const ScenarioConfig& c) { return {c.sensing_lambda, c.max_sensing_angle_rad}; }

double sensing_radius(double altitude, const SensingParams& params) { return altitude * std::tan(params.max_angle_rad); }

double success_prob(const Vec3& uav, const Vec3& target, const SensingParams& params) {
  // d*sin(phi) <= h*tan(phi) reduces to rho <= h*tan(phi); the horizontal form
  // avoids rounding at the boundary.
  if (horizontal_distance(uav, target) > sensing_radius(uav.z, params)) return 0.0;
  return std::exp(-params.lambda * distance(uav, target));
}

SensingResult draw_sensing(const Vec3& uav, const Vec3& target, const SensingParams& params, Rng& rng) {
  const double p = success_prob(uav, target, params);
  return uniform01(rng) < p ? SensingResult::kValid : SensingResult::kInvalid;
}

}  // namespace uavsim::sensing
