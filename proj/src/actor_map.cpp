#include "uavsim/actor_map.hpp"

#include <cmath>

namespace uavsim {

ActorOutputMap::ActorOutputMap(const Environment& env)
    : env_(&env),
      three_d_(env.config().enable_3d),
      cell_radius_(env.config().cell_radius),
      altitude_(env.config().uav_altitude),
      h_min_(env.config().altitude_min),
      h_max_(env.config().altitude_max),
      tan_phi_(std::tan(env.config().max_sensing_angle_rad)) {}

Vec3 ActorOutputMap::location(const Eigen::Ref<const Eigen::VectorXd>& raw, int task) const {
  double z = altitude_;
  if (three_d_) {
    const double s3 = raw(2) / std::sqrt(1.0 + raw(2) * raw(2));
    z = h_min_ + (h_max_ - h_min_) * 0.5 * (1.0 + s3);
  }
  const double scale = z * tan_phi_ / std::sqrt(1.0 + raw(0) * raw(0) + raw(1) * raw(1));
  const Vec3& t = env_->target(task);
  return Vec3{t.x + scale * raw(0), t.y + scale * raw(1), z};
}

Eigen::VectorXd ActorOutputMap::features(const Vec3& loc) const {
  Eigen::VectorXd f(feature_size());
  f(0) = loc.x / cell_radius_;
  f(1) = loc.y / cell_radius_;
  if (three_d_) f(2) = h_max_ > h_min_ ? (loc.z - h_min_) / (h_max_ - h_min_) : 0.5;
  return f;
}

Eigen::MatrixXd ActorOutputMap::jacobian(const Eigen::Ref<const Eigen::VectorXd>& raw, int /*task*/) const {
  const double u0 = raw(0), u1 = raw(1);
  const double q = 1.0 + u0 * u0 + u1 * u1;
  const double q32 = q * std::sqrt(q);
  double z = altitude_;
  double dz = 0.0, ds3 = 0.0;
  if (three_d_) {
    const double w = 1.0 + raw(2) * raw(2);
    const double s3 = raw(2) / std::sqrt(w);
    ds3 = 1.0 / (w * std::sqrt(w));
    z = h_min_ + (h_max_ - h_min_) * 0.5 * (1.0 + s3);
    dz = (h_max_ - h_min_) * 0.5 * ds3;
  }
  const double r_s = z * tan_phi_;
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(feature_size(), raw_size());
  // d(u / sqrt(q)) / du = (q I - u u^T) / q^(3/2)
  j(0, 0) = r_s * (q - u0 * u0) / q32 / cell_radius_;
  j(0, 1) = r_s * (-u0 * u1) / q32 / cell_radius_;
  j(1, 0) = r_s * (-u1 * u0) / q32 / cell_radius_;
  j(1, 1) = r_s * (q - u1 * u1) / q32 / cell_radius_;
  if (three_d_) {
    const double sq = std::sqrt(q);
    j(0, 2) = tan_phi_ * dz * u0 / sq / cell_radius_;
    j(1, 2) = tan_phi_ * dz * u1 / sq / cell_radius_;
    j(2, 2) = h_max_ > h_min_ ? 0.5 * ds3 : 0.0;
  }
  return j;
}

}  // namespace uavsim
