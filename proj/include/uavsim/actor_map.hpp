#pragma once

#include <Eigen/Dense>

#include "uavsim/env.hpp"

namespace uavsim {

// Maps a raw actor output onto a feasible sensing location for a task and
// gives the Jacobian of the location features with respect to the raw output.
//
// Horizontal: offset = r_s * u / sqrt(1 + |u|^2), strictly inside the disk.
// 3D mode: a third output maps onto [h_min, h_max] through the same squashing
// and r_s is evaluated at the mapped altitude.
//
// Location features are (x / R_c, y / R_c) plus, in 3D mode, the altitude
// rescaled to [0, 1].
class ActorOutputMap {
 public:
  explicit ActorOutputMap(const Environment& env);

  int raw_size() const { return three_d_ ? 3 : 2; }
  int feature_size() const { return raw_size(); }

  Vec3 location(const Eigen::Ref<const Eigen::VectorXd>& raw, int task) const;
  Eigen::VectorXd features(const Vec3& location) const;
  // d features / d raw, feature_size x raw_size.
  Eigen::MatrixXd jacobian(const Eigen::Ref<const Eigen::VectorXd>& raw, int task) const;

 private:
  const Environment* env_;
  bool three_d_;
  double cell_radius_;
  double altitude_;
  double h_min_;
  double h_max_;
  double tan_phi_;
};

}  // namespace uavsim
