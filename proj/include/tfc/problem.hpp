#pragma once

#include "tfc/perturbations.hpp"
#include "tfc/types.hpp"

namespace tfc {

/// Two-point boundary value problem: reach rf from r0 in `tof` under
/// central gravity mu plus the listed perturbations.
struct BoundaryValueProblem {
  double mu = 1.0;
  Vec3 r0 = Vec3::UnitX();
  Vec3 rf = Vec3::UnitY();
  double tof = 1.0;
  int revolutions = 0;
  bool long_way = false;
  ModelSet perturbations;

  /// Throws Error(invalid_argument) on non-positive mu, radii or tof, or a
  /// negative revolution count.
  void validate() const;
};

/// Orthonormal triad [r0_hat, t0_hat, h0_hat] built from the boundary
/// positions, and the sweep angle between them.
struct TransferFrame {
  Vec3 r_hat = Vec3::UnitX();
  Vec3 t_hat = Vec3::UnitY();
  Vec3 h_hat = Vec3::UnitZ();
  double theta_r = 0.0;
  /// Columns r_hat, t_hat, h_hat: maps frame components to inertial.
  Mat3 rotation = Mat3::Identity();
};

/// Throws Error(singular_geometry) when |r0 x rf| <= 1e-10 |r0||rf|.
/// For long_way the sweep is 2 pi - theta and h0_hat is flipped so the arc
/// still advances positively about it.
[[nodiscard]] TransferFrame build_frame(const Vec3& r0, const Vec3& rf, bool long_way);

/// (2 k pi + theta_r) / tof.
[[nodiscard]] double mean_frequency(double theta_r, int revolutions, double tof);

}  // namespace tfc
