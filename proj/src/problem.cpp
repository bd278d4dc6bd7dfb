#include "tfc/problem.hpp"

#include <cmath>
#include <numbers>

namespace tfc {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid-argument";
    case ErrorCode::singular_geometry: return "singular-geometry";
    case ErrorCode::degenerate_radius: return "degenerate-radius";
    case ErrorCode::rank_deficient: return "rank-deficient";
    case ErrorCode::out_of_range: return "out-of-range";
    case ErrorCode::integration_failure: return "integration-failure";
    case ErrorCode::oracle_failure: return "oracle-failure";
    case ErrorCode::singular: return "singular";
  }
  return "unknown";
}

void BoundaryValueProblem::validate() const {
  if (!(mu > 0.0)) throw Error(ErrorCode::invalid_argument, "mu must be positive");
  if (!(r0.norm() > 0.0) || !(rf.norm() > 0.0)) {
    throw Error(ErrorCode::invalid_argument, "boundary positions must be non-zero");
  }
  if (!(tof > 0.0) || !std::isfinite(tof)) {
    throw Error(ErrorCode::invalid_argument, "time of flight must be positive");
  }
  if (revolutions < 0) throw Error(ErrorCode::invalid_argument, "revolutions must be >= 0");
}

TransferFrame build_frame(const Vec3& r0, const Vec3& rf, bool long_way) {
  const double n0 = r0.norm();
  const double nf = rf.norm();
  const Vec3 cross = r0.cross(rf);
  if (!(cross.norm() > 1e-10 * n0 * nf)) {
    throw Error(ErrorCode::singular_geometry,
                "boundary positions are (anti)parallel; the transfer plane is undefined");
  }

  TransferFrame f;
  f.r_hat = r0 / n0;
  const Vec3 rf_hat = rf / nf;
  f.h_hat = f.r_hat.cross(rf_hat).normalized();
  f.theta_r = std::atan2(f.r_hat.cross(rf_hat).norm(), f.r_hat.dot(rf_hat));
  if (long_way) {
    f.h_hat = -f.h_hat;
    f.theta_r = 2.0 * std::numbers::pi - f.theta_r;
  }
  f.t_hat = f.h_hat.cross(f.r_hat);
  f.rotation.col(0) = f.r_hat;
  f.rotation.col(1) = f.t_hat;
  f.rotation.col(2) = f.h_hat;
  return f;
}

double mean_frequency(double theta_r, int revolutions, double tof) {
  if (!(tof > 0.0)) throw Error(ErrorCode::invalid_argument, "time of flight must be positive");
  return (2.0 * std::numbers::pi * revolutions + theta_r) / tof;
}

}  // namespace tfc
