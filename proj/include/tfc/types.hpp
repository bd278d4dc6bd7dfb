#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace tfc {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Failure categories surfaced by the library. The CLI maps these onto
/// process exit codes.
enum class ErrorCode {
  invalid_argument,
  singular_geometry,
  degenerate_radius,
  rank_deficient,
  out_of_range,
  integration_failure,
  oracle_failure,
  singular,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[nodiscard]] const char* to_string(ErrorCode code) noexcept;

/// Inertial position/velocity pair.
struct CartesianState {
  Vec3 r = Vec3::Zero();
  Vec3 v = Vec3::Zero();
};

}  // namespace tfc
