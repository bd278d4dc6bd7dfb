#pragma once

#include "tfc/basis.hpp"
#include "tfc/problem.hpp"

#include <span>
#include <vector>

namespace tfc {

/// Free-function coefficients for p, theta and h; each vector has one entry
/// per basis column.
struct Coefficients {
  Eigen::VectorXd p;
  Eigen::VectorXd theta;
  Eigen::VectorXd h;

  [[nodiscard]] static Coefficients zeros(int n);
  /// Stacked as [p; theta; h].
  [[nodiscard]] static Coefficients from_stacked(const Eigen::VectorXd& x);
  [[nodiscard]] Eigen::VectorXd stacked() const;
  [[nodiscard]] int size() const noexcept { return static_cast<int>(p.size()); }
};

/// The three constrained functionals and their first two time derivatives.
struct VariableState {
  double p = 0, dp = 0, d2p = 0;
  double theta = 0, dtheta = 0, d2theta = 0;
  double h = 0, dh = 0, d2h = 0;
};

/// Position, velocity and acceleration from the (p, theta, h) variables.
struct KinematicState {
  Vec3 r = Vec3::Zero();
  Vec3 v = Vec3::Zero();
  Vec3 a = Vec3::Zero();
  /// sqrt(p^2 + h^2).
  double radius = 0.0;
};

/// Basis rows at a set of nodes with the linear switching terms folded in:
/// phi = s - (1 - tau) s(-1) - tau s(+1), dphi = ds + (s(-1) - s(+1)) / dt,
/// d2phi = d2s. These are also the partials of (p, theta, h) with respect to
/// their own coefficient vectors.
struct CollocationGrid {
  std::vector<double> z;
  Eigen::VectorXd t;
  Eigen::VectorXd tau;
  Eigen::MatrixXd phi;
  Eigen::MatrixXd dphi;
  Eigen::MatrixXd d2phi;

  [[nodiscard]] static CollocationGrid build(const BasisSpec& spec, std::span<const double> nodes);
  [[nodiscard]] int rows() const noexcept { return static_cast<int>(z.size()); }
};

/// Basis spec for a problem: omega from the mean-frequency estimate and dt
/// from the time of flight.
[[nodiscard]] BasisSpec make_basis_spec(const BoundaryValueProblem& bvp, const TransferFrame& frame,
                                        BasisKind kind, int degree);

[[nodiscard]] VariableState eval_variables(const Coefficients& xi, const BoundaryValueProblem& bvp,
                                           const TransferFrame& frame, const BasisSpec& spec,
                                           double z);

/// Variables at row `i` of a prebuilt grid.
[[nodiscard]] VariableState eval_variables(const Coefficients& xi, const BoundaryValueProblem& bvp,
                                           const TransferFrame& frame, const CollocationGrid& grid,
                                           int i);

/// Inertial r, v, a.
[[nodiscard]] KinematicState reconstruct_state(const VariableState& vs, const TransferFrame& frame);

/// Dynamics defect r'' + mu r / |r|^3 - a_p at every node, three rows per
/// node, resolved on [r0_hat, t0_hat, h0_hat].
[[nodiscard]] Eigen::VectorXd residual(const Coefficients& xi, const BoundaryValueProblem& bvp,
                                       const TransferFrame& frame, const CollocationGrid& grid);
[[nodiscard]] Eigen::VectorXd residual(const Coefficients& xi, const BoundaryValueProblem& bvp,
                                       const TransferFrame& frame, const BasisSpec& spec,
                                       std::span<const double> nodes);

/// d residual / d [xi_p; xi_theta; xi_h].
[[nodiscard]] Eigen::MatrixXd jacobian(const Coefficients& xi, const BoundaryValueProblem& bvp,
                                       const TransferFrame& frame, const CollocationGrid& grid);
[[nodiscard]] Eigen::MatrixXd jacobian(const Coefficients& xi, const BoundaryValueProblem& bvp,
                                       const TransferFrame& frame, const BasisSpec& spec,
                                       std::span<const double> nodes);

}  // namespace tfc
