#pragma once

#include "tfc/functionals.hpp"

#include <optional>
#include <span>
#include <vector>

namespace tfc {

struct SolverConfig {
  int n_points = 200;
  double tol = 1e-9;
  int max_iter = 200;
  BasisKind kind = BasisKind::legendre();
  int degree = 20;
  /// Solve in units with length |r0| and time sqrt(|r0|^3 / mu), so mu = 1.
  bool nondimensionalize = true;

  /// Throws Error(invalid_argument) unless degree >= 2, tol > 0,
  /// max_iter >= 0 and n_points >= degree + 2.
  void validate() const;
};

/// Characteristic units; identity when nondimensionalization is off.
struct Scaling {
  double length = 1.0;
  double time = 1.0;

  [[nodiscard]] double velocity() const noexcept { return length / time; }
  [[nodiscard]] double acceleration() const noexcept { return length / (time * time); }
};

[[nodiscard]] Scaling make_scaling(const BoundaryValueProblem& bvp, bool nondimensionalize);

/// The problem expressed in scaled units, perturbations wrapped accordingly.
[[nodiscard]] BoundaryValueProblem scale_problem(const BoundaryValueProblem& bvp,
                                                 const Scaling& scaling);

enum class StopReason { residual, step, max_iter, diverged };

[[nodiscard]] const char* to_string(StopReason reason) noexcept;

struct Diagnostics {
  int iterations = 0;
  /// Residual max-norm (solver units) before each update and after the last.
  std::vector<double> residual_history;
  bool converged = false;
  StopReason stop = StopReason::max_iter;

  [[nodiscard]] double final_residual() const {
    return residual_history.empty() ? 0.0 : residual_history.back();
  }
};

/// Converged (or best-effort) TFC trajectory. Coefficients and basis are in
/// solver units; `problem`, v0 and vf are in the caller's units.
struct Solution {
  BoundaryValueProblem problem;
  BoundaryValueProblem scaled;
  Scaling scaling;
  TransferFrame frame;
  BasisSpec basis;
  Coefficients coefficients;
  Diagnostics diagnostics;
  Vec3 v0 = Vec3::Zero();
  Vec3 vf = Vec3::Zero();
};

/// Gauss-Newton on the collocated dynamics defect. Each update is the
/// minimum-norm least-squares solution of J dx = L from a complete
/// orthogonal decomposition of the column-equilibrated Jacobian. Stops when
/// the residual max-norm reaches tol, the step 2-norm drops to tol, or
/// max_iter updates have been taken; only the first counts as converged.
/// `warm_start` must be in solver units (e.g. another Solution's
/// coefficients, or the output of warm_start_from).
///
/// Throws Error(singular_geometry) for (anti)parallel boundaries and
/// Error(rank_deficient) when the Jacobian loses more than the six
/// directions the trig columns can share with the polynomials.
[[nodiscard]] Solution solve(const BoundaryValueProblem& bvp, const SolverConfig& config,
                             const std::optional<Coefficients>& warm_start = std::nullopt);

struct PositionSample {
  double t = 0.0;
  Vec3 r = Vec3::Zero();
};

/// Least-squares fit of the constrained functionals to sampled positions.
/// Samples are in the units of `bvp`, sorted by time, and must span
/// [0, tof]; theta is unwrapped continuously for multi-revolution arcs.
[[nodiscard]] Coefficients warm_start_fit(std::span<const PositionSample> trajectory,
                                          const BoundaryValueProblem& bvp,
                                          const TransferFrame& frame, const BasisSpec& spec);

/// Samples a prior solution and fits it onto the basis `config` would use
/// for `bvp`, returning coefficients in that solve's units.
[[nodiscard]] Coefficients warm_start_from(const Solution& prior, const BoundaryValueProblem& bvp,
                                           const SolverConfig& config);

/// Inertial states at times in [0, tof] (caller's units). Throws
/// Error(out_of_range) outside the arc.
[[nodiscard]] std::vector<CartesianState> sample_solution(const Solution& sol,
                                                          std::span<const double> times);

}  // namespace tfc
