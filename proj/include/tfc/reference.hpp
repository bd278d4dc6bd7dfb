#pragma once

#include "tfc/problem.hpp"

#include <span>
#include <vector>

namespace tfc {

/// Tolerances are in units of |r0| and sqrt(|r0|^3 / mu).
struct PropagatorConfig {
  double rel_tol = 1e-12;
  double abs_tol = 1e-12;
  /// Largest step, nondimensional; <= 0 leaves the step unbounded.
  double max_step = 0.0;
};

struct PropagationResult {
  CartesianState final_state;
  /// r(tof) - r0, kept separately so short arcs keep full relative precision.
  Vec3 displacement = Vec3::Zero();
  /// States at the requested sample times, in the order given.
  std::vector<CartesianState> samples;
};

/// Integrates r'' = -mu r / |r|^3 + a_p(r, v, t) over [0, tof] with an
/// adaptive Dormand-Prince 5(4) pair; samples come from its dense output.
/// Sample times must lie in [0, tof]. Throws Error(integration_failure) if
/// the step size collapses or the state stops being finite.
[[nodiscard]] PropagationResult propagate(const Vec3& r0, const Vec3& v0, double tof, double mu,
                                          const ModelSet& models,
                                          const PropagatorConfig& config = {},
                                          std::span<const double> sample_times = {});

enum class DifferenceScheme { central, forward };

/// d r(tof) / d v0 by finite differences with a 1e-7 nondimensional step.
[[nodiscard]] Mat3 finite_diff_stm(const Vec3& r0, const Vec3& v0, double tof, double mu,
                                   const ModelSet& models, const PropagatorConfig& config = {},
                                   DifferenceScheme scheme = DifferenceScheme::central);

struct DcProblem {
  BoundaryValueProblem bvp;
  Vec3 guess_v0 = Vec3::Zero();
  /// On |r(tof) - rf|, nondimensional.
  double tol = 1e-9;
  int max_iter = 50;
};

struct DcSolution {
  Vec3 v0 = Vec3::Zero();
  int iterations = 0;
  bool converged = false;
  /// Final |r(tof) - rf| in the problem's length units.
  double miss_distance = 0.0;
};

/// Newton shooting on the departure velocity. Perturbations come from
/// problem.bvp.perturbations.
[[nodiscard]] DcSolution dc_solve(const DcProblem& problem, const PropagatorConfig& config = {});

struct LambertVelocities {
  Vec3 v0 = Vec3::Zero();
  Vec3 vf = Vec3::Zero();
  int iterations = 0;
};

/// Single-revolution two-body Lambert solution by the universal-variable
/// method (Stumpff functions, safeguarded Newton on z). Short/long way
/// follows build_frame. Throws Error(singular_geometry) for collinear
/// boundaries and Error(oracle_failure) after 200 iterations.
[[nodiscard]] LambertVelocities lambert_universal(double mu, const Vec3& r0, const Vec3& rf,
                                                  double tof, bool long_way = false);

/// Stumpff functions C(z) and S(z).
[[nodiscard]] double stumpff_c(double z);
[[nodiscard]] double stumpff_s(double z);

}  // namespace tfc
