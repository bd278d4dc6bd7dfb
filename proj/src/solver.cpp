#include "tfc/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace tfc {

namespace {

// Relative pivot threshold for the rank-revealing factorization. The two
// trig columns sit inside the span of the polynomials to ~1e-15, so each
// variable block may lose two directions.
constexpr double kRankThreshold = 1e-13;
constexpr int kSharedTrigDirections = 6;

struct LeastSquares {
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod;
  Eigen::VectorXd column_scale;

  explicit LeastSquares(const Eigen::MatrixXd& a) : column_scale(a.cols()) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      const double norm = a.col(j).norm();
      column_scale[j] = norm > 0.0 ? 1.0 / norm : 1.0;
    }
    cod.setThreshold(kRankThreshold);
    cod.compute(a * column_scale.asDiagonal());
  }

  [[nodiscard]] Eigen::Index rank() const { return cod.rank(); }

  template <typename Rhs>
  [[nodiscard]] Eigen::MatrixXd solve(const Rhs& b) const {
    return column_scale.asDiagonal() * cod.solve(b);
  }
};

struct Setup {
  Scaling scaling;
  BoundaryValueProblem scaled;
  TransferFrame frame;
  BasisSpec spec;
};

Setup make_setup(const BoundaryValueProblem& bvp, const SolverConfig& config) {
  bvp.validate();
  config.validate();
  Setup s;
  s.scaling = make_scaling(bvp, config.nondimensionalize);
  s.scaled = scale_problem(bvp, s.scaling);
  s.frame = build_frame(s.scaled.r0, s.scaled.rf, s.scaled.long_way);
  s.spec = make_basis_spec(s.scaled, s.frame, config.kind, config.degree);
  return s;
}

}  // namespace

void SolverConfig::validate() const {
  if (degree < 2) throw Error(ErrorCode::invalid_argument, "basis degree must be >= 2");
  if (!(tol > 0.0)) throw Error(ErrorCode::invalid_argument, "tolerance must be positive");
  if (max_iter < 0) throw Error(ErrorCode::invalid_argument, "max_iter must be >= 0");
  if (n_points < degree + 2) {
    throw Error(ErrorCode::invalid_argument,
                "n_points must be >= degree + 2 for an overdetermined fit");
  }
}

const char* to_string(StopReason reason) noexcept {
  switch (reason) {
    case StopReason::residual: return "residual";
    case StopReason::step: return "step";
    case StopReason::max_iter: return "max_iter";
    case StopReason::diverged: return "diverged";
  }
  return "unknown";
}

Scaling make_scaling(const BoundaryValueProblem& bvp, bool nondimensionalize) {
  if (!nondimensionalize) return {};
  const double lu = bvp.r0.norm();
  return {lu, std::sqrt(lu * lu * lu / bvp.mu)};
}

BoundaryValueProblem scale_problem(const BoundaryValueProblem& bvp, const Scaling& scaling) {
  BoundaryValueProblem out = bvp;
  out.mu = bvp.mu * scaling.time * scaling.time /
           (scaling.length * scaling.length * scaling.length);
  out.r0 = bvp.r0 / scaling.length;
  out.rf = bvp.rf / scaling.length;
  out.tof = bvp.tof / scaling.time;
  if (scaling.length != 1.0 || scaling.time != 1.0) {
    out.perturbations = scale_models(bvp.perturbations, scaling.length, scaling.time);
  }
  return out;
}

Solution solve(const BoundaryValueProblem& bvp, const SolverConfig& config,
               const std::optional<Coefficients>& warm_start) {
  Setup setup = make_setup(bvp, config);
  const std::vector<double> nodes = cgl_nodes(config.n_points);
  const CollocationGrid grid = CollocationGrid::build(setup.spec, nodes);
  const int m = setup.spec.size();

  Coefficients xi = Coefficients::zeros(m);
  if (warm_start) {
    if (warm_start->size() != m || warm_start->theta.size() != m || warm_start->h.size() != m) {
      throw Error(ErrorCode::invalid_argument, "warm start length does not match the basis");
    }
    xi = *warm_start;
  }

  Diagnostics diag;
  bool small_step = false;
  for (;;) {
    Eigen::VectorXd loss;
    try {
      loss = residual(xi, setup.scaled, setup.frame, grid);
    } catch (const Error& e) {
      // An iterate collapsing onto the primary is divergence, not bad input.
      if (e.code() != ErrorCode::degenerate_radius || diag.iterations == 0) throw;
      diag.stop = StopReason::diverged;
      break;
    }
    const double res = loss.lpNorm<Eigen::Infinity>();
    diag.residual_history.push_back(res);
    if (!std::isfinite(res)) {
      diag.stop = StopReason::diverged;
      break;
    }
    if (res <= config.tol) {
      diag.converged = true;
      diag.stop = StopReason::residual;
      break;
    }
    if (small_step) {
      diag.stop = StopReason::step;
      break;
    }
    if (diag.iterations >= config.max_iter) {
      diag.stop = StopReason::max_iter;
      break;
    }

    const Eigen::MatrixXd jac = jacobian(xi, setup.scaled, setup.frame, grid);
    if (!jac.allFinite()) {
      diag.stop = StopReason::diverged;
      break;
    }
    const LeastSquares ls(jac);
    if (ls.rank() < 3 * m - kSharedTrigDirections) {
      throw Error(ErrorCode::rank_deficient,
                  "Jacobian rank " + std::to_string(ls.rank()) + " of " + std::to_string(3 * m));
    }
    const Eigen::VectorXd step = ls.solve(loss);
    xi = Coefficients::from_stacked(xi.stacked() - step);
    ++diag.iterations;
    small_step = step.norm() <= config.tol;
  }

  Solution sol;
  sol.problem = bvp;
  sol.scaled = std::move(setup.scaled);
  sol.scaling = setup.scaling;
  sol.frame = setup.frame;
  sol.basis = setup.spec;
  sol.coefficients = std::move(xi);
  sol.diagnostics = std::move(diag);
  if (std::isfinite(sol.diagnostics.final_residual())) {
    const double vu = sol.scaling.velocity();
    sol.v0 = reconstruct_state(eval_variables(sol.coefficients, sol.scaled, sol.frame, grid, 0),
                               sol.frame).v * vu;
    sol.vf = reconstruct_state(eval_variables(sol.coefficients, sol.scaled, sol.frame, grid,
                                              grid.rows() - 1),
                               sol.frame).v * vu;
  } else {
    sol.v0 = sol.vf = Vec3::Constant(std::numeric_limits<double>::quiet_NaN());
  }
  return sol;
}

Coefficients warm_start_fit(std::span<const PositionSample> trajectory,
                            const BoundaryValueProblem& bvp, const TransferFrame& frame,
                            const BasisSpec& spec) {
  const int m = spec.size();
  if (static_cast<int>(trajectory.size()) < m + 1) {
    throw Error(ErrorCode::invalid_argument,
                "warm start fit needs at least degree + 2 samples, got " +
                    std::to_string(trajectory.size()));
  }
  const TimeMap map(bvp.tof);
  std::vector<double> z;
  z.reserve(trajectory.size());
  double prev_t = -1.0;
  for (const auto& sample : trajectory) {
    if (sample.t < 0.0 || sample.t > bvp.tof || sample.t < prev_t) {
      throw Error(ErrorCode::invalid_argument, "warm start samples must be sorted within [0, tof]");
    }
    prev_t = sample.t;
    z.push_back(std::clamp(map.to_z(sample.t), -1.0, 1.0));
  }
  const CollocationGrid grid = CollocationGrid::build(spec, z);

  const double p0 = bvp.r0.norm();
  const double pf = bvp.rf.norm();
  const double theta_f = frame.theta_r + 2.0 * std::numbers::pi * bvp.revolutions;
  const auto n = static_cast<Eigen::Index>(trajectory.size());

  Eigen::MatrixXd rhs(n, 3);
  double theta_prev = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const Vec3 local = frame.rotation.transpose() * trajectory[static_cast<std::size_t>(i)].r;
    const double raw = std::atan2(local.y(), local.x());
    double theta = raw;
    if (i > 0) {
      theta = theta_prev + std::remainder(raw - theta_prev, 2.0 * std::numbers::pi);
    }
    theta_prev = theta;
    const double tau = grid.tau[i];
    rhs(i, 0) = std::hypot(local.x(), local.y()) - ((1.0 - tau) * p0 + tau * pf);
    rhs(i, 1) = theta - tau * theta_f;
    rhs(i, 2) = local.z();
  }
  if (std::abs(theta_prev - theta_f) > std::numbers::pi && trajectory.back().t == bvp.tof) {
    throw Error(ErrorCode::invalid_argument,
                "unwrapped sweep angle does not match the revolution count; samples too sparse?");
  }

  const LeastSquares ls(grid.phi);
  const Eigen::MatrixXd fit = ls.solve(rhs);
  return {fit.col(0), fit.col(1), fit.col(2)};
}

Coefficients warm_start_from(const Solution& prior, const BoundaryValueProblem& bvp,
                             const SolverConfig& config) {
  const Setup setup = make_setup(bvp, config);
  const int n = std::max(config.n_points, 2 * setup.spec.size());
  const std::vector<double> z = cgl_nodes(n);

  // Stretch the prior arc onto this one's time of flight.
  const TimeMap prior_map(prior.problem.tof);
  std::vector<double> prior_times(z.size());
  std::transform(z.begin(), z.end(), prior_times.begin(),
                 [&](double zi) { return prior_map.to_time(zi); });
  prior_times.back() = prior.problem.tof;
  const std::vector<CartesianState> states = sample_solution(prior, prior_times);

  const TimeMap map(setup.scaled.tof);
  std::vector<PositionSample> samples(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) {
    samples[i].t = std::min(map.to_time(z[i]), setup.scaled.tof);
    samples[i].r = states[i].r / setup.scaling.length;
  }
  return warm_start_fit(samples, setup.scaled, setup.frame, setup.spec);
}

std::vector<CartesianState> sample_solution(const Solution& sol, std::span<const double> times) {
  const double tof = sol.problem.tof;
  std::vector<double> z;
  z.reserve(times.size());
  for (double t : times) {
    if (!(t >= 0.0 && t <= tof)) {
      throw Error(ErrorCode::out_of_range, "sample time outside [0, tof]");
    }
    z.push_back(std::clamp(2.0 * t / tof - 1.0, -1.0, 1.0));
  }
  const CollocationGrid grid = CollocationGrid::build(sol.basis, z);
  std::vector<CartesianState> out(times.size());
  for (int i = 0; i < grid.rows(); ++i) {
    const KinematicState k = reconstruct_state(
        eval_variables(sol.coefficients, sol.scaled, sol.frame, grid, i), sol.frame);
    out[static_cast<std::size_t>(i)] = {k.r * sol.scaling.length, k.v * sol.scaling.velocity()};
  }
  return out;
}

}  // namespace tfc
