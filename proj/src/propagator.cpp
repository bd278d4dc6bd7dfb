#include "tfc/reference.hpp"
#include "tfc/solver.hpp"

#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

namespace tfc {

namespace {

namespace odeint = boost::numeric::odeint;

// [r - r0, v] in scaled units.
using State = std::array<double, 6>;

constexpr std::size_t kMaxSteps = 20'000'000;

struct TwoBodyRhs {
  Vec3 r0;
  const ModelSet* models;

  void operator()(const State& x, State& dxdt, double t) const {
    const Vec3 r = r0 + Vec3(x[0], x[1], x[2]);
    const Vec3 v(x[3], x[4], x[5]);
    const double rn = r.norm();
    Vec3 a = -r / (rn * rn * rn);
    if (!models->empty()) a += total_accel(*models, r, v, t);
    dxdt = {v.x(), v.y(), v.z(), a.x(), a.y(), a.z()};
  }
};

bool finite(const State& x) {
  return std::all_of(x.begin(), x.end(), [](double v) { return std::isfinite(v); });
}

}  // namespace

PropagationResult propagate(const Vec3& r0, const Vec3& v0, double tof, double mu,
                            const ModelSet& models, const PropagatorConfig& config,
                            std::span<const double> sample_times) {
  if (!(tof > 0.0)) throw Error(ErrorCode::invalid_argument, "propagation time must be positive");
  if (!(mu > 0.0) || !(r0.norm() > 0.0)) {
    throw Error(ErrorCode::invalid_argument, "propagation needs mu > 0 and r0 != 0");
  }
  if (!(config.rel_tol > 0.0) || !(config.abs_tol > 0.0)) {
    throw Error(ErrorCode::invalid_argument, "propagator tolerances must be positive");
  }
  for (double t : sample_times) {
    if (!(t >= 0.0 && t <= tof)) throw Error(ErrorCode::out_of_range, "sample time outside [0, tof]");
  }

  BoundaryValueProblem unit;
  unit.mu = mu;
  unit.r0 = r0;
  const Scaling sc = make_scaling(unit, true);
  const ModelSet scaled_models = scale_models(models, sc.length, sc.time);
  const double t_end = tof / sc.time;
  const TwoBodyRhs rhs{r0 / sc.length, &scaled_models};

  std::vector<std::size_t> order(sample_times.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return sample_times[a] < sample_times[b]; });

  const Vec3 vs = v0 / sc.velocity();
  State x{0.0, 0.0, 0.0, vs.x(), vs.y(), vs.z()};

  auto to_state = [&](const State& s) {
    return CartesianState{(rhs.r0 + Vec3(s[0], s[1], s[2])) * sc.length,
                          Vec3(s[3], s[4], s[5]) * sc.velocity()};
  };

  PropagationResult out;
  out.samples.resize(sample_times.size());
  State xf{};
  try {
    // A zero max_dt leaves the step unbounded.
    auto stepper = odeint::make_dense_output(config.abs_tol, config.rel_tol,
                                             std::max(config.max_step, 0.0),
                                             odeint::runge_kutta_dopri5<State>());
    stepper.initialize(x, 0.0, std::min(1e-3, t_end));
    std::size_t next = 0;
    std::size_t steps = 0;
    State tmp{};
    for (;;) {
      while (next < order.size() &&
             sample_times[order[next]] / sc.time <= stepper.current_time()) {
        const double ts = sample_times[order[next]] / sc.time;
        if (ts == 0.0) {
          out.samples[order[next]] = to_state(x);
        } else {
          stepper.calc_state(ts, tmp);
          out.samples[order[next]] = to_state(tmp);
        }
        ++next;
      }
      if (stepper.current_time() >= t_end) break;
      stepper.do_step(rhs);
      if (++steps > kMaxSteps || !finite(stepper.current_state()) ||
          !(stepper.current_time_step() > 1e-15 * t_end)) {
        throw Error(ErrorCode::integration_failure, "propagator step size collapsed");
      }
    }
    stepper.calc_state(t_end, xf);
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw Error(ErrorCode::integration_failure, std::string("propagator failed: ") + e.what());
  }
  if (!finite(xf)) throw Error(ErrorCode::integration_failure, "propagated state is not finite");

  out.final_state = to_state(xf);
  out.displacement = Vec3(xf[0], xf[1], xf[2]) * sc.length;
  return out;
}

Mat3 finite_diff_stm(const Vec3& r0, const Vec3& v0, double tof, double mu, const ModelSet& models,
                     const PropagatorConfig& config, DifferenceScheme scheme) {
  const double lu = r0.norm();
  const double h = 1e-7 * std::sqrt(mu / lu);  // 1e-7 velocity units
  Mat3 stm;
  Vec3 base = Vec3::Zero();
  if (scheme == DifferenceScheme::forward) {
    base = propagate(r0, v0, tof, mu, models, config).displacement;
  }
  for (int j = 0; j < 3; ++j) {
    Vec3 dv = Vec3::Zero();
    dv[j] = h;
    const Vec3 plus = propagate(r0, v0 + dv, tof, mu, models, config).displacement;
    if (scheme == DifferenceScheme::central) {
      const Vec3 minus = propagate(r0, v0 - dv, tof, mu, models, config).displacement;
      stm.col(j) = (plus - minus) / (2.0 * h);
    } else {
      stm.col(j) = (plus - base) / h;
    }
  }
  return stm;
}

DcSolution dc_solve(const DcProblem& problem, const PropagatorConfig& config) {
  const BoundaryValueProblem& bvp = problem.bvp;
  bvp.validate();
  if (!problem.guess_v0.allFinite()) {
    throw Error(ErrorCode::invalid_argument, "differential corrections guess is not finite");
  }
  const double lu = bvp.r0.norm();
  const Vec3 target = bvp.rf - bvp.r0;

  DcSolution sol;
  sol.v0 = problem.guess_v0;
  for (;;) {
    const Vec3 miss =
        propagate(bvp.r0, sol.v0, bvp.tof, bvp.mu, bvp.perturbations, config).displacement - target;
    sol.miss_distance = miss.norm();
    if (sol.miss_distance / lu <= problem.tol) {
      sol.converged = true;
      break;
    }
    if (sol.iterations >= problem.max_iter) break;
    const Mat3 stm = finite_diff_stm(bvp.r0, sol.v0, bvp.tof, bvp.mu, bvp.perturbations, config);
    const Eigen::FullPivLU<Mat3> lu_stm(stm);
    if (lu_stm.rank() < 3) {
      throw Error(ErrorCode::rank_deficient, "state transition sensitivity is singular");
    }
    sol.v0 -= lu_stm.solve(miss);
    ++sol.iterations;
  }
  return sol;
}

}  // namespace tfc
