#include "tfc/functionals.hpp"

#include <cmath>
#include <numbers>

namespace tfc {

namespace {

struct BoundaryValues {
  double p0;
  double pf;
  double theta_f;
  double dt;
};

BoundaryValues boundary_values(const BoundaryValueProblem& bvp, const TransferFrame& frame) {
  return {bvp.r0.norm(), bvp.rf.norm(),
          frame.theta_r + 2.0 * std::numbers::pi * bvp.revolutions, bvp.tof};
}

template <typename Row>
VariableState variables_from(const Coefficients& xi, const BoundaryValues& b, const Row& phi,
                             const Row& dphi, const Row& d2phi, double tau) {
  VariableState vs;
  vs.p = phi.dot(xi.p) + (1.0 - tau) * b.p0 + tau * b.pf;
  vs.dp = dphi.dot(xi.p) + (b.pf - b.p0) / b.dt;
  vs.d2p = d2phi.dot(xi.p);
  vs.theta = phi.dot(xi.theta) + tau * b.theta_f;
  vs.dtheta = dphi.dot(xi.theta) + b.theta_f / b.dt;
  vs.d2theta = d2phi.dot(xi.theta);
  vs.h = phi.dot(xi.h);
  vs.dh = dphi.dot(xi.h);
  vs.d2h = d2phi.dot(xi.h);
  return vs;
}

// r, v, a in frame components.
KinematicState frame_kinematics(const VariableState& vs) {
  const double c = std::cos(vs.theta);
  const double s = std::sin(vs.theta);
  const Vec3 e_rho(c, s, 0.0);
  const Vec3 e_theta(-s, c, 0.0);
  const Vec3 e_h = Vec3::UnitZ();

  KinematicState k;
  k.r = vs.p * e_rho + vs.h * e_h;
  k.v = vs.dp * e_rho + vs.p * vs.dtheta * e_theta + vs.dh * e_h;
  k.a = (vs.d2p - vs.p * vs.dtheta * vs.dtheta) * e_rho +
        (2.0 * vs.dp * vs.dtheta + vs.p * vs.d2theta) * e_theta + vs.d2h * e_h;
  k.radius = std::sqrt(vs.p * vs.p + vs.h * vs.h);
  return k;
}

void check_grid(const Coefficients& xi, const CollocationGrid& grid) {
  if (xi.p.size() != grid.phi.cols() || xi.theta.size() != grid.phi.cols() ||
      xi.h.size() != grid.phi.cols()) {
    throw Error(ErrorCode::invalid_argument, "coefficient length does not match the basis");
  }
}

double radius_floor(const BoundaryValueProblem& bvp) { return 1e-12 * bvp.r0.norm(); }

}  // namespace

Coefficients Coefficients::zeros(int n) {
  return {Eigen::VectorXd::Zero(n), Eigen::VectorXd::Zero(n), Eigen::VectorXd::Zero(n)};
}

Coefficients Coefficients::from_stacked(const Eigen::VectorXd& x) {
  if (x.size() % 3 != 0) throw Error(ErrorCode::invalid_argument, "stacked length not a multiple of 3");
  const Eigen::Index n = x.size() / 3;
  return {x.segment(0, n), x.segment(n, n), x.segment(2 * n, n)};
}

Eigen::VectorXd Coefficients::stacked() const {
  Eigen::VectorXd x(p.size() + theta.size() + h.size());
  x << p, theta, h;
  return x;
}

CollocationGrid CollocationGrid::build(const BasisSpec& spec, std::span<const double> nodes) {
  const BasisRows start = basis_rows(spec, -1.0);
  const BasisRows end = basis_rows(spec, 1.0);
  const auto n = static_cast<Eigen::Index>(nodes.size());
  const int m = spec.size();

  CollocationGrid g;
  g.z.assign(nodes.begin(), nodes.end());
  g.t.resize(n);
  g.tau.resize(n);
  g.phi.resize(n, m);
  g.dphi.resize(n, m);
  g.d2phi.resize(n, m);
  const Eigen::VectorXd ds_bound = (start.s - end.s) / spec.dt;
  for (Eigen::Index i = 0; i < n; ++i) {
    const BasisRows rows = basis_rows(spec, nodes[static_cast<std::size_t>(i)]);
    const double tau = (rows.z + 1.0) / 2.0;
    g.t[i] = rows.t;
    g.tau[i] = tau;
    g.phi.row(i) = (rows.s - (1.0 - tau) * start.s - tau * end.s).transpose();
    g.dphi.row(i) = (rows.ds_dt + ds_bound).transpose();
    g.d2phi.row(i) = rows.d2s_dt2.transpose();
  }
  return g;
}

BasisSpec make_basis_spec(const BoundaryValueProblem& bvp, const TransferFrame& frame,
                          BasisKind kind, int degree) {
  BasisSpec spec;
  spec.kind = kind;
  spec.degree = degree;
  spec.dt = bvp.tof;
  spec.omega = mean_frequency(frame.theta_r, bvp.revolutions, bvp.tof);
  return spec;
}

VariableState eval_variables(const Coefficients& xi, const BoundaryValueProblem& bvp,
                             const TransferFrame& frame, const BasisSpec& spec, double z) {
  const double node[] = {z};
  const CollocationGrid grid = CollocationGrid::build(spec, node);
  return eval_variables(xi, bvp, frame, grid, 0);
}

VariableState eval_variables(const Coefficients& xi, const BoundaryValueProblem& bvp,
                             const TransferFrame& frame, const CollocationGrid& grid, int i) {
  check_grid(xi, grid);
  return variables_from(xi, boundary_values(bvp, frame), grid.phi.row(i).transpose(),
                        grid.dphi.row(i).transpose(), grid.d2phi.row(i).transpose(), grid.tau[i]);
}

KinematicState reconstruct_state(const VariableState& vs, const TransferFrame& frame) {
  KinematicState k = frame_kinematics(vs);
  k.r = frame.rotation * k.r;
  k.v = frame.rotation * k.v;
  k.a = frame.rotation * k.a;
  return k;
}

Eigen::VectorXd residual(const Coefficients& xi, const BoundaryValueProblem& bvp,
                         const TransferFrame& frame, const CollocationGrid& grid) {
  check_grid(xi, grid);
  const BoundaryValues b = boundary_values(bvp, frame);
  const Mat3& R = frame.rotation;
  const double r_min = radius_floor(bvp);
  const int n = grid.rows();

  Eigen::VectorXd loss(3 * n);
  for (int i = 0; i < n; ++i) {
    const VariableState vs = variables_from(xi, b, grid.phi.row(i).transpose(),
                                            grid.dphi.row(i).transpose(),
                                            grid.d2phi.row(i).transpose(), grid.tau[i]);
    const KinematicState k = frame_kinematics(vs);
    if (!(k.radius >= r_min)) {
      throw Error(ErrorCode::degenerate_radius, "trajectory passes through the primary center");
    }
    Vec3 l = k.a + bvp.mu / (k.radius * k.radius * k.radius) * k.r;
    if (!bvp.perturbations.empty()) {
      l -= R.transpose() * total_accel(bvp.perturbations, R * k.r, R * k.v, grid.t[i]);
    }
    loss.segment<3>(3 * i) = l;
  }
  return loss;
}

Eigen::VectorXd residual(const Coefficients& xi, const BoundaryValueProblem& bvp,
                         const TransferFrame& frame, const BasisSpec& spec,
                         std::span<const double> nodes) {
  return residual(xi, bvp, frame, CollocationGrid::build(spec, nodes));
}

Eigen::MatrixXd jacobian(const Coefficients& xi, const BoundaryValueProblem& bvp,
                         const TransferFrame& frame, const CollocationGrid& grid) {
  check_grid(xi, grid);
  const BoundaryValues b = boundary_values(bvp, frame);
  const Mat3& R = frame.rotation;
  const double r_min = radius_floor(bvp);
  const double mu = bvp.mu;
  const int n = grid.rows();
  const int m = static_cast<int>(grid.phi.cols());
  const bool perturbed = !bvp.perturbations.empty();
  const Vec3 e_h = Vec3::UnitZ();

  Eigen::MatrixXd jac(3 * n, 3 * m);
  Eigen::Matrix<double, 3, Eigen::Dynamic> dr(3, m), dv(3, m), da(3, m);

  for (int i = 0; i < n; ++i) {
    const Eigen::RowVectorXd phi = grid.phi.row(i);
    const Eigen::RowVectorXd dphi = grid.dphi.row(i);
    const Eigen::RowVectorXd d2phi = grid.d2phi.row(i);
    const VariableState vs =
        variables_from(xi, b, phi.transpose(), dphi.transpose(), d2phi.transpose(), grid.tau[i]);
    const KinematicState k = frame_kinematics(vs);
    const double r = k.radius;
    if (!(r >= r_min)) {
      throw Error(ErrorCode::degenerate_radius, "trajectory passes through the primary center");
    }

    const double c = std::cos(vs.theta);
    const double s = std::sin(vs.theta);
    const Vec3 e_rho(c, s, 0.0);
    const Vec3 e_theta(-s, c, 0.0);
    const double a_rho = vs.d2p - vs.p * vs.dtheta * vs.dtheta;
    const double a_theta = 2.0 * vs.dp * vs.dtheta + vs.p * vs.d2theta;

    const double mu_r3 = mu / (r * r * r);
    const Vec3 grav_radial = 3.0 * mu / (r * r * r * r) * k.r;  // 3 mu r / |r|^4

    Mat3 g_r = Mat3::Zero();
    Mat3 g_v = Mat3::Zero();
    if (perturbed) {
      const Vec3 r_in = R * k.r;
      const Vec3 v_in = R * k.v;
      g_r = R.transpose() * total_jac_r(bvp.perturbations, r_in, v_in, grid.t[i]) * R;
      g_v = R.transpose() * total_jac_v(bvp.perturbations, r_in, v_in, grid.t[i]) * R;
    }

    auto assemble = [&](int block, const Eigen::RowVectorXd* dradius) {
      Eigen::Matrix<double, 3, Eigen::Dynamic> dl = da + mu_r3 * dr;
      if (dradius != nullptr) dl -= grav_radial * (*dradius);
      if (perturbed) dl -= g_r * dr + g_v * dv;
      jac.block(3 * i, block * m, 3, m) = dl;
    };

    // xi_p
    dr = e_rho * phi;
    dv = e_rho * dphi + (vs.dtheta * e_theta) * phi;
    da = e_rho * (d2phi - vs.dtheta * vs.dtheta * phi) +
         e_theta * (2.0 * vs.dtheta * dphi + vs.d2theta * phi);
    const Eigen::RowVectorXd dradius_p = (vs.p / r) * phi;
    assemble(0, &dradius_p);

    // xi_theta: |r| does not depend on theta.
    dr = (vs.p * e_theta) * phi;
    dv = (vs.dp * e_theta - vs.p * vs.dtheta * e_rho) * phi + (vs.p * e_theta) * dphi;
    da = e_rho * (-2.0 * vs.p * vs.dtheta * dphi) +
         e_theta * (2.0 * vs.dp * dphi + vs.p * d2phi) +
         (a_rho * e_theta - a_theta * e_rho) * phi;
    assemble(1, nullptr);

    // xi_h
    dr = e_h * phi;
    dv = e_h * dphi;
    da = e_h * d2phi;
    const Eigen::RowVectorXd dradius_h = (vs.h / r) * phi;
    assemble(2, &dradius_h);
  }
  return jac;
}

Eigen::MatrixXd jacobian(const Coefficients& xi, const BoundaryValueProblem& bvp,
                         const TransferFrame& frame, const BasisSpec& spec,
                         std::span<const double> nodes) {
  return jacobian(xi, bvp, frame, CollocationGrid::build(spec, nodes));
}

}  // namespace tfc
