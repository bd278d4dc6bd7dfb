#include "oracles.hpp"

#include "tfc/functionals.hpp"
#include "tfc/perturbations.hpp"
#include "tfc/solver.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace tfc;
using tfc::test::Gen;

namespace {

constexpr double kPi = std::numbers::pi;

BoundaryValueProblem quarter_circle() {
  BoundaryValueProblem bvp;
  bvp.mu = 1.0;
  bvp.r0 = Vec3::UnitX();
  bvp.rf = Vec3::UnitY();
  bvp.tof = kPi / 2.0;
  return bvp;
}

struct Setup {
  BoundaryValueProblem bvp;
  TransferFrame frame;
  BasisSpec spec;
  CollocationGrid grid;
};

Setup setup(const BoundaryValueProblem& bvp, int degree, int n_points,
            BasisKind kind = BasisKind::legendre()) {
  Setup s{bvp, build_frame(bvp.r0, bvp.rf, bvp.long_way), {}, {}};
  s.spec = make_basis_spec(bvp, s.frame, kind, degree);
  const auto nodes = cgl_nodes(n_points);
  s.grid = CollocationGrid::build(s.spec, nodes);
  return s;
}

/// Nondimensional versions of the three perturbed scenarios.
BoundaryValueProblem scaled(const BoundaryValueProblem& bvp) {
  return scale_problem(bvp, make_scaling(bvp, true));
}

BoundaryValueProblem j2_problem() {
  BoundaryValueProblem bvp;
  bvp.mu = test::kMuEarth;
  bvp.r0 = Vec3(6658.0, 0.0, 0.0);
  bvp.rf = test::meo_geo_rf(150.0, 15000.0);
  bvp.tof = 4600.0;
  bvp.perturbations = {std::make_shared<J2Model>(J2Params{})};
  return bvp;
}

BoundaryValueProblem cislunar_problem() {
  BoundaryValueProblem bvp;
  bvp.mu = test::kMuEarth;
  bvp.r0 = Vec3(0.0, -42164.0, 0.0);
  bvp.rf = Vec3(291644.0, 247332.0, 0.0);
  bvp.tof = 70.0 * 3600.0;
  bvp.perturbations = {std::make_shared<ThirdBodyModel>(ThirdBodyParams{4902.800066, moon_ephemeris()})};
  return bvp;
}

BoundaryValueProblem srp_problem() {
  constexpr double au = 1.495978707e8;
  BoundaryValueProblem bvp;
  bvp.mu = 1.32712440018e11;
  bvp.r0 = Vec3(au, 0.0, 0.0);
  bvp.rf = 0.723 * au * Vec3(std::cos(2 * kPi / 3), std::sin(2 * kPi / 3), 0.0);
  bvp.tof = 180.0 * 86400.0;
  SrpParams srp;
  srp.area = 20000.0;
  srp.mass = 5.0;
  srp.rho_a = 0.1;
  srp.rho_s = 0.8;
  srp.rho_d = 0.1;
  bvp.perturbations = {std::make_shared<SrpModel>(srp)};
  return bvp;
}

}  // namespace

TEST_CASE("transfer frame for x to y") {
  const auto f = build_frame(Vec3::UnitX(), Vec3::UnitY(), false);
  CHECK((f.h_hat - Vec3::UnitZ()).norm() <= 1e-15);
  CHECK((f.t_hat - Vec3::UnitY()).norm() <= 1e-15);
  CHECK(f.theta_r == doctest::Approx(kPi / 2));
  CHECK((f.rotation - Mat3::Identity()).norm() <= 1e-15);
}

TEST_CASE("transfer frame long way") {
  const auto f = build_frame(Vec3::UnitX(), Vec3::UnitY(), true);
  CHECK(f.theta_r == doctest::Approx(3 * kPi / 2));
  CHECK((f.h_hat + Vec3::UnitZ()).norm() <= 1e-15);
}

TEST_CASE("collinear boundaries are singular") {
  for (const Vec3 rf : {Vec3(1, 0, 0), Vec3(2, 0, 0), Vec3(-3, 0, 0)}) {
    try {
      (void)build_frame(Vec3::UnitX(), rf, false);
      FAIL("expected singular geometry");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::singular_geometry);
    }
  }
}

TEST_CASE("transfer frame is orthonormal and right handed") {
  Gen gen(21);
  for (int trial = 0; trial < 100; ++trial) {
    const auto bvp = gen.geometry();
    const auto f = build_frame(bvp.r0, bvp.rf, false);
    CHECK((f.rotation.transpose() * f.rotation - Mat3::Identity()).norm() <= 1e-14);
    CHECK(f.rotation.determinant() == doctest::Approx(1.0));
    CHECK((f.r_hat.cross(f.t_hat) - f.h_hat).norm() <= 1e-14);
    CHECK(std::cos(f.theta_r) == doctest::Approx(bvp.r0.normalized().dot(bvp.rf.normalized())));
  }
}

TEST_CASE("mean frequency") {
  CHECK(mean_frequency(2 * kPi / 3, 0, 9000.0) == doctest::Approx(2 * kPi / 27000.0));
  CHECK(mean_frequency(kPi / 2, 1, 7.0) == doctest::Approx((2 * kPi + kPi / 2) / 7.0));
  CHECK(mean_frequency(1e-12, 0, 5.0) <= 1e-12);
}

TEST_CASE("zero coefficients give affine variables") {
  Gen gen(7);
  for (int trial = 0; trial < 20; ++trial) {
    auto bvp = gen.geometry();
    const auto s = setup(bvp, 12, 40);
    const auto xi = Coefficients::zeros(s.spec.size());
    for (double z : {-1.0, -0.3, 0.0, 0.55, 1.0}) {
      const auto vs = eval_variables(xi, bvp, s.frame, s.spec, z);
      const double tau = (z + 1.0) / 2.0;
      CHECK(vs.p == doctest::Approx((1 - tau) * bvp.r0.norm() + tau * bvp.rf.norm()));
      CHECK(std::abs(vs.theta - tau * s.frame.theta_r) <= 1e-14);
      CHECK(vs.h == 0.0);
      CHECK(std::abs(vs.dp - (bvp.rf.norm() - bvp.r0.norm()) / bvp.tof) <= 1e-13);
      CHECK(vs.dtheta == doctest::Approx(s.frame.theta_r / bvp.tof));
      CHECK(std::abs(vs.d2p) <= 1e-12);
      CHECK(std::abs(vs.d2theta) <= 1e-12);
      CHECK(vs.d2h == 0.0);
    }
  }
}

TEST_CASE("random coefficients meet the boundary values exactly") {
  Gen gen(8);
  for (int trial = 0; trial < 50; ++trial) {
    auto bvp = gen.geometry();
    bvp.revolutions = gen.integer(0, 2);
    const auto s = setup(bvp, gen.integer(2, 40), 60);
    const auto xi = gen.coefficients(s.spec.size(), -10.0, 10.0);
    const auto start = eval_variables(xi, bvp, s.frame, s.spec, -1.0);
    const auto end = eval_variables(xi, bvp, s.frame, s.spec, 1.0);
    CHECK(start.p == doctest::Approx(bvp.r0.norm()).epsilon(1e-14));
    CHECK(std::abs(start.theta) <= 1e-13);
    CHECK(std::abs(start.h) <= 1e-13);
    CHECK(end.theta == doctest::Approx(s.frame.theta_r + 2 * kPi * bvp.revolutions).epsilon(1e-13));
  }
}

TEST_CASE("variable rates match finite differences in time") {
  Gen gen(9);
  for (int trial = 0; trial < 20; ++trial) {
    const auto bvp = gen.geometry();
    const auto s = setup(bvp, gen.integer(5, 25), 40);
    const auto xi = gen.coefficients(s.spec.size(), -0.5, 0.5);
    const TimeMap map(bvp.tof);
    const double t = gen.uniform(0.1, 0.9) * bvp.tof;
    const double h = 1e-6 * bvp.tof;
    const auto mid = eval_variables(xi, bvp, s.frame, s.spec, map.to_z(t));
    const auto hi = eval_variables(xi, bvp, s.frame, s.spec, map.to_z(t + h));
    const auto lo = eval_variables(xi, bvp, s.frame, s.spec, map.to_z(t - h));
    auto check = [&](double analytic, double plus, double minus, double scale) {
      CHECK(std::abs(analytic - (plus - minus) / (2 * h)) <= 1e-6 * std::max(1.0, scale));
    };
    check(mid.dp, hi.p, lo.p, std::abs(mid.dp));
    check(mid.dtheta, hi.theta, lo.theta, std::abs(mid.dtheta));
    check(mid.dh, hi.h, lo.h, std::abs(mid.dh));
    check(mid.d2p, hi.dp, lo.dp, std::abs(mid.d2p));
    check(mid.d2theta, hi.dtheta, lo.dtheta, std::abs(mid.d2theta));
    check(mid.d2h, hi.dh, lo.dh, std::abs(mid.d2h));
  }
}

TEST_CASE("state reconstruction at simple angles") {
  const TransferFrame f = build_frame(Vec3(0, 2, 0), Vec3(-1, 0, 0), false);
  VariableState vs;
  vs.p = 1.0;
  CHECK((reconstruct_state(vs, f).r - f.r_hat).norm() <= 1e-15);
  vs.theta = kPi / 2;
  CHECK((reconstruct_state(vs, f).r - f.t_hat).norm() <= 1e-15);
  vs.h = 0.5;
  CHECK(reconstruct_state(vs, f).radius == doctest::Approx(std::sqrt(1.25)));
}

TEST_CASE("reconstructed velocity and acceleration match finite differences") {
  Gen gen(10);
  for (int trial = 0; trial < 20; ++trial) {
    const auto bvp = gen.geometry();
    const auto s = setup(bvp, gen.integer(5, 25), 40);
    const auto xi = gen.coefficients(s.spec.size(), -0.5, 0.5);
    const TimeMap map(bvp.tof);
    const double t = gen.uniform(0.1, 0.9) * bvp.tof;
    const double h = 1e-5 * bvp.tof;
    auto state = [&](double tt) {
      return reconstruct_state(eval_variables(xi, bvp, s.frame, s.spec, map.to_z(tt)), s.frame);
    };
    const auto mid = state(t);
    const auto hi = state(t + h);
    const auto lo = state(t - h);
    const Vec3 v_fd = (hi.r - lo.r) / (2 * h);
    const Vec3 a_fd = (hi.r - 2 * mid.r + lo.r) / (h * h);
    CHECK((mid.v - v_fd).norm() <= 1e-5 * std::max(1.0, mid.v.norm()));
    CHECK((mid.a - a_fd).norm() <= 1e-5 * std::max(1.0, mid.a.norm()));
  }
}

TEST_CASE("boundary embedding over 1000 random coefficient vectors") {
  Gen gen(2024);
  double worst = 0.0;
  for (int g = 0; g < 10; ++g) {
    auto bvp = gen.geometry();
    bvp.revolutions = g % 3;
    const auto s = setup(bvp, gen.integer(5, 40), 50);
    for (int trial = 0; trial < 100; ++trial) {
      const auto xi = gen.coefficients(s.spec.size(), -10.0, 10.0);
      const auto r0 = reconstruct_state(eval_variables(xi, bvp, s.frame, s.spec, -1.0), s.frame).r;
      const auto rf = reconstruct_state(eval_variables(xi, bvp, s.frame, s.spec, 1.0), s.frame).r;
      worst = std::max({worst, (r0 - bvp.r0).norm() / bvp.r0.norm(), (rf - bvp.rf).norm() / bvp.rf.norm()});
    }
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("circular arc fit gives zero coefficients and tiny residual") {
  const auto bvp = quarter_circle();
  const auto s = setup(bvp, 15, 100);
  std::vector<PositionSample> samples;
  for (int i = 0; i <= 200; ++i) {
    const double t = bvp.tof * i / 200.0;
    samples.push_back({t, Vec3(std::cos(t), std::sin(t), 0.0)});
  }
  const auto xi = warm_start_fit(samples, bvp, s.frame, s.spec);
  CHECK(xi.stacked().norm() <= 1e-10);
  CHECK(residual(xi, bvp, s.frame, s.grid).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("fit of an inclined circular arc reproduces the samples") {
  // Radius 2 orbit in a tilted plane; the circular solution is exact at
  // zero coefficients, so the residual must vanish after the fit.
  BoundaryValueProblem bvp;
  const Mat3 tilt = Eigen::AngleAxisd(0.7, Vec3(1, 1, 0).normalized()).toRotationMatrix();
  const double rate = std::sqrt(1.0 / 8.0);
  auto pos = [&](double t) { return Vec3(tilt * (2.0 * Vec3(std::cos(rate * t), std::sin(rate * t), 0.0))); };
  bvp.r0 = pos(0.0);
  bvp.tof = 2.0 / rate;
  bvp.rf = pos(bvp.tof);
  const auto s = setup(bvp, 20, 80);
  std::vector<PositionSample> samples;
  for (int i = 0; i <= 100; ++i) samples.push_back({bvp.tof * i / 100.0, pos(bvp.tof * i / 100.0)});
  const auto xi = warm_start_fit(samples, bvp, s.frame, s.spec);
  CHECK(residual(xi, bvp, s.frame, s.grid).cwiseAbs().maxCoeff() <= 1e-9);
  for (const auto& sample : samples) {
    const auto r = reconstruct_state(eval_variables(xi, bvp, s.frame, s.spec, TimeMap(bvp.tof).to_z(sample.t)), s.frame).r;
    CHECK((r - sample.r).norm() <= 1e-10);
  }
}

TEST_CASE("linear guess violates the dynamics at the first node") {
  const auto bvp = quarter_circle();
  const auto s = setup(bvp, 10, 20);
  const auto loss = residual(Coefficients::zeros(s.spec.size()), bvp, s.frame, s.grid);
  CHECK(loss.segment<3>(0).norm() <= 1e-14);
  // Straight-line radius at constant angular rate is the circular orbit here;
  // an elliptical target makes the linear guess wrong.
  auto ellipse = bvp;
  ellipse.rf = Vec3(0.0, 1.5, 0.0);
  const auto e = setup(ellipse, 10, 20);
  const auto bad = residual(Coefficients::zeros(e.spec.size()), ellipse, e.frame, e.grid);
  CHECK(bad.segment<3>(0).norm() > 1e-3);
}

TEST_CASE("residual without perturbation equals the two-body defect") {
  Gen gen(12);
  const auto bvp = gen.geometry();
  const auto s = setup(bvp, 12, 30);
  const auto xi = gen.coefficients(s.spec.size(), -0.3, 0.3);
  const auto loss = residual(xi, bvp, s.frame, s.grid);
  for (int i = 0; i < s.grid.rows(); ++i) {
    const auto k = reconstruct_state(eval_variables(xi, bvp, s.frame, s.grid, i), s.frame);
    const Vec3 defect = s.frame.rotation.transpose() * (k.a + bvp.mu * k.r / std::pow(k.r.norm(), 3));
    CHECK((loss.segment<3>(3 * i) - defect).norm() <= 1e-12 * std::max(1.0, defect.norm()));
  }
  // An explicit zero-acceleration model changes nothing.
  struct Zero final : PerturbationModel {
    Vec3 accel(const Vec3&, const Vec3&, double) const override { return Vec3::Zero(); }
    Mat3 jac_r(const Vec3&, const Vec3&, double) const override { return Mat3::Zero(); }
    std::string name() const override { return "zero"; }
  };
  auto with_zero = bvp;
  with_zero.perturbations = {std::make_shared<Zero>()};
  CHECK(residual(xi, with_zero, s.frame, s.grid) == loss);
}

TEST_CASE("analytic jacobian matches finite differences") {
  Gen gen(13);
  const std::vector<std::pair<const char*, BoundaryValueProblem>> cases{
      {"unperturbed", gen.geometry()},
      {"j2", scaled(j2_problem())},
      {"third body", scaled(cislunar_problem())},
      {"srp", scaled(srp_problem())},
  };
  for (const auto& [label, bvp] : cases) {
    CAPTURE(label);
    const auto s = setup(bvp, 12, 30);
    for (int trial = 0; trial < 5; ++trial) {
      const Eigen::VectorXd x = gen.vector(3 * s.spec.size(), -0.05, 0.05);
      auto f = [&](const Eigen::VectorXd& y) {
        return residual(Coefficients::from_stacked(y), bvp, s.frame, s.grid);
      };
      const Eigen::MatrixXd fd = test::fd_jacobian(f, x, 1e-7);
      const Eigen::MatrixXd jac = jacobian(Coefficients::from_stacked(x), bvp, s.frame, s.grid);
      CHECK(test::rel_error(jac, fd) <= 1e-5);
    }
  }
}

TEST_CASE("angle columns carry no radius-derivative gravity term") {
  // Doubling mu changes the angle block only by (1/|r|^3) d r / d xi_theta,
  // so the -3 mu r / |r|^4 d|r| / d xi_theta term is absent.
  Gen gen(14);
  auto bvp = gen.geometry();
  const auto s = setup(bvp, 10, 25);
  const auto xi = gen.coefficients(s.spec.size(), -0.2, 0.2);
  const int m = s.spec.size();
  const Eigen::MatrixXd j1 = jacobian(xi, bvp, s.frame, s.grid);
  auto heavy = bvp;
  heavy.mu *= 2.0;
  const Eigen::MatrixXd j2 = jacobian(xi, heavy, s.frame, s.grid);
  for (int i = 0; i < s.grid.rows(); ++i) {
    const auto vs = eval_variables(xi, bvp, s.frame, s.grid, i);
    const double rho = std::hypot(vs.p, vs.h);
    const Eigen::Vector3d dr(-vs.p * std::sin(vs.theta), vs.p * std::cos(vs.theta), 0.0);
    const Eigen::MatrixXd want = bvp.mu / std::pow(rho, 3) * dr * s.grid.phi.row(i);
    const Eigen::MatrixXd got = j2.block(3 * i, m, 3, m) - j1.block(3 * i, m, 3, m);
    CHECK((got - want).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, want.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("meo-geo jacobian at zero coefficients has full column rank") {
  BoundaryValueProblem bvp;
  bvp.mu = test::kMuEarth;
  bvp.r0 = test::kMeoR0;
  bvp.rf = test::meo_geo_rf();
  bvp.tof = 2.5 * 3600.0;
  const auto nd = scaled(bvp);
  const auto s = setup(nd, 20, 200);
  const Eigen::MatrixXd jac = jacobian(Coefficients::zeros(s.spec.size()), nd, s.frame, s.grid);
  CHECK(jac.allFinite());
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(jac);
  qr.setThreshold(1e-13);
  CAPTURE(qr.rank());
  CHECK(qr.rank() >= jac.cols() - 6);
}

TEST_CASE("collocation grid switching terms") {
  const BasisSpec spec{BasisKind::chebyshev(), 8, 0.4, 3.0};
  const auto nodes = cgl_nodes(12);
  const auto grid = CollocationGrid::build(spec, nodes);
  CHECK(grid.phi.row(0).cwiseAbs().maxCoeff() <= 1e-15);
  CHECK(grid.phi.row(11).cwiseAbs().maxCoeff() <= 1e-15);
  CHECK(grid.t(0) == 0.0);
  CHECK(grid.t(11) == doctest::Approx(3.0));
  CHECK(grid.tau(5) == doctest::Approx((nodes[5] + 1) / 2));
}
