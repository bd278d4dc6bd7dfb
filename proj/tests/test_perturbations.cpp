#include "oracles.hpp"

#include "tfc/perturbations.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

using namespace tfc;
using tfc::test::Gen;

namespace {

constexpr double kAu = 1.495978707e8;

ThirdBodyParams moon() { return ThirdBodyParams{4902.800066, moon_ephemeris()}; }

SrpParams sail(const Vec3& normal) {
  SrpParams p;
  p.area = 20000.0;
  p.mass = 5.0;
  p.rho_a = 0.1;
  p.rho_s = 0.8;
  p.rho_d = 0.1;
  p.normal = normal;
  return p;
}

}  // namespace

TEST_CASE("j2 on the equator and at the pole") {
  const J2Params p;
  const Vec3 eq = accel_j2(p, Vec3(p.r_eq, 0.0, 0.0));
  const double k = 1.5 * p.j2 * p.mu / (p.r_eq * p.r_eq);
  CHECK(eq.x() == doctest::Approx(-k));
  CHECK(eq.y() == 0.0);
  CHECK(eq.z() == 0.0);
  const Vec3 pole = accel_j2(p, Vec3(0.0, 0.0, p.r_eq));
  CHECK(pole.x() == 0.0);
  CHECK(pole.y() == 0.0);
  CHECK(pole.z() == doctest::Approx(3.0 * p.j2 * p.mu / (p.r_eq * p.r_eq)));
}

TEST_CASE("j2 scales linearly with its multiplier") {
  Gen gen(41);
  J2Params one, ten;
  ten.scale = 10.0;
  for (int i = 0; i < 20; ++i) {
    const Vec3 r = gen.uniform(6600.0, 40000.0) * gen.unit_vector();
    CHECK((accel_j2(ten, r) - 10.0 * accel_j2(one, r)).norm() <= 1e-15 * accel_j2(ten, r).norm());
  }
}

TEST_CASE("j2 jacobian matches finite differences over 100 states") {
  Gen gen(42);
  const J2Params p;
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const Vec3 r = gen.uniform(6600.0, 50000.0) * gen.unit_vector();
    const Mat3 fd = test::fd_jacobian3([&](const Vec3& x) { return accel_j2(p, x); }, r, 1e-3);
    worst = std::max(worst, test::rel_error(jac_r_j2(p, r), fd));
  }
  CHECK(worst <= 1e-6);
}

TEST_CASE("third body vanishes at the primary") {
  const auto p = moon();
  for (double t : {0.0, 1e4, 3e5}) CHECK(accel_third_body(p, Vec3::Zero(), t).norm() <= 1e-25);
}

TEST_CASE("third body pulls toward the moon between the bodies") {
  const auto p = moon();
  Gen gen(43);
  for (int i = 0; i < 20; ++i) {
    const double t = gen.uniform(0.0, 3e6);
    const Vec3 rm = p.ephemeris(t);
    const Vec3 r = gen.uniform(0.05, 0.95) * rm;
    CHECK(accel_third_body(p, r, t).dot(rm.normalized()) > 0.0);
    CHECK(accel_third_body(p, r, t).cross(rm).norm() <= 1e-10 * accel_third_body(p, r, t).norm() * rm.norm());
  }
}

TEST_CASE("third body jacobian matches finite differences") {
  const auto p = moon();
  Gen gen(44);
  double worst = 0.0;
  // Cislunar mid-arc state plus random states away from both bodies.
  std::vector<std::pair<Vec3, double>> states{{Vec3(150000.0, 100000.0, 0.0), 35.0 * 3600.0}};
  for (int i = 0; i < 100; ++i) {
    const double t = gen.uniform(0.0, 3e5);
    Vec3 r = gen.uniform(7000.0, 350000.0) * gen.unit_vector();
    if ((r - p.ephemeris(t)).norm() < 20000.0) r *= 0.5;
    states.emplace_back(r, t);
  }
  for (const auto& [r, t] : states) {
    const Mat3 fd = test::fd_jacobian3([&](const Vec3& x) { return accel_third_body(p, x, t); }, r, 1.0);
    worst = std::max(worst, test::rel_error(jac_r_third_body(p, r, t), fd));
  }
  CHECK(worst <= 1e-6);
}

TEST_CASE("moon ephemeris") {
  const auto eph = moon_ephemeris();
  const Vec3 start = eph(0.0);
  CHECK(start.x() == doctest::Approx(384000.0));
  CHECK(std::abs(start.y()) <= 1e-9);
  CHECK(start.z() == 0.0);
  const Vec3 quarter = eph(eph.period() / 4.0);
  CHECK(std::abs(quarter.x()) <= 1e-6);
  CHECK(quarter.y() == doctest::Approx(384000.0));
  Gen gen(45);
  for (int i = 0; i < 50; ++i) CHECK(eph(gen.uniform(0.0, 1e7)).norm() == doctest::Approx(384000.0).epsilon(1e-14));
  const double mean_motion = std::sqrt((398600.4418 + 4902.800066) / std::pow(384000.0, 3));
  CHECK(2 * std::numbers::pi / eph.period() == doctest::Approx(mean_motion).epsilon(1e-2));
}

TEST_CASE("tabulated ephemeris interpolates and reads csv") {
  const auto dir = std::filesystem::temp_directory_path() / "tfc_ephem_test";
  std::filesystem::create_directories(dir);
  const auto path = dir / "moon.csv";
  {
    std::ofstream out(path);
    out << "t_sec,x_km,y_km,z_km\n0,384000,0,0\n100,0,384000,0\n200,-384000,0,10\n";
  }
  const auto table = TabulatedEphemeris::from_csv(path.string());
  CHECK((table(50.0) - Vec3(192000.0, 192000.0, 0.0)).norm() <= 1e-9);
  CHECK((table(200.0) - Vec3(-384000.0, 0.0, 10.0)).norm() <= 1e-9);
  CHECK_THROWS_AS((void)table(250.0), Error);
  CHECK_THROWS_AS((void)TabulatedEphemeris::from_csv((dir / "missing.csv").string()), Error);
}

TEST_CASE("srp vanishes when the sail is edge-on") {
  const Vec3 r(kAu, 0.0, 0.0);
  const auto p = sail(Vec3::UnitY());
  CHECK(accel_srp(p, r, 0.0).norm() == 0.0);
}

TEST_CASE("pure specular reflection face-on doubles the pressure") {
  SrpParams p;
  p.area = 20000.0;
  p.mass = 5.0;
  p.rho_a = 0.0;
  p.rho_s = 1.0;
  p.rho_d = 0.0;
  p.normal = Vec3::UnitX();
  const Vec3 a = accel_srp(p, Vec3(kAu, 0.0, 0.0), 0.0);
  const double want = 2.0 * p.pressure * p.area / p.mass / p.meters_per_length_unit;
  CHECK(a.x() == doctest::Approx(want));
  CHECK(a.y() == 0.0);
  CHECK(a.z() == 0.0);
}

TEST_CASE("srp jacobian matches finite differences") {
  Gen gen(46);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const auto p = sail(i < 50 ? Vec3::UnitX() : gen.unit_vector());
    Vec3 r = gen.uniform(0.5, 1.5) * kAu * gen.unit_vector();
    // Keep the Sun on the lit side so the state is away from the n.s = 0 fold.
    if (p.normal.dot(r.normalized()) < 0.2) r = r - 2.0 * r.dot(p.normal) * p.normal;
    if (std::abs(p.normal.dot(r.normalized())) < 0.2) continue;
    const Mat3 fd = test::fd_jacobian3([&](const Vec3& x) { return accel_srp(p, x, 0.0); }, r, 10.0);
    worst = std::max(worst, test::rel_error(jac_r_srp(p, r, 0.0), fd));
  }
  CHECK(worst <= 1e-5);
}

TEST_CASE("srp validation") {
  auto p = sail(Vec3::UnitX());
  p.rho_a = -0.1;
  CHECK_THROWS_AS(SrpModel{p}, Error);
  p = sail(Vec3(2.0, 0.0, 0.0));
  CHECK_THROWS_AS(SrpModel{p}, Error);
  p = sail(Vec3::UnitX());
  p.rho_s = 0.9;  // sums to 1.1: accepted with a warning
  CHECK_NOTHROW(SrpModel{p});
}

TEST_CASE("model set sums accelerations exactly") {
  Gen gen(47);
  ModelSet set{std::make_shared<J2Model>(J2Params{}), std::make_shared<ThirdBodyModel>(moon())};
  for (int i = 0; i < 20; ++i) {
    const Vec3 r = gen.uniform(7000.0, 300000.0) * gen.unit_vector();
    const double t = gen.uniform(0.0, 1e5);
    const Vec3 sum = set[0]->accel(r, Vec3::Zero(), t) + set[1]->accel(r, Vec3::Zero(), t);
    CHECK(total_accel(set, r, Vec3::Zero(), t) == sum);
    const Mat3 jac = set[0]->jac_r(r, Vec3::Zero(), t) + set[1]->jac_r(r, Vec3::Zero(), t);
    CHECK(total_jac_r(set, r, Vec3::Zero(), t) == jac);
    CHECK(total_jac_v(set, r, Vec3::Zero(), t) == Mat3::Zero());
  }
  CHECK(total_accel({}, Vec3::UnitX(), Vec3::Zero(), 0.0) == Vec3::Zero());
}

TEST_CASE("scaled model is the dimensional model in canonical units") {
  const double lu = 8378.0;
  const double tu = std::sqrt(lu * lu * lu / 398600.4418);
  const auto inner = std::make_shared<ThirdBodyModel>(moon());
  const ScaledModel scaled(inner, lu, tu);
  const Vec3 r(1.3, -0.4, 0.2);
  const double t = 2.5;
  const Vec3 want = inner->accel(r * lu, Vec3::Zero(), t * tu) * (tu * tu / lu);
  CHECK((scaled.accel(r, Vec3::Zero(), t) - want).norm() <= 1e-14 * want.norm());
  const Mat3 fd = test::fd_jacobian3([&](const Vec3& x) { return scaled.accel(x, Vec3::Zero(), t); }, r, 1e-5);
  CHECK(test::rel_error(scaled.jac_r(r, Vec3::Zero(), t), fd) <= 1e-6);
  CHECK(scaled.name() == "third_body");
}
