#pragma once

#include "tfc/types.hpp"

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace tfc {

/// Inertial position of a body (or the Sun) as a function of time since
/// departure.
using Ephemeris = std::function<Vec3(double)>;

/// Perturbing acceleration a_p(r, v, t) with analytic Jacobians in position
/// and velocity. All quantities are inertial and expressed in the units the
/// model was built with.
class PerturbationModel {
 public:
  virtual ~PerturbationModel() = default;

  [[nodiscard]] virtual Vec3 accel(const Vec3& r, const Vec3& v, double t) const = 0;
  [[nodiscard]] virtual Mat3 jac_r(const Vec3& r, const Vec3& v, double t) const = 0;
  [[nodiscard]] virtual Mat3 jac_v(const Vec3& r, const Vec3& v, double t) const;
  [[nodiscard]] virtual std::string name() const = 0;
};

using ModelPtr = std::shared_ptr<const PerturbationModel>;
using ModelSet = std::vector<ModelPtr>;

[[nodiscard]] Vec3 total_accel(const ModelSet& models, const Vec3& r, const Vec3& v, double t);
[[nodiscard]] Mat3 total_jac_r(const ModelSet& models, const Vec3& r, const Vec3& v, double t);
[[nodiscard]] Mat3 total_jac_v(const ModelSet& models, const Vec3& r, const Vec3& v, double t);

// ---------------------------------------------------------------------------
// Earth oblateness

struct J2Params {
  double j2 = 1.082629e-3;
  double r_eq = 6378.137;  // km
  double mu = 398600.4418;  // km^3/s^2
  double scale = 1.0;
};

class J2Model final : public PerturbationModel {
 public:
  explicit J2Model(J2Params params);

  [[nodiscard]] Vec3 accel(const Vec3& r, const Vec3& v, double t) const override;
  [[nodiscard]] Mat3 jac_r(const Vec3& r, const Vec3& v, double t) const override;
  [[nodiscard]] std::string name() const override { return "j2"; }

  [[nodiscard]] const J2Params& params() const noexcept { return params_; }

 private:
  J2Params params_;
};

[[nodiscard]] Vec3 accel_j2(const J2Params& params, const Vec3& r);
[[nodiscard]] Mat3 jac_r_j2(const J2Params& params, const Vec3& r);

// ---------------------------------------------------------------------------
// Third body

struct ThirdBodyParams {
  double mu3b = 4902.800066;  // km^3/s^2 (Moon)
  Ephemeris ephemeris;
};

class ThirdBodyModel final : public PerturbationModel {
 public:
  explicit ThirdBodyModel(ThirdBodyParams params);

  [[nodiscard]] Vec3 accel(const Vec3& r, const Vec3& v, double t) const override;
  [[nodiscard]] Mat3 jac_r(const Vec3& r, const Vec3& v, double t) const override;
  [[nodiscard]] std::string name() const override { return "third_body"; }

 private:
  ThirdBodyParams params_;
};

[[nodiscard]] Vec3 accel_third_body(const ThirdBodyParams& params, const Vec3& r, double t);
[[nodiscard]] Mat3 jac_r_third_body(const ThirdBodyParams& params, const Vec3& r, double t);

/// Circular prograde equatorial orbit, phase zero on +x at t = 0.
class CircularEphemeris {
 public:
  CircularEphemeris(double radius, double mu_primary);

  Vec3 operator()(double t) const;
  [[nodiscard]] double period() const noexcept;

 private:
  double radius_;
  double rate_;
};

/// Default Moon: 384,000 km circular orbit about the Earth.
[[nodiscard]] CircularEphemeris moon_ephemeris(double mu_earth = 398600.4418);

/// Piecewise-linear ephemeris from samples sorted by time.
class TabulatedEphemeris {
 public:
  TabulatedEphemeris(std::vector<double> times, std::vector<Vec3> positions);

  /// CSV with header and columns t_sec, x_km, y_km, z_km.
  static TabulatedEphemeris from_csv(const std::string& path);

  Vec3 operator()(double t) const;

 private:
  std::vector<double> times_;
  std::vector<Vec3> positions_;
};

// ---------------------------------------------------------------------------
// Solar radiation pressure

struct SrpParams {
  double pressure = 4.57e-6;  // N/m^2
  double area = 1.0;          // m^2
  double mass = 1.0;          // kg
  double rho_a = 0.0;
  double rho_s = 1.0;
  double rho_d = 0.0;
  Vec3 normal = Vec3::UnitX();
  /// Sun position in the problem frame; defaults to the origin.
  Ephemeris sun_position;
  /// Converts the m/s^2 of pressure*area/mass into problem length units.
  double meters_per_length_unit = 1000.0;
};

class SrpModel final : public PerturbationModel {
 public:
  /// Throws on negative reflectivities or a non-unit normal; a reflectivity
  /// sum away from one is accepted with a warning on stderr.
  explicit SrpModel(SrpParams params);

  [[nodiscard]] Vec3 accel(const Vec3& r, const Vec3& v, double t) const override;
  [[nodiscard]] Mat3 jac_r(const Vec3& r, const Vec3& v, double t) const override;
  [[nodiscard]] std::string name() const override { return "srp"; }

 private:
  SrpParams params_;
};

[[nodiscard]] Vec3 accel_srp(const SrpParams& params, const Vec3& r, double t);
[[nodiscard]] Mat3 jac_r_srp(const SrpParams& params, const Vec3& r, double t);

// ---------------------------------------------------------------------------

/// Wraps a dimensional model for use in scaled units where lengths are
/// divided by `length_unit` and times by `time_unit`.
class ScaledModel final : public PerturbationModel {
 public:
  ScaledModel(ModelPtr inner, double length_unit, double time_unit);

  [[nodiscard]] Vec3 accel(const Vec3& r, const Vec3& v, double t) const override;
  [[nodiscard]] Mat3 jac_r(const Vec3& r, const Vec3& v, double t) const override;
  [[nodiscard]] Mat3 jac_v(const Vec3& r, const Vec3& v, double t) const override;
  [[nodiscard]] std::string name() const override { return inner_->name(); }

 private:
  ModelPtr inner_;
  double lu_;
  double tu_;
};

[[nodiscard]] ModelSet scale_models(const ModelSet& models, double length_unit, double time_unit);

}  // namespace tfc
