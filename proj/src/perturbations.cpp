#include "tfc/perturbations.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

namespace tfc {

Mat3 PerturbationModel::jac_v(const Vec3&, const Vec3&, double) const { return Mat3::Zero(); }

Vec3 total_accel(const ModelSet& models, const Vec3& r, const Vec3& v, double t) {
  Vec3 a = Vec3::Zero();
  for (const auto& m : models) a += m->accel(r, v, t);
  return a;
}

Mat3 total_jac_r(const ModelSet& models, const Vec3& r, const Vec3& v, double t) {
  Mat3 j = Mat3::Zero();
  for (const auto& m : models) j += m->jac_r(r, v, t);
  return j;
}

Mat3 total_jac_v(const ModelSet& models, const Vec3& r, const Vec3& v, double t) {
  Mat3 j = Mat3::Zero();
  for (const auto& m : models) j += m->jac_v(r, v, t);
  return j;
}

// ---------------------------------------------------------------------------
// J2

Vec3 accel_j2(const J2Params& params, const Vec3& r) {
  const double rn = r.norm();
  if (!(rn > 0.0)) throw Error(ErrorCode::singular, "J2 acceleration at the origin");
  const double k = 1.5 * params.scale * params.j2 * params.mu * params.r_eq * params.r_eq;
  const double zr2 = (r.z() / rn) * (r.z() / rn);
  const double f = -k / std::pow(rn, 5);
  return {f * r.x() * (1.0 - 5.0 * zr2), f * r.y() * (1.0 - 5.0 * zr2),
          f * r.z() * (3.0 - 5.0 * zr2)};
}

Mat3 jac_r_j2(const J2Params& params, const Vec3& r) {
  const double rn = r.norm();
  if (!(rn > 0.0)) throw Error(ErrorCode::singular, "J2 Jacobian at the origin");
  const double k = 1.5 * params.scale * params.j2 * params.mu * params.r_eq * params.r_eq;
  const double z = r.z();
  const double r5 = std::pow(rn, -5);
  const double r7 = std::pow(rn, -7);
  const double r9 = std::pow(rn, -9);

  // a_{x,y} = -k r_i u(r), a_z = -k z w(r)
  const double u = r5 - 5.0 * z * z * r7;
  const double w = 3.0 * r5 - 5.0 * z * z * r7;
  Vec3 du = -5.0 * r7 * r + 35.0 * z * z * r9 * r;
  du.z() -= 10.0 * z * r7;
  Vec3 dw = -15.0 * r7 * r + 35.0 * z * z * r9 * r;
  dw.z() -= 10.0 * z * r7;

  Mat3 j;
  j.row(0) = r.x() * du.transpose();
  j.row(1) = r.y() * du.transpose();
  j.row(2) = z * dw.transpose();
  j(0, 0) += u;
  j(1, 1) += u;
  j(2, 2) += w;
  return -k * j;
}

J2Model::J2Model(J2Params params) : params_(params) {
  if (!(params_.r_eq > 0.0)) throw Error(ErrorCode::invalid_argument, "J2 r_eq must be positive");
}

Vec3 J2Model::accel(const Vec3& r, const Vec3&, double) const { return accel_j2(params_, r); }
Mat3 J2Model::jac_r(const Vec3& r, const Vec3&, double) const { return jac_r_j2(params_, r); }

// ---------------------------------------------------------------------------
// Third body

Vec3 accel_third_body(const ThirdBodyParams& params, const Vec3& r, double t) {
  const Vec3 r3b = params.ephemeris(t);
  const Vec3 d = r3b - r;
  const double dn = d.norm();
  const double r3n = r3b.norm();
  if (!(dn > 0.0)) throw Error(ErrorCode::singular, "spacecraft coincides with third body");
  if (!(r3n > 0.0)) throw Error(ErrorCode::singular, "third body at the primary center");
  return params.mu3b * (d / (dn * dn * dn) - r3b / (r3n * r3n * r3n));
}

Mat3 jac_r_third_body(const ThirdBodyParams& params, const Vec3& r, double t) {
  const Vec3 d = params.ephemeris(t) - r;
  const double dn = d.norm();
  if (!(dn > 0.0)) throw Error(ErrorCode::singular, "spacecraft coincides with third body");
  const double d3 = dn * dn * dn;
  return params.mu3b * (3.0 * d * d.transpose() / (d3 * dn * dn) - Mat3::Identity() / d3);
}

ThirdBodyModel::ThirdBodyModel(ThirdBodyParams params) : params_(std::move(params)) {
  if (!params_.ephemeris) throw Error(ErrorCode::invalid_argument, "third body needs an ephemeris");
}

Vec3 ThirdBodyModel::accel(const Vec3& r, const Vec3&, double t) const {
  return accel_third_body(params_, r, t);
}
Mat3 ThirdBodyModel::jac_r(const Vec3& r, const Vec3&, double t) const {
  return jac_r_third_body(params_, r, t);
}

CircularEphemeris::CircularEphemeris(double radius, double mu_primary)
    : radius_(radius), rate_(std::sqrt(mu_primary / (radius * radius * radius))) {
  if (!(radius > 0.0) || !(mu_primary > 0.0)) {
    throw Error(ErrorCode::invalid_argument, "circular ephemeris needs positive radius and mu");
  }
}

Vec3 CircularEphemeris::operator()(double t) const {
  return {radius_ * std::cos(rate_ * t), radius_ * std::sin(rate_ * t), 0.0};
}

double CircularEphemeris::period() const noexcept { return 2.0 * M_PI / rate_; }

CircularEphemeris moon_ephemeris(double mu_earth) { return {384000.0, mu_earth}; }

TabulatedEphemeris::TabulatedEphemeris(std::vector<double> times, std::vector<Vec3> positions)
    : times_(std::move(times)), positions_(std::move(positions)) {
  if (times_.size() < 2 || times_.size() != positions_.size()) {
    throw Error(ErrorCode::invalid_argument, "ephemeris table needs >= 2 matching samples");
  }
  if (!std::is_sorted(times_.begin(), times_.end()) ||
      std::adjacent_find(times_.begin(), times_.end()) != times_.end()) {
    throw Error(ErrorCode::invalid_argument, "ephemeris times must be strictly increasing");
  }
}

TabulatedEphemeris TabulatedEphemeris::from_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::invalid_argument, "cannot open ephemeris table " + path);
  std::vector<double> times;
  std::vector<Vec3> positions;
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream row(line);
    double t = 0, x = 0, y = 0, z = 0;
    if (!(row >> t >> x >> y >> z)) {
      throw Error(ErrorCode::invalid_argument, "malformed ephemeris row: " + line);
    }
    times.push_back(t);
    positions.emplace_back(x, y, z);
  }
  return {std::move(times), std::move(positions)};
}

Vec3 TabulatedEphemeris::operator()(double t) const {
  if (t < times_.front() || t > times_.back()) {
    throw Error(ErrorCode::out_of_range, "time outside ephemeris table");
  }
  auto hi = std::upper_bound(times_.begin(), times_.end(), t);
  if (hi == times_.end()) return positions_.back();
  const auto i = static_cast<std::size_t>(hi - times_.begin());
  const double w = (t - times_[i - 1]) / (times_[i] - times_[i - 1]);
  return (1.0 - w) * positions_[i - 1] + w * positions_[i];
}

// ---------------------------------------------------------------------------
// SRP

namespace {

double srp_gain(const SrpParams& p) {
  return p.pressure * p.area / p.mass / p.meters_per_length_unit;
}

Vec3 sun_relative(const SrpParams& p, const Vec3& r, double t) {
  const Vec3 rs = p.sun_position ? Vec3(r - p.sun_position(t)) : r;
  if (!(rs.norm() > 0.0)) throw Error(ErrorCode::singular, "spacecraft at the Sun position");
  return rs;
}

}  // namespace

Vec3 accel_srp(const SrpParams& params, const Vec3& r, double t) {
  const Vec3 u = sun_relative(params, r, t).normalized();
  const Vec3& n = params.normal;
  const double nu = n.dot(u);
  return srp_gain(params) * (params.rho_a * nu * u + 2.0 * params.rho_s * nu * nu * n +
                             params.rho_d * nu * (u + (2.0 / 3.0) * n));
}

Mat3 jac_r_srp(const SrpParams& params, const Vec3& r, double t) {
  const Vec3 rs = sun_relative(params, r, t);
  const double rho = rs.norm();
  const Vec3 u = rs / rho;
  const Vec3& n = params.normal;
  const double nu = n.dot(u);
  const Mat3 du = (Mat3::Identity() - u * u.transpose()) / rho;  // d u / d r
  const Eigen::RowVector3d dnu = n.transpose() * du;

  Mat3 j = params.rho_a * (u * dnu + nu * du);
  j += 4.0 * params.rho_s * nu * n * dnu;
  j += params.rho_d * ((u + (2.0 / 3.0) * n) * dnu + nu * du);
  return srp_gain(params) * j;
}

SrpModel::SrpModel(SrpParams params) : params_(std::move(params)) {
  if (params_.rho_a < 0.0 || params_.rho_s < 0.0 || params_.rho_d < 0.0) {
    throw Error(ErrorCode::invalid_argument, "SRP reflectivities must be non-negative");
  }
  if (std::abs(params_.normal.norm() - 1.0) > 1e-12) {
    throw Error(ErrorCode::invalid_argument, "SRP surface normal must be unit length");
  }
  if (!(params_.area > 0.0) || !(params_.mass > 0.0)) {
    throw Error(ErrorCode::invalid_argument, "SRP area and mass must be positive");
  }
  const double sum = params_.rho_a + params_.rho_s + params_.rho_d;
  if (std::abs(sum - 1.0) > 1e-9) {
    std::cerr << "warning: SRP reflectivities sum to " << sum << ", not 1\n";
  }
}

Vec3 SrpModel::accel(const Vec3& r, const Vec3&, double t) const { return accel_srp(params_, r, t); }
Mat3 SrpModel::jac_r(const Vec3& r, const Vec3&, double t) const { return jac_r_srp(params_, r, t); }

// ---------------------------------------------------------------------------

ScaledModel::ScaledModel(ModelPtr inner, double length_unit, double time_unit)
    : inner_(std::move(inner)), lu_(length_unit), tu_(time_unit) {}

Vec3 ScaledModel::accel(const Vec3& r, const Vec3& v, double t) const {
  return inner_->accel(r * lu_, v * (lu_ / tu_), t * tu_) * (tu_ * tu_ / lu_);
}

Mat3 ScaledModel::jac_r(const Vec3& r, const Vec3& v, double t) const {
  return inner_->jac_r(r * lu_, v * (lu_ / tu_), t * tu_) * (tu_ * tu_);
}

Mat3 ScaledModel::jac_v(const Vec3& r, const Vec3& v, double t) const {
  return inner_->jac_v(r * lu_, v * (lu_ / tu_), t * tu_) * tu_;
}

ModelSet scale_models(const ModelSet& models, double length_unit, double time_unit) {
  ModelSet out;
  out.reserve(models.size());
  for (const auto& m : models) out.push_back(std::make_shared<ScaledModel>(m, length_unit, time_unit));
  return out;
}

}  // namespace tfc
