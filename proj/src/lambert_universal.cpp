#include "tfc/reference.hpp"

#include <cmath>
#include <numbers>

namespace tfc {

double stumpff_c(double z) {
  if (std::abs(z) < 1e-2) {
    // Series 1/2! - z/4! + z^2/6! - ...
    double term = 0.5, sum = 0.5;
    for (int k = 1; k < 8; ++k) {
      term *= -z / ((2.0 * k + 1.0) * (2.0 * k + 2.0));
      sum += term;
    }
    return sum;
  }
  // Half-angle forms keep full precision as sqrt(z) approaches 2 pi.
  if (z > 0.0) {
    const double s = std::sin(0.5 * std::sqrt(z));
    return 2.0 * s * s / z;
  }
  const double s = std::sinh(0.5 * std::sqrt(-z));
  return 2.0 * s * s / (-z);
}

double stumpff_s(double z) {
  if (std::abs(z) < 1e-2) {
    // Series 1/3! - z/5! + z^2/7! - ...
    double term = 1.0 / 6.0, sum = term;
    for (int k = 1; k < 8; ++k) {
      term *= -z / ((2.0 * k + 2.0) * (2.0 * k + 3.0));
      sum += term;
    }
    return sum;
  }
  if (z > 0.0) {
    const double sz = std::sqrt(z);
    return (sz - std::sin(sz)) / (sz * sz * sz);
  }
  const double sz = std::sqrt(-z);
  return (std::sinh(sz) - sz) / (sz * sz * sz);
}

LambertVelocities lambert_universal(double mu, const Vec3& r0, const Vec3& rf, double tof,
                                    bool long_way) {
  if (!(mu > 0.0) || !(tof > 0.0)) {
    throw Error(ErrorCode::invalid_argument, "lambert oracle needs mu > 0 and tof > 0");
  }
  const TransferFrame frame = build_frame(r0, rf, long_way);
  const double r1 = r0.norm();
  const double r2 = rf.norm();
  const double dtheta = frame.theta_r;
  const double a = std::sin(dtheta) * std::sqrt(r1 * r2 / (1.0 - std::cos(dtheta)));
  const double target = std::sqrt(mu) * tof;

  auto y_of = [&](double z) {
    return r1 + r2 + a * (z * stumpff_s(z) - 1.0) / std::sqrt(stumpff_c(z));
  };
  // sqrt(mu) * time of flight minus target; negative where y < 0 (no orbit).
  auto f_of = [&](double z) {
    const double y = y_of(z);
    if (y <= 0.0) return -target;
    const double c = stumpff_c(z);
    return std::pow(y / c, 1.5) * stumpff_s(z) + a * std::sqrt(y) - target;
  };
  auto df_of = [&](double z) {
    const double y = y_of(z);
    if (y <= 0.0) return 0.0;
    if (std::abs(z) < 1e-6) {
      return std::sqrt(2.0) / 40.0 * std::pow(y, 1.5) +
             a / 8.0 * (std::sqrt(y) + a * std::sqrt(1.0 / (2.0 * y)));
    }
    const double c = stumpff_c(z);
    const double s = stumpff_s(z);
    return std::pow(y / c, 1.5) *
               (1.0 / (2.0 * z) * (c - 1.5 * s / c) + 0.75 * s * s / c) +
           a / 8.0 * (3.0 * s / c * std::sqrt(y) + a * std::sqrt(c / y));
  };

  constexpr int kMaxIter = 200;
  const double four_pi2 = 4.0 * std::numbers::pi * std::numbers::pi;
  double hi = four_pi2 * (1.0 - 1e-12);
  double lo = -4.0;
  int iter = 0;
  while (f_of(lo) > 0.0) {
    lo *= 2.0;
    if (++iter > kMaxIter) throw Error(ErrorCode::oracle_failure, "lambert bracket search failed");
  }
  if (!(f_of(hi) > 0.0)) {
    throw Error(ErrorCode::oracle_failure, "lambert time of flight exceeds single-revolution range");
  }

  double z = 0.0 > lo && 0.0 < hi ? 0.0 : 0.5 * (lo + hi);
  bool done = false;
  for (iter = 0; iter < kMaxIter; ++iter) {
    const double f = f_of(z);
    if (f == 0.0) {
      done = true;
      break;
    }
    (f < 0.0 ? lo : hi) = z;
    const double df = df_of(z);
    double next = df > 0.0 ? z - f / df : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - z) <= 1e-15 * (1.0 + std::abs(z)) || hi - lo <= 1e-15 * (1.0 + std::abs(z))) {
      z = next;
      done = true;
      break;
    }
    z = next;
  }
  if (!done) throw Error(ErrorCode::oracle_failure, "lambert iteration did not converge");

  const double y = y_of(z);
  const double f = 1.0 - y / r1;
  const double g = a * std::sqrt(y / mu);
  const double gdot = 1.0 - y / r2;
  return {(rf - f * r0) / g, (gdot * rf - r0) / g, iter + 1};
}

}  // namespace tfc
