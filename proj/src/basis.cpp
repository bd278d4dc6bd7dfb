#include "tfc/basis.hpp"

#include "tfc/types.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace tfc {

namespace {

constexpr double kDomainSlack = 1e-12;

// One step of y_{n+1} = a z y_n - b y_{n-1}, differentiated twice in z.
void recurrence_step(PolyValues& out, int n, double a, double b, double z) {
  out.value[n + 1] = a * z * out.value[n] - b * out.value[n - 1];
  out.d1[n + 1] = a * (out.value[n] + z * out.d1[n]) - b * out.d1[n - 1];
  out.d2[n + 1] = a * (2.0 * out.d1[n] + z * out.d2[n]) - b * out.d2[n - 1];
}

}  // namespace

BasisKind BasisKind::gegenbauer(double alpha) {
  if (!(alpha >= -0.5) || alpha == 0.0) {
    throw Error(ErrorCode::invalid_argument,
                "gegenbauer alpha must satisfy alpha >= -0.5 and alpha != 0, got " +
                    std::to_string(alpha));
  }
  return BasisKind{PolyFamily::gegenbauer, alpha};
}

PolyValues ortho_eval(const BasisKind& kind, int m, double z) {
  if (m < 0) {
    throw Error(ErrorCode::invalid_argument, "polynomial degree must be >= 0");
  }
  if (!(std::abs(z) <= 1.0 + kDomainSlack)) {
    throw Error(ErrorCode::invalid_argument, "polynomial abscissa outside [-1, 1]");
  }

  PolyValues out{Eigen::VectorXd::Zero(m + 1), Eigen::VectorXd::Zero(m + 1),
                 Eigen::VectorXd::Zero(m + 1)};
  out.value[0] = 1.0;
  if (m == 0) return out;

  switch (kind.family()) {
    case PolyFamily::legendre:
      out.value[1] = z;
      out.d1[1] = 1.0;
      for (int n = 1; n < m; ++n) {
        const double np1 = n + 1.0;
        recurrence_step(out, n, (2.0 * n + 1.0) / np1, n / np1, z);
      }
      break;
    case PolyFamily::chebyshev:
      out.value[1] = z;
      out.d1[1] = 1.0;
      for (int n = 1; n < m; ++n) recurrence_step(out, n, 2.0, 1.0, z);
      break;
    case PolyFamily::gegenbauer: {
      const double alpha = kind.alpha();
      if (alpha == 0.0) {
        throw Error(ErrorCode::invalid_argument, "gegenbauer alpha = 0 is degenerate");
      }
      out.value[1] = 2.0 * alpha * z;
      out.d1[1] = 2.0 * alpha;
      for (int n = 1; n < m; ++n) {
        const double np1 = n + 1.0;
        recurrence_step(out, n, 2.0 * (n + alpha) / np1, (n + 2.0 * alpha - 1.0) / np1, z);
      }
      break;
    }
  }
  return out;
}

std::vector<double> cgl_nodes(int n) {
  if (n < 2) {
    throw Error(ErrorCode::invalid_argument, "cgl_nodes needs n >= 2");
  }
  std::vector<double> z(static_cast<std::size_t>(n));
  const double denom = n - 1.0;
  for (int k = 0; k < n / 2; ++k) {
    const double zk = -std::cos(std::numbers::pi * k / denom);
    z[static_cast<std::size_t>(k)] = zk;
    z[static_cast<std::size_t>(n - 1 - k)] = -zk;
  }
  if (n % 2 == 1) z[static_cast<std::size_t>(n / 2)] = 0.0;
  return z;
}

TimeMap::TimeMap(double dt) : dt_(dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw Error(ErrorCode::invalid_argument, "time of flight must be positive");
  }
}

BasisRows basis_rows(const BasisSpec& spec, double z) {
  if (spec.degree < 2) {
    throw Error(ErrorCode::invalid_argument, "basis degree must be >= 2");
  }
  const TimeMap map(spec.dt);
  const PolyValues poly = ortho_eval(spec.kind, spec.degree, z);
  const int n_poly = spec.degree - 1;
  const double c = map.c();
  const double w = spec.omega;

  BasisRows rows;
  rows.z = z;
  rows.t = map.to_time(z);
  rows.s.resize(spec.size());
  rows.ds_dt.resize(spec.size());
  rows.d2s_dt2.resize(spec.size());

  // Degrees 0 and 1 are dropped: they duplicate the switching functions.
  rows.s.head(n_poly) = poly.value.tail(n_poly);
  rows.ds_dt.head(n_poly) = c * poly.d1.tail(n_poly);
  rows.d2s_dt2.head(n_poly) = (c * c) * poly.d2.tail(n_poly);

  const double cw = std::cos(w * rows.t);
  const double sw = std::sin(w * rows.t);
  rows.s[n_poly] = cw;
  rows.s[n_poly + 1] = sw;
  rows.ds_dt[n_poly] = -w * sw;
  rows.ds_dt[n_poly + 1] = w * cw;
  rows.d2s_dt2[n_poly] = -w * w * cw;
  rows.d2s_dt2[n_poly + 1] = -w * w * sw;
  return rows;
}

}  // namespace tfc
