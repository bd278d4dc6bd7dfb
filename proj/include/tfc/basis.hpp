#pragma once

#include <Eigen/Dense>

#include <vector>

namespace tfc {

enum class PolyFamily { legendre, chebyshev, gegenbauer };

/// Orthogonal polynomial family used for the free functions.
///
/// "chebyshev" is the first kind, T_{n+1} = 2 z T_n - T_{n-1}. Gegenbauer
/// carries its own alpha (alpha >= -0.5, alpha != 0); alpha = 0.5 reproduces
/// Legendre and alpha = 1 the Chebyshev polynomials of the second kind.
class BasisKind {
 public:
  static BasisKind legendre() { return BasisKind{PolyFamily::legendre, 0.5}; }
  static BasisKind chebyshev() { return BasisKind{PolyFamily::chebyshev, 0.0}; }
  /// Throws Error(invalid_argument) for alpha == 0 or alpha < -0.5.
  static BasisKind gegenbauer(double alpha);

  [[nodiscard]] PolyFamily family() const noexcept { return family_; }
  [[nodiscard]] double alpha() const noexcept { return alpha_; }

 private:
  BasisKind(PolyFamily family, double alpha) : family_(family), alpha_(alpha) {}

  PolyFamily family_;
  double alpha_;
};

/// Values and first two z-derivatives of degrees 0..m at one abscissa.
struct PolyValues {
  Eigen::VectorXd value;
  Eigen::VectorXd d1;
  Eigen::VectorXd d2;
};

/// Evaluates degrees 0..m by the family's three-term recurrence; derivative
/// recurrences come from differentiating it.
[[nodiscard]] PolyValues ortho_eval(const BasisKind& kind, int m, double z);

/// Chebyshev-Gauss-Lobatto nodes z_k = -cos(pi (k-1)/(n-1)), ascending on
/// [-1, 1]. Symmetric pairs are mirrored exactly.
[[nodiscard]] std::vector<double> cgl_nodes(int n);

/// Linear map between t in [0, dt] and z in [-1, 1].
class TimeMap {
 public:
  explicit TimeMap(double dt);

  [[nodiscard]] double dt() const noexcept { return dt_; }
  /// dz/dt.
  [[nodiscard]] double c() const noexcept { return 2.0 / dt_; }
  [[nodiscard]] double to_time(double z) const noexcept { return dt_ * (z + 1.0) / 2.0; }
  [[nodiscard]] double to_z(double t) const noexcept { return 2.0 * t / dt_ - 1.0; }

 private:
  double dt_;
};

/// Basis definition: polynomials of degree 2..m followed by cos(wt), sin(wt).
struct BasisSpec {
  BasisKind kind = BasisKind::legendre();
  int degree = 20;
  double omega = 0.0;
  double dt = 1.0;

  /// Row length, m + 1.
  [[nodiscard]] int size() const noexcept { return degree + 1; }
};

struct BasisRows {
  Eigen::VectorXd s;
  Eigen::VectorXd ds_dt;
  Eigen::VectorXd d2s_dt2;
  double z = 0.0;
  double t = 0.0;
};

/// Trig-augmented basis row at z together with its first two time
/// derivatives. Polynomial entries carry c and c^2, trig entries w and w^2.
[[nodiscard]] BasisRows basis_rows(const BasisSpec& spec, double z);

}  // namespace tfc
