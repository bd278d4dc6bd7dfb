#pragma once

#include "tfc/solver.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace tfc::cli {

/// Malformed or inconsistent scenario file.
class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class UnitSystem { km_s, nondimensional };

enum class WarmStart { none, unperturbed };

enum class DcGuess { lambert, hohmann };

/// Keplerian arc: both boundaries lie on one orbit, `arc_angle_deg` apart in
/// true anomaly starting at `start_anomaly_deg`.
struct ElementRecipe {
  double periapsis_altitude = 0.0;
  double eccentricity = 0.0;
  double inclination_deg = 0.0;
  double raan_deg = 0.0;
  double arg_periapsis_deg = 0.0;
  double start_anomaly_deg = 0.0;
  double arc_angle_deg = 0.0;
  double body_radius = 6378.137;
};

/// Planar boundaries: r0 on +x, rf at `arc_angle_deg` in the xy-plane.
struct GeometryRecipe {
  double r0_radius = 0.0;
  double rf_radius = 0.0;
  double arc_angle_deg = 0.0;
};

struct J2Block {
  double scale = 1.0;
  double j2 = 1.082629e-3;
  double r_eq = 6378.137;
};

struct ThirdBodyBlock {
  double mu = 4902.800066;
  /// "circular" or "table".
  std::string ephemeris = "circular";
  double radius = 384000.0;
  std::filesystem::path table;
};

struct SrpBlock {
  double pressure = 4.57e-6;
  double area = 0.0;
  double mass = 0.0;
  double rho_a = 0.0;
  double rho_s = 1.0;
  double rho_d = 0.0;
  Vec3 normal = Vec3::UnitX();
  Vec3 sun_position = Vec3::Zero();
};

struct Scenario {
  std::string name;
  UnitSystem units = UnitSystem::km_s;
  double mu = 398600.4418;
  Vec3 r0 = Vec3::Zero();
  Vec3 rf = Vec3::Zero();
  double tof = 0.0;  // seconds, or nondimensional
  /// Seconds per unit of the file's tof fields (1 for nondimensional).
  double tof_unit = 1.0;
  int revolutions = 0;
  bool long_way = false;

  BasisKind kind = BasisKind::legendre();
  int degree = 20;
  int n_points = 200;
  double tol = 1e-9;
  int max_iter = 200;
  bool nondimensionalize = true;

  std::optional<J2Block> j2;
  std::optional<ThirdBodyBlock> third_body;
  std::optional<SrpBlock> srp;
  WarmStart warm_start = WarmStart::none;
  DcGuess dc_guess = DcGuess::lambert;

  std::optional<ElementRecipe> elements;
  std::optional<GeometryRecipe> geometry;
  /// True when tof came from the orbit recipe rather than the file.
  bool derived_tof = false;

  [[nodiscard]] bool perturbed() const noexcept { return j2 || third_body || srp; }
  [[nodiscard]] ModelSet models() const;
  [[nodiscard]] BoundaryValueProblem problem(bool with_perturbations = true) const;
  [[nodiscard]] SolverConfig solver_config() const;
  /// Length unit of the file for nondimensional error columns (|r0|).
  [[nodiscard]] double length_scale() const { return r0.norm(); }
};

/// Re-derives r0, rf (and a recipe tof) after a recipe field changed.
void apply_recipes(Scenario& s);

[[nodiscard]] Scenario parse_scenario(const nlohmann::json& doc,
                                      const std::filesystem::path& base_dir = {});
[[nodiscard]] Scenario load_scenario(const std::filesystem::path& path);
[[nodiscard]] nlohmann::json load_json(const std::filesystem::path& path);

enum class SweepAxis { tof, angle, chord };

struct SweepSpec {
  SweepAxis axis = SweepAxis::tof;
  /// In the file's units: tof units, degrees, or length.
  std::vector<double> values;
};

[[nodiscard]] SweepSpec parse_sweep(const nlohmann::json& doc);
[[nodiscard]] const char* to_string(SweepAxis axis) noexcept;
/// The base scenario moved to one grid value.
[[nodiscard]] Scenario at_sweep_point(const Scenario& base, SweepAxis axis, double value);

struct PolyscanSpec {
  std::vector<int> degrees;
  std::vector<double> alphas;
  std::vector<double> radius_ratios;
};

[[nodiscard]] PolyscanSpec parse_polyscan(const nlohmann::json& doc);
/// Gegenbauer basis of the given degree and alpha, rf radius = ratio * r0.
[[nodiscard]] Scenario at_polyscan_cell(const Scenario& base, int degree, double alpha,
                                        double ratio);

/// Inclusive arithmetic range, robust to round-off at the end point.
[[nodiscard]] std::vector<double> linear_range(double start, double stop, double step);

}  // namespace tfc::cli
