#include "scenario.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>

namespace tfc::cli {

namespace {

using nlohmann::json;

constexpr double kDeg = std::numbers::pi / 180.0;

[[noreturn]] void fail(const std::string& what) { throw ScenarioError(what); }

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& item : obj.items()) {
    if (!allowed.contains(item.key())) fail("unknown key '" + item.key() + "' in " + where);
  }
}

const json& object_at(const json& obj, const char* key, const std::string& where) {
  const json& v = obj.at(key);
  if (!v.is_object()) fail(std::string(key) + " in " + where + " must be an object");
  return v;
}

double number(const json& obj, const char* key) {
  const json& v = obj.at(key);
  if (!v.is_number()) fail(std::string("'") + key + "' must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) fail(std::string("'") + key + "' must be finite");
  return x;
}

double number_or(const json& obj, const char* key, double fallback) {
  return obj.contains(key) ? number(obj, key) : fallback;
}

int integer_or(const json& obj, const char* key, int fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_integer()) fail(std::string("'") + key + "' must be an integer");
  return v.get<int>();
}

bool boolean_or(const json& obj, const char* key, bool fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_boolean()) fail(std::string("'") + key + "' must be true or false");
  return v.get<bool>();
}

std::string string_or(const json& obj, const char* key, const std::string& fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_string()) fail(std::string("'") + key + "' must be a string");
  return v.get<std::string>();
}

Vec3 vector3(const json& obj, const char* key) {
  const json& v = obj.at(key);
  if (!v.is_array() || v.size() != 3) fail(std::string("'") + key + "' must be a 3-element array");
  Vec3 out;
  for (int i = 0; i < 3; ++i) {
    if (!v[static_cast<std::size_t>(i)].is_number()) fail(std::string("'") + key + "' entries must be numbers");
    out[i] = v[static_cast<std::size_t>(i)].get<double>();
  }
  if (!out.allFinite()) fail(std::string("'") + key + "' must be finite");
  return out;
}

double tof_unit_seconds(const std::string& unit) {
  if (unit == "s") return 1.0;
  if (unit == "min") return 60.0;
  if (unit == "h") return 3600.0;
  if (unit == "day") return 86400.0;
  fail("tof_unit must be one of s, min, h, day");
}

BasisKind parse_kind(const std::string& kind, double alpha) {
  if (kind == "legendre") return BasisKind::legendre();
  if (kind == "chebyshev") return BasisKind::chebyshev();
  if (kind == "gegenbauer") {
    try {
      return BasisKind::gegenbauer(alpha);
    } catch (const Error& e) {
      fail(e.what());
    }
  }
  fail("basis kind must be legendre, chebyshev or gegenbauer");
}

Vec3 orbit_position(const ElementRecipe& e, double nu) {
  const double rp = e.body_radius + e.periapsis_altitude;
  const double p = rp * (1.0 + e.eccentricity);
  const double r = p / (1.0 + e.eccentricity * std::cos(nu));
  const Vec3 perifocal(r * std::cos(nu), r * std::sin(nu), 0.0);
  const Eigen::AngleAxisd raan(e.raan_deg * kDeg, Vec3::UnitZ());
  const Eigen::AngleAxisd inc(e.inclination_deg * kDeg, Vec3::UnitX());
  const Eigen::AngleAxisd argp(e.arg_periapsis_deg * kDeg, Vec3::UnitZ());
  return (raan * inc * argp) * perifocal;
}

double mean_anomaly(double ecc, double nu) {
  const double ea = 2.0 * std::atan2(std::sqrt(1.0 - ecc) * std::sin(nu / 2.0),
                                     std::sqrt(1.0 + ecc) * std::cos(nu / 2.0));
  return ea - ecc * std::sin(ea);
}

/// Time to sweep the arc on the recipe orbit, plus whole revolutions.
double kepler_time(const ElementRecipe& e, double mu, int revolutions) {
  if (!(e.eccentricity >= 0.0 && e.eccentricity < 1.0)) {
    fail("a time of flight derived from elements needs 0 <= eccentricity < 1");
  }
  const double rp = e.body_radius + e.periapsis_altitude;
  const double a = rp / (1.0 - e.eccentricity);
  const double n = std::sqrt(mu / (a * a * a));
  const double nu0 = e.start_anomaly_deg * kDeg;
  const double nu1 = nu0 + e.arc_angle_deg * kDeg;
  double dm = mean_anomaly(e.eccentricity, nu1) - mean_anomaly(e.eccentricity, nu0);
  dm = std::fmod(dm, 2.0 * std::numbers::pi);
  if (dm <= 0.0) dm += 2.0 * std::numbers::pi;
  return (dm + 2.0 * std::numbers::pi * revolutions) / n;
}

ElementRecipe parse_elements(const json& j) {
  reject_unknown(j,
                 {"periapsis_altitude", "eccentricity", "inclination_deg", "raan_deg",
                  "arg_periapsis_deg", "start_anomaly_deg", "arc_angle_deg", "body_radius"},
                 "elements");
  ElementRecipe e;
  e.periapsis_altitude = number(j, "periapsis_altitude");
  e.eccentricity = number(j, "eccentricity");
  e.inclination_deg = number_or(j, "inclination_deg", 0.0);
  e.raan_deg = number_or(j, "raan_deg", 0.0);
  e.arg_periapsis_deg = number_or(j, "arg_periapsis_deg", 0.0);
  e.start_anomaly_deg = number_or(j, "start_anomaly_deg", 0.0);
  e.arc_angle_deg = number(j, "arc_angle_deg");
  e.body_radius = number_or(j, "body_radius", e.body_radius);
  if (e.eccentricity < 0.0) fail("eccentricity must be non-negative");
  if (!(e.body_radius + e.periapsis_altitude > 0.0)) fail("periapsis radius must be positive");
  return e;
}

GeometryRecipe parse_geometry(const json& j) {
  reject_unknown(j, {"r0_radius", "rf_radius", "arc_angle_deg"}, "geometry");
  GeometryRecipe g;
  g.r0_radius = number(j, "r0_radius");
  g.rf_radius = number(j, "rf_radius");
  g.arc_angle_deg = number(j, "arc_angle_deg");
  if (!(g.r0_radius > 0.0) || !(g.rf_radius > 0.0)) fail("geometry radii must be positive");
  return g;
}

void parse_perturbations(const json& j, Scenario& s, const std::filesystem::path& base_dir) {
  reject_unknown(j, {"j2", "third_body", "srp"}, "perturbations");
  const bool km = s.units == UnitSystem::km_s;
  if (j.contains("j2")) {
    const json& b = object_at(j, "j2", "perturbations");
    reject_unknown(b, {"scale", "j2", "r_eq"}, "j2");
    J2Block blk;
    blk.scale = number_or(b, "scale", blk.scale);
    blk.j2 = number_or(b, "j2", blk.j2);
    if (!km && !b.contains("r_eq")) fail("nondimensional j2 block needs r_eq");
    blk.r_eq = number_or(b, "r_eq", blk.r_eq);
    if (!(blk.r_eq > 0.0)) fail("j2 r_eq must be positive");
    s.j2 = blk;
  }
  if (j.contains("third_body")) {
    const json& b = object_at(j, "third_body", "perturbations");
    reject_unknown(b, {"mu", "ephemeris", "radius", "file"}, "third_body");
    ThirdBodyBlock blk;
    if (!km && !b.contains("mu")) fail("nondimensional third_body block needs mu");
    blk.mu = number_or(b, "mu", blk.mu);
    blk.ephemeris = string_or(b, "ephemeris", blk.ephemeris);
    if (blk.ephemeris == "circular") {
      if (!km && !b.contains("radius")) fail("nondimensional circular ephemeris needs radius");
      blk.radius = number_or(b, "radius", blk.radius);
      if (!(blk.radius > 0.0)) fail("third_body radius must be positive");
    } else if (blk.ephemeris == "table") {
      const std::filesystem::path file = string_or(b, "file", "");
      if (file.empty()) fail("table ephemeris needs 'file'");
      blk.table = file.is_absolute() ? file : base_dir / file;
      if (!std::filesystem::exists(blk.table)) fail("ephemeris file not found: " + blk.table.string());
    } else {
      fail("third_body ephemeris must be 'circular' or 'table'");
    }
    s.third_body = blk;
  }
  if (j.contains("srp")) {
    if (!km) fail("srp needs km_s units (pressure is in N/m^2)");
    const json& b = object_at(j, "srp", "perturbations");
    reject_unknown(b, {"pressure", "area", "mass", "rho_a", "rho_s", "rho_d", "normal", "sun_position"},
                   "srp");
    SrpBlock blk;
    blk.pressure = number_or(b, "pressure", blk.pressure);
    blk.area = number(b, "area");
    blk.mass = number(b, "mass");
    blk.rho_a = number_or(b, "rho_a", blk.rho_a);
    blk.rho_s = number_or(b, "rho_s", blk.rho_s);
    blk.rho_d = number_or(b, "rho_d", blk.rho_d);
    if (b.contains("normal")) blk.normal = vector3(b, "normal");
    if (b.contains("sun_position")) blk.sun_position = vector3(b, "sun_position");
    if (!(blk.area > 0.0) || !(blk.mass > 0.0)) fail("srp area and mass must be positive");
    if (blk.rho_a < 0.0 || blk.rho_s < 0.0 || blk.rho_d < 0.0) fail("srp coefficients must be >= 0");
    if (std::abs(blk.normal.norm() - 1.0) > 1e-9) fail("srp normal must be a unit vector");
    s.srp = blk;
  }
}

}  // namespace

ModelSet Scenario::models() const {
  ModelSet out;
  if (j2) {
    J2Params p;
    p.j2 = j2->j2;
    p.r_eq = j2->r_eq;
    p.mu = mu;
    p.scale = j2->scale;
    out.push_back(std::make_shared<J2Model>(p));
  }
  if (third_body) {
    ThirdBodyParams p;
    p.mu3b = third_body->mu;
    if (third_body->ephemeris == "table") {
      p.ephemeris = TabulatedEphemeris::from_csv(third_body->table.string());
    } else {
      p.ephemeris = CircularEphemeris(third_body->radius, mu);
    }
    out.push_back(std::make_shared<ThirdBodyModel>(std::move(p)));
  }
  if (srp) {
    SrpParams p;
    p.pressure = srp->pressure;
    p.area = srp->area;
    p.mass = srp->mass;
    p.rho_a = srp->rho_a;
    p.rho_s = srp->rho_s;
    p.rho_d = srp->rho_d;
    p.normal = srp->normal;
    const Vec3 sun = srp->sun_position;
    p.sun_position = [sun](double) { return sun; };
    out.push_back(std::make_shared<SrpModel>(std::move(p)));
  }
  return out;
}

BoundaryValueProblem Scenario::problem(bool with_perturbations) const {
  BoundaryValueProblem b;
  b.mu = mu;
  b.r0 = r0;
  b.rf = rf;
  b.tof = tof;
  b.revolutions = revolutions;
  b.long_way = long_way;
  if (with_perturbations) b.perturbations = models();
  return b;
}

SolverConfig Scenario::solver_config() const {
  SolverConfig c;
  c.n_points = n_points;
  c.tol = tol;
  c.max_iter = max_iter;
  c.kind = kind;
  c.degree = degree;
  c.nondimensionalize = nondimensionalize;
  return c;
}

void apply_recipes(Scenario& s) {
  if (s.elements) {
    const double nu0 = s.elements->start_anomaly_deg * kDeg;
    s.r0 = orbit_position(*s.elements, nu0);
    s.rf = orbit_position(*s.elements, nu0 + s.elements->arc_angle_deg * kDeg);
    // Arcs past 180 degrees of the same orbit go the long way round.
    const double sweep = std::fmod(s.elements->arc_angle_deg, 360.0);
    s.long_way = sweep > 180.0;
    if (s.derived_tof) s.tof = kepler_time(*s.elements, s.mu, s.revolutions);
  } else if (s.geometry) {
    const double th = s.geometry->arc_angle_deg * kDeg;
    s.r0 = Vec3(s.geometry->r0_radius, 0.0, 0.0);
    s.rf = s.geometry->rf_radius * Vec3(std::cos(th), std::sin(th), 0.0);
  }
}

Scenario parse_scenario(const json& doc, const std::filesystem::path& base_dir) {
  try {
    if (!doc.is_object()) fail("scenario must be a JSON object");
    reject_unknown(doc,
                   {"name", "description", "units", "mu", "r0", "rf", "elements", "geometry", "tof",
                    "tof_unit", "revolutions", "long_way", "basis", "n_points", "tol", "max_iter",
                    "nondimensionalize", "perturbations", "warm_start", "dc_guess", "sweep",
                    "polyscan"},
                   "scenario");
    Scenario s;
    s.name = string_or(doc, "name", "");
    if (s.name.empty()) fail("scenario needs a non-empty 'name'");
    if (s.name.find_first_of("/\\") != std::string::npos) fail("scenario name must not contain path separators");

    const std::string units = string_or(doc, "units", "km_s");
    if (units == "km_s") {
      s.units = UnitSystem::km_s;
    } else if (units == "nondimensional") {
      s.units = UnitSystem::nondimensional;
      s.mu = 1.0;
    } else {
      fail("units must be 'km_s' or 'nondimensional'");
    }
    s.mu = number_or(doc, "mu", s.mu);
    if (!(s.mu > 0.0)) fail("mu must be positive");

    s.tof_unit = 1.0;
    if (doc.contains("tof_unit")) {
      if (s.units != UnitSystem::km_s) fail("tof_unit applies only to km_s scenarios");
      s.tof_unit = tof_unit_seconds(string_or(doc, "tof_unit", "s"));
    }
    s.revolutions = integer_or(doc, "revolutions", 0);
    if (s.revolutions < 0) fail("revolutions must be >= 0");
    s.long_way = boolean_or(doc, "long_way", false);

    const int recipes = static_cast<int>(doc.contains("r0") || doc.contains("rf")) +
                        static_cast<int>(doc.contains("elements")) +
                        static_cast<int>(doc.contains("geometry"));
    if (recipes != 1) fail("give exactly one of r0/rf, elements or geometry");
    if (doc.contains("r0") || doc.contains("rf")) {
      s.r0 = vector3(doc, "r0");
      s.rf = vector3(doc, "rf");
    } else if (doc.contains("elements")) {
      s.elements = parse_elements(object_at(doc, "elements", "scenario"));
      if (doc.contains("long_way")) fail("long_way follows from the arc angle with elements");
    } else {
      s.geometry = parse_geometry(object_at(doc, "geometry", "scenario"));
    }

    if (doc.contains("tof")) {
      s.tof = number(doc, "tof") * s.tof_unit;
    } else if (s.elements) {
      s.derived_tof = true;
    } else {
      fail("scenario needs 'tof'");
    }
    apply_recipes(s);

    if (doc.contains("basis")) {
      const json& b = object_at(doc, "basis", "scenario");
      reject_unknown(b, {"kind", "degree", "alpha"}, "basis");
      s.kind = parse_kind(string_or(b, "kind", "legendre"), number_or(b, "alpha", 0.5));
      s.degree = integer_or(b, "degree", s.degree);
    }
    s.n_points = integer_or(doc, "n_points", s.n_points);
    s.tol = number_or(doc, "tol", s.tol);
    s.max_iter = integer_or(doc, "max_iter", s.max_iter);
    s.nondimensionalize = boolean_or(doc, "nondimensionalize", s.nondimensionalize);

    if (doc.contains("perturbations")) {
      parse_perturbations(object_at(doc, "perturbations", "scenario"), s, base_dir);
    }

    const std::string warm = string_or(doc, "warm_start", "none");
    if (warm == "none") {
      s.warm_start = WarmStart::none;
    } else if (warm == "unperturbed") {
      s.warm_start = WarmStart::unperturbed;
    } else {
      fail("warm_start must be 'none' or 'unperturbed'");
    }
    const std::string guess = string_or(doc, "dc_guess", "lambert");
    if (guess == "lambert") {
      s.dc_guess = DcGuess::lambert;
    } else if (guess == "hohmann") {
      s.dc_guess = DcGuess::hohmann;
    } else {
      fail("dc_guess must be 'lambert' or 'hohmann'");
    }

    try {
      s.problem(false).validate();
      s.solver_config().validate();
    } catch (const Error& e) {
      fail(e.what());
    }
    return s;
  } catch (const json::exception& e) {
    fail(std::string("scenario: ") + e.what());
  }
}

json load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ScenarioError(path.string() + ": " + e.what());
  }
}

Scenario load_scenario(const std::filesystem::path& path) {
  return parse_scenario(load_json(path), path.parent_path());
}

std::vector<double> linear_range(double start, double stop, double step) {
  if (!std::isfinite(start) || !std::isfinite(stop) || !std::isfinite(step)) {
    fail("range bounds must be finite");
  }
  if (step == 0.0 || (stop - start) * step < 0.0) fail("range step must move from start towards stop");
  const double span = (stop - start) / step;
  const auto n = static_cast<long>(std::floor(span + 1e-9));
  if (n > 100000) fail("range has too many points");
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(n + 1));
  for (long i = 0; i <= n; ++i) out.push_back(start + static_cast<double>(i) * step);
  return out;
}

namespace {

std::vector<double> parse_range(const json& j, const std::string& where) {
  if (j.is_array()) {
    std::vector<double> out;
    for (const auto& v : j) {
      if (!v.is_number()) fail(where + " entries must be numbers");
      out.push_back(v.get<double>());
    }
    if (out.empty()) fail(where + " must not be empty");
    for (std::size_t i = 1; i < out.size(); ++i) {
      if (!(out[i] > out[i - 1])) fail(where + " must be strictly increasing");
    }
    return out;
  }
  if (!j.is_object()) fail(where + " must be an array or {start, stop, step}");
  reject_unknown(j, {"start", "stop", "step"}, where);
  return linear_range(number(j, "start"), number(j, "stop"), number(j, "step"));
}

}  // namespace

SweepSpec parse_sweep(const json& doc) {
  try {
    if (!doc.contains("sweep")) fail("sweep file needs a 'sweep' block");
    const json& j = object_at(doc, "sweep", "file");
    reject_unknown(j, {"axis", "values", "start", "stop", "step"}, "sweep");
    SweepSpec out;
    const std::string axis = string_or(j, "axis", "");
    if (axis == "tof") {
      out.axis = SweepAxis::tof;
    } else if (axis == "angle") {
      out.axis = SweepAxis::angle;
    } else if (axis == "chord") {
      out.axis = SweepAxis::chord;
    } else {
      fail("sweep axis must be tof, angle or chord");
    }
    if (j.contains("values")) {
      out.values = parse_range(j.at("values"), "sweep values");
    } else {
      out.values = linear_range(number(j, "start"), number(j, "stop"), number(j, "step"));
    }
    return out;
  } catch (const json::exception& e) {
    fail(std::string("sweep: ") + e.what());
  }
}

const char* to_string(SweepAxis axis) noexcept {
  switch (axis) {
    case SweepAxis::tof: return "tof";
    case SweepAxis::angle: return "angle_deg";
    case SweepAxis::chord: return "chord";
  }
  return "unknown";
}

Scenario at_sweep_point(const Scenario& base, SweepAxis axis, double value) {
  Scenario s = base;
  switch (axis) {
    case SweepAxis::tof:
      if (!(value > 0.0)) fail("sweep tof must be positive");
      s.tof = value * s.tof_unit;
      s.derived_tof = false;
      break;
    case SweepAxis::angle:
      if (s.geometry) {
        s.geometry->arc_angle_deg = value;
      } else if (s.elements) {
        s.elements->arc_angle_deg = value;
      } else {
        fail("angle sweep needs a geometry or elements recipe");
      }
      break;
    case SweepAxis::chord: {
      if (!s.geometry) fail("chord sweep needs a geometry recipe");
      const double r0 = s.geometry->r0_radius;
      const double th = s.geometry->arc_angle_deg * kDeg;
      // |rf - r0| = chord with rf at angle th: rf = r0 cos th + sqrt(c^2 - r0^2 sin^2 th).
      const double disc = value * value - r0 * r0 * std::sin(th) * std::sin(th);
      if (disc < 0.0) fail("chord shorter than the distance from r0 to the rf ray");
      const double rf = r0 * std::cos(th) + std::sqrt(disc);
      if (!(rf > 0.0)) fail("chord gives a non-positive rf radius");
      s.geometry->rf_radius = rf;
      break;
    }
  }
  apply_recipes(s);
  return s;
}

PolyscanSpec parse_polyscan(const json& doc) {
  try {
    if (!doc.contains("polyscan")) fail("scan file needs a 'polyscan' block");
    const json& j = object_at(doc, "polyscan", "file");
    reject_unknown(j, {"degrees", "alphas", "radius_ratios"}, "polyscan");
    PolyscanSpec out;
    for (double d : parse_range(j.at("degrees"), "degrees")) {
      if (d != std::floor(d) || d < 2.0) fail("degrees must be integers >= 2");
      out.degrees.push_back(static_cast<int>(d));
    }
    out.alphas = parse_range(j.at("alphas"), "alphas");
    out.radius_ratios = parse_range(j.at("radius_ratios"), "radius_ratios");
    for (double a : out.alphas) {
      if (a == 0.0 || a < -0.5) fail("alphas must be >= -0.5 and nonzero");
    }
    for (double r : out.radius_ratios) {
      if (!(r > 0.0)) fail("radius_ratios must be positive");
    }
    return out;
  } catch (const json::exception& e) {
    fail(std::string("polyscan: ") + e.what());
  }
}

Scenario at_polyscan_cell(const Scenario& base, int degree, double alpha, double ratio) {
  if (!base.geometry) fail("polyscan needs a geometry recipe");
  Scenario s = base;
  s.kind = BasisKind::gegenbauer(alpha);
  s.degree = degree;
  s.geometry->rf_radius = ratio * s.geometry->r0_radius;
  apply_recipes(s);
  return s;
}

}  // namespace tfc::cli
