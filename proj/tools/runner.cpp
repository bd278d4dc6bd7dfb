#include "runner.hpp"

#include "svg.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>

namespace tfc::cli {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string num(double x) {
  if (std::isnan(x)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

const char* flag(bool b) { return b ? "true" : "false"; }

std::ofstream open_csv(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<double> uniform_times(double tof, int n) {
  std::vector<double> t(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) t[static_cast<std::size_t>(i)] = tof * i / (n - 1);
  t.back() = tof;
  return t;
}

Polyline project(const std::vector<CartesianState>& states, const TransferFrame& frame,
                 std::string color, std::string label, bool dashed = false) {
  Polyline line;
  line.color = std::move(color);
  line.label = std::move(label);
  line.dashed = dashed;
  line.points.reserve(states.size());
  for (const auto& s : states) line.points.emplace_back(s.r.dot(frame.r_hat), s.r.dot(frame.t_hat));
  return line;
}

std::string error_note(const std::exception& e) {
  if (const auto* err = dynamic_cast<const Error*>(&e)) return to_string(err->code());
  if (dynamic_cast<const ScenarioError*>(&e)) return "invalid_point";
  return "error";
}

}  // namespace

double closure_error(const BoundaryValueProblem& bvp, const Vec3& v0) {
  if (!v0.allFinite()) return kNaN;
  try {
    const PropagationResult p = propagate(bvp.r0, v0, bvp.tof, bvp.mu, bvp.perturbations);
    return (p.displacement - (bvp.rf - bvp.r0)).norm();
  } catch (const Error&) {
    return kNaN;
  }
}

TfcRun run_tfc(const Scenario& scenario) {
  const BoundaryValueProblem bvp = scenario.problem();
  const SolverConfig config = scenario.solver_config();
  TfcRun run;
  std::optional<Coefficients> warm;
  if (scenario.warm_start == WarmStart::unperturbed && scenario.perturbed()) {
    run.unperturbed = solve(scenario.problem(false), config);
    try {
      if (!std::isfinite(run.unperturbed->diagnostics.final_residual())) {
        throw Error(ErrorCode::invalid_argument, "unperturbed solve diverged");
      }
      warm = warm_start_from(*run.unperturbed, bvp, config);
      run.warm_start = "unperturbed";
    } catch (const Error& e) {
      if (e.code() != ErrorCode::invalid_argument) throw;
      std::cerr << "warning: " << scenario.name << ": warm start unavailable (" << e.what()
                << "); starting from zero coefficients\n";
      run.warm_start = "cold_fallback";
    }
  }
  run.solution = solve(bvp, config, warm);
  run.closure = closure_error(bvp, run.solution.v0);
  return run;
}

Vec3 dc_guess(const Scenario& scenario, const std::optional<Vec3>& fallback) {
  const BoundaryValueProblem bvp = scenario.problem(false);
  if (scenario.dc_guess == DcGuess::lambert) {
    if (scenario.revolutions == 0) {
      try {
        return lambert_universal(bvp.mu, bvp.r0, bvp.rf, bvp.tof, bvp.long_way).v0;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::oracle_failure) throw;
      }
    }
    if (fallback && fallback->allFinite()) return *fallback;
  }
  const TransferFrame frame = build_frame(bvp.r0, bvp.rf, bvp.long_way);
  const double r0 = bvp.r0.norm();
  const double rf = bvp.rf.norm();
  return std::sqrt(bvp.mu * (2.0 / r0 - 2.0 / (r0 + rf))) * frame.t_hat;
}

std::filesystem::path resolve_out_dir(const std::optional<std::string>& flag_value) {
  std::filesystem::path dir = ".";
  if (flag_value) {
    dir = *flag_value;
  } else if (const char* env = std::getenv("TFC_LAMBERT_OUT"); env != nullptr && *env != '\0') {
    dir = env;
  }
  std::filesystem::create_directories(dir);
  return dir;
}

void write_solution_csv(const std::filesystem::path& path, const Solution& sol, int samples) {
  auto out = open_csv(path);
  out << "t,x,y,z,vx,vy,vz\n";
  const std::vector<double> times = uniform_times(sol.problem.tof, samples);
  const std::vector<CartesianState> states = sample_solution(sol, times);
  for (std::size_t i = 0; i < times.size(); ++i) {
    const auto& s = states[i];
    out << num(times[i]) << ',' << num(s.r.x()) << ',' << num(s.r.y()) << ',' << num(s.r.z()) << ','
        << num(s.v.x()) << ',' << num(s.v.y()) << ',' << num(s.v.z()) << '\n';
  }
}

void write_diag_csv(const std::filesystem::path& path, const Diagnostics& diag) {
  auto out = open_csv(path);
  out << "iteration,residual_norm\n";
  for (std::size_t i = 0; i < diag.residual_history.size(); ++i) {
    out << i << ',' << num(diag.residual_history[i]) << '\n';
  }
}

void write_summary_csv(const std::filesystem::path& path, const Scenario& scenario, const TfcRun& run) {
  const Solution& s = run.solution;
  auto out = open_csv(path);
  out << "name,converged,stop,iterations,final_residual,v0x,v0y,v0z,vfx,vfy,vfz,"
         "closure_error,closure_error_nondim,warm_start\n";
  out << scenario.name << ',' << flag(s.diagnostics.converged) << ',' << to_string(s.diagnostics.stop)
      << ',' << s.diagnostics.iterations << ',' << num(s.diagnostics.final_residual()) << ','
      << num(s.v0.x()) << ',' << num(s.v0.y()) << ',' << num(s.v0.z()) << ',' << num(s.vf.x()) << ','
      << num(s.vf.y()) << ',' << num(s.vf.z()) << ',' << num(run.closure) << ','
      << num(run.closure / scenario.length_scale()) << ',' << run.warm_start << '\n';
}

int run_solve(const std::filesystem::path& file, const std::filesystem::path& out, bool svg) {
  const Scenario scenario = load_scenario(file);
  const TfcRun run = run_tfc(scenario);
  const Solution& sol = run.solution;
  const bool finite = std::isfinite(sol.diagnostics.final_residual());
  if (finite) write_solution_csv(out / (scenario.name + "_solution.csv"), sol);
  write_diag_csv(out / (scenario.name + "_diag.csv"), sol.diagnostics);
  write_summary_csv(out / (scenario.name + "_summary.csv"), scenario, run);
  if (svg && finite) {
    std::vector<Polyline> lines;
    const std::vector<double> times = uniform_times(sol.problem.tof, 400);
    if (run.unperturbed && std::isfinite(run.unperturbed->diagnostics.final_residual())) {
      lines.push_back(project(sample_solution(*run.unperturbed, times), sol.frame, "#999999",
                              "unperturbed", true));
    }
    lines.push_back(project(sample_solution(sol, times), sol.frame, "#1f77b4", "tfc"));
    write_svg(out / (scenario.name + ".svg"), scenario.name, lines);
  }
  std::cout << scenario.name << ": converged=" << flag(sol.diagnostics.converged)
            << " stop=" << to_string(sol.diagnostics.stop) << " iterations=" << sol.diagnostics.iterations
            << " residual=" << num(sol.diagnostics.final_residual()) << " closure=" << num(run.closure)
            << '\n';
  return sol.diagnostics.converged ? exit_ok : exit_not_converged;
}

SweepRow sweep_point(const Scenario& base, SweepAxis axis, double value) {
  SweepRow row;
  row.axis_value = value;
  row.tfc_error = row.dc_error = row.oracle_error = row.tfc_residual = kNaN;
  try {
    const Scenario s = at_sweep_point(base, axis, value);
    const BoundaryValueProblem bvp = s.problem();

    auto t0 = std::chrono::steady_clock::now();
    const TfcRun run = run_tfc(s);
    row.tfc_wall = seconds_since(t0);
    row.tfc_converged = run.solution.diagnostics.converged;
    row.tfc_stop = to_string(run.solution.diagnostics.stop);
    row.tfc_iterations = run.solution.diagnostics.iterations;
    row.tfc_residual = run.solution.diagnostics.final_residual();
    row.tfc_error = run.closure;

    if (!s.perturbed() && s.revolutions == 0) {
      try {
        t0 = std::chrono::steady_clock::now();
        const LambertVelocities l = lambert_universal(bvp.mu, bvp.r0, bvp.rf, bvp.tof, bvp.long_way);
        row.oracle_wall = seconds_since(t0);
        row.oracle_error = closure_error(bvp, l.v0);
      } catch (const Error& e) {
        row.note = to_string(e.code());
      }
    }

    try {
      DcProblem dc;
      dc.bvp = bvp;
      dc.tol = s.tol;
      dc.guess_v0 = dc_guess(s, run.solution.v0);
      t0 = std::chrono::steady_clock::now();
      const DcSolution d = dc_solve(dc);
      row.dc_wall = seconds_since(t0);
      row.dc_converged = d.converged;
      row.dc_iterations = d.iterations;
      row.dc_error = closure_error(bvp, d.v0);
    } catch (const Error& e) {
      if (row.note.empty()) row.note = std::string("dc_") + to_string(e.code());
    }
  } catch (const std::exception& e) {
    row.tfc_stop = "error";
    row.note = error_note(e);
  }
  return row;
}

int run_sweep(const std::filesystem::path& file, const std::filesystem::path& out, int jobs) {
  const nlohmann::json doc = load_json(file);
  const Scenario base = parse_scenario(doc, file.parent_path());
  const SweepSpec spec = parse_sweep(doc);

  std::vector<SweepRow> rows(spec.values.size());
  parallel_for(rows.size(), jobs,
               [&](std::size_t i) { rows[i] = sweep_point(base, spec.axis, spec.values[i]); });

  const bool tof_axis = spec.axis == SweepAxis::tof;
  auto csv = open_csv(out / (base.name + "_sweep.csv"));
  csv << to_string(spec.axis)
      << ",tfc_converged,tfc_stop,tfc_iterations,tfc_residual,tfc_endpoint_error,tfc_wall_s,"
         "dc_converged,dc_iterations,dc_endpoint_error,dc_wall_s,oracle_endpoint_error,oracle_wall_s,"
         "note\n";
  for (const SweepRow& r : rows) {
    // Time-of-flight values are written in seconds like every other time.
    csv << num(tof_axis ? r.axis_value * base.tof_unit : r.axis_value) << ','
        << flag(r.tfc_converged) << ',' << r.tfc_stop << ',' << r.tfc_iterations << ','
        << num(r.tfc_residual) << ',' << num(r.tfc_error) << ',' << num(r.tfc_wall) << ','
        << flag(r.dc_converged) << ',' << r.dc_iterations << ',' << num(r.dc_error) << ','
        << num(r.dc_wall) << ',' << num(r.oracle_error) << ',' << num(r.oracle_wall) << ','
        << r.note << '\n';
  }
  std::size_t converged = 0;
  for (const SweepRow& r : rows) converged += r.tfc_converged ? 1 : 0;
  std::cout << base.name << ": " << rows.size() << " points, " << converged << " tfc converged\n";
  return exit_ok;
}

PolyscanRow polyscan_cell(const Scenario& base, int degree, double alpha, double ratio) {
  PolyscanRow row;
  row.degree = degree;
  row.alpha = alpha;
  row.radius_ratio = ratio;
  row.residual = row.endpoint_error = kNaN;
  try {
    const Scenario s = at_polyscan_cell(base, degree, alpha, ratio);
    row.rf_radius = s.geometry->rf_radius;
    const auto t0 = std::chrono::steady_clock::now();
    const Solution sol = solve(s.problem(), s.solver_config());
    row.wall = seconds_since(t0);
    row.converged = sol.diagnostics.converged;
    row.stop = to_string(sol.diagnostics.stop);
    row.iterations = sol.diagnostics.iterations;
    row.residual = sol.diagnostics.final_residual();
    // Error metric: two-body propagation of the TFC departure velocity.
    row.endpoint_error = closure_error(s.problem(false), sol.v0);
  } catch (const std::exception& e) {
    row.stop = "error";
    row.note = error_note(e);
  }
  return row;
}

int run_polyscan(const std::filesystem::path& file, const std::filesystem::path& out, int jobs) {
  const nlohmann::json doc = load_json(file);
  const Scenario base = parse_scenario(doc, file.parent_path());
  const PolyscanSpec spec = parse_polyscan(doc);
  if (!base.geometry) throw ScenarioError("polyscan needs a geometry recipe");

  struct Cell {
    int degree;
    double alpha;
    double ratio;
  };
  std::vector<Cell> cells;
  for (double ratio : spec.radius_ratios) {
    for (int degree : spec.degrees) {
      for (double alpha : spec.alphas) cells.push_back({degree, alpha, ratio});
    }
  }
  std::vector<PolyscanRow> rows(cells.size());
  parallel_for(cells.size(), jobs, [&](std::size_t i) {
    rows[i] = polyscan_cell(base, cells[i].degree, cells[i].alpha, cells[i].ratio);
  });

  auto csv = open_csv(out / (base.name + "_polyscan.csv"));
  csv << "degree,alpha,rf_r0,rf_radius,converged,stop,iterations,final_residual,endpoint_error,"
         "wall_s,note\n";
  std::size_t converged = 0;
  for (const PolyscanRow& r : rows) {
    csv << r.degree << ',' << num(r.alpha) << ',' << num(r.radius_ratio) << ',' << num(r.rf_radius)
        << ',' << flag(r.converged) << ',' << r.stop << ',' << r.iterations << ',' << num(r.residual)
        << ',' << num(r.endpoint_error) << ',' << num(r.wall) << ',' << r.note << '\n';
    converged += r.converged ? 1 : 0;
  }
  std::cout << base.name << ": " << rows.size() << " cells, " << converged << " converged\n";
  return exit_ok;
}

int run_compare(const std::filesystem::path& file, const std::filesystem::path& out, bool svg) {
  const Scenario scenario = load_scenario(file);
  const BoundaryValueProblem bvp = scenario.problem();
  const SolverConfig config = scenario.solver_config();

  const TfcRun run = run_tfc(scenario);
  const Solution unperturbed =
      run.unperturbed ? *run.unperturbed : solve(scenario.problem(false), config);
  const Solution& sol = run.solution;

  DcProblem dc;
  dc.bvp = bvp;
  dc.tol = scenario.tol;
  dc.guess_v0 = dc_guess(scenario, unperturbed.v0);
  const DcSolution d = dc_solve(dc);

  const std::vector<double> times = uniform_times(bvp.tof, 1000);
  const bool tfc_ok = std::isfinite(sol.diagnostics.final_residual());
  const bool unp_ok = std::isfinite(unperturbed.diagnostics.final_residual());
  std::vector<CartesianState> tfc_states, unp_states;
  if (tfc_ok) tfc_states = sample_solution(sol, times);
  if (unp_ok) unp_states = sample_solution(unperturbed, times);
  const std::vector<CartesianState> dc_states =
      propagate(bvp.r0, d.v0, bvp.tof, bvp.mu, bvp.perturbations, {}, times).samples;

  double max_pert = 0.0, max_dc = 0.0;
  {
    auto csv = open_csv(out / (scenario.name + "_compare.csv"));
    csv << "t,pert_minus_unpert,tfc_minus_dc\n";
    for (std::size_t i = 0; i < times.size(); ++i) {
      const double a = tfc_ok && unp_ok ? (tfc_states[i].r - unp_states[i].r).norm() : kNaN;
      const double b = tfc_ok ? (tfc_states[i].r - dc_states[i].r).norm() : kNaN;
      max_pert = std::max(max_pert, a);
      max_dc = std::max(max_dc, b);
      csv << num(times[i]) << ',' << num(a) << ',' << num(b) << '\n';
    }
  }
  const double vu = sol.scaling.velocity();
  {
    auto csv = open_csv(out / (scenario.name + "_compare_summary.csv"));
    csv << "name,tfc_converged,tfc_iterations,tfc_residual,unperturbed_converged,"
           "unperturbed_iterations,dc_converged,dc_iterations,v0_diff_nondim,tfc_closure,dc_closure,"
           "max_pert_minus_unpert,max_tfc_minus_dc,warm_start\n";
    csv << scenario.name << ',' << flag(sol.diagnostics.converged) << ',' << sol.diagnostics.iterations
        << ',' << num(sol.diagnostics.final_residual()) << ','
        << flag(unperturbed.diagnostics.converged) << ',' << unperturbed.diagnostics.iterations << ','
        << flag(d.converged) << ',' << d.iterations << ',' << num((sol.v0 - d.v0).norm() / vu) << ','
        << num(run.closure) << ',' << num(closure_error(bvp, d.v0)) << ',' << num(max_pert) << ','
        << num(max_dc) << ',' << run.warm_start << '\n';
  }
  if (svg && tfc_ok) {
    std::vector<Polyline> lines;
    if (unp_ok) lines.push_back(project(unp_states, sol.frame, "#999999", "unperturbed", true));
    lines.push_back(project(dc_states, sol.frame, "#d62728", "dc", true));
    lines.push_back(project(tfc_states, sol.frame, "#1f77b4", "tfc"));
    write_svg(out / (scenario.name + "_compare.svg"), scenario.name, lines);
  }
  std::cout << scenario.name << ": tfc converged=" << flag(sol.diagnostics.converged)
            << " dc converged=" << flag(d.converged) << " |dv0|=" << num((sol.v0 - d.v0).norm() / vu)
            << " max|pert-unpert|=" << num(max_pert) << '\n';
  return sol.diagnostics.converged ? exit_ok : exit_not_converged;
}

}  // namespace tfc::cli
