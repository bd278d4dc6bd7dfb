#include "runner.hpp"

#include <CLI11.hpp>

#include <iostream>

using namespace tfc::cli;

namespace {

int guarded(const std::function<int()>& body) {
  try {
    return body();
  } catch (const ScenarioError& e) {
    std::cerr << "scenario error: " << e.what() << '\n';
    return exit_parse;
  } catch (const tfc::Error& e) {
    std::cerr << "error (" << tfc::to_string(e.code()) << "): " << e.what() << '\n';
    return e.code() == tfc::ErrorCode::singular_geometry ? exit_singular : exit_failure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_failure;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Perturbed Lambert solver based on the theory of functional connections"};
  app.require_subcommand(1);

  std::string file;
  std::optional<std::string> out;
  bool svg = false;
  int jobs = 1;

  auto* solve_cmd = app.add_subcommand("solve", "Solve one scenario and write CSV artifacts");
  solve_cmd->add_option("file", file, "Scenario JSON")->required();
  solve_cmd->add_flag("--svg", svg, "Also write an SVG plot of the arc");
  solve_cmd->add_option("--out", out, "Output directory (default $TFC_LAMBERT_OUT or .)");

  auto* sweep_cmd = app.add_subcommand("sweep", "Time-of-flight, angle or chord sweep");
  sweep_cmd->add_option("file", file, "Sweep JSON")->required();
  sweep_cmd->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--out", out, "Output directory (default $TFC_LAMBERT_OUT or .)");

  auto* scan_cmd = app.add_subcommand("polyscan", "Degree-alpha convergence scan");
  scan_cmd->add_option("file", file, "Polyscan JSON")->required();
  scan_cmd->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
  scan_cmd->add_option("--out", out, "Output directory (default $TFC_LAMBERT_OUT or .)");

  auto* compare_cmd = app.add_subcommand("compare", "TFC vs differential corrections vs unperturbed");
  compare_cmd->add_option("file", file, "Scenario JSON")->required();
  compare_cmd->add_flag("--svg", svg, "Also write an SVG plot");
  compare_cmd->add_option("--out", out, "Output directory (default $TFC_LAMBERT_OUT or .)");

  CLI11_PARSE(app, argc, argv);

  return guarded([&] {
    const std::filesystem::path dir = resolve_out_dir(out);
    if (solve_cmd->parsed()) return run_solve(file, dir, svg);
    if (sweep_cmd->parsed()) return run_sweep(file, dir, jobs);
    if (scan_cmd->parsed()) return run_polyscan(file, dir, jobs);
    return run_compare(file, dir, svg);
  });
}
