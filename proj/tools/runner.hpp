#pragma once

#include "scenario.hpp"

#include "tfc/reference.hpp"

#include <atomic>
#include <filesystem>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace tfc::cli {

enum ExitCode : int {
  exit_ok = 0,
  exit_failure = 1,
  exit_parse = 2,
  exit_singular = 3,
  exit_not_converged = 4,
};

struct TfcRun {
  Solution solution;
  /// The unperturbed solve used for the warm start, when one was made.
  std::optional<Solution> unperturbed;
  /// "none", "unperturbed", or "cold_fallback" when the warm start failed.
  std::string warm_start = "none";
  /// |propagate(r0, v0, tof) - rf| with the scenario's models, file units.
  double closure = 0.0;
};

/// TFC solve honoring the scenario's warm-start choice.
[[nodiscard]] TfcRun run_tfc(const Scenario& scenario);

/// Endpoint miss of an RK propagation from (r0, v0); NaN when v0 is not
/// finite or the integration fails.
[[nodiscard]] double closure_error(const BoundaryValueProblem& bvp, const Vec3& v0);

/// Departure velocity guess for differential corrections: the universal
/// variable solution (single revolution, unperturbed geometry) or a
/// tangential Hohmann-like speed along t0_hat.
[[nodiscard]] Vec3 dc_guess(const Scenario& scenario, const std::optional<Vec3>& fallback = {});

/// Output directory: explicit flag, else $TFC_LAMBERT_OUT, else ".".
[[nodiscard]] std::filesystem::path resolve_out_dir(const std::optional<std::string>& flag);

void write_solution_csv(const std::filesystem::path& path, const Solution& sol, int samples = 1000);
void write_diag_csv(const std::filesystem::path& path, const Diagnostics& diag);
void write_summary_csv(const std::filesystem::path& path, const Scenario& scenario, const TfcRun& run);

[[nodiscard]] int run_solve(const std::filesystem::path& file, const std::filesystem::path& out,
                            bool svg);
[[nodiscard]] int run_sweep(const std::filesystem::path& file, const std::filesystem::path& out,
                            int jobs);
[[nodiscard]] int run_polyscan(const std::filesystem::path& file, const std::filesystem::path& out,
                               int jobs);
[[nodiscard]] int run_compare(const std::filesystem::path& file, const std::filesystem::path& out,
                              bool svg);

struct SweepRow {
  double axis_value = 0.0;
  bool tfc_converged = false;
  std::string tfc_stop;
  int tfc_iterations = 0;
  double tfc_residual = 0.0;
  double tfc_error = 0.0;
  double tfc_wall = 0.0;
  bool dc_converged = false;
  int dc_iterations = 0;
  double dc_error = 0.0;
  double dc_wall = 0.0;
  /// NaN when no oracle applies (perturbed or multi-revolution).
  double oracle_error = 0.0;
  double oracle_wall = 0.0;
  std::string note;
};

struct PolyscanRow {
  int degree = 0;
  double alpha = 0.0;
  double radius_ratio = 0.0;
  double rf_radius = 0.0;
  bool converged = false;
  std::string stop;
  int iterations = 0;
  double residual = 0.0;
  double endpoint_error = 0.0;
  double wall = 0.0;
  std::string note;
};

[[nodiscard]] SweepRow sweep_point(const Scenario& base, SweepAxis axis, double value);
[[nodiscard]] PolyscanRow polyscan_cell(const Scenario& base, int degree, double alpha,
                                        double ratio);

/// Runs fn(0..n-1) on up to `jobs` threads; fn writes its own slot.
template <typename Fn>
void parallel_for(std::size_t n, int jobs, Fn fn) {
  const auto workers = static_cast<std::size_t>(std::max(1, jobs));
  if (workers == 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  for (std::size_t w = 0; w < std::min(workers, n); ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) fn(i);
    });
  }
}

}  // namespace tfc::cli
