#pragma once

#include <Eigen/Dense>

#include <filesystem>
#include <string>
#include <vector>

namespace tfc::cli {

struct Polyline {
  std::vector<Eigen::Vector2d> points;
  std::string color = "#1f77b4";
  std::string label;
  bool dashed = false;
};

/// Equal-aspect plot of the polylines with the primary marked at the origin.
void write_svg(const std::filesystem::path& path, const std::string& title,
               const std::vector<Polyline>& lines);

}  // namespace tfc::cli
