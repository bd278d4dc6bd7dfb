#include "svg.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace tfc::cli {

void write_svg(const std::filesystem::path& path, const std::string& title,
               const std::vector<Polyline>& lines) {
  constexpr double kSize = 600.0;
  constexpr double kMargin = 40.0;

  Eigen::Vector2d lo = Eigen::Vector2d::Zero();
  Eigen::Vector2d hi = Eigen::Vector2d::Zero();
  for (const auto& line : lines) {
    for (const auto& p : line.points) {
      if (!p.allFinite()) continue;
      lo = lo.cwiseMin(p);
      hi = hi.cwiseMax(p);
    }
  }
  const double span = std::max({hi.x() - lo.x(), hi.y() - lo.y(), std::numeric_limits<double>::min()});
  const double scale = (kSize - 2.0 * kMargin) / span;
  auto map = [&](const Eigen::Vector2d& p) {
    return Eigen::Vector2d(kMargin + (p.x() - lo.x()) * scale, kSize - kMargin - (p.y() - lo.y()) * scale);
  };

  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kSize << "\" height=\"" << kSize
      << "\" viewBox=\"0 0 " << kSize << ' ' << kSize << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << kMargin << "\" y=\"24\" font-family=\"sans-serif\" font-size=\"14\">" << title
      << "</text>\n";
  const Eigen::Vector2d origin = map(Eigen::Vector2d::Zero());
  out << "<circle cx=\"" << origin.x() << "\" cy=\"" << origin.y() << "\" r=\"5\" fill=\"#555\"/>\n";

  double legend_y = 44.0;
  for (const auto& line : lines) {
    out << "<polyline fill=\"none\" stroke=\"" << line.color << "\" stroke-width=\"1.5\"";
    if (line.dashed) out << " stroke-dasharray=\"6 4\"";
    out << " points=\"";
    for (const auto& p : line.points) {
      if (!p.allFinite()) continue;
      const Eigen::Vector2d q = map(p);
      out << q.x() << ',' << q.y() << ' ';
    }
    out << "\"/>\n";
    if (!line.label.empty()) {
      out << "<text x=\"" << kSize - 200.0 << "\" y=\"" << legend_y
          << "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"" << line.color << "\">" << line.label
          << "</text>\n";
      legend_y += 16.0;
    }
  }
  out << "</svg>\n";
}

}  // namespace tfc::cli
