#pragma once

#include "stlsynth/scenarios.hpp"
#include "stlsynth/system.hpp"

#include <fstream>
#include <string>
#include <vector>

namespace stlsynth {

namespace detail {

inline const char* kTargetPalette[] = {"#4a7fd4", "#d9534f", "#2e9e4f", "#e8923a",
                                       "#8e5bb5"};

/// Region fill from the naming convention: O obstacles grey, G goals green,
/// D doors red, K keys blue, T targets cycle through the palette.
inline std::string region_color(const std::string& name, int& target_index) {
  if (name.empty()) return "#bbbbbb";
  switch (name[0]) {
    case 'O': return "#9e9e9e";
    case 'G': return "#2e9e4f";
    case 'D': return "#d9534f";
    case 'K': return "#4a7fd4";
    case 'T': {
      const char* c = kTargetPalette[target_index % 5];
      ++target_index;
      return c;
    }
    default: return "#bbbbbb";
  }
}

}  // namespace detail

/// Renders the 15x15 workspace, its regions, and the output trajectory as a
/// standalone SVG. Identical inputs produce byte-identical output.
inline std::string trajectory_svg(const std::vector<Region>& regions,
                                  const Trajectory& traj) {
  constexpr double kScale = 40.0;   // px per meter
  constexpr double kSide = 600.0;   // 15 m
  auto px = [&](double x) { return format_double(x * kScale); };
  auto py = [&](double y) { return format_double(kSide - y * kScale); };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"600\" height=\"600\" "
         "viewBox=\"0 0 600 600\">\n";
  svg += "<rect x=\"0\" y=\"0\" width=\"600\" height=\"600\" fill=\"#ffffff\" "
         "stroke=\"#333333\" stroke-width=\"2\"/>\n";
  int target_index = 0;
  for (const auto& region : regions) {
    if (region.axes.size() != 2) continue;
    const double w = region.axes[0].upper - region.axes[0].lower;
    const double h = region.axes[1].upper - region.axes[1].lower;
    svg += "<rect x=\"" + px(region.axes[0].lower) + "\" y=\"" + py(region.axes[1].upper) +
           "\" width=\"" + format_double(w * kScale) + "\" height=\"" +
           format_double(h * kScale) + "\" fill=\"" +
           detail::region_color(region.name, target_index) +
           "\" fill-opacity=\"0.55\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
    svg += "<text x=\"" + px(region.axes[0].lower + 0.15) + "\" y=\"" +
           py(region.axes[1].upper - 0.45) +
           "\" font-family=\"sans-serif\" font-size=\"14\" fill=\"#222222\">" +
           region.name + "</text>\n";
  }
  if (!traj.y.empty()) {
    std::string points;
    for (const auto& y : traj.y) {
      if (!points.empty()) points += " ";
      points += px(y[0]) + "," + py(y[1]);
    }
    svg += "<polyline points=\"" + points +
           "\" fill=\"none\" stroke=\"#111111\" stroke-width=\"2\"/>\n";
    for (const auto& y : traj.y)
      svg += "<circle cx=\"" + px(y[0]) + "\" cy=\"" + py(y[1]) +
             "\" r=\"3\" fill=\"#111111\"/>\n";
    svg += "<circle cx=\"" + px(traj.y.front()[0]) + "\" cy=\"" + py(traj.y.front()[1]) +
           "\" r=\"7\" fill=\"none\" stroke=\"#2e9e4f\" stroke-width=\"3\"/>\n";
    svg += "<circle cx=\"" + px(traj.y.back()[0]) + "\" cy=\"" + py(traj.y.back()[1]) +
           "\" r=\"7\" fill=\"none\" stroke=\"#d9534f\" stroke-width=\"3\"/>\n";
  }
  svg += "</svg>\n";
  return svg;
}

inline void plot_trajectory(const Scenario& scenario, const Trajectory& traj,
                            const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("plot_trajectory: cannot open '" + path + "'");
  out << trajectory_svg(scenario.regions, traj);
  if (!out) throw std::runtime_error("plot_trajectory: write to '" + path + "' failed");
}

}  // namespace stlsynth
