#pragma once

#include "stlsynth/parser.hpp"
#include "stlsynth/system.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace stlsynth {

/// A benchmark instance: regions, a spec template over the horizon symbol
/// {T} (and {T-5} for the dwell window), the system, and the start state.
struct Scenario {
  std::string name;
  std::vector<Region> regions;
  std::string spec_template;
  LinearSystem system;
  Eigen::VectorXd x0;
  Eigen::VectorXd q_diag;
  Eigen::VectorXd r_diag;
  std::vector<int> horizons;

  std::map<std::string, Region> region_map() const {
    std::map<std::string, Region> out;
    for (const auto& r : regions) out.emplace(r.name, r);
    return out;
  }

  std::string spec_text(int T) const {
    std::string text = spec_template;
    auto substitute = [&](const std::string& key, int value) {
      for (std::size_t at = text.find(key); at != std::string::npos;
           at = text.find(key, at)) {
        text.replace(at, key.size(), std::to_string(value));
      }
    };
    if (text.find("{T-5}") != std::string::npos && T < 5)
      throw std::invalid_argument("scenario '" + name + "': horizon " + std::to_string(T) +
                                  " underflows the {T-5} dwell window");
    substitute("{T-5}", T - 5);
    substitute("{T}", T);
    return text;
  }

  Formula formula(int T) const {
    SpecSource src;
    src.text = spec_text(T);
    src.regions = region_map();
    src.output_dim = system.output_dim();
    return parse(src);
  }

  void validate() const {
    system.validate();
    if (x0.size() != system.state_dim())
      throw std::invalid_argument("scenario '" + name + "': x0 dimension mismatch");
    for (int i = 0; i < system.state_dim(); ++i)
      if (x0[i] < system.x_bounds[i].lower || x0[i] > system.x_bounds[i].upper)
        throw std::invalid_argument("scenario '" + name + "': x0 outside state bounds");
    for (int T : horizons) (void)formula(T);  // must parse at every listed horizon
  }
};

namespace detail {

inline Region box(std::string name, double xmin, double xmax, double ymin, double ymax) {
  return Region{std::move(name), {{xmin, xmax}, {ymin, ymax}}};
}

inline Eigen::VectorXd planar_x0(double px, double py) {
  Eigen::VectorXd x0(4);
  x0 << px, py, 0.0, 0.0;
  return x0;
}

}  // namespace detail

/// Avoid an obstacle, dwell in one of two targets for six consecutive
/// samples, and reach the goal.
inline Scenario scenario_two_target() {
  Scenario s;
  s.name = "two_target";
  s.regions = {
      detail::box("T1", 1.0, 3.0, 1.0, 3.0),
      detail::box("T2", 11.0, 13.0, 1.0, 3.0),
      detail::box("O", 6.5, 8.5, 4.5, 6.5),
      detail::box("G", 4.5, 6.5, 1.0, 3.0),
  };
  s.spec_template =
      "F[0,{T-5}] (G[0,5] in(T1) | G[0,5] in(T2)) & G[0,{T}] out(O) & F[0,{T}] in(G)";
  s.system = double_integrator();
  s.x0 = detail::planar_x0(2.0, 2.0);
  s.horizons = {10, 25, 50};
  return s;
}

/// Reach one of two goals while avoiding four wall obstacles that leave
/// narrow passages.
inline Scenario scenario_narrow_passage() {
  Scenario s;
  s.name = "narrow_passage";
  s.regions = {
      detail::box("O1", 3.0, 4.5, 0.0, 6.5),
      detail::box("O2", 3.0, 4.5, 8.5, 15.0),
      detail::box("O3", 8.0, 9.5, 2.0, 7.0),
      detail::box("O4", 8.0, 9.5, 9.0, 13.0),
      detail::box("G1", 5.5, 7.5, 6.5, 8.5),
      detail::box("G2", 11.0, 13.0, 6.5, 8.5),
  };
  s.spec_template =
      "F[0,{T}] (in(G1) | in(G2)) & G[0,{T}] (out(O1) & out(O2) & out(O3) & out(O4))";
  s.system = double_integrator();
  s.x0 = detail::planar_x0(1.0, 7.5);
  s.horizons = {10, 25, 50};
  return s;
}

/// Visit at least one target from each of five groups; the first-choice
/// targets overlap along a corridor so a single sweep can cover them.
inline Scenario scenario_many_target() {
  Scenario s;
  s.name = "many_target";
  s.regions = {
      detail::box("T11", 1.0, 3.0, 1.0, 3.0),
      detail::box("T12", 2.0, 3.5, 11.0, 13.0),
      detail::box("T21", 2.0, 4.0, 1.0, 3.0),
      detail::box("T22", 4.0, 5.5, 11.0, 13.0),
      detail::box("T31", 3.0, 5.0, 1.0, 3.0),
      detail::box("T32", 6.0, 7.5, 11.0, 13.0),
      detail::box("T41", 4.0, 6.0, 1.0, 3.0),
      detail::box("T42", 8.0, 9.5, 11.0, 13.0),
      detail::box("T51", 5.0, 7.0, 1.0, 3.0),
      detail::box("T52", 10.0, 11.5, 11.0, 13.0),
      detail::box("O", 6.0, 9.0, 6.0, 9.0),
  };
  s.spec_template =
      "(F[0,{T}] in(T11) | F[0,{T}] in(T12)) & (F[0,{T}] in(T21) | F[0,{T}] in(T22)) & "
      "(F[0,{T}] in(T31) | F[0,{T}] in(T32)) & (F[0,{T}] in(T41) | F[0,{T}] in(T42)) & "
      "(F[0,{T}] in(T51) | F[0,{T}] in(T52)) & G[0,{T}] out(O)";
  s.system = double_integrator();
  s.x0 = detail::planar_x0(1.5, 2.0);
  s.horizons = {10, 25, 50};
  return s;
}

/// Collect both keys before passing the matching doors, then reach the
/// goal, avoiding five obstacles throughout.
inline Scenario scenario_door_puzzle() {
  Scenario s;
  s.name = "door_puzzle";
  s.regions = {
      detail::box("K1", 1.0, 3.0, 1.0, 3.0),
      detail::box("K2", 1.0, 3.0, 4.5, 6.5),
      detail::box("D1", 5.0, 7.0, 0.5, 2.5),
      detail::box("D2", 8.0, 10.0, 4.5, 6.5),
      detail::box("G", 4.5, 7.0, 4.5, 7.0),
      detail::box("O1", 9.0, 11.0, 1.0, 3.0),
      detail::box("O2", 12.0, 14.0, 5.0, 7.0),
      detail::box("O3", 9.0, 11.0, 9.0, 11.0),
      detail::box("O4", 4.0, 6.0, 9.0, 11.0),
      detail::box("O5", 12.0, 14.0, 12.0, 14.0),
  };
  s.spec_template =
      "(out(D1) U[0,{T}] in(K1)) & (out(D2) U[0,{T}] in(K2)) & F[0,{T}] in(G) & "
      "G[0,{T}] (out(O1) & out(O2) & out(O3) & out(O4) & out(O5))";
  s.system = double_integrator();
  s.x0 = detail::planar_x0(2.0, 2.0);
  s.horizons = {10, 25, 50};
  return s;
}

inline std::vector<Scenario> paper_scenarios() {
  return {scenario_two_target(), scenario_narrow_passage(), scenario_many_target(),
          scenario_door_puzzle()};
}

inline nlohmann::json regions_to_json(const std::vector<Region>& regions) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : regions) {
    if (r.axes.size() != 2)
      throw std::invalid_argument("regions_to_json: only planar regions serialize");
    arr.push_back({{"name", r.name},
                   {"xmin", r.axes[0].lower},
                   {"xmax", r.axes[0].upper},
                   {"ymin", r.axes[1].lower},
                   {"ymax", r.axes[1].upper}});
  }
  return nlohmann::json{{"regions", arr}};
}

inline nlohmann::json scenario_to_json(const Scenario& s) {
  nlohmann::json j;
  j["name"] = s.name;
  j["spec"] = s.spec_template;
  j["regions"] = regions_to_json(s.regions)["regions"];
  j["horizons"] = s.horizons;
  nlohmann::json sys;
  sys["kind"] = "double_integrator";
  sys["x0"] = std::vector<double>(s.x0.data(), s.x0.data() + s.x0.size());
  if (s.q_diag.size() > 0)
    sys["q"] = std::vector<double>(s.q_diag.data(), s.q_diag.data() + s.q_diag.size());
  if (s.r_diag.size() > 0)
    sys["r"] = std::vector<double>(s.r_diag.data(), s.r_diag.data() + s.r_diag.size());
  j["system"] = sys;
  return j;
}

inline Scenario scenario_from_json(const nlohmann::json& j) {
  Scenario s;
  s.name = j.at("name").get<std::string>();
  s.spec_template = j.at("spec").get<std::string>();
  const auto regions = parse_regions_json(nlohmann::json{{"regions", j.at("regions")}});
  // Preserve file order for plotting.
  for (const auto& entry : j.at("regions"))
    s.regions.push_back(regions.at(entry.at("name").get<std::string>()));
  if (j.contains("horizons")) s.horizons = j.at("horizons").get<std::vector<int>>();
  const auto& sys = j.at("system");
  if (sys.at("kind").get<std::string>() != "double_integrator")
    throw std::runtime_error("scenario system kind '" +
                             sys.at("kind").get<std::string>() + "' is not supported");
  s.system = double_integrator();
  auto read_bounds = [&](const char* key, std::vector<Interval>& target) {
    if (!sys.contains(key)) return;
    const auto& arr = sys.at(key);
    if (arr.size() != target.size())
      throw std::runtime_error(std::string("scenario bound override '") + key +
                               "' has the wrong length");
    for (std::size_t i = 0; i < target.size(); ++i)
      target[i] = Interval{arr[i][0].get<double>(), arr[i][1].get<double>()};
  };
  read_bounds("x_bounds", s.system.x_bounds);
  read_bounds("u_bounds", s.system.u_bounds);
  read_bounds("y_bounds", s.system.y_bounds);
  const auto x0 = sys.at("x0").get<std::vector<double>>();
  s.x0 = Eigen::Map<const Eigen::VectorXd>(x0.data(), static_cast<Eigen::Index>(x0.size()));
  if (sys.contains("q")) {
    const auto q = sys.at("q").get<std::vector<double>>();
    s.q_diag = Eigen::Map<const Eigen::VectorXd>(q.data(), static_cast<Eigen::Index>(q.size()));
  }
  if (sys.contains("r")) {
    const auto r = sys.at("r").get<std::vector<double>>();
    s.r_diag = Eigen::Map<const Eigen::VectorXd>(r.data(), static_cast<Eigen::Index>(r.size()));
  }
  s.validate();
  return s;
}

inline Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scenario file '" + path + "'");
  nlohmann::json j;
  in >> j;
  return scenario_from_json(j);
}

}  // namespace stlsynth
