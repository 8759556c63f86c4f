// stl-synth: trajectory synthesis for signal temporal logic over
// discrete-time linear systems, with two mixed-integer encodings, an
// internal branch-and-bound solver, and LP-file export for external
// solvers.

#include "stlsynth/stlsynth.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

using nlohmann::json;

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

/// Region list in file order (the map loses it, plots want it).
std::vector<stlsynth::Region> load_regions_ordered(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open region file '" + path + "'");
  json j;
  in >> j;
  auto by_name = stlsynth::parse_regions_json(j);
  std::vector<stlsynth::Region> ordered;
  for (const auto& entry : j.at("regions"))
    ordered.push_back(by_name.at(entry.at("name").get<std::string>()));
  return ordered;
}

Eigen::VectorXd parse_csv_vector(const std::string& text) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) values.push_back(std::stod(item));
  return Eigen::Map<const Eigen::VectorXd>(values.data(),
                                           static_cast<Eigen::Index>(values.size()));
}

json trajectory_json(const stlsynth::Trajectory& traj) {
  auto vectors = [](const std::vector<Eigen::VectorXd>& vs) {
    json arr = json::array();
    for (const auto& v : vs)
      arr.push_back(std::vector<double>(v.data(), v.data() + v.size()));
    return arr;
  };
  return json{{"x", vectors(traj.x)}, {"u", vectors(traj.u)}, {"y", vectors(traj.y)}};
}

json result_json(const stlsynth::SolveResult& res) {
  return json{{"status", stlsynth::to_string(res.status)},
              {"objective", res.objective},
              {"rho", res.rho},
              {"counts",
               {{"binary", res.stats.binary_count},
                {"continuous", res.stats.continuous_count},
                {"constraints", res.stats.constraint_count}}},
              {"time_ms", res.solve_time_ms},
              {"trajectory", trajectory_json(res.trajectory)}};
}

int exit_code(stlsynth::SolveStatus status) {
  switch (status) {
    case stlsynth::SolveStatus::Optimal: return 0;
    case stlsynth::SolveStatus::Infeasible: return 2;
    case stlsynth::SolveStatus::NodeLimit:
    case stlsynth::SolveStatus::TimeLimit: return 3;
  }
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"STL trajectory synthesis via mixed-integer programming"};
  app.require_subcommand(1);

  // ---- solve ----
  auto* solve = app.add_subcommand("solve", "encode and solve one specification");
  std::string spec_path, regions_path, encoding_name = "proposed", solver_name = "internal";
  std::string out_path, plot_path, export_path, x0_text = "1,1,0,0";
  int horizon = 10;
  bool flatten = false;
  double big_M = 0.0, rho_max = 0.0;
  solve->add_option("--spec", spec_path, "specification text file")->required();
  solve->add_option("--regions", regions_path, "region JSON file")->required();
  solve->add_option("--horizon", horizon, "trajectory horizon T")->required();
  solve->add_option("--encoding", encoding_name, "proposed|standard")
      ->check(CLI::IsMember({"proposed", "standard"}));
  solve->add_option("--solver", solver_name, "internal|lpfile")
      ->check(CLI::IsMember({"internal", "lpfile"}));
  solve->add_flag("--flatten", flatten, "flatten the tree before encoding");
  solve->add_option("--M", big_M, "big-M constant (default: derived)");
  solve->add_option("--rho-max", rho_max, "upper bound on rho (default: derived)");
  solve->add_option("--x0", x0_text, "initial state, comma separated");
  solve->add_option("--out", out_path, "write the result JSON here");
  solve->add_option("--plot", plot_path, "write an SVG of the trajectory here");
  solve->add_option("--export", export_path, "write the model in LP format here");

  // ---- count ----
  auto* count = app.add_subcommand("count", "print encoding statistics only");
  std::string c_spec, c_regions;
  int c_horizon = 10;
  count->add_option("--spec", c_spec, "specification text file")->required();
  count->add_option("--regions", c_regions, "region JSON file")->required();
  count->add_option("--horizon", c_horizon, "trajectory horizon T")->required();

  // ---- bench ----
  auto* bench = app.add_subcommand("bench", "run the benchmark suite");
  std::string suite = "paper", bench_out = "bench_out", bench_solver = "internal";
  std::string horizons_text = "10,25,50";
  bool counts_only = false, do_solve = false, quadratic = false;
  double bench_rho_max = 0.25;
  bench->add_option("--suite", suite, "benchmark suite (paper)")
      ->check(CLI::IsMember({"paper"}));
  bench->add_option("--horizons", horizons_text, "comma separated horizons");
  bench->add_flag("--counts-only", counts_only, "encode only, skip solving");
  bench->add_flag("--solve", do_solve, "solve each encoded instance");
  bench->add_option("--solver", bench_solver, "internal|lpfile")
      ->check(CLI::IsMember({"internal", "lpfile"}));
  bench->add_flag("--quadratic", quadratic,
                  "apply scenario Q/R running costs (forces LP-file export)");
  bench->add_option("--rho-max", bench_rho_max, "rho bound used for bench solves");
  bench->add_option("--out", bench_out, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*solve) {
      stlsynth::SpecSource src;
      src.text = read_file(spec_path);
      const auto regions = load_regions_ordered(regions_path);
      for (const auto& r : regions) src.regions.emplace(r.name, r);
      const stlsynth::Formula f = stlsynth::parse(src);

      stlsynth::EncoderConfig cfg;
      cfg.encoding = encoding_name == "proposed" ? stlsynth::EncodingKind::Proposed
                                                 : stlsynth::EncodingKind::Standard;
      cfg.flatten = flatten;
      cfg.big_M = big_M;
      cfg.rho_max = rho_max;
      const stlsynth::LinearSystem sys = stlsynth::double_integrator();
      const Eigen::VectorXd x0 = parse_csv_vector(x0_text);
      stlsynth::EncodedProblem ep = stlsynth::encode(f, sys, x0, horizon, cfg);

      if (!export_path.empty()) stlsynth::export_lp(ep.model, export_path);
      if (solver_name == "lpfile") {
        if (export_path.empty())
          throw std::runtime_error("--solver lpfile requires --export <file>");
        std::cout << "model written to " << export_path << " ("
                  << ep.stats.binary_count << " binaries, "
                  << ep.stats.continuous_count << " continuous, "
                  << ep.stats.constraint_count << " constraints)\n";
        return 0;
      }

      stlsynth::SolveResult res = stlsynth::solve_encoded(ep);
      const json out = result_json(res);
      if (!out_path.empty()) {
        std::ofstream os(out_path, std::ios::binary);
        if (!os) throw std::runtime_error("cannot write '" + out_path + "'");
        os << out.dump(2) << "\n";
      }
      std::cout << "status: " << stlsynth::to_string(res.status)
                << "  objective: " << res.objective << "  rho: " << res.rho
                << "  nodes: " << res.node_count << "  time: " << res.solve_time_ms
                << " ms\n";
      if (!plot_path.empty() && !res.trajectory.y.empty()) {
        stlsynth::Scenario pseudo;
        pseudo.regions = regions;
        stlsynth::plot_trajectory(pseudo, res.trajectory, plot_path);
      }
      return exit_code(res.status);
    }

    if (*count) {
      stlsynth::SpecSource src;
      src.text = read_file(c_spec);
      const auto regions = load_regions_ordered(c_regions);
      for (const auto& r : regions) src.regions.emplace(r.name, r);
      const stlsynth::Formula f = stlsynth::parse(src);
      const stlsynth::LinearSystem sys = stlsynth::double_integrator();
      const Eigen::VectorXd x0 = Eigen::VectorXd::Zero(sys.state_dim());

      std::cout << "encoding            binaries  continuous  constraints\n";
      auto print_row = [&](const std::string& label, const stlsynth::EncodingStats& st) {
        std::printf("%-18s %9d %11d %12d\n", label.c_str(), st.binary_count,
                    st.continuous_count, st.constraint_count);
      };
      stlsynth::EncoderConfig cfg;
      cfg.encoding = stlsynth::EncodingKind::Proposed;
      print_row("proposed", stlsynth::encode(f, sys, x0, c_horizon, cfg).stats);
      cfg.flatten = true;
      print_row("proposed+flatten", stlsynth::encode(f, sys, x0, c_horizon, cfg).stats);
      cfg.flatten = false;
      cfg.encoding = stlsynth::EncodingKind::Standard;
      print_row("standard", stlsynth::encode(f, sys, x0, c_horizon, cfg).stats);
      return 0;
    }

    if (*bench) {
      if (counts_only && do_solve)
        throw std::runtime_error("--counts-only and --solve are mutually exclusive");
      std::vector<int> horizons;
      {
        std::stringstream ss(horizons_text);
        std::string item;
        while (std::getline(ss, item, ',')) horizons.push_back(std::stoi(item));
      }
      stlsynth::BenchOptions opts;
      opts.solve = do_solve;
      opts.rho_max = bench_rho_max;
      opts.quadratic = quadratic;
      opts.solver = bench_solver == "internal" ? stlsynth::BenchSolver::Internal
                                               : stlsynth::BenchSolver::LpFileOnly;
      opts.output_dir = bench_out;
      std::filesystem::create_directories(bench_out);
      const auto records = stlsynth::run_benchmarks(
          stlsynth::paper_scenarios(),
          {stlsynth::EncodingKind::Proposed, stlsynth::EncodingKind::Standard}, horizons,
          opts);
      stlsynth::write_bench_outputs(records, bench_out);
      std::cout << stlsynth::bench_csv(records);
      std::cout << "wrote " << records.size() << " records to " << bench_out << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
