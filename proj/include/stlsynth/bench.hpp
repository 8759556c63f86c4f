#pragma once

#include "stlsynth/encoder.hpp"
#include "stlsynth/lp_io.hpp"
#include "stlsynth/plot.hpp"
#include "stlsynth/scenarios.hpp"
#include "stlsynth/solve.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace stlsynth {

struct BenchRecord {
  std::string scenario;
  int horizon = 0;
  std::string encoding;
  int binary_count = 0;
  int continuous_count = 0;
  int constraint_count = 0;
  std::string status;  // encoded | exported | optimal | infeasible | limit | error: ...
  double objective = 0.0;
  double rho = 0.0;
  double solve_time_ms = 0.0;
  std::int64_t node_count = 0;
};

enum class BenchSolver : std::uint8_t { Internal, LpFileOnly };

struct BenchOptions {
  bool solve = false;                // otherwise counts-only
  std::vector<int> solve_horizons;   // when solving, restrict solves to these (empty: all)
  double rho_max = 0.25;             // clipped robustness bound for bench solves
  bool flatten_proposed = true;      // flattened trees match the reported counts
  BenchSolver solver = BenchSolver::Internal;
  BnBOptions bnb;
  std::string output_dir;            // when set: lp files / svg plots land here
  bool quadratic = false;            // apply scenario Q/R (forces lp-file mode)
};

namespace detail {

inline bool contains(const std::vector<int>& values, int v) {
  return std::find(values.begin(), values.end(), v) != values.end();
}

}  // namespace detail

/// Encodes (and optionally solves) every (scenario, encoding, horizon)
/// combination. Per-record failures are captured in the record's status;
/// the sweep itself never aborts.
inline std::vector<BenchRecord> run_benchmarks(const std::vector<Scenario>& scenarios,
                                               const std::vector<EncodingKind>& encodings,
                                               const std::vector<int>& horizons,
                                               const BenchOptions& opts = {}) {
  std::vector<BenchRecord> records;
  for (const auto& scenario : scenarios) {
    for (const int T : horizons) {
      for (const EncodingKind encoding : encodings) {
        BenchRecord rec;
        rec.scenario = scenario.name;
        rec.horizon = T;
        rec.encoding = to_string(encoding);
        try {
          EncoderConfig cfg;
          cfg.encoding = encoding;
          cfg.flatten = encoding == EncodingKind::Proposed && opts.flatten_proposed;
          if (opts.solve) cfg.rho_max = opts.rho_max;
          if (opts.quadratic) {
            cfg.q_diag = scenario.q_diag;
            cfg.r_diag = scenario.r_diag;
          }
          const Formula f = scenario.formula(T);
          EncodedProblem ep = encode(f, scenario.system, scenario.x0, T, cfg);
          rec.binary_count = ep.stats.binary_count;
          rec.continuous_count = ep.stats.continuous_count;
          rec.constraint_count = ep.stats.constraint_count;
          rec.status = "encoded";

          const bool want_solve =
              opts.solve && (opts.solve_horizons.empty() ||
                             detail::contains(opts.solve_horizons, T));
          if (want_solve) {
            if (opts.solver == BenchSolver::LpFileOnly || opts.quadratic) {
              if (!opts.output_dir.empty()) {
                const auto path = std::filesystem::path(opts.output_dir) /
                                  (scenario.name + "_T" + std::to_string(T) + "_" +
                                   rec.encoding + ".lp");
                export_lp(ep.model, path.string());
              }
              rec.status = "exported";
            } else {
              SolveResult res = solve_encoded(ep, opts.bnb);
              rec.status = to_string(res.status);
              rec.objective = res.objective;
              rec.rho = res.rho;
              rec.solve_time_ms = res.solve_time_ms;
              rec.node_count = res.node_count;
              if (res.status == SolveStatus::Optimal && !opts.output_dir.empty()) {
                const auto path = std::filesystem::path(opts.output_dir) /
                                  (scenario.name + "_T" + std::to_string(T) + "_" +
                                   rec.encoding + ".svg");
                plot_trajectory(scenario, res.trajectory, path.string());
              }
            }
          }
        } catch (const std::exception& e) {
          rec.status = std::string("error: ") + e.what();
        }
        records.push_back(std::move(rec));
      }
    }
  }
  std::sort(records.begin(), records.end(), [](const BenchRecord& a, const BenchRecord& b) {
    if (a.scenario != b.scenario) return a.scenario < b.scenario;
    if (a.horizon != b.horizon) return a.horizon < b.horizon;
    return a.encoding < b.encoding;
  });
  return records;
}

inline std::string bench_csv(const std::vector<BenchRecord>& records) {
  std::string out =
      "scenario,horizon,encoding,binaries,continuous,constraints,status,objective,rho,"
      "solve_time_ms,node_count\n";
  for (const auto& r : records) {
    std::string status = r.status;
    for (auto& c : status)
      if (c == ',') c = ';';
    out += r.scenario + "," + std::to_string(r.horizon) + "," + r.encoding + "," +
           std::to_string(r.binary_count) + "," + std::to_string(r.continuous_count) + "," +
           std::to_string(r.constraint_count) + "," + status + "," +
           format_double(r.objective) + "," + format_double(r.rho) + "," +
           format_double(r.solve_time_ms) + "," + std::to_string(r.node_count) + "\n";
  }
  return out;
}

inline nlohmann::json bench_json(const std::vector<BenchRecord>& records) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : records) {
    arr.push_back({{"scenario", r.scenario},
                   {"horizon", r.horizon},
                   {"encoding", r.encoding},
                   {"counts",
                    {{"binary", r.binary_count},
                     {"continuous", r.continuous_count},
                     {"constraints", r.constraint_count}}},
                   {"status", r.status},
                   {"objective", r.objective},
                   {"rho", r.rho},
                   {"solve_time_ms", r.solve_time_ms},
                   {"node_count", r.node_count}});
  }
  return arr;
}

inline void write_bench_outputs(const std::vector<BenchRecord>& records,
                                const std::string& dir) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream csv(std::filesystem::path(dir) / "results.csv", std::ios::binary);
    if (!csv) throw std::runtime_error("cannot write results.csv under '" + dir + "'");
    csv << bench_csv(records);
  }
  {
    std::ofstream js(std::filesystem::path(dir) / "results.json", std::ios::binary);
    if (!js) throw std::runtime_error("cannot write results.json under '" + dir + "'");
    js << bench_json(records).dump(2) << "\n";
  }
}

}  // namespace stlsynth
