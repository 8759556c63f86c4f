#pragma once

#include "stlsynth/model.hpp"
#include "stlsynth/simplex.hpp"

#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <queue>
#include <utility>
#include <vector>

namespace stlsynth {

enum class SolveStatus : std::uint8_t { Optimal, Infeasible, NodeLimit, TimeLimit };

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::NodeLimit: return "node_limit";
    case SolveStatus::TimeLimit: return "time_limit";
  }
  return "?";
}

struct BnBOptions {
  double abs_gap = 1e-6;
  std::int64_t node_limit = 1000000;
  std::int64_t time_limit_ms = 0;  // 0: no limit (keeps runs deterministic)

  enum class BranchRule : std::uint8_t { MostFractional };
  enum class Search : std::uint8_t { BestBound };
  BranchRule branch_rule = BranchRule::MostFractional;
  Search search = Search::BestBound;

  void validate() const {
    if (abs_gap < 0 || node_limit <= 0 || time_limit_ms < 0)
      throw std::invalid_argument("BnBOptions: limits must be positive");
  }
};

/// Raw mixed-integer outcome, before any STL-level interpretation.
struct MilpOutcome {
  SolveStatus status = SolveStatus::Infeasible;
  double objective = 0.0;
  double best_bound = 0.0;
  double gap = 0.0;
  std::vector<double> primal;
  std::int64_t node_count = 0;
  std::int64_t lp_count = 0;
  double wall_ms = 0.0;
  std::vector<double> incumbent_history;
};

namespace detail {

struct BnBNode {
  double bound;
  std::int64_t id;
  std::vector<std::pair<int, std::uint8_t>> fixings;
};

struct BnBNodeOrder {
  // Best bound first; among equal bounds the most recently created node,
  // which makes the search dive while the bound plateau lasts.
  bool operator()(const BnBNode& a, const BnBNode& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;
    return a.id < b.id;
  }
};

inline double fractionality(double v) { return std::abs(v - std::round(v)); }

}  // namespace detail

/// Best-bound branch and bound on the binary variables of `model`, solving
/// bound-fixed LP relaxations with the internal simplex. Deterministic for
/// a fixed model and options when no time limit is set.
inline MilpOutcome branch_and_bound(const MilpModel& model, const BnBOptions& opts = {}) {
  opts.validate();
  const auto t_start = std::chrono::steady_clock::now();
  auto elapsed_ms = [&] {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                     t_start)
        .count();
  };

  SimplexSolver lp(model);
  const std::vector<int> binaries = model.binary_ids();
  const int n = model.var_count();
  std::vector<double> root_lb(n), root_ub(n);
  for (int j = 0; j < n; ++j) {
    root_lb[j] = model.variable(j).lower;
    root_ub[j] = model.variable(j).upper;
  }

  MilpOutcome out;
  constexpr double kInf = std::numeric_limits<double>::infinity();
  double incumbent = kInf;
  std::vector<double> incumbent_primal;
  double pruned_bound = kInf;  // least bound discarded by the gap rule

  std::priority_queue<detail::BnBNode, std::vector<detail::BnBNode>, detail::BnBNodeOrder>
      open;
  std::int64_t next_id = 0;
  open.push(detail::BnBNode{-kInf, next_id++, {}});

  std::vector<double> lb(n), ub(n);
  auto apply_fixings = [&](const std::vector<std::pair<int, std::uint8_t>>& fixings) {
    lb = root_lb;
    ub = root_ub;
    for (const auto& [var, val] : fixings) lb[var] = ub[var] = static_cast<double>(val);
  };

  auto accept_incumbent = [&](double obj, const std::vector<double>& primal) {
    if (obj < incumbent - 1e-12) {
      incumbent = obj;
      incumbent_primal = primal;
      out.incumbent_history.push_back(obj);
    }
  };

  auto open_bound = [&] {
    double b = open.empty() ? kInf : open.top().bound;
    return std::min(b, pruned_bound);
  };

  while (!open.empty()) {
    if (out.node_count >= opts.node_limit) {
      out.status = SolveStatus::NodeLimit;
      break;
    }
    if (opts.time_limit_ms > 0 && elapsed_ms() > static_cast<double>(opts.time_limit_ms)) {
      out.status = SolveStatus::TimeLimit;
      break;
    }
    detail::BnBNode node = open.top();
    open.pop();
    if (node.bound >= incumbent - opts.abs_gap) {
      pruned_bound = std::min(pruned_bound, node.bound);
      continue;
    }
    ++out.node_count;

    apply_fixings(node.fixings);
    LpResult relax = lp.solve_with_bounds(lb, ub);
    ++out.lp_count;
    if (relax.status == LpStatus::Unbounded) throw LpError("branch_and_bound: LP unbounded");
    if (relax.status == LpStatus::Infeasible) continue;
    if (relax.objective >= incumbent - opts.abs_gap) {
      pruned_bound = std::min(pruned_bound, relax.objective);
      continue;
    }

    int branch_var = -1;
    double branch_score = 1e-6;  // integrality tolerance
    double branch_value = 0.0;
    for (int b : binaries) {
      const double f = detail::fractionality(relax.primal[b]);
      if (f > branch_score) {
        branch_score = f;
        branch_var = b;
        branch_value = relax.primal[b];
      }
    }

    if (branch_var < 0) {
      accept_incumbent(relax.objective, relax.primal);
      continue;
    }

    // Rounding probe: fixing every binary to its rounded relaxation value
    // often completes a feasible point early, which the clipped-robustness
    // benchmark models then prove optimal immediately.
    const bool probe = out.node_count <= 64 || out.node_count % 8 == 0;
    if (probe) {
      auto probe_fix = node.fixings;
      for (int b : binaries) {
        const double v = relax.primal[b];
        probe_fix.emplace_back(b, static_cast<std::uint8_t>(v >= 0.5 ? 1 : 0));
      }
      apply_fixings(probe_fix);
      LpResult probed = lp.solve_with_bounds(lb, ub);
      ++out.lp_count;
      if (probed.status == LpStatus::Optimal) accept_incumbent(probed.objective, probed.primal);
      if (relax.objective >= incumbent - opts.abs_gap) {
        // This node's subtree cannot improve on the probe's solution.
        pruned_bound = std::min(pruned_bound, relax.objective);
        continue;
      }
    }

    auto down = node.fixings;
    down.emplace_back(branch_var, static_cast<std::uint8_t>(0));
    auto up = node.fixings;
    up.emplace_back(branch_var, static_cast<std::uint8_t>(1));
    // Push the away-branch first so the toward-branch gets the larger id
    // and is explored first among equal bounds.
    if (branch_value >= 0.5) {
      open.push(detail::BnBNode{relax.objective, next_id++, std::move(down)});
      open.push(detail::BnBNode{relax.objective, next_id++, std::move(up)});
    } else {
      open.push(detail::BnBNode{relax.objective, next_id++, std::move(up)});
      open.push(detail::BnBNode{relax.objective, next_id++, std::move(down)});
    }
  }

  if (out.status != SolveStatus::NodeLimit && out.status != SolveStatus::TimeLimit)
    out.status = std::isfinite(incumbent) ? SolveStatus::Optimal : SolveStatus::Infeasible;
  if (std::isfinite(incumbent)) {
    out.objective = incumbent;
    out.primal = std::move(incumbent_primal);
    out.best_bound = std::min(open_bound(), incumbent);
    out.gap = std::max(0.0, incumbent - out.best_bound);
  } else {
    out.best_bound = open_bound();
  }
  out.wall_ms = elapsed_ms();
  return out;
}

}  // namespace stlsynth
