#pragma once

#include "stlsynth/bnb.hpp"
#include "stlsynth/encoder.hpp"
#include "stlsynth/lp_io.hpp"
#include "stlsynth/tree.hpp"

#include <cmath>
#include <string>
#include <utility>
#include <vector>

namespace stlsynth {

class VerificationError : public std::runtime_error {
 public:
  explicit VerificationError(const std::string& what)
      : std::runtime_error("solution verification failed: " + what) {}
};

/// Final synthesis result: solver outcome plus the decoded trajectory.
struct SolveResult {
  SolveStatus status = SolveStatus::Infeasible;
  double objective = 0.0;
  double rho = 0.0;
  double gap = 0.0;
  Trajectory trajectory;
  EncodingStats stats;
  std::int64_t node_count = 0;
  std::int64_t lp_count = 0;
  double solve_time_ms = 0.0;
  std::vector<double> incumbent_history;
  std::vector<double> primal;  // full model assignment when a point exists
};

inline Trajectory extract_trajectory(const EncodedProblem& ep,
                                     const std::vector<double>& primal) {
  Trajectory traj;
  const int n = ep.system.state_dim(), m = ep.system.input_dim(), p = ep.system.output_dim();
  for (int t = 0; t <= ep.horizon; ++t) {
    Eigen::VectorXd xt(n), ut(m), yt(p);
    for (int i = 0; i < n; ++i) xt[i] = primal.at(ep.vars.x[t][i]);
    for (int i = 0; i < m; ++i) ut[i] = primal.at(ep.vars.u[t][i]);
    for (int i = 0; i < p; ++i) yt[i] = primal.at(ep.vars.y[t][i]);
    traj.x.push_back(std::move(xt));
    traj.u.push_back(std::move(ut));
    traj.y.push_back(std::move(yt));
  }
  return traj;
}

namespace detail {

inline void check_model_point(const MilpModel& model, const std::vector<double>& primal) {
  if (static_cast<int>(primal.size()) != model.var_count())
    throw VerificationError("assignment size mismatch");
  for (const auto& row : model.rows()) {
    double lhs = 0.0;
    for (const auto& [var, coeff] : row.terms) lhs += coeff * primal[var];
    const double excess =
        row.sense == RowSense::Equal ? std::abs(lhs - row.rhs) : lhs - row.rhs;
    if (excess > 1e-8)
      throw VerificationError("constraint '" + row.name + "' violated by " +
                              std::to_string(excess));
  }
  for (int j = 0; j < model.var_count(); ++j) {
    const Variable& v = model.variable(j);
    if (primal[j] < v.lower - 1e-9 || primal[j] > v.upper + 1e-9)
      throw VerificationError("variable '" + v.name + "' outside its bounds");
    if (v.type == VarType::Binary && std::abs(primal[j] - std::round(primal[j])) > 1e-6)
      throw VerificationError("binary variable '" + v.name + "' is not integral");
  }
}

inline void check_enforced_nodes(const StlTree& node, const std::vector<double>& primal,
                                 const Signal& y) {
  // Proposition 1(1): any node with z = 1 must be satisfied by the signal.
  if (primal.at(node.sat_var_id) >= 1.0 - 1e-6) {
    if (tree_robustness(node, y) < -1e-6)
      throw VerificationError("node z_" + std::to_string(node.sat_var_id) +
                              " is enforced but its subformula is violated");
  }
  for (const auto& c : node.children) check_enforced_nodes(c, primal, y);
}

}  // namespace detail

/// Unconditional post-solve gate: dynamics residuals, model feasibility,
/// the robustness oracle on the trajectory, and the rho lower-bound claim.
inline void verify_solution(const EncodedProblem& ep, const std::vector<double>& primal) {
  detail::check_model_point(ep.model, primal);
  const Trajectory traj = extract_trajectory(ep, primal);
  const double resid = trajectory_residual(ep.system, traj);
  if (resid > 1e-9)
    throw VerificationError("trajectory dynamics residual " + std::to_string(resid));
  const Signal y = traj.output_signal();
  const double rho = primal.at(ep.vars.rho);
  if (rho < -1e-6) throw VerificationError("rho is negative");
  const double oracle = robustness(ep.formula, y, 0);
  if (oracle < -1e-6)
    throw VerificationError("oracle robustness " + std::to_string(oracle) +
                            " is negative on a claimed-feasible trajectory");
  if (rho > oracle + 1e-6)
    throw VerificationError("solver rho " + std::to_string(rho) +
                            " exceeds oracle robustness " + std::to_string(oracle));
  detail::check_enforced_nodes(ep.tree, primal, y);
}

/// Solves an encoded problem with the internal branch and bound and returns
/// the verified result. Quadratic objectives are rejected here; export the
/// model instead.
inline SolveResult solve_encoded(const EncodedProblem& ep, const BnBOptions& opts = {}) {
  MilpOutcome outcome = branch_and_bound(ep.model, opts);
  SolveResult result;
  result.status = outcome.status;
  result.objective = outcome.objective;
  result.gap = outcome.gap;
  result.stats = ep.stats;
  result.node_count = outcome.node_count;
  result.lp_count = outcome.lp_count;
  result.solve_time_ms = outcome.wall_ms;
  result.incumbent_history = std::move(outcome.incumbent_history);
  if (!outcome.primal.empty()) {
    verify_solution(ep, outcome.primal);
    result.trajectory = extract_trajectory(ep, outcome.primal);
    result.rho = outcome.primal.at(ep.vars.rho);
    result.primal = std::move(outcome.primal);
  }
  return result;
}

/// Reconstructs a result from an external "name value" solution file and
/// runs the same verification gate as the internal path.
inline SolveResult import_solution(const EncodedProblem& ep, const std::string& path) {
  std::vector<double> primal = read_solution_file(ep.model, path);
  verify_solution(ep, primal);
  SolveResult result;
  result.status = SolveStatus::Optimal;
  double obj = 0.0;
  for (int j = 0; j < ep.model.var_count(); ++j) {
    obj += ep.model.objective_linear()[j] * primal[j];
    obj += ep.model.objective_quadratic_diag()[j] * primal[j] * primal[j];
  }
  result.objective = obj;
  result.rho = primal.at(ep.vars.rho);
  result.stats = ep.stats;
  result.trajectory = extract_trajectory(ep, primal);
  result.primal = std::move(primal);
  return result;
}

}  // namespace stlsynth
