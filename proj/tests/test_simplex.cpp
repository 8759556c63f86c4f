#include "fuzz_util.hpp"
#include "stlsynth/encoder.hpp"
#include "stlsynth/simplex.hpp"

#include <catch_amalgamated.hpp>

#include <Eigen/Dense>

#include <optional>
#include <random>

using namespace stlsynth;

namespace {

/// Independent LP oracle for small boxed models: enumerate every candidate
/// vertex as the solution of n active constraints chosen among rows-at-
/// equality and bounds, keep the feasible ones, and take the best.
std::optional<double> vertex_enumeration_optimum(const MilpModel& model) {
  const int n = model.var_count();
  struct Plane {
    Eigen::VectorXd a;
    double b;
  };
  std::vector<Plane> planes;
  for (const auto& row : model.rows()) {
    Eigen::VectorXd a = Eigen::VectorXd::Zero(n);
    for (const auto& [var, coeff] : row.terms) a[var] += coeff;
    planes.push_back({a, row.rhs});
  }
  for (int j = 0; j < n; ++j) {
    Eigen::VectorXd lo = Eigen::VectorXd::Zero(n);
    lo[j] = 1.0;
    planes.push_back({lo, model.variable(j).lower});
    planes.push_back({lo, model.variable(j).upper});
  }

  const int total = static_cast<int>(planes.size());
  std::vector<int> pick(n);
  std::optional<double> best;
  auto feasible = [&](const Eigen::VectorXd& x) {
    for (int j = 0; j < n; ++j)
      if (x[j] < model.variable(j).lower - 1e-7 || x[j] > model.variable(j).upper + 1e-7)
        return false;
    for (const auto& row : model.rows()) {
      double lhs = 0.0;
      for (const auto& [var, coeff] : row.terms) lhs += coeff * x[var];
      if (row.sense == RowSense::Equal ? std::abs(lhs - row.rhs) > 1e-7
                                       : lhs > row.rhs + 1e-7)
        return false;
    }
    return true;
  };
  std::function<void(int, int)> recurse = [&](int start, int depth) {
    if (depth == n) {
      Eigen::MatrixXd A(n, n);
      Eigen::VectorXd b(n);
      for (int k = 0; k < n; ++k) {
        A.row(k) = planes[pick[k]].a.transpose();
        b[k] = planes[pick[k]].b;
      }
      Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
      if (!lu.isInvertible()) return;
      const Eigen::VectorXd x = lu.solve(b);
      if (!feasible(x)) return;
      double obj = 0.0;
      for (int j = 0; j < n; ++j) obj += model.objective_linear()[j] * x[j];
      if (!best || obj < *best) best = obj;
      return;
    }
    for (int i = start; i < total; ++i) {
      pick[depth] = i;
      recurse(i + 1, depth + 1);
    }
  };
  recurse(0, 0);
  return best;
}

}  // namespace

TEST_CASE("one-variable problems solve to their bound") {
  MilpModel model;
  const int x = model.add_continuous("x", 0.0, 2.0, VarRole::State);
  model.add_row("cap", {{x, 1.0}}, RowSense::LessEqual, 1.0);
  model.set_objective_linear(x, -1.0);
  const LpResult res = solve_lp(model);
  REQUIRE(res.status == LpStatus::Optimal);
  CHECK_THAT(res.objective, Catch::Matchers::WithinAbs(-1.0, 1e-9));
  CHECK_THAT(res.primal[0], Catch::Matchers::WithinAbs(1.0, 1e-9));
}

TEST_CASE("contradictory rows are infeasible") {
  MilpModel model;
  const int x = model.add_continuous("x", -5.0, 5.0, VarRole::State);
  model.add_row("le", {{x, 1.0}}, RowSense::LessEqual, 0.0);
  model.add_row("ge", {{x, -1.0}}, RowSense::LessEqual, -1.0);  // x >= 1
  CHECK(solve_lp(model).status == LpStatus::Infeasible);
}

TEST_CASE("unbounded direction is reported") {
  MilpModel model;
  const int x = model.add_continuous(
      "x", 0.0, std::numeric_limits<double>::infinity(), VarRole::State);
  model.set_objective_linear(x, -1.0);
  CHECK(solve_lp(model).status == LpStatus::Unbounded);
}

TEST_CASE("equalities pin the solution") {
  MilpModel model;
  const int x = model.add_continuous("x", -10.0, 10.0, VarRole::State);
  const int y = model.add_continuous("y", -10.0, 10.0, VarRole::State);
  model.add_row("sum", {{x, 1.0}, {y, 1.0}}, RowSense::Equal, 3.0);
  model.add_row("diff", {{x, 1.0}, {y, -1.0}}, RowSense::Equal, 1.0);
  model.set_objective_linear(x, 1.0);
  const LpResult res = solve_lp(model);
  REQUIRE(res.status == LpStatus::Optimal);
  CHECK_THAT(res.primal[0], Catch::Matchers::WithinAbs(2.0, 1e-9));
  CHECK_THAT(res.primal[1], Catch::Matchers::WithinAbs(1.0, 1e-9));
}

TEST_CASE("quadratic objectives are rejected") {
  MilpModel model;
  const int x = model.add_continuous("x", 0.0, 1.0, VarRole::State);
  model.add_objective_quadratic(x, 1.0);
  CHECK_THROWS_AS(solve_lp(model), LpError);
}

TEST_CASE("relaxed SOS1 block still reaches the integral optimum") {
  MilpModel model;
  std::vector<int> lambda{model.add_continuous("l1", 0.0, 1.0, VarRole::Sat),
                          model.add_continuous("l2", 0.0, 1.0, VarRole::Sat)};
  encode_sos1_log(model, lambda, "t");
  model.set_objective_linear(lambda[0], -1.0);  // maximize lambda_1
  const LpResult res = solve_lp(model);
  REQUIRE(res.status == LpStatus::Optimal);
  CHECK_THAT(res.objective, Catch::Matchers::WithinAbs(-1.0, 1e-9));
}

TEST_CASE("random boxed LPs match the vertex enumeration oracle") {
  std::mt19937 rng(20241001);
  int solved = 0, infeasible = 0;
  for (int trial = 0; trial < 400; ++trial) {
    const MilpModel model = testutil::random_small_milp(rng, /*max_binaries=*/0);
    const auto oracle = vertex_enumeration_optimum(model);
    const LpResult res = solve_lp(model);
    INFO("trial " << trial);
    if (oracle) {
      ++solved;
      REQUIRE(res.status == LpStatus::Optimal);
      CHECK_THAT(res.objective, Catch::Matchers::WithinAbs(*oracle, 1e-6));
    } else {
      ++infeasible;
      REQUIRE(res.status == LpStatus::Infeasible);
    }
  }
  // the generator must exercise both outcomes
  CHECK(solved > 50);
  CHECK(infeasible > 20);
}

TEST_CASE("degenerate duplicated rows do not break the pivot rules") {
  MilpModel model;
  const int x = model.add_continuous("x", 0.0, 4.0, VarRole::State);
  const int y = model.add_continuous("y", 0.0, 4.0, VarRole::State);
  for (int k = 0; k < 5; ++k)
    model.add_row("dup" + std::to_string(k), {{x, 1.0}, {y, 1.0}}, RowSense::LessEqual, 2.0);
  model.add_row("fix", {{x, 1.0}, {y, -1.0}}, RowSense::Equal, 0.0);
  model.set_objective_linear(x, -1.0);
  model.set_objective_linear(y, -1.0);
  const LpResult res = solve_lp(model);
  REQUIRE(res.status == LpStatus::Optimal);
  CHECK_THAT(res.objective, Catch::Matchers::WithinAbs(-2.0, 1e-8));
}

TEST_CASE("fixed variables are honored and never enter the basis") {
  MilpModel model;
  const int x = model.add_continuous("x", 1.5, 1.5, VarRole::State);
  const int y = model.add_continuous("y", 0.0, 10.0, VarRole::State);
  model.add_row("link", {{x, 1.0}, {y, 1.0}}, RowSense::LessEqual, 4.0);
  model.set_objective_linear(y, -1.0);
  const LpResult res = solve_lp(model);
  REQUIRE(res.status == LpStatus::Optimal);
  CHECK_THAT(res.primal[0], Catch::Matchers::WithinAbs(1.5, 1e-12));
  CHECK_THAT(res.primal[1], Catch::Matchers::WithinAbs(2.5, 1e-9));
}

TEST_CASE("solver is deterministic") {
  std::mt19937 rng(20241002);
  const MilpModel model = testutil::random_small_milp(rng, 0);
  const LpResult a = solve_lp(model);
  const LpResult b = solve_lp(model);
  CHECK(a.status == b.status);
  CHECK(a.iterations == b.iterations);
  if (a.status == LpStatus::Optimal) CHECK(a.objective == b.objective);
}
