#include "stlsynth/system.hpp"

#include <catch_amalgamated.hpp>

#include <random>

using namespace stlsynth;

namespace {

std::vector<Eigen::VectorXd> constant_inputs(int count, double ux, double uy) {
  Eigen::VectorXd u(2);
  u << ux, uy;
  return std::vector<Eigen::VectorXd>(count, u);
}

}  // namespace

TEST_CASE("identity dynamics hold the state") {
  LinearSystem sys;
  sys.A = Eigen::MatrixXd::Identity(2, 2);
  sys.B = Eigen::MatrixXd::Zero(2, 1);
  sys.C = Eigen::MatrixXd::Identity(2, 2);
  sys.D = Eigen::MatrixXd::Zero(2, 1);
  sys.x_bounds = {{-10, 10}, {-10, 10}};
  sys.u_bounds = {{-1, 1}};
  sys.y_bounds = {{-10, 10}, {-10, 10}};

  Eigen::VectorXd x0(2);
  x0 << 3.0, -2.0;
  const std::vector<Eigen::VectorXd> u(6, Eigen::VectorXd::Constant(1, 0.7));
  const Trajectory traj = rollout(sys, x0, u);
  REQUIRE(traj.length() == 6);
  for (const auto& x : traj.x) CHECK((x - x0).cwiseAbs().maxCoeff() == 0.0);
  for (const auto& y : traj.y) CHECK((y - x0).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("double integrator block structure and bounds") {
  const LinearSystem sys = double_integrator();
  sys.validate();
  CHECK(sys.state_dim() == 4);
  CHECK(sys.input_dim() == 2);
  CHECK(sys.output_dim() == 2);
  // position row: x+ = x + vx
  CHECK(sys.A(0, 0) == 1.0);
  CHECK(sys.A(0, 2) == 1.0);
  CHECK(sys.A(0, 1) == 0.0);
  CHECK(sys.B(2, 0) == 1.0);
  CHECK(sys.B(0, 0) == 0.0);
  CHECK(sys.C(0, 0) == 1.0);
  CHECK(sys.D.isZero());
  CHECK(sys.x_bounds[0].upper == 15.0);
  CHECK(sys.x_bounds[2].lower == -1.0);
  CHECK(sys.x_bounds[2].upper == 1.0);
  CHECK(sys.u_bounds[0].lower == -0.5);
  CHECK(sys.u_bounds[0].upper == 0.5);
  CHECK(sys.y_bounds[1].upper == 15.0);
}

TEST_CASE("double integrator accelerates monotonically under constant push") {
  const LinearSystem sys = double_integrator();
  const Eigen::VectorXd x0 = Eigen::VectorXd::Zero(4);
  const Trajectory traj = rollout(sys, x0, constant_inputs(8, 0.5, 0.0));
  for (int t = 1; t < traj.length(); ++t) {
    CHECK(traj.x[t][0] > traj.x[t - 1][0] - 1e-12);
    CHECK(traj.x[t][1] == 0.0);
  }
  // closed form: position accumulates sum of velocities 0, .5, 1, ...
  CHECK(traj.x[2][0] == 0.5);
  CHECK(traj.x[3][0] == 1.5);
  // D = 0 so y is exactly Cx
  for (int t = 0; t < traj.length(); ++t) {
    CHECK(traj.y[t][0] == traj.x[t][0]);
    CHECK(traj.y[t][1] == traj.x[t][1]);
  }
}

TEST_CASE("rollout is linear in initial state and inputs") {
  const LinearSystem sys = double_integrator();
  std::mt19937 rng(20240930);
  std::uniform_real_distribution<double> d(-0.5, 0.5);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::VectorXd xa(4), xb(4);
    for (int i = 0; i < 4; ++i) {
      xa[i] = d(rng);
      xb[i] = d(rng);
    }
    std::vector<Eigen::VectorXd> ua, ub, uc;
    const double alpha = 0.75, beta = -0.5;
    for (int t = 0; t < 5; ++t) {
      Eigen::VectorXd a(2), b(2);
      a << d(rng), d(rng);
      b << d(rng), d(rng);
      ua.push_back(a);
      ub.push_back(b);
      uc.push_back(alpha * a + beta * b);
    }
    const Trajectory ta = rollout(sys, xa, ua);
    const Trajectory tb = rollout(sys, xb, ub);
    const Trajectory tc = rollout(sys, alpha * xa + beta * xb, uc);
    for (int t = 0; t < 5; ++t) {
      CHECK((tc.x[t] - alpha * ta.x[t] - beta * tb.x[t]).cwiseAbs().maxCoeff() < 1e-9);
      CHECK((tc.y[t] - alpha * ta.y[t] - beta * tb.y[t]).cwiseAbs().maxCoeff() < 1e-9);
    }
  }
}

TEST_CASE("rollout validates dimensions") {
  const LinearSystem sys = double_integrator();
  CHECK_THROWS_AS(rollout(sys, Eigen::VectorXd::Zero(3), constant_inputs(3, 0, 0)),
                  std::invalid_argument);
  CHECK_THROWS_AS(rollout(sys, Eigen::VectorXd::Zero(4),
                          std::vector<Eigen::VectorXd>(3, Eigen::VectorXd::Zero(1))),
                  std::invalid_argument);
}

TEST_CASE("trajectory residual flags broken dynamics") {
  const LinearSystem sys = double_integrator();
  Trajectory traj = rollout(sys, Eigen::VectorXd::Zero(4), constant_inputs(5, 0.25, -0.25));
  CHECK(trajectory_residual(sys, traj) < 1e-12);
  traj.y[2][0] += 0.01;
  CHECK(trajectory_residual(sys, traj) > 0.009);
}
