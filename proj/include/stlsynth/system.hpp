#pragma once

#include "stlsynth/formula.hpp"

#include <Eigen/Core>

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace stlsynth {

struct Interval {
  double lower = 0.0;
  double upper = 0.0;
};

/// Discrete-time linear system x+ = A x + B u, y = C x + D u with box
/// bounds on state, input and output. Bounds must be finite; the encoder
/// derives big-M constants from them.
struct LinearSystem {
  Eigen::MatrixXd A, B, C, D;
  std::vector<Interval> x_bounds;
  std::vector<Interval> u_bounds;
  std::vector<Interval> y_bounds;

  int state_dim() const { return static_cast<int>(A.rows()); }
  int input_dim() const { return static_cast<int>(B.cols()); }
  int output_dim() const { return static_cast<int>(C.rows()); }

  void validate() const {
    const int n = state_dim(), m = input_dim(), p = output_dim();
    if (A.cols() != n) throw std::invalid_argument("LinearSystem: A must be square");
    if (B.rows() != n) throw std::invalid_argument("LinearSystem: B row count != n");
    if (C.cols() != n) throw std::invalid_argument("LinearSystem: C column count != n");
    if (D.rows() != p || D.cols() != m)
      throw std::invalid_argument("LinearSystem: D must be p x m");
    if (static_cast<int>(x_bounds.size()) != n || static_cast<int>(u_bounds.size()) != m ||
        static_cast<int>(y_bounds.size()) != p)
      throw std::invalid_argument("LinearSystem: bound list sizes must match dimensions");
    auto check_finite = [](const std::vector<Interval>& bounds, const char* which) {
      for (const auto& iv : bounds) {
        if (!std::isfinite(iv.lower) || !std::isfinite(iv.upper) || iv.lower > iv.upper)
          throw std::invalid_argument(std::string("LinearSystem: ") + which +
                                      " bounds must be finite with lower <= upper");
      }
    };
    check_finite(x_bounds, "state");
    check_finite(u_bounds, "input");
    check_finite(y_bounds, "output");
  }
};

struct Trajectory {
  std::vector<Eigen::VectorXd> x;
  std::vector<Eigen::VectorXd> u;
  std::vector<Eigen::VectorXd> y;

  int length() const { return static_cast<int>(x.size()); }

  Signal output_signal() const { return Signal(y); }
};

/// Forward-simulates the system from x0 under the input tape u (one input
/// per timestep, the last one only feeds the output equation).
inline Trajectory rollout(const LinearSystem& sys, const Eigen::VectorXd& x0,
                          const std::vector<Eigen::VectorXd>& u) {
  sys.validate();
  if (x0.size() != sys.state_dim())
    throw std::invalid_argument("rollout: x0 dimension mismatch");
  for (const auto& ut : u)
    if (ut.size() != sys.input_dim())
      throw std::invalid_argument("rollout: input dimension mismatch");
  if (u.empty()) throw std::invalid_argument("rollout: empty input tape");

  Trajectory traj;
  traj.x.push_back(x0);
  traj.u = u;
  for (std::size_t t = 0; t + 1 < u.size(); ++t)
    traj.x.push_back(sys.A * traj.x.back() + sys.B * u[t]);
  for (std::size_t t = 0; t < u.size(); ++t)
    traj.y.push_back(sys.C * traj.x[t] + sys.D * u[t]);
  return traj;
}

/// Residual-based consistency check of (x, u, y) against the dynamics.
inline double trajectory_residual(const LinearSystem& sys, const Trajectory& traj) {
  double r = 0.0;
  for (std::size_t t = 0; t + 1 < traj.x.size(); ++t)
    r = std::max(r, (traj.x[t + 1] - sys.A * traj.x[t] - sys.B * traj.u[t])
                        .cwiseAbs()
                        .maxCoeff());
  for (std::size_t t = 0; t < traj.y.size(); ++t)
    r = std::max(r, (traj.y[t] - sys.C * traj.x[t] - sys.D * traj.u[t])
                        .cwiseAbs()
                        .maxCoeff());
  return r;
}

/// Planar robot with double-integrator dynamics in both axes, unit
/// timestep: state (px, py, vx, vy), input (ax, ay), output (px, py).
/// Workspace [0,15]^2, |v| <= 1, |a| <= 0.5.
inline LinearSystem double_integrator() {
  LinearSystem sys;
  const Eigen::Matrix2d I = Eigen::Matrix2d::Identity();
  const Eigen::Matrix2d Z = Eigen::Matrix2d::Zero();

  sys.A.resize(4, 4);
  sys.A << I, I, Z, I;
  sys.B.resize(4, 2);
  sys.B << Z, I;
  sys.C.resize(2, 4);
  sys.C << I, Z;
  sys.D = Eigen::MatrixXd::Zero(2, 2);

  sys.x_bounds = {{0.0, 15.0}, {0.0, 15.0}, {-1.0, 1.0}, {-1.0, 1.0}};
  sys.u_bounds = {{-0.5, 0.5}, {-0.5, 0.5}};
  sys.y_bounds = {{0.0, 15.0}, {0.0, 15.0}};
  return sys;
}

}  // namespace stlsynth
