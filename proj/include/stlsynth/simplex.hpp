#pragma once

#include "stlsynth/model.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace stlsynth {

enum class LpStatus : std::uint8_t { Optimal, Infeasible, Unbounded };

inline const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
  }
  return "?";
}

struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  double objective = 0.0;
  std::vector<double> primal;  // structural variables only
  int iterations = 0;
};

class LpError : public std::runtime_error {
 public:
  explicit LpError(const std::string& what) : std::runtime_error(what) {}
};

/// Bounded-variable primal simplex over a dense basis inverse. Rows become
/// equalities via one logical column each; Dantzig pricing with a Bland
/// fallback after a stall keeps the pivot sequence deterministic.
class SimplexSolver {
 public:
  explicit SimplexSolver(const MilpModel& model)
      : model_(&model),
        n_struct_(model.var_count()),
        m_(model.constraint_count()),
        total_(n_struct_ + m_) {
    if (model.has_quadratic_objective())
      throw LpError("quadratic objectives are not supported by the internal LP solver");
    cols_.resize(n_struct_);
    for (int r = 0; r < m_; ++r) {
      for (const auto& [var, coeff] : model.rows()[r].terms)
        if (coeff != 0.0) cols_[var].emplace_back(r, coeff);
      rhs_.push_back(model.rows()[r].rhs);
      row_is_eq_.push_back(model.rows()[r].sense == RowSense::Equal);
    }
    cost_ = Eigen::VectorXd::Zero(total_);
    for (int j = 0; j < n_struct_; ++j) cost_[j] = model.objective_linear()[j];
  }

  /// Solves with the model's own bounds (binary variables relax to [0,1]).
  LpResult solve() {
    std::vector<double> lb(n_struct_), ub(n_struct_);
    for (int j = 0; j < n_struct_; ++j) {
      lb[j] = model_->variable(j).lower;
      ub[j] = model_->variable(j).upper;
    }
    return solve_with_bounds(lb, ub);
  }

  /// Solves with overridden structural bounds (used by branch and bound).
  LpResult solve_with_bounds(const std::vector<double>& lb_struct,
                             const std::vector<double>& ub_struct) {
    reset(lb_struct, ub_struct);
    LpResult result;
    if (!run_phase(true)) {
      result.status = LpStatus::Infeasible;
      result.iterations = iters_;
      return result;
    }
    const bool bounded = run_phase(false);
    if (!bounded) {
      result.status = LpStatus::Unbounded;
      result.iterations = iters_;
      return result;
    }
    // Residual gate: never return a claimed optimum that violates the rows.
    for (int attempt = 0; attempt < 3 && row_residual() > 1e-8; ++attempt) {
      refactorize();
      if (!run_phase(true)) {
        result.status = LpStatus::Infeasible;
        result.iterations = iters_;
        return result;
      }
      if (!run_phase(false)) {
        result.status = LpStatus::Unbounded;
        result.iterations = iters_;
        return result;
      }
    }
    if (row_residual() > 1e-8)
      throw LpError("simplex: residual " + std::to_string(row_residual()) +
                    " exceeds tolerance after refactorization");
    result.status = LpStatus::Optimal;
    result.primal.assign(xval_.begin(), xval_.begin() + n_struct_);
    result.objective = 0.0;
    for (int j = 0; j < n_struct_; ++j) result.objective += cost_[j] * xval_[j];
    result.iterations = iters_;
    return result;
  }

 private:
  static constexpr double kInf = std::numeric_limits<double>::infinity();
  static constexpr double kFeasTol = 1e-9;
  static constexpr double kOptTol = 1e-9;
  static constexpr double kPivotTol = 1e-9;
  static constexpr int kStallLimit = 256;
  static constexpr int kRefactorEvery = 1000;

  enum class ColState : std::uint8_t { Basic, AtLower, AtUpper, Free };

  void reset(const std::vector<double>& lb_struct, const std::vector<double>& ub_struct) {
    if (static_cast<int>(lb_struct.size()) != n_struct_ ||
        static_cast<int>(ub_struct.size()) != n_struct_)
      throw LpError("simplex: bound array size mismatch");
    lb_.assign(total_, 0.0);
    ub_.assign(total_, 0.0);
    for (int j = 0; j < n_struct_; ++j) {
      lb_[j] = lb_struct[j];
      ub_[j] = ub_struct[j];
      if (lb_[j] > ub_[j] + 1e-12) lb_[j] = ub_[j] = 0.5 * (lb_[j] + ub_[j]);
    }
    for (int r = 0; r < m_; ++r) {
      lb_[n_struct_ + r] = 0.0;
      ub_[n_struct_ + r] = row_is_eq_[r] ? 0.0 : kInf;
    }
    state_.assign(total_, ColState::AtLower);
    xval_.assign(total_, 0.0);
    for (int j = 0; j < n_struct_; ++j) {
      if (std::isfinite(lb_[j])) {
        state_[j] = ColState::AtLower;
        xval_[j] = lb_[j];
      } else if (std::isfinite(ub_[j])) {
        state_[j] = ColState::AtUpper;
        xval_[j] = ub_[j];
      } else {
        state_[j] = ColState::Free;
        xval_[j] = 0.0;
      }
    }
    basic_.resize(m_);
    for (int r = 0; r < m_; ++r) {
      basic_[r] = n_struct_ + r;
      state_[n_struct_ + r] = ColState::Basic;
    }
    binv_ = Eigen::MatrixXd::Identity(m_, m_);
    recompute_basics();
    iters_ = 0;
    pivots_since_refactor_ = 0;
  }

  void column_times(int col, Eigen::VectorXd& out) const {
    out.setZero();
    if (col >= n_struct_) {
      out += binv_.col(col - n_struct_);
      return;
    }
    for (const auto& [row, coeff] : cols_[col]) out += coeff * binv_.col(row);
  }

  double column_dot(int col, const Eigen::VectorXd& y) const {
    if (col >= n_struct_) return y[col - n_struct_];
    double s = 0.0;
    for (const auto& [row, coeff] : cols_[col]) s += coeff * y[row];
    return s;
  }

  void recompute_basics() {
    Eigen::VectorXd r = Eigen::VectorXd::Zero(m_);
    for (int i = 0; i < m_; ++i) r[i] = rhs_[i];
    for (int j = 0; j < total_; ++j) {
      if (state_[j] == ColState::Basic || xval_[j] == 0.0) continue;
      if (j >= n_struct_) {
        r[j - n_struct_] -= xval_[j];
      } else {
        for (const auto& [row, coeff] : cols_[j]) r[row] -= coeff * xval_[j];
      }
    }
    Eigen::VectorXd xb = binv_ * r;
    for (int i = 0; i < m_; ++i) xval_[basic_[i]] = xb[i];
  }

  void refactorize() {
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(m_, m_);
    for (int i = 0; i < m_; ++i) {
      const int col = basic_[i];
      if (col >= n_struct_) {
        B(col - n_struct_, i) = 1.0;
      } else {
        for (const auto& [row, coeff] : cols_[col]) B(row, i) = coeff;
      }
    }
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(B);
    binv_ = lu.inverse();
    if (!binv_.allFinite()) throw LpError("simplex: singular basis during refactorization");
    recompute_basics();
    pivots_since_refactor_ = 0;
  }

  double row_residual() const {
    double worst = 0.0;
    Eigen::VectorXd act = Eigen::VectorXd::Zero(m_);
    for (int j = 0; j < total_; ++j) {
      if (xval_[j] == 0.0) continue;
      if (j >= n_struct_) {
        act[j - n_struct_] += xval_[j];
      } else {
        for (const auto& [row, coeff] : cols_[j]) act[row] += coeff * xval_[j];
      }
    }
    for (int i = 0; i < m_; ++i) worst = std::max(worst, std::abs(act[i] - rhs_[i]));
    return worst;
  }

  double infeasibility() const {
    double total = 0.0;
    for (int i = 0; i < m_; ++i) {
      const int col = basic_[i];
      total += std::max(0.0, lb_[col] - xval_[col]);
      total += std::max(0.0, xval_[col] - ub_[col]);
    }
    return total;
  }

  /// One simplex phase. Phase 1 minimizes the total bound violation of the
  /// basics; phase 2 minimizes the real cost. Returns false on infeasible
  /// (phase 1) or unbounded (phase 2).
  bool run_phase(bool phase1) {
    const int max_iters = 20000 + 60 * (m_ + n_struct_);
    bool bland = false;
    int stall = 0;
    double best_metric = kInf;

    for (;; ++iters_) {
      if (iters_ > max_iters)
        throw LpError("simplex: iteration limit reached (numerical failure)");
      if (pivots_since_refactor_ >= kRefactorEvery) refactorize();

      // Gradient of the active objective on the basics.
      Eigen::VectorXd cb = Eigen::VectorXd::Zero(m_);
      double metric = 0.0;
      if (phase1) {
        for (int i = 0; i < m_; ++i) {
          const int col = basic_[i];
          if (xval_[col] < lb_[col] - kFeasTol) {
            cb[i] = -1.0;
            metric += lb_[col] - xval_[col];
          } else if (xval_[col] > ub_[col] + kFeasTol) {
            cb[i] = 1.0;
            metric += xval_[col] - ub_[col];
          }
        }
        if (metric == 0.0) return true;
      } else {
        for (int i = 0; i < m_; ++i) cb[i] = cost_[basic_[i]];
        for (int j = 0; j < total_; ++j)
          if (cost_[j] != 0.0) metric += cost_[j] * xval_[j];
      }

      if (metric < best_metric - 1e-11) {
        best_metric = metric;
        stall = 0;
        bland = false;
      } else if (++stall > kStallLimit) {
        bland = true;
      }

      const Eigen::VectorXd y = binv_.transpose() * cb;

      int enter = -1;
      bool increase = true;
      double best_score = phase1 ? kFeasTol : kOptTol;
      for (int j = 0; j < total_; ++j) {
        if (state_[j] == ColState::Basic) continue;
        if (lb_[j] == ub_[j]) continue;  // fixed columns never enter
        const double d = (phase1 ? 0.0 : cost_[j]) - column_dot(j, y);
        bool eligible = false;
        bool dir_up = true;
        if (state_[j] == ColState::AtLower && d < -(phase1 ? kFeasTol : kOptTol)) {
          eligible = true;
          dir_up = true;
        } else if (state_[j] == ColState::AtUpper && d > (phase1 ? kFeasTol : kOptTol)) {
          eligible = true;
          dir_up = false;
        } else if (state_[j] == ColState::Free && std::abs(d) > (phase1 ? kFeasTol : kOptTol)) {
          eligible = true;
          dir_up = d < 0;
        }
        if (!eligible) continue;
        if (bland) {
          enter = j;
          increase = dir_up;
          break;
        }
        if (std::abs(d) > best_score) {
          best_score = std::abs(d);
          enter = j;
          increase = dir_up;
        }
      }
      if (enter < 0) {
        if (phase1) return infeasibility() <= 1e-7;
        return true;  // optimal
      }

      const double sigma = increase ? 1.0 : -1.0;
      Eigen::VectorXd w(m_);
      column_times(enter, w);

      // Ratio test: basics block at a bound; in phase 1 a violated basic
      // blocks at the bound it violates (where its gradient breaks).
      double theta = kInf;
      int leave_row = -1;
      double leave_bound = 0.0;
      double leave_pivot = 0.0;
      for (int i = 0; i < m_; ++i) {
        if (std::abs(w[i]) < kPivotTol) continue;
        const int col = basic_[i];
        const double rate = -sigma * w[i];
        const double v = xval_[col];
        double bound = 0.0;
        bool blocks = false;
        if (phase1 && v < lb_[col] - kFeasTol) {
          if (rate > 0) {
            bound = lb_[col];
            blocks = true;
          }
        } else if (phase1 && v > ub_[col] + kFeasTol) {
          if (rate < 0) {
            bound = ub_[col];
            blocks = true;
          }
        } else if (rate > 0 && std::isfinite(ub_[col])) {
          bound = ub_[col];
          blocks = true;
        } else if (rate < 0 && std::isfinite(lb_[col])) {
          bound = lb_[col];
          blocks = true;
        }
        if (!blocks) continue;
        double t = (bound - v) / rate;
        if (t < 0.0) t = 0.0;
        if (t < theta - 1e-12 ||
            (t < theta + 1e-12 &&
             (bland ? (leave_row >= 0 && basic_[i] < basic_[leave_row])
                    : std::abs(w[i]) > std::abs(leave_pivot)))) {
          theta = t;
          leave_row = i;
          leave_bound = bound;
          leave_pivot = w[i];
        }
      }
      const double span = ub_[enter] - lb_[enter];
      const bool flip_blocks = std::isfinite(span);
      if (flip_blocks && span <= theta + 1e-12 && span < kInf) {
        // Bound flip: the entering variable crosses to its other bound.
        apply_step(enter, sigma, span, w);
        xval_[enter] = increase ? ub_[enter] : lb_[enter];
        state_[enter] = increase ? ColState::AtUpper : ColState::AtLower;
        continue;
      }
      if (leave_row < 0) {
        if (phase1)
          throw LpError("simplex: phase 1 step unbounded (numerical failure)");
        return false;  // unbounded
      }

      apply_step(enter, sigma, theta, w);
      const int leaving = basic_[leave_row];
      xval_[leaving] = leave_bound;
      state_[leaving] =
          (leave_bound == lb_[leaving]) ? ColState::AtLower : ColState::AtUpper;
      xval_[enter] += 0.0;  // already advanced by apply_step
      state_[enter] = ColState::Basic;
      basic_[leave_row] = enter;

      const Eigen::RowVectorXd pivot_row = binv_.row(leave_row);
      Eigen::VectorXd factor = w / w[leave_row];
      factor[leave_row] = 0.0;
      binv_.noalias() -= factor * pivot_row;
      binv_.row(leave_row) = pivot_row / w[leave_row];
      ++pivots_since_refactor_;
    }
  }

  /// Moves the entering variable by sigma*theta and updates the basics.
  void apply_step(int enter, double sigma, double theta, const Eigen::VectorXd& w) {
    if (theta == 0.0) return;
    for (int i = 0; i < m_; ++i)
      if (w[i] != 0.0) xval_[basic_[i]] -= sigma * theta * w[i];
    xval_[enter] += sigma * theta;
  }

  const MilpModel* model_;
  int n_struct_;
  int m_;
  int total_;
  std::vector<std::vector<std::pair<int, double>>> cols_;
  std::vector<double> rhs_;
  std::vector<bool> row_is_eq_;
  Eigen::VectorXd cost_;

  std::vector<double> lb_, ub_, xval_;
  std::vector<ColState> state_;
  std::vector<int> basic_;
  Eigen::MatrixXd binv_;
  int iters_ = 0;
  int pivots_since_refactor_ = 0;
};

/// One-shot LP solve of a model with its binaries relaxed to [0,1].
inline LpResult solve_lp(const MilpModel& model) {
  SimplexSolver solver(model);
  return solver.solve();
}

}  // namespace stlsynth
