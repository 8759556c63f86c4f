#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace stlsynth {

enum class VarType : std::uint8_t { Continuous, Binary };

enum class VarRole : std::uint8_t { State, Input, Output, Sat, Robustness, Sos1Selector };

enum class RowSense : std::uint8_t { LessEqual, Equal };

struct Variable {
  std::string name;
  double lower = 0.0;
  double upper = 0.0;
  VarType type = VarType::Continuous;
  VarRole role = VarRole::Sat;
};

/// One sparse linear row: sum(coeff * var) sense rhs.
struct Constraint {
  std::string name;
  std::vector<std::pair<int, double>> terms;
  RowSense sense = RowSense::LessEqual;
  double rhs = 0.0;
};

/// Solver-agnostic mixed-integer model with a linear objective and optional
/// diagonal quadratic objective terms. Built single-owner, then immutable.
class MilpModel {
 public:
  int add_continuous(std::string name, double lower, double upper, VarRole role) {
    if (lower > upper)
      throw std::invalid_argument("MilpModel: variable '" + name + "' has lower > upper");
    vars_.push_back(Variable{std::move(name), lower, upper, VarType::Continuous, role});
    obj_linear_.push_back(0.0);
    obj_quad_diag_.push_back(0.0);
    return static_cast<int>(vars_.size()) - 1;
  }

  int add_binary(std::string name, VarRole role) {
    vars_.push_back(Variable{std::move(name), 0.0, 1.0, VarType::Binary, role});
    obj_linear_.push_back(0.0);
    obj_quad_diag_.push_back(0.0);
    return static_cast<int>(vars_.size()) - 1;
  }

  void add_row(std::string name, std::vector<std::pair<int, double>> terms, RowSense sense,
               double rhs) {
    for (const auto& [var, coeff] : terms) {
      (void)coeff;
      if (var < 0 || var >= var_count())
        throw std::invalid_argument("MilpModel: row '" + name +
                                    "' references undeclared variable");
    }
    rows_.push_back(Constraint{std::move(name), std::move(terms), sense, rhs});
  }

  void set_objective_linear(int var, double coeff) { obj_linear_.at(var) = coeff; }

  /// Adds coeff * v^2 to the objective.
  void add_objective_quadratic(int var, double coeff) { obj_quad_diag_.at(var) += coeff; }

  const std::vector<Variable>& variables() const { return vars_; }
  const Variable& variable(int id) const { return vars_.at(id); }
  const std::vector<Constraint>& rows() const { return rows_; }
  const std::vector<double>& objective_linear() const { return obj_linear_; }
  const std::vector<double>& objective_quadratic_diag() const { return obj_quad_diag_; }

  int var_count() const { return static_cast<int>(vars_.size()); }
  int constraint_count() const { return static_cast<int>(rows_.size()); }

  int binary_count() const {
    return static_cast<int>(
        std::count_if(vars_.begin(), vars_.end(),
                      [](const Variable& v) { return v.type == VarType::Binary; }));
  }

  int continuous_count() const { return var_count() - binary_count(); }

  bool has_quadratic_objective() const {
    for (double q : obj_quad_diag_)
      if (q != 0.0) return true;
    return false;
  }

  std::vector<int> binary_ids() const {
    std::vector<int> ids;
    for (int j = 0; j < var_count(); ++j)
      if (vars_[j].type == VarType::Binary) ids.push_back(j);
    return ids;
  }

  /// Largest violation of the rows by a full primal assignment.
  double max_row_violation(const std::vector<double>& primal) const {
    double worst = 0.0;
    for (const auto& row : rows_) {
      double lhs = 0.0;
      for (const auto& [var, coeff] : row.terms) lhs += coeff * primal.at(var);
      const double excess =
          row.sense == RowSense::Equal ? std::abs(lhs - row.rhs) : lhs - row.rhs;
      worst = std::max(worst, excess);
    }
    return worst;
  }

  double max_bound_violation(const std::vector<double>& primal) const {
    double worst = 0.0;
    for (int j = 0; j < var_count(); ++j) {
      worst = std::max(worst, vars_[j].lower - primal.at(j));
      worst = std::max(worst, primal.at(j) - vars_[j].upper);
    }
    return worst;
  }

 private:
  std::vector<Variable> vars_;
  std::vector<Constraint> rows_;
  std::vector<double> obj_linear_;
  std::vector<double> obj_quad_diag_;
};

enum class EncodingKind : std::uint8_t { Proposed, Standard };

inline const char* to_string(EncodingKind kind) {
  return kind == EncodingKind::Proposed ? "proposed" : "standard";
}

/// Encoder knobs. Leaving big_M or rho_max unset (<= 0) derives them from
/// the system output box and the formula's predicates. Empty q_diag/r_diag
/// mean a zero running cost (pure robustness maximization).
struct EncoderConfig {
  double big_M = 0.0;
  double rho_max = 0.0;
  bool flatten = false;
  EncodingKind encoding = EncodingKind::Proposed;
  Eigen::VectorXd q_diag;
  Eigen::VectorXd r_diag;
};

struct OrNodeBinaries {
  int node_id = 0;   // preorder id of the Or node
  int arity = 0;     // N_i: number of children
  int binaries = 0;  // binaries introduced for this node
};

struct EncodingStats {
  int binary_count = 0;
  int continuous_count = 0;
  int constraint_count = 0;
  std::vector<OrNodeBinaries> per_or_node;
};

}  // namespace stlsynth
