#pragma once

#include "stlsynth/formula.hpp"
#include "stlsynth/model.hpp"
#include "stlsynth/system.hpp"
#include "stlsynth/tree.hpp"

#include <string>
#include <utility>
#include <vector>

namespace stlsynth {

/// Variable ids of the trajectory block of an encoded model.
struct VariableMaps {
  std::vector<std::vector<int>> x, u, y;  // [t][i]
  int rho = -1;
};

/// A model together with everything needed to interpret and verify its
/// solutions: the encoded tree (z ids in sat_var_id), the source formula,
/// and the system instance.
struct EncodedProblem {
  MilpModel model;
  EncodingStats stats;
  VariableMaps vars;
  StlTree tree;
  Formula formula = Formula::pred(Predicate{});
  LinearSystem system;
  Eigen::VectorXd x0;
  int horizon = 0;
  EncoderConfig config;
};

inline void collect_predicates(const StlTree& tree, std::vector<Predicate>& out) {
  if (tree.is_leaf()) {
    out.push_back(*tree.leaf);
    return;
  }
  for (const auto& c : tree.children) collect_predicates(c, out);
}

/// max over the output box of |a.y - b|, by interval arithmetic.
inline double predicate_margin(const LinearSystem& sys, const Predicate& pred) {
  if (pred.dim() != sys.output_dim())
    throw std::invalid_argument("predicate_margin: predicate dimension " +
                                std::to_string(pred.dim()) + " != output dimension " +
                                std::to_string(sys.output_dim()));
  double lo = -pred.b, hi = -pred.b;
  for (int i = 0; i < sys.output_dim(); ++i) {
    const Interval& box = sys.y_bounds[i];
    if (!std::isfinite(box.lower) || !std::isfinite(box.upper))
      throw std::invalid_argument("predicate_margin: unbounded output box");
    const double c = pred.a[i];
    lo += c >= 0 ? c * box.lower : c * box.upper;
    hi += c >= 0 ? c * box.upper : c * box.lower;
  }
  return std::max(std::abs(lo), std::abs(hi));
}

/// Big-M valid for every leaf row: with z = 0 the row rho <= -g + M(1-z)
/// must never bind, so M covers rho_max plus the worst predicate margin.
inline double derive_big_M(const LinearSystem& sys, const std::vector<Predicate>& preds,
                           double rho_max) {
  double margin = 0.0;
  for (const auto& p : preds) margin = std::max(margin, predicate_margin(sys, p));
  return rho_max + margin;
}

/// Resolves defaulted config entries against the actual predicates:
/// rho_max defaults to the largest achievable predicate margin, M to
/// rho_max plus that margin.
inline EncoderConfig resolve_config(EncoderConfig cfg, const LinearSystem& sys,
                                    const std::vector<Predicate>& preds) {
  double margin = 0.0;
  for (const auto& p : preds) margin = std::max(margin, predicate_margin(sys, p));
  if (cfg.rho_max <= 0.0) cfg.rho_max = margin;
  if (cfg.big_M <= 0.0) cfg.big_M = cfg.rho_max + margin;
  if (cfg.big_M <= 0.0) cfg.big_M = 1.0;  // all-zero predicates
  if (cfg.rho_max > cfg.big_M)
    throw std::invalid_argument("EncoderConfig: rho_max must not exceed big_M");
  return cfg;
}

/// Adds trajectory variables with their box bounds, the dynamics and output
/// equalities, and the x0 pin. Returns the variable id maps.
inline VariableMaps encode_dynamics(const LinearSystem& sys, const Eigen::VectorXd& x0,
                                    int T, MilpModel& model) {
  sys.validate();
  if (x0.size() != sys.state_dim())
    throw std::invalid_argument("encode_dynamics: x0 dimension mismatch");
  if (T < 0) throw std::invalid_argument("encode_dynamics: negative horizon");
  const int n = sys.state_dim(), m = sys.input_dim(), p = sys.output_dim();

  VariableMaps vars;
  vars.x.resize(T + 1);
  vars.u.resize(T + 1);
  vars.y.resize(T + 1);
  for (int t = 0; t <= T; ++t)
    for (int i = 0; i < n; ++i)
      vars.x[t].push_back(model.add_continuous(
          "x_" + std::to_string(t) + "_" + std::to_string(i), sys.x_bounds[i].lower,
          sys.x_bounds[i].upper, VarRole::State));
  for (int t = 0; t <= T; ++t)
    for (int i = 0; i < m; ++i)
      vars.u[t].push_back(model.add_continuous(
          "u_" + std::to_string(t) + "_" + std::to_string(i), sys.u_bounds[i].lower,
          sys.u_bounds[i].upper, VarRole::Input));
  for (int t = 0; t <= T; ++t)
    for (int i = 0; i < p; ++i)
      vars.y[t].push_back(model.add_continuous(
          "y_" + std::to_string(t) + "_" + std::to_string(i), sys.y_bounds[i].lower,
          sys.y_bounds[i].upper, VarRole::Output));

  for (int i = 0; i < n; ++i)
    model.add_row("init_x_" + std::to_string(i), {{vars.x[0][i], 1.0}}, RowSense::Equal,
                  x0[i]);
  for (int t = 0; t + 1 <= T; ++t) {
    for (int i = 0; i < n; ++i) {
      std::vector<std::pair<int, double>> terms{{vars.x[t + 1][i], 1.0}};
      for (int j = 0; j < n; ++j)
        if (sys.A(i, j) != 0.0) terms.emplace_back(vars.x[t][j], -sys.A(i, j));
      for (int k = 0; k < m; ++k)
        if (sys.B(i, k) != 0.0) terms.emplace_back(vars.u[t][k], -sys.B(i, k));
      model.add_row("dyn_x_" + std::to_string(t + 1) + "_" + std::to_string(i),
                    std::move(terms), RowSense::Equal, 0.0);
    }
  }
  for (int t = 0; t <= T; ++t) {
    for (int i = 0; i < p; ++i) {
      std::vector<std::pair<int, double>> terms{{vars.y[t][i], 1.0}};
      for (int j = 0; j < n; ++j)
        if (sys.C(i, j) != 0.0) terms.emplace_back(vars.x[t][j], -sys.C(i, j));
      for (int k = 0; k < m; ++k)
        if (sys.D(i, k) != 0.0) terms.emplace_back(vars.u[t][k], -sys.D(i, k));
      model.add_row("out_y_" + std::to_string(t) + "_" + std::to_string(i),
                    std::move(terms), RowSense::Equal, 0.0);
    }
  }
  return vars;
}

/// Logarithmic SOS1 formulation: pads the entry list to a power of two with
/// variables pinned to zero, adds the sum-to-one row, and for each of the
/// ceil(log2 n) binaries the two cover rows induced by the index-to-binary
/// code B(i) = bits of i-1. Returns the new binary ids.
inline std::vector<int> encode_sos1_log(MilpModel& model, std::vector<int> lambda_ids,
                                        const std::string& tag) {
  const int n = static_cast<int>(lambda_ids.size());
  if (n < 1) throw std::invalid_argument("encode_sos1_log: empty lambda vector");
  if (n == 1) {
    model.add_row("sos1_" + tag + "_sum", {{lambda_ids[0], 1.0}}, RowSense::Equal, 1.0);
    return {};
  }
  int bits = 0;
  while ((1 << bits) < n) ++bits;
  const int padded = 1 << bits;
  for (int j = n + 1; j <= padded; ++j)
    lambda_ids.push_back(model.add_continuous(
        "pad_" + tag + "_" + std::to_string(j), 0.0, 0.0, VarRole::Sat));

  std::vector<int> zetas;
  for (int k = 0; k < bits; ++k)
    zetas.push_back(
        model.add_binary("zeta_" + tag + "_" + std::to_string(k), VarRole::Sos1Selector));

  std::vector<std::pair<int, double>> sum_terms;
  for (int id : lambda_ids) sum_terms.emplace_back(id, 1.0);
  model.add_row("sos1_" + tag + "_sum", std::move(sum_terms), RowSense::Equal, 1.0);

  for (int k = 0; k < bits; ++k) {
    std::vector<std::pair<int, double>> on_terms, off_terms;
    for (int i = 1; i <= padded; ++i) {
      if ((i - 1) >> k & 1)
        on_terms.emplace_back(lambda_ids[i - 1], 1.0);
      else
        off_terms.emplace_back(lambda_ids[i - 1], 1.0);
    }
    on_terms.emplace_back(zetas[k], -1.0);
    model.add_row("sos1_" + tag + "_p" + std::to_string(k), std::move(on_terms),
                  RowSense::LessEqual, 0.0);
    off_terms.emplace_back(zetas[k], 1.0);
    model.add_row("sos1_" + tag + "_z" + std::to_string(k), std::move(off_terms),
                  RowSense::LessEqual, 1.0);
  }
  return zetas;
}

namespace detail {

/// Preorder z-variable creation shared by both encodings. Leaves are binary
/// in the standard encoding, everything else continuous in [0,1].
inline void create_sat_vars(StlTree& node, MilpModel& model, bool binary_leaves,
                            int& next_id) {
  const int nid = next_id++;
  const std::string name = "z_" + std::to_string(nid);
  if (node.is_leaf() && binary_leaves)
    node.sat_var_id = model.add_binary(name, VarRole::Sat);
  else
    node.sat_var_id = model.add_continuous(name, 0.0, 1.0, VarRole::Sat);
  for (auto& c : node.children) create_sat_vars(c, model, binary_leaves, next_id);
}

inline void add_leaf_row(const StlTree& node, int node_tag, const VariableMaps& vars,
                         const EncoderConfig& cfg, MilpModel& model) {
  // rho <= -(a.y_t - b) + M(1 - z), written as a.y_t + rho + M z <= M + b.
  const Predicate& pred = *node.leaf;
  std::vector<std::pair<int, double>> terms;
  for (int i = 0; i < pred.dim(); ++i)
    if (pred.a[i] != 0.0) terms.emplace_back(vars.y[node.leaf_time][i], pred.a[i]);
  terms.emplace_back(vars.rho, 1.0);
  terms.emplace_back(node.sat_var_id, cfg.big_M);
  model.add_row("leaf_" + std::to_string(node_tag), std::move(terms), RowSense::LessEqual,
                cfg.big_M + pred.b);
}

inline void encode_proposed_node(const StlTree& node, int& next_id, const VariableMaps& vars,
                                 const EncoderConfig& cfg, MilpModel& model,
                                 EncodingStats& stats) {
  const int nid = next_id++;
  if (node.is_leaf()) {
    add_leaf_row(node, nid, vars, cfg, model);
    return;
  }
  if (node.combination == Combination::And) {
    for (std::size_t c = 0; c < node.children.size(); ++c)
      model.add_row("and_" + std::to_string(nid) + "_" + std::to_string(c),
                    {{node.sat_var_id, 1.0}, {node.children[c].sat_var_id, -1.0}},
                    RowSense::LessEqual, 0.0);
  } else {
    // [1 - z, z_1, ..., z_N] in SOS1, with 1 - z carried by a complement
    // variable so the SOS1 block only sees variable ids.
    const std::string tag = std::to_string(nid);
    const int w = model.add_continuous("w_" + tag, 0.0, 1.0, VarRole::Sat);
    model.add_row("ordef_" + tag, {{w, 1.0}, {node.sat_var_id, 1.0}}, RowSense::Equal, 1.0);
    std::vector<int> lambda{w};
    for (const auto& c : node.children) lambda.push_back(c.sat_var_id);
    const std::vector<int> zetas = encode_sos1_log(model, std::move(lambda), tag);
    stats.per_or_node.push_back(OrNodeBinaries{
        nid, static_cast<int>(node.children.size()), static_cast<int>(zetas.size())});
  }
  for (const auto& c : node.children) encode_proposed_node(c, next_id, vars, cfg, model, stats);
}

inline void encode_standard_node(const StlTree& node, int& next_id, const VariableMaps& vars,
                                 const EncoderConfig& cfg, MilpModel& model) {
  const int nid = next_id++;
  if (node.is_leaf()) {
    add_leaf_row(node, nid, vars, cfg, model);
    return;
  }
  if (node.combination == Combination::And) {
    for (std::size_t c = 0; c < node.children.size(); ++c)
      model.add_row("and_" + std::to_string(nid) + "_" + std::to_string(c),
                    {{node.sat_var_id, 1.0}, {node.children[c].sat_var_id, -1.0}},
                    RowSense::LessEqual, 0.0);
  } else {
    std::vector<std::pair<int, double>> terms{{node.sat_var_id, 1.0}};
    for (const auto& c : node.children) terms.emplace_back(c.sat_var_id, -1.0);
    model.add_row("or_" + std::to_string(nid), std::move(terms), RowSense::LessEqual, 0.0);
  }
  for (const auto& c : node.children) encode_standard_node(c, next_id, vars, cfg, model);
}

inline EncodedProblem encode_tree(StlTree tree, Formula formula, const LinearSystem& sys,
                                  const Eigen::VectorXd& x0, int T, EncoderConfig cfg) {
  if (tree.max_time() > T)
    throw std::invalid_argument("encode: tree references timestep " +
                                std::to_string(tree.max_time()) +
                                " beyond the horizon T=" + std::to_string(T));
  std::vector<Predicate> preds;
  collect_predicates(tree, preds);
  cfg = resolve_config(cfg, sys, preds);

  EncodedProblem ep;
  ep.vars = encode_dynamics(sys, x0, T, ep.model);
  ep.vars.rho = ep.model.add_continuous("rho", 0.0, cfg.rho_max, VarRole::Robustness);
  ep.model.set_objective_linear(ep.vars.rho, -1.0);
  if (cfg.q_diag.size() != 0) {
    if (cfg.q_diag.size() != sys.state_dim())
      throw std::invalid_argument("EncoderConfig: Q diagonal size mismatch");
    for (int t = 0; t <= T; ++t)
      for (int i = 0; i < sys.state_dim(); ++i)
        if (cfg.q_diag[i] != 0.0)
          ep.model.add_objective_quadratic(ep.vars.x[t][i], cfg.q_diag[i]);
  }
  if (cfg.r_diag.size() != 0) {
    if (cfg.r_diag.size() != sys.input_dim())
      throw std::invalid_argument("EncoderConfig: R diagonal size mismatch");
    for (int t = 0; t <= T; ++t)
      for (int i = 0; i < sys.input_dim(); ++i)
        if (cfg.r_diag[i] != 0.0)
          ep.model.add_objective_quadratic(ep.vars.u[t][i], cfg.r_diag[i]);
  }

  int next_var_id = 0;
  create_sat_vars(tree, ep.model, cfg.encoding == EncodingKind::Standard, next_var_id);
  ep.model.add_row("root_sat", {{tree.sat_var_id, 1.0}}, RowSense::Equal, 1.0);
  int next_row_id = 0;
  if (cfg.encoding == EncodingKind::Proposed)
    encode_proposed_node(tree, next_row_id, ep.vars, cfg, ep.model, ep.stats);
  else
    encode_standard_node(tree, next_row_id, ep.vars, cfg, ep.model);

  ep.stats.binary_count = ep.model.binary_count();
  ep.stats.continuous_count = ep.model.continuous_count();
  ep.stats.constraint_count = ep.model.constraint_count();
  ep.tree = std::move(tree);
  ep.formula = std::move(formula);
  ep.system = sys;
  ep.x0 = x0;
  ep.horizon = T;
  ep.config = cfg;
  return ep;
}

}  // namespace detail

/// Encodes `f` over `sys` up to horizon T with the encoding selected in
/// `cfg`, flattening the tree first when cfg.flatten is set.
inline EncodedProblem encode(const Formula& f, const LinearSystem& sys,
                             const Eigen::VectorXd& x0, int T, EncoderConfig cfg) {
  StlTree tree = build_tree(f, 0);
  if (cfg.flatten) tree = flatten(std::move(tree));
  return detail::encode_tree(std::move(tree), f, sys, x0, T, cfg);
}

inline EncodedProblem encode_proposed(const Formula& f, const LinearSystem& sys,
                                      const Eigen::VectorXd& x0, int T,
                                      EncoderConfig cfg = {}) {
  cfg.encoding = EncodingKind::Proposed;
  return encode(f, sys, x0, T, cfg);
}

inline EncodedProblem encode_standard(const Formula& f, const LinearSystem& sys,
                                      const Eigen::VectorXd& x0, int T,
                                      EncoderConfig cfg = {}) {
  cfg.encoding = EncodingKind::Standard;
  return encode(f, sys, x0, T, cfg);
}

/// Encodes an already-built tree (callers control expansion/flattening).
inline EncodedProblem encode_proposed(const StlTree& tree, const Formula& f,
                                      const LinearSystem& sys, const Eigen::VectorXd& x0,
                                      int T, EncoderConfig cfg = {}) {
  cfg.encoding = EncodingKind::Proposed;
  return detail::encode_tree(tree, f, sys, x0, T, cfg);
}

}  // namespace stlsynth
