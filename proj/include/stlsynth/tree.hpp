#pragma once

#include "stlsynth/formula.hpp"

#include <cmath>
#include <optional>
#include <utility>
#include <vector>

namespace stlsynth {

enum class Combination : std::uint8_t { And, Or };

/// Tree form of an STL formula after temporal operators have been expanded
/// over their windows. Internal nodes combine children with And/Or; leaves
/// pin a predicate to an absolute timestep.
struct StlTree {
  Combination combination = Combination::And;
  std::vector<StlTree> children;
  std::vector<int> child_times;  // absolute timestep used to build each child
  std::optional<Predicate> leaf;
  int leaf_time = 0;  // absolute timestep of the leaf predicate
  int sat_var_id = -1;  // z variable id, filled in on the encoder's copy

  bool is_leaf() const { return children.empty(); }

  int node_count() const {
    int n = 1;
    for (const auto& c : children) n += c.node_count();
    return n;
  }

  int leaf_count() const {
    if (is_leaf()) return 1;
    int n = 0;
    for (const auto& c : children) n += c.leaf_count();
    return n;
  }

  int max_time() const {
    if (is_leaf()) return leaf_time;
    int t = 0;
    for (const auto& c : children) t = std::max(t, c.max_time());
    return t;
  }
};

/// Expands `f` into its tree, evaluating temporal windows relative to `t0`.
inline StlTree build_tree(const Formula& f, int t0) {
  if (t0 < 0) throw std::invalid_argument("build_tree: negative start time");
  StlTree node;
  switch (f.kind()) {
    case FormulaKind::Pred:
      node.leaf = f.predicate();
      node.leaf_time = t0;
      return node;
    case FormulaKind::And:
    case FormulaKind::Or:
      node.combination = f.kind() == FormulaKind::And ? Combination::And : Combination::Or;
      for (const auto& c : f.children()) {
        node.children.push_back(build_tree(c, t0));
        node.child_times.push_back(t0);
      }
      return node;
    case FormulaKind::Always:
    case FormulaKind::Eventually:
      node.combination =
          f.kind() == FormulaKind::Always ? Combination::And : Combination::Or;
      for (int tp = t0 + f.t1(); tp <= t0 + f.t2(); ++tp) {
        node.children.push_back(build_tree(f.children().front(), tp));
        node.child_times.push_back(tp);
      }
      return node;
    case FormulaKind::Until: {
      // Disjunction over the switch time t': phi2 holds at t' and phi1 holds
      // at every step from t0 up to t'-1.
      const Formula& phi1 = f.children()[0];
      const Formula& phi2 = f.children()[1];
      node.combination = Combination::Or;
      for (int tp = t0 + f.t1(); tp <= t0 + f.t2(); ++tp) {
        StlTree branch;
        branch.combination = Combination::And;
        branch.children.push_back(build_tree(phi2, tp));
        branch.child_times.push_back(tp);
        for (int ts = t0; ts < tp; ++ts) {
          branch.children.push_back(build_tree(phi1, ts));
          branch.child_times.push_back(ts);
        }
        node.children.push_back(std::move(branch));
        node.child_times.push_back(tp);
      }
      return node;
    }
  }
  throw std::logic_error("build_tree: unreachable");
}

/// Splices every internal child whose combination matches its parent's into
/// the parent, bottom-up, until no same-type parent/child pair remains.
inline StlTree flatten(StlTree tree) {
  if (tree.is_leaf()) return tree;
  std::vector<StlTree> flat_children;
  std::vector<int> flat_times;
  for (std::size_t i = 0; i < tree.children.size(); ++i) {
    StlTree child = flatten(std::move(tree.children[i]));
    if (!child.is_leaf() && child.combination == tree.combination) {
      for (std::size_t j = 0; j < child.children.size(); ++j) {
        flat_children.push_back(std::move(child.children[j]));
        flat_times.push_back(child.child_times[j]);
      }
    } else {
      flat_children.push_back(std::move(child));
      flat_times.push_back(tree.child_times[i]);
    }
  }
  tree.children = std::move(flat_children);
  tree.child_times = std::move(flat_times);
  return tree;
}

/// Exact robustness of an expanded tree over a signal. Matches the formula
/// recursion value for trees produced by build_tree.
inline double tree_robustness(const StlTree& tree, const Signal& y) {
  if (tree.is_leaf()) {
    if (tree.leaf_time > y.length() - 1) throw SignalTooShort(tree.leaf_time, y.length() - 1);
    return -tree.leaf->g(y.at(tree.leaf_time));
  }
  if (tree.combination == Combination::And) {
    double r = std::numeric_limits<double>::infinity();
    for (const auto& c : tree.children) r = std::min(r, tree_robustness(c, y));
    return r;
  }
  double r = -std::numeric_limits<double>::infinity();
  for (const auto& c : tree.children) r = std::max(r, tree_robustness(c, y));
  return r;
}

inline int log2_binaries_for_arity(int n_children) {
  // A disjunction over N children is one SOS1 constraint over N+1 entries.
  int n = n_children + 1;
  int bits = 0;
  while ((1 << bits) < n) ++bits;
  return bits;
}

/// Per-Or-node disjunction sizes of a tree, in preorder, plus the derived
/// leaf and predicted-binary counts.
struct DisjunctionCounts {
  std::vector<int> or_arities;  // N_i per Or node, preorder
  int leaf_count = 0;

  int or_count() const { return static_cast<int>(or_arities.size()); }

  int predicted_binary_count() const {
    int total = 0;
    for (int n : or_arities) total += log2_binaries_for_arity(n);
    return total;
  }
};

inline void count_disjunctions_walk(const StlTree& tree, DisjunctionCounts& out) {
  if (tree.is_leaf()) {
    ++out.leaf_count;
    return;
  }
  if (tree.combination == Combination::Or)
    out.or_arities.push_back(static_cast<int>(tree.children.size()));
  for (const auto& c : tree.children) count_disjunctions_walk(c, out);
}

inline DisjunctionCounts count_disjunctions(const StlTree& tree) {
  DisjunctionCounts out;
  count_disjunctions_walk(tree, out);
  return out;
}

}  // namespace stlsynth
