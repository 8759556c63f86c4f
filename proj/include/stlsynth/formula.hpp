#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cstdint>
#include <limits>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace stlsynth {

/// An affine predicate g(y) = a.y - b, satisfied at a sample iff g(y) <= 0.
struct Predicate {
  std::string name;
  Eigen::VectorXd a;
  double b = 0.0;

  Predicate() = default;
  Predicate(std::string name_, Eigen::VectorXd a_, double b_)
      : name(std::move(name_)), a(std::move(a_)), b(b_) {}

  int dim() const { return static_cast<int>(a.size()); }

  double g(const Eigen::VectorXd& y) const {
    if (y.size() != a.size())
      throw std::invalid_argument("Predicate::g: sample dimension " +
                                  std::to_string(y.size()) + " != predicate dimension " +
                                  std::to_string(a.size()));
    return a.dot(y) - b;
  }

  /// Negation within the affine fragment: !(a.y - b <= 0) is modeled as
  /// -a.y + b <= 0 (non-strict; the shared boundary is accepted).
  Predicate negated() const { return Predicate("not_" + name, -a, -b); }
};

/// Structural equality of predicates ignores the display name.
inline bool operator==(const Predicate& lhs, const Predicate& rhs) {
  return lhs.a.size() == rhs.a.size() && lhs.a == rhs.a && lhs.b == rhs.b;
}
inline bool operator!=(const Predicate& lhs, const Predicate& rhs) { return !(lhs == rhs); }

/// A sampled output signal y_0..y_T, all samples of one dimension.
struct Signal {
  std::vector<Eigen::VectorXd> samples;

  Signal() = default;
  explicit Signal(std::vector<Eigen::VectorXd> samples_) : samples(std::move(samples_)) {
    for (const auto& s : samples)
      if (s.size() != samples.front().size())
        throw std::invalid_argument("Signal: samples must share one dimension");
  }

  int length() const { return static_cast<int>(samples.size()); }
  int dim() const { return samples.empty() ? 0 : static_cast<int>(samples.front().size()); }
  const Eigen::VectorXd& at(int t) const { return samples.at(static_cast<std::size_t>(t)); }
};

enum class FormulaKind : std::uint8_t { Pred, And, Or, Always, Eventually, Until };

/// Immutable STL formula in positive normal form. Negation has no
/// constructor; it is resolved at the predicate level before construction.
class Formula {
 public:
  static Formula pred(Predicate p) {
    Formula f(FormulaKind::Pred);
    f.pred_ = std::move(p);
    return f;
  }

  static Formula conj(std::vector<Formula> children) {
    if (children.empty()) throw std::invalid_argument("Formula::conj: empty child list");
    Formula f(FormulaKind::And);
    f.children_ = std::move(children);
    return f;
  }

  static Formula disj(std::vector<Formula> children) {
    if (children.empty()) throw std::invalid_argument("Formula::disj: empty child list");
    Formula f(FormulaKind::Or);
    f.children_ = std::move(children);
    return f;
  }

  static Formula always(int t1, int t2, Formula body) {
    Formula f(FormulaKind::Always);
    f.set_interval(t1, t2);
    f.children_.push_back(std::move(body));
    return f;
  }

  static Formula eventually(int t1, int t2, Formula body) {
    Formula f(FormulaKind::Eventually);
    f.set_interval(t1, t2);
    f.children_.push_back(std::move(body));
    return f;
  }

  static Formula until(int t1, int t2, Formula lhs, Formula rhs) {
    Formula f(FormulaKind::Until);
    f.set_interval(t1, t2);
    f.children_.push_back(std::move(lhs));
    f.children_.push_back(std::move(rhs));
    return f;
  }

  FormulaKind kind() const { return kind_; }
  bool is_temporal() const {
    return kind_ == FormulaKind::Always || kind_ == FormulaKind::Eventually ||
           kind_ == FormulaKind::Until;
  }

  const Predicate& predicate() const {
    if (kind_ != FormulaKind::Pred) throw std::logic_error("Formula: not a predicate node");
    return pred_;
  }

  const std::vector<Formula>& children() const { return children_; }
  int t1() const { return t1_; }
  int t2() const { return t2_; }

 private:
  explicit Formula(FormulaKind kind) : kind_(kind) {}

  void set_interval(int t1, int t2) {
    if (t1 < 0 || t2 < t1)
      throw std::invalid_argument("Formula: interval must satisfy 0 <= t1 <= t2, got [" +
                                  std::to_string(t1) + "," + std::to_string(t2) + "]");
    t1_ = t1;
    t2_ = t2;
  }

  FormulaKind kind_;
  Predicate pred_;
  std::vector<Formula> children_;
  int t1_ = 0;
  int t2_ = 0;
};

inline bool operator==(const Formula& lhs, const Formula& rhs) {
  if (lhs.kind() != rhs.kind()) return false;
  if (lhs.kind() == FormulaKind::Pred) return lhs.predicate() == rhs.predicate();
  if (lhs.is_temporal() && (lhs.t1() != rhs.t1() || lhs.t2() != rhs.t2())) return false;
  if (lhs.children().size() != rhs.children().size()) return false;
  for (std::size_t i = 0; i < lhs.children().size(); ++i)
    if (!(lhs.children()[i] == rhs.children()[i])) return false;
  return true;
}
inline bool operator!=(const Formula& lhs, const Formula& rhs) { return !(lhs == rhs); }

/// Number of timesteps after which satisfaction of `f` from time 0 is fixed.
inline int horizon(const Formula& f) {
  switch (f.kind()) {
    case FormulaKind::Pred:
      return 0;
    case FormulaKind::And:
    case FormulaKind::Or: {
      int h = 0;
      for (const auto& c : f.children()) h = std::max(h, horizon(c));
      return h;
    }
    case FormulaKind::Always:
    case FormulaKind::Eventually:
      return f.t2() + horizon(f.children().front());
    case FormulaKind::Until:
      return f.t2() + std::max(horizon(f.children()[0]), horizon(f.children()[1]));
  }
  throw std::logic_error("horizon: unreachable");
}

class SignalTooShort : public std::runtime_error {
 public:
  SignalTooShort(int needed, int have)
      : std::runtime_error("signal too short: formula references sample " +
                           std::to_string(needed) + " but signal ends at " +
                           std::to_string(have)) {}
};

namespace detail {

inline double robustness_unchecked(const Formula& f, const Signal& y, int t) {
  switch (f.kind()) {
    case FormulaKind::Pred:
      return -f.predicate().g(y.at(t));
    case FormulaKind::And: {
      double r = std::numeric_limits<double>::infinity();
      for (const auto& c : f.children()) r = std::min(r, robustness_unchecked(c, y, t));
      return r;
    }
    case FormulaKind::Or: {
      double r = -std::numeric_limits<double>::infinity();
      for (const auto& c : f.children()) r = std::max(r, robustness_unchecked(c, y, t));
      return r;
    }
    case FormulaKind::Always: {
      double r = std::numeric_limits<double>::infinity();
      for (int tp = t + f.t1(); tp <= t + f.t2(); ++tp)
        r = std::min(r, robustness_unchecked(f.children().front(), y, tp));
      return r;
    }
    case FormulaKind::Eventually: {
      double r = -std::numeric_limits<double>::infinity();
      for (int tp = t + f.t1(); tp <= t + f.t2(); ++tp)
        r = std::max(r, robustness_unchecked(f.children().front(), y, tp));
      return r;
    }
    case FormulaKind::Until: {
      // phi2 holds at t', phi1 holds at every t'' in [t, t'-1]. An empty
      // phi1 window contributes no constraint (min over the empty set).
      const Formula& phi1 = f.children()[0];
      const Formula& phi2 = f.children()[1];
      double r = -std::numeric_limits<double>::infinity();
      for (int tp = t + f.t1(); tp <= t + f.t2(); ++tp) {
        double inner = robustness_unchecked(phi2, y, tp);
        for (int ts = t; ts < tp; ++ts)
          inner = std::min(inner, robustness_unchecked(phi1, y, ts));
        r = std::max(r, inner);
      }
      return r;
    }
  }
  throw std::logic_error("robustness: unreachable");
}

}  // namespace detail

/// Exact quantitative robustness of `f` over `y` evaluated from timestep `t`.
/// Satisfaction is robustness >= 0.
inline double robustness(const Formula& f, const Signal& y, int t) {
  if (t < 0) throw std::invalid_argument("robustness: negative start time");
  const int needed = t + horizon(f);
  if (needed > y.length() - 1) throw SignalTooShort(needed, y.length() - 1);
  return detail::robustness_unchecked(f, y, t);
}

inline bool is_satisfied(const Formula& f, const Signal& y, int t = 0) {
  return robustness(f, y, t) >= 0.0;
}

}  // namespace stlsynth
