#include "fuzz_util.hpp"
#include "stlsynth/formula.hpp"

#include <catch_amalgamated.hpp>

using namespace stlsynth;

namespace {

Predicate pred2(double a1, double a2, double b, const std::string& name = "p") {
  Eigen::VectorXd a(2);
  a << a1, a2;
  return Predicate(name, a, b);
}

Signal signal_from_y1(const std::vector<double>& y1) {
  std::vector<Eigen::VectorXd> samples;
  for (double v : y1) {
    Eigen::VectorXd y(2);
    y << v, 0.0;
    samples.push_back(y);
  }
  return Signal(samples);
}

}  // namespace

TEST_CASE("horizon of primitive shapes") {
  const Formula p = Formula::pred(pred2(1, 0, 2));
  CHECK(horizon(p) == 0);

  const int T = 9;
  const Formula fig1 = Formula::conj(
      {Formula::always(1, T, p), Formula::eventually(1, T, Formula::pred(pred2(0, 1, 3)))});
  CHECK(horizon(fig1) == T);

  CHECK(horizon(Formula::eventually(0, 5, Formula::always(0, 3, p))) == 8);
  CHECK(horizon(Formula::until(1, 4, p, Formula::eventually(0, 2, p))) == 4 + 2);
}

TEST_CASE("robustness of a single predicate") {
  // g(y) = y1 - 2, sample y1 = 3 -> rho = -1
  const Formula p = Formula::pred(pred2(1, 0, 2));
  const Signal y = signal_from_y1({3.0});
  CHECK(robustness(p, y, 0) == -1.0);
  CHECK_FALSE(is_satisfied(p, y));
}

TEST_CASE("robustness of eventually and always windows") {
  // g(y) = 1 - y1, so rho = y1 - 1; samples 0, 0.5, 2
  const Formula p = Formula::pred(pred2(-1, 0, -1));
  const Signal y = signal_from_y1({0.0, 0.5, 2.0});
  CHECK(robustness(Formula::eventually(0, 2, p), y, 0) == 1.0);
  CHECK(robustness(Formula::always(0, 2, p), y, 0) == -1.0);
}

TEST_CASE("until uses the switch-time expansion") {
  // phi1: y1 <= 4 (rho = 4 - y1), phi2: y1 >= 3 i.e. -y1 + 3 <= 0 (rho = y1 - 3)
  const Formula phi1 = Formula::pred(pred2(1, 0, 4));
  const Formula phi2 = Formula::pred(pred2(-1, 0, -3));
  const Formula u = Formula::until(0, 2, phi1, phi2);
  const Signal y = signal_from_y1({1.0, 2.0, 5.0});
  // t'=0: min(rho2@0) = -2 ; t'=1: min(rho2@1, rho1@0) = min(-1, 3) = -1
  // t'=2: min(rho2@2, rho1@0, rho1@1) = min(2, 3, 2) = 2 -> max = 2
  CHECK(robustness(u, y, 0) == 2.0);
}

TEST_CASE("until with an empty phi1 window takes phi2 alone") {
  const Formula phi1 = Formula::pred(pred2(1, 0, -100));   // violated everywhere
  const Formula phi2 = Formula::pred(pred2(-1, 0, -1));    // rho = y1 - 1
  const Formula u = Formula::until(0, 1, phi1, phi2);
  const Signal y = signal_from_y1({3.0, 0.0});
  // t'=0 contributes rho2@0 = 2 with no phi1 term; t'=1 is dragged down by phi1@0.
  CHECK(robustness(u, y, 0) == 2.0);
}

TEST_CASE("signal too short raises") {
  const Formula f = Formula::always(0, 3, Formula::pred(pred2(1, 0, 2)));
  const Signal y = signal_from_y1({1.0, 1.0});
  CHECK_THROWS_AS(robustness(f, y, 0), SignalTooShort);
  CHECK_THROWS_AS(robustness(Formula::pred(pred2(1, 0, 0)), y, 5), SignalTooShort);
}

TEST_CASE("satisfaction boundary counts rho = 0 as satisfied") {
  const Formula p = Formula::pred(pred2(1, 0, 2));
  CHECK(robustness(p, signal_from_y1({2.0}), 0) == 0.0);
  CHECK(is_satisfied(p, signal_from_y1({2.0})));
}

TEST_CASE("interval and child-list invariants are enforced") {
  const Formula p = Formula::pred(pred2(1, 0, 0));
  CHECK_THROWS_AS(Formula::always(3, 1, p), std::invalid_argument);
  CHECK_THROWS_AS(Formula::eventually(-1, 2, p), std::invalid_argument);
  CHECK_THROWS_AS(Formula::conj({}), std::invalid_argument);
  CHECK_THROWS_AS(Formula::disj({}), std::invalid_argument);
}

TEST_CASE("negated predicate robustness is the exact negation") {
  std::mt19937 rng(20240901);
  for (int trial = 0; trial < 200; ++trial) {
    const Predicate p = testutil::random_predicate(rng);
    const Signal y = testutil::random_signal(rng, 1);
    const double r = robustness(Formula::pred(p), y, 0);
    const double rn = robustness(Formula::pred(p.negated()), y, 0);
    CHECK(rn == -r);
  }
}

TEST_CASE("horizon of temporal wrappers adds the window end") {
  std::mt19937 rng(20240902);
  for (int trial = 0; trial < 100; ++trial) {
    const Formula f = testutil::random_formula_capped(rng, 3, 20);
    const int h = horizon(f);
    std::uniform_int_distribution<int> t_pick(0, 5);
    const int t1 = t_pick(rng);
    const int t2 = t1 + t_pick(rng);
    CHECK(horizon(Formula::always(t1, t2, f)) == t2 + h);
    CHECK(horizon(Formula::eventually(t1, t2, f)) == t2 + h);
  }
}

TEST_CASE("satisfaction verdict matches the robustness sign") {
  std::mt19937 rng(20240903);
  for (int trial = 0; trial < 100; ++trial) {
    const Formula f = testutil::random_formula_capped(rng, 3, 15);
    const Signal y = testutil::random_signal(rng, horizon(f) + 1);
    const double r = robustness(f, y, 0);
    CHECK(is_satisfied(f, y) == (r >= 0.0));
  }
}

TEST_CASE("structural equality ignores predicate labels") {
  const Formula a = Formula::pred(pred2(1, -2, 3, "left"));
  const Formula b = Formula::pred(pred2(1, -2, 3, "right"));
  CHECK(a == b);
  CHECK(a != Formula::pred(pred2(1, -2, 4)));
  CHECK(Formula::always(0, 2, a) != Formula::always(0, 3, a));
}
