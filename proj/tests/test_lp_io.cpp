#include "stlsynth/encoder.hpp"
#include "stlsynth/lp_io.hpp"
#include "stlsynth/solve.hpp"

#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace stlsynth;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

/// The model behind the golden files committed under data/golden/.
MilpModel golden_model() {
  MilpModel m;
  const int x = m.add_continuous("x", 0.0, 10.0, VarRole::State);
  const int y = m.add_continuous("y", -5.0, 5.0, VarRole::State);
  const int w = m.add_continuous("w", 1.5, 1.5, VarRole::Sat);
  const int b = m.add_binary("b", VarRole::Sos1Selector);
  m.add_row("cap", {{x, 1.0}, {y, 2.0}}, RowSense::LessEqual, 8.0);
  m.add_row("link", {{x, 1.0}, {b, -10.0}}, RowSense::LessEqual, 0.0);
  m.add_row("pin", {{y, 1.0}, {w, 1.0}}, RowSense::Equal, 2.5);
  m.set_objective_linear(x, -1.0);
  m.set_objective_linear(y, -0.5);
  m.add_objective_quadratic(x, 0.25);
  return m;
}

Formula pred2(double a1, double a2, double b) {
  Eigen::VectorXd a(2);
  a << a1, a2;
  return Formula::pred(Predicate("p", a, b));
}

EncodedProblem small_problem() {
  const LinearSystem sys = double_integrator();
  Eigen::VectorXd x0(4);
  x0 << 7.0, 7.0, 0.0, 0.0;
  const Formula f = Formula::eventually(
      0, 3, Formula::disj({pred2(1, 0, 6), pred2(-1, 0, -9)}));
  return encode_proposed(f, sys, x0, 3);
}

}  // namespace

TEST_CASE("empty model renders as a bare skeleton") {
  const MilpModel empty;
  const std::string text = to_lp_string(empty);
  CHECK(text.find("Minimize\n") != std::string::npos);
  CHECK(text.find("Subject To\n") != std::string::npos);
  CHECK(text.find("Bounds\n") != std::string::npos);
  CHECK(text.find("Binaries") == std::string::npos);
  CHECK(text.rfind("End\n") == text.size() - 4);
}

TEST_CASE("binaries are listed in their own section") {
  MilpModel m;
  m.add_binary("flip", VarRole::Sos1Selector);
  const std::string text = to_lp_string(m);
  CHECK(text.find("Binaries\n flip\n") != std::string::npos);
}

TEST_CASE("fixed and one-sided bounds render correctly") {
  MilpModel m;
  m.add_continuous("fx", 2.0, 2.0, VarRole::State);
  m.add_continuous("up", -std::numeric_limits<double>::infinity(), 3.0, VarRole::State);
  m.add_continuous("lo", -1.0, std::numeric_limits<double>::infinity(), VarRole::State);
  m.add_continuous("fr", -std::numeric_limits<double>::infinity(),
                   std::numeric_limits<double>::infinity(), VarRole::State);
  const std::string text = to_lp_string(m);
  CHECK(text.find(" fx = 2\n") != std::string::npos);
  CHECK(text.find(" up <= 3\n") != std::string::npos);
  CHECK(text.find(" lo >= -1\n") != std::string::npos);
  CHECK(text.find(" fr free\n") != std::string::npos);
}

TEST_CASE("export is deterministic and matches the golden files") {
  const MilpModel m = golden_model();
  const std::string once = to_lp_string(m);
  const std::string twice = to_lp_string(m);
  CHECK(once == twice);

  const std::string golden_dir = std::string(STLSYNTH_SOURCE_DIR) + "/data/golden";
  CHECK(once == slurp(golden_dir + "/example.lp"));

  const std::vector<double> primal{4.0, 2.0, 1.5, 1.0};
  CHECK(to_solution_string(m, primal, -5.0) == slurp(golden_dir + "/example.sol"));
}

TEST_CASE("lp export round-trips through a file byte for byte") {
  const EncodedProblem ep = small_problem();
  const auto dir = std::filesystem::temp_directory_path() / "stlsynth_lp_io";
  std::filesystem::create_directories(dir);
  const std::string p1 = (dir / "m1.lp").string();
  const std::string p2 = (dir / "m2.lp").string();
  export_lp(ep.model, p1);
  export_lp(ep.model, p2);
  CHECK(slurp(p1) == slurp(p2));
  CHECK(slurp(p1).find("Binaries") != std::string::npos);
}

TEST_CASE("solution files round-trip our own solver's answer") {
  const EncodedProblem ep = small_problem();
  const SolveResult solved = solve_encoded(ep);
  REQUIRE(solved.status == SolveStatus::Optimal);

  const auto dir = std::filesystem::temp_directory_path() / "stlsynth_lp_io";
  std::filesystem::create_directories(dir);
  const std::string path = (dir / "sol.txt").string();
  write_solution(ep.model, solved.primal, solved.objective, path);

  const SolveResult imported = import_solution(ep, path);
  CHECK(imported.status == SolveStatus::Optimal);
  CHECK_THAT(imported.objective, Catch::Matchers::WithinAbs(solved.objective, 1e-9));
  CHECK_THAT(imported.rho, Catch::Matchers::WithinAbs(solved.rho, 1e-9));
  REQUIRE(imported.trajectory.length() == solved.trajectory.length());
  for (int t = 0; t < imported.trajectory.length(); ++t)
    CHECK((imported.trajectory.y[t] - solved.trajectory.y[t]).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("tampered outputs fail verification naming the broken row") {
  const EncodedProblem ep = small_problem();
  const SolveResult solved = solve_encoded(ep);
  REQUIRE(solved.status == SolveStatus::Optimal);

  std::vector<double> tampered = solved.primal;
  tampered[ep.vars.y[2][0]] += 0.5;  // break the output equation at t=2
  const auto dir = std::filesystem::temp_directory_path() / "stlsynth_lp_io";
  std::filesystem::create_directories(dir);
  const std::string path = (dir / "tampered.txt").string();
  write_solution(ep.model, tampered, solved.objective, path);
  try {
    import_solution(ep, path);
    FAIL("expected verification failure");
  } catch (const VerificationError& e) {
    CHECK(std::string(e.what()).find("out_y_2_0") != std::string::npos);
  }
}

TEST_CASE("unknown and missing solution variables are reported") {
  const MilpModel m = golden_model();
  {
    std::istringstream in("x 1\ny 2\nw 1.5\nb 1\nmystery 3\n");
    CHECK_THROWS_WITH(read_solution(m, in),
                      Catch::Matchers::ContainsSubstring("unknown variable"));
  }
  {
    std::istringstream in("x 1\ny 2\n");
    CHECK_THROWS_WITH(read_solution(m, in),
                      Catch::Matchers::ContainsSubstring("missing variable"));
  }
  {
    std::istringstream in("# comment only\nx 1\ny 2\nw 1.5\nb bad\n");
    CHECK_THROWS(read_solution(m, in));
  }
}
