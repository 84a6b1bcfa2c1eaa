#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <cstdio>
#include <sstream>

#include "fbal/session.hpp"

using namespace fbal;

namespace {

std::filesystem::path scratch_dir() {
  const auto dir = std::filesystem::temp_directory_path() / "fbal_session_test";
  std::filesystem::create_directories(dir);
  return dir;
}

std::string run_ok(Session& s, const std::string& line) {
  const CommandResult r = s.run_command(line);
  EXPECT_EQ(r.status, kExitOk) << line << "\n" << r.output;
  return r.output;
}

}  // namespace

TEST(Session, DefinitionsEcho) {
  Session s;
  EXPECT_EQ(run_ok(s, "wset F { x: 2, y: 0.5 }"), "wset F { x: 2, y: 0.5 }\n");
  EXPECT_EQ(run_ok(s, "wset E { }"), "wset E {}\n");
  EXPECT_EQ(run_ok(s, "let a : F = max(x, y) - 1"), "let a = (max(x, y) + (-(1)))\n");
  EXPECT_EQ(s.element("a").term(), parse_term("max(x, y) - 1"));
  EXPECT_EQ(run_ok(s, "# only a comment"), "");
  EXPECT_EQ(run_ok(s, ""), "");
}

TEST(Session, NormOfGeneratorEnclosesWeight) {
  Session s;
  run_ok(s, "wset F { x: 2 }");
  const std::string out = run_ok(s, "norm F x");
  double lo = 0, hi = 0;
  ASSERT_EQ(std::sscanf(out.c_str(), "norm lo=%lf hi=%lf status=converged", &lo, &hi), 2) << out;
  EXPECT_LE(lo, 2.0);
  EXPECT_GE(hi, 2.0);
  EXPECT_LE(hi - lo, 1e-9);
}

TEST(Session, EqVerdicts) {
  Session s;
  run_ok(s, "wset F { x: 1, y: 1 }");
  run_ok(s, "let a : F = x * y");
  EXPECT_EQ(run_ok(s, "eq F a a"), "equal\n");
  EXPECT_EQ(run_ok(s, "eq F max(x, y) max(y, x)"), "equal\n");
  EXPECT_EQ(run_ok(s, "eq F x min(max(x, -1), 1)"), "equal\n");
  EXPECT_EQ(run_ok(s, "eq F x y").rfind("notequal lo=", 0), 0u);
  const CommandResult u = s.run_command("eq F (x + y) * (x + y) x * x + 2 * x * y + y * y --budget 50");
  EXPECT_EQ(u.status, kExitBudget);
  EXPECT_EQ(u.output.rfind("unknown lo=", 0), 0u) << u.output;
}

TEST(Session, EvalChecksTheBox) {
  Session s;
  run_ok(s, "wset F { x: 2, y: 1 }");
  EXPECT_EQ(run_ok(s, "eval F x * y + 1 AT x=-2, y=0.5"), "value 0\n");
  const CommandResult r = s.run_command("eval F x AT x=3, y=0");
  EXPECT_EQ(r.status, kExitSemantic);
  EXPECT_EQ(r.output.rfind("error: ", 0), 0u);
  EXPECT_EQ(s.run_command("eval F x AT y=0").status, kExitSemantic);
}

TEST(Session, HomomorphismsAndApply) {
  Session s;
  run_ok(s, "wset F { x: 2, y: 1 }");
  EXPECT_EQ(run_ok(s, "hom h : F -> real { x: -1.5, y: 1 }"), "hom h : F -> real\n");
  EXPECT_EQ(run_ok(s, "apply h max(x, y) * 2"), "value 2\n");
  EXPECT_EQ(run_ok(s, "hom k : F -> rk 2 { x: 1 -2, y: 0 1 }"), "hom k : F -> rk 2\n");
  EXPECT_EQ(run_ok(s, "apply k x + y"), "value (1, -1)\n");
  EXPECT_EQ(s.run_command("hom bad : F -> real { x: 3, y: 0 }").status, kExitSemantic);

  run_ok(s, "wset G { u: 1 }");
  EXPECT_EQ(run_ok(s, "hom f : F -> G { x: 2 * u, y: min(u, 0.5) }"), "hom f : F -> G\n");
  EXPECT_EQ(run_ok(s, "apply f x"), "value (2 * u)\n");
  const CommandResult over = s.run_command("hom g : F -> G { x: 3 * u, y: u }");
  EXPECT_EQ(over.status, kExitSemantic);
  EXPECT_NE(over.output.find("error:"), std::string::npos);
}

TEST(Session, FreeFunctor) {
  Session s;
  run_ok(s, "wset F { x: 2, y: 1 }");
  run_ok(s, "wset G { u: 1 }");
  EXPECT_EQ(run_ok(s, "ffunctor F -> G { x: u, y: u }"), "ffunctor F -> G { x: u, y: u }\n");
  // Needs w(phi(x)) <= w(x).
  EXPECT_EQ(s.run_command("ffunctor G -> F { u: x }").status, kExitSemantic);
  run_ok(s, "wset H { z: 5 }");
  EXPECT_EQ(s.run_command("ffunctor F -> H { x: z, y: z }").status, kExitSemantic);
}

TEST(Session, GridWritesResolutionToTheD) {
  const auto dir = scratch_dir();
  Session s({}, dir);
  run_ok(s, "wset F { x: 1, y: 2, z: 0 }");
  EXPECT_EQ(run_ok(s, "grid F x * y + z 11 out.csv"), "grid 121 rows -> out.csv\n");
  std::ifstream in(dir / "out.csv");
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "u_x,u_y,value");
  std::getline(in, line);
  EXPECT_EQ(line, "0,0,2");
  std::size_t rows = 1;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 121u);

  run_ok(s, "wset H { a: 1 }");
  EXPECT_EQ(run_ok(s, "grid H a 3 one.csv"), "grid 3 rows -> one.csv\n");
  std::filesystem::remove_all(dir);
}

TEST(Session, BasicCommands) {
  Session s;
  EXPECT_EQ(run_ok(s, "atoms 2"), "atoms 2\n  e1 = (1, 0)\n  e2 = (0, 1)\n");
  EXPECT_EQ(run_ok(s, "dualize 3 -> 2 { 1: 1, 2: 1, 3: 2 }"),
            "phi = [1, 1, 2]\nB(phi) : R^2 -> R^3 atom map [1, 1, 2]\nX(B(phi)) = [1, 1, 2]\nduality ok\n");
  EXPECT_EQ(s.run_command("dualize 2 -> 1 { 1: 1 }").status, kExitSemantic);
  EXPECT_EQ(s.run_command("dualize 2 -> 1 { 1: 2, 2: 1 }").status, kExitSyntax);
}

TEST(Session, ExitCodes) {
  Session s;
  EXPECT_EQ(s.run_command("wset F { x: -1 }").status, kExitSemantic);
  EXPECT_EQ(s.run_command("wset F { x: 1, x: 2 }").status, kExitSemantic);
  EXPECT_EQ(s.run_command("frobnicate").status, kExitSyntax);
  EXPECT_EQ(s.run_command("wset F { x 1 }").status, kExitSyntax);
  run_ok(s, "wset F { x: 1 }");
  EXPECT_EQ(s.run_command("norm F x + * 2").status, kExitSyntax);
  EXPECT_EQ(s.run_command("norm F q").status, kExitSemantic);
  EXPECT_EQ(s.run_command("norm G x").status, kExitSemantic);
  EXPECT_EQ(s.run_command("norm F x --tol 0").status, kExitSyntax);
  const CommandResult budget = s.run_command("norm F x * x - x --budget 3");
  EXPECT_EQ(budget.status, kExitBudget);
  EXPECT_NE(budget.output.find("status=budget_exhausted"), std::string::npos);
}

TEST(Session, ScriptStopsAtFirstError) {
  Session s;
  const CommandResult r = s.run_script("wset F { x: 1 }\nnorm F x +\nnorm F x\n");
  EXPECT_EQ(r.status, kExitSyntax);
  EXPECT_EQ(r.output, "wset F { x: 1 }\nerror: SyntaxError: line 2, column 11: expected an expression, found end of input\n");
}

TEST(Session, FailedCommandsLeaveTheSessionUnchanged) {
  Session s;
  run_ok(s, "wset F { x: 1 }");
  EXPECT_NE(s.run_command("let a : F = y").status, kExitOk);
  EXPECT_THROW(s.element("a"), Error);
  EXPECT_NE(s.run_command("let x : F = 1").status, kExitOk);
}

TEST(Session, ScriptsAreDeterministic) {
  const std::string script =
      "wset F { x: 3, y: 1 }\n"
      "let t : F = max(x * y, -x) - min(y, 0.25)\n"
      "norm F t\n"
      "eq F t t + 0 * x\n"
      "hom h : F -> real { x: 1, y: -1 }\n"
      "apply h t\n";
  Session a, b;
  const auto ra = a.run_script(script), rb = b.run_script(script);
  EXPECT_EQ(ra.status, kExitOk) << ra.output;
  EXPECT_EQ(ra.output, rb.output);
}
