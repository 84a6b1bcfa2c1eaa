// fbal: command-line front end for free bounded archimedean l-algebras.

#include <unistd.h>

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "fbal/fbal.hpp"

namespace {

int run_file(const std::string& path, const fbal::NormConfig& cfg) {
  std::string text;
  std::filesystem::path base = ".";
  if (path == "-") {
    text.assign(std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>());
  } else {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
      std::cout << "error: cannot read '" << path << "'\n";
      return fbal::kExitSemantic;
    }
    text.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  }
  fbal::Session session(cfg, base);
  const auto r = session.run_script(text);
  std::cout << r.output << std::flush;
  return r.status;
}

int run_repl(const fbal::NormConfig& cfg) {
  fbal::Session session(cfg);
  const bool interactive = ::isatty(STDIN_FILENO) != 0;
  std::string line;
  std::size_t line_no = 0;
  int last = fbal::kExitOk;
  for (;;) {
    if (interactive) std::cout << "fbal> " << std::flush;
    if (!std::getline(std::cin, line)) break;
    ++line_no;
    if (line == "quit" || line == "exit") break;
    const auto r = session.run_command(line, line_no);
    std::cout << r.output << std::flush;
    if (r.status != fbal::kExitOk) last = r.status;
  }
  if (interactive) std::cout << "\n";
  return last;
}

struct CheckTally {
  std::size_t failures = 0;
  void report(const std::string& name, std::size_t trials, std::size_t bad) {
    std::cout << (bad == 0 ? "ok   " : "FAIL ") << name << " (" << trials << " trials, " << bad << " failures)\n";
    failures += bad;
  }
};

// Randomized property checks; the seed fixes every draw.
int run_check(std::uint64_t seed, std::size_t trials) {
  using namespace fbal;
  RandomSource rs(seed);
  CheckTally tally;

  std::size_t bad = 0;
  for (std::size_t i = 0; i < trials; ++i) {
    const Term t = rs.term({"x", "y"}, 12);
    if (!(parse_term(to_string(t)) == t)) ++bad;
  }
  tally.report("parse(print(t)) == t", trials, bad);

  bad = 0;
  for (std::size_t i = 0; i < trials; ++i) {
    const Term t = rs.term({"x", "y"}, 12);
    const double a = rs.uniform(-2, 2), b = rs.uniform(-2, 2);
    const BoxRegion box({"x", "y"}, {{std::min(a, b), std::max(a, b)}, {-1.0, rs.uniform(-1, 1) + 1.0}});
    const Interval range = interval_eval(t, box);
    const Point p{{"x", rs.uniform(box.side(0).lo, box.side(0).hi)},
                  {"y", rs.uniform(box.side(1).lo, box.side(1).hi)}};
    if (!range.contains(eval(t, p))) ++bad;
  }
  tally.report("eval(t, p) in interval_eval(t, box)", trials, bad);

  bad = 0;
  for (std::size_t i = 0; i < trials; ++i) {
    const WeightedSet ws = rs.weighted_set(1 + rs.index(3), 10.0, 0.2);
    std::map<std::string, double> point;
    for (std::size_t k = 0; k < ws.size(); ++k) point[ws.name(k)] = rs.uniform(-ws.weight(k), ws.weight(k));
    const auto h = Homomorphism::into_reals(ws, point);
    const FreeElement s = admit(ws, rs.term(ws.names(), 8));
    const FreeElement t = admit(ws, rs.term(ws.names(), 8));
    const double hs = std::get<double>(apply_ump(h, s)), ht = std::get<double>(apply_ump(h, t));
    if (std::get<double>(apply_ump(h, s + t)) != hs + ht || std::get<double>(apply_ump(h, s * t)) != hs * ht ||
        std::get<double>(apply_ump(h, join(s, t))) != std::max(hs, ht) ||
        std::get<double>(apply_ump(h, meet(s, t))) != std::min(hs, ht)) {
      ++bad;
    }
  }
  tally.report("apply_ump commutes with +, *, v, ^", trials, bad);

  bad = 0;
  const std::size_t norm_trials = std::max<std::size_t>(1, trials / 10);
  for (std::size_t i = 0; i < norm_trials; ++i) {
    const WeightedSet ws = rs.weighted_set(1 + rs.index(4));
    for (const auto& x : ws.names()) {
      const Enclosure e = norm(generator(ws, x));
      const FreeElement f = generator(ws, x);
      if (!e.converged() || !e.contains(ws.weight(x))) ++bad;
      if (eq(f, truncate(f, ws.weight(x))).verdict != Equality::Equal) ++bad;
    }
  }
  tally.report("||f(x)|| = w(x) and truncation identity", norm_trials, bad);

  return tally.failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fbal: free bounded archimedean l-algebras on finite weighted sets"};
  app.require_subcommand(1);

  fbal::NormConfig cfg;
  auto add_numeric = [&](CLI::App* sub) {
    sub->add_option("--tol", cfg.tol, "Tolerance for norm and equality enclosures")->check(CLI::PositiveNumber);
    sub->add_option("--budget", cfg.budget, "Branch-and-bound node budget")->check(CLI::PositiveNumber);
  };

  std::string script = "-";
  auto* run = app.add_subcommand("run", "Execute a command script (\"-\" reads standard input)");
  run->add_option("script", script, "Script file");
  add_numeric(run);

  auto* repl = app.add_subcommand("repl", "Read commands interactively");
  add_numeric(repl);

  std::uint64_t seed = 1;
  std::size_t trials = 200;
  auto* check = app.add_subcommand("check", "Run randomized property checks");
  check->add_option("--seed", seed, "Random seed");
  check->add_option("--trials", trials, "Trials per property")->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  if (*run) return run_file(script, cfg);
  if (*repl) return run_repl(cfg);
  return run_check(seed, trials);
}
