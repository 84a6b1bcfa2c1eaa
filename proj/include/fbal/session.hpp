#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "basic.hpp"
#include "error.hpp"
#include "format.hpp"
#include "freealg.hpp"
#include "parser.hpp"
#include "term.hpp"
#include "wset.hpp"

namespace fbal {

enum ExitStatus : int {
  kExitOk = 0,
  kExitSyntax = 2,
  kExitSemantic = 3,
  kExitBudget = 4,
};

inline int exit_status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::SyntaxError: return kExitSyntax;
    case ErrorCode::BudgetExhausted: return kExitBudget;
    default: return kExitSemantic;
  }
}

struct CommandResult {
  std::string output;
  int status = kExitOk;
};

/// Named weighted sets, elements and homomorphisms plus numeric defaults.
/// Commands (one per line, `#` comments):
///
///   wset NAME { x: W, ... }
///   let NAME : WSET = EXPR
///   norm WSET EXPR [--tol T] [--budget N]
///   eq WSET EXPR EXPR [--tol T] [--budget N]
///   eval WSET EXPR AT x=V, ...
///   hom NAME : WSET -> real { x: V, ... }
///   hom NAME : WSET -> rk K { x: V1 ... VK, ... }
///   hom NAME : WSET -> WSET2 { x: EXPR, ... } [--tol T] [--budget N]
///   apply NAME EXPR
///   ffunctor WSET -> WSET2 { x: y, ... }
///   grid WSET EXPR RES FILE
///   atoms K
///   dualize N -> K { i: j, ... }
class Session {
 public:
  explicit Session(NormConfig defaults = {}, std::filesystem::path base_dir = ".")
      : defaults_(defaults), base_dir_(std::move(base_dir)) {}

  const NormConfig& defaults() const noexcept { return defaults_; }

  /// Runs one command line. Errors are reported in the output text and the
  /// status; the session is unchanged by a failing command.
  CommandResult run_command(std::string_view line, std::size_t line_no = 1) {
    CommandResult r;
    std::ostringstream out;
    try {
      TokenStream ts(tokenize(split_file_operand(line, line_no), line_no));
      if (!ts.at_end()) dispatch(ts, out);
      r.output = out.str();
      if (budget_hit_) {
        r.status = kExitBudget;
        budget_hit_ = false;
      }
    } catch (const Error& e) {
      r.output = out.str() + "error: " + e.what() + "\n";
      r.status = exit_status_for(e.code());
      budget_hit_ = false;
    }
    return r;
  }

  /// Runs a script line by line, stopping at the first failing command.
  CommandResult run_script(std::string_view text) {
    CommandResult total;
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
      std::size_t end = text.find('\n', start);
      if (end == std::string_view::npos) end = text.size();
      ++line_no;
      CommandResult r = run_command(text.substr(start, end - start), line_no);
      total.output += r.output;
      if (r.status != kExitOk) {
        total.status = r.status;
        return total;
      }
      start = end + 1;
    }
    return total;
  }

  const WeightedSet& weighted_set(const std::string& name) const {
    auto it = wsets_.find(name);
    if (it == wsets_.end()) throw Error(ErrorCode::UnknownIdentifier, "no weighted set named '" + name + "'", name);
    return it->second;
  }
  const FreeElement& element(const std::string& name) const {
    auto it = elements_.find(name);
    if (it == elements_.end()) throw Error(ErrorCode::UnknownIdentifier, "no element named '" + name + "'", name);
    return it->second;
  }
  const Homomorphism& homomorphism(const std::string& name) const {
    auto it = homs_.find(name);
    if (it == homs_.end()) throw Error(ErrorCode::UnknownIdentifier, "no homomorphism named '" + name + "'", name);
    return it->second.hom;
  }

  /// Parses EXPR and binds its identifiers in `ctx`: generators of ctx first,
  /// then `let` elements defined over the same context.
  FreeElement bind(const WeightedSet& ctx, const Term& t) const {
    std::map<std::string, Term> lets;
    for (const auto& g : free_generators(t)) {
      if (ctx.contains(g)) continue;
      auto it = elements_.find(g);
      if (it == elements_.end()) {
        throw Error(ErrorCode::UnknownIdentifier, "'" + g + "' is neither a generator nor a defined element", g);
      }
      if (!(it->second.context() == ctx)) {
        throw Error(ErrorCode::ContextMismatch, "element '" + g + "' lives over a different weighted set", g);
      }
      lets.emplace(g, it->second.term());
    }
    return admit(ctx, lets.empty() ? t : substitute(t, lets));
  }

 private:
  struct NamedHom {
    Homomorphism hom;
    std::string target_name;  // weighted-set name for free targets
  };

  struct Options {
    NormConfig cfg;
  };

  Options parse_options(TokenStream& ts) const {
    Options o{defaults_};
    while (ts.peek().kind == TokenKind::Flag) {
      const Token flag = ts.next();
      if (flag.text == "--tol") {
        o.cfg.tol = ts.expect_number();
        if (!(o.cfg.tol > 0.0)) ts.fail(flag, "--tol must be positive");
      } else if (flag.text == "--budget") {
        const double n = ts.expect_number();
        if (!(n >= 1.0) || n != static_cast<double>(static_cast<std::size_t>(n))) {
          ts.fail(flag, "--budget must be a positive integer");
        }
        o.cfg.budget = static_cast<std::size_t>(n);
      } else {
        ts.fail(flag, "unknown option '" + flag.text + "'");
      }
    }
    return o;
  }

  static void expect_end(TokenStream& ts) {
    if (!ts.at_end()) ts.fail("unexpected token" + ts.found());
  }

  void dispatch(TokenStream& ts, std::ostream& out) {
    const Token head = ts.peek();
    if (head.kind != TokenKind::Ident) ts.fail("expected a command" + ts.found());
    ts.next();
    const std::string& cmd = head.text;
    if (cmd == "wset") return cmd_wset(ts, out);
    if (cmd == "let") return cmd_let(ts, out);
    if (cmd == "norm") return cmd_norm(ts, out);
    if (cmd == "eq") return cmd_eq(ts, out);
    if (cmd == "eval") return cmd_eval(ts, out);
    if (cmd == "hom") return cmd_hom(ts, out);
    if (cmd == "apply") return cmd_apply(ts, out);
    if (cmd == "ffunctor") return cmd_ffunctor(ts, out);
    if (cmd == "grid") return cmd_grid(ts, out);
    if (cmd == "atoms") return cmd_atoms(ts, out);
    if (cmd == "dualize") return cmd_dualize(ts, out);
    ts.fail(head, "unknown command '" + cmd + "'");
  }

  void cmd_wset(TokenStream& ts, std::ostream& out) {
    const std::string name = ts.expect_ident("weighted-set name");
    ts.expect('{');
    std::vector<std::string> names;
    std::vector<double> weights;
    if (!ts.peek().is('}')) {
      do {
        names.push_back(ts.expect_ident("generator name"));
        ts.expect(':');
        weights.push_back(ts.expect_number());
      } while (ts.accept(','));
    }
    ts.expect('}');
    expect_end(ts);
    WeightedSet ws = make_weighted_set(std::move(names), std::move(weights));
    out << "wset " << name << " {";
    for (std::size_t i = 0; i < ws.size(); ++i) {
      out << (i ? ", " : " ") << ws.name(i) << ": " << format_real(ws.weight(i));
    }
    out << (ws.empty() ? "}" : " }") << "\n";
    wsets_.insert_or_assign(name, std::move(ws));
  }

  void cmd_let(TokenStream& ts, std::ostream& out) {
    const std::string name = ts.expect_ident("element name");
    ts.expect(':');
    const WeightedSet& ctx = weighted_set(ts.expect_ident("weighted-set name"));
    ts.expect('=');
    const Term t = parse_expression(ts);
    expect_end(ts);
    if (ctx.contains(name)) {
      throw Error(ErrorCode::InvalidArgument, "'" + name + "' is already a generator of the context", name);
    }
    FreeElement a = bind(ctx, t);
    out << "let " << name << " = " << to_string(a.term()) << "\n";
    elements_.insert_or_assign(name, std::move(a));
  }

  void cmd_norm(TokenStream& ts, std::ostream& out) {
    const WeightedSet& ctx = weighted_set(ts.expect_ident("weighted-set name"));
    const FreeElement a = bind(ctx, parse_expression(ts));
    const Options o = parse_options(ts);
    expect_end(ts);
    const Enclosure e = norm(a, o.cfg);
    out << "norm lo=" << format_real(e.lo) << " hi=" << format_real(e.hi)
        << " status=" << (e.converged() ? "converged" : "budget_exhausted") << " nodes=" << e.nodes_expanded << "\n";
    if (!e.converged()) budget_hit_ = true;
  }

  void cmd_eq(TokenStream& ts, std::ostream& out) {
    const WeightedSet& ctx = weighted_set(ts.expect_ident("weighted-set name"));
    const FreeElement a = bind(ctx, parse_expression(ts));
    const FreeElement b = bind(ctx, parse_expression(ts));
    const Options o = parse_options(ts);
    expect_end(ts);
    const EqResult r = eq(a, b, o.cfg);
    switch (r.verdict) {
      case Equality::Equal: out << "equal\n"; break;
      case Equality::NotEqual: out << "notequal lo=" << format_real(r.distance.lo) << "\n"; break;
      case Equality::Unknown:
        out << "unknown lo=" << format_real(r.distance.lo) << " hi=" << format_real(r.distance.hi) << "\n";
        budget_hit_ = true;
        break;
    }
  }

  // Reads `x=V, y=V` or `x: V, y: V` until the end or a closing brace.
  static std::map<std::string, double> parse_assignments(TokenStream& ts) {
    std::map<std::string, double> values;
    if (ts.at_end() || ts.peek().is('}')) return values;
    do {
      const Token at = ts.peek();
      const std::string x = ts.expect_ident("generator name");
      if (!ts.accept('=')) ts.expect(':');
      if (!values.emplace(x, ts.expect_number()).second) ts.fail(at, "'" + x + "' assigned twice");
    } while (ts.accept(','));
    return values;
  }

  void cmd_eval(TokenStream& ts, std::ostream& out) {
    const WeightedSet& ctx = weighted_set(ts.expect_ident("weighted-set name"));
    const FreeElement a = bind(ctx, parse_expression(ts));
    if (!ts.peek().is_ident("AT") && !ts.peek().is_ident("at")) ts.fail("expected 'AT'" + ts.found());
    ts.next();
    const auto values = parse_assignments(ts);
    expect_end(ts);
    Point p;
    for (const auto& [x, v] : values) {
      auto i = ctx.index_of(x);
      if (!i) throw Error(ErrorCode::UnknownElement, "'" + x + "' is not a generator of the context", x);
      if (!(std::fabs(v) <= ctx.weight(*i))) {
        throw Error(ErrorCode::WeightViolation,
                    "point outside the Yosida box: |" + x + "| = " + format_real(std::fabs(v)) + " > " +
                        format_real(ctx.weight(*i)),
                    x);
      }
      p.set(x, v);
    }
    out << "value " << format_real(eval(a.term(), p)) << "\n";
  }

  void cmd_hom(TokenStream& ts, std::ostream& out) {
    const std::string name = ts.expect_ident("homomorphism name");
    ts.expect(':');
    const std::string src_name = ts.expect_ident("weighted-set name");
    const WeightedSet& src = weighted_set(src_name);
    ts.expect_arrow();
    const Token target = ts.peek();
    const std::string tgt = ts.expect_ident("target");
    if (tgt == "real") {
      ts.expect('{');
      const auto values = parse_assignments(ts);
      ts.expect('}');
      expect_end(ts);
      homs_.insert_or_assign(name, NamedHom{Homomorphism::into_reals(src, values), {}});
      out << "hom " << name << " : " << src_name << " -> real\n";
      return;
    }
    if (tgt == "rk") {
      const double kd = ts.expect_number();
      if (!(kd >= 0.0) || kd != static_cast<double>(static_cast<std::size_t>(kd))) {
        ts.fail(target, "rk needs a nonnegative integer dimension");
      }
      const auto k = static_cast<std::size_t>(kd);
      ts.expect('{');
      std::map<std::string, std::vector<double>> values;
      if (!ts.peek().is('}')) {
        do {
          const Token at = ts.peek();
          const std::string x = ts.expect_ident("generator name");
          ts.expect(':');
          std::vector<double> vs;
          while (ts.peek().kind == TokenKind::Number || ts.peek().is('-')) vs.push_back(ts.expect_number());
          if (!values.emplace(x, std::move(vs)).second) ts.fail(at, "'" + x + "' assigned twice");
        } while (ts.accept(','));
      }
      ts.expect('}');
      expect_end(ts);
      homs_.insert_or_assign(
          name, NamedHom{Homomorphism::into_basic(src, FiniteBasicAlgebra::of_dimension(k), values), {}});
      out << "hom " << name << " : " << src_name << " -> rk " << k << "\n";
      return;
    }
    const WeightedSet& dst = weighted_set(tgt);
    ts.expect('{');
    std::map<std::string, Term> terms;
    if (!ts.peek().is('}')) {
      do {
        const Token at = ts.peek();
        const std::string x = ts.expect_ident("generator name");
        ts.expect(':');
        if (!terms.emplace(x, bind(dst, parse_expression(ts)).term()).second) {
          ts.fail(at, "'" + x + "' assigned twice");
        }
      } while (ts.accept(','));
    }
    ts.expect('}');
    const Options o = parse_options(ts);
    expect_end(ts);
    homs_.insert_or_assign(name, NamedHom{Homomorphism::into_free(src, dst, terms, o.cfg), tgt});
    out << "hom " << name << " : " << src_name << " -> " << tgt << "\n";
  }

  void cmd_apply(TokenStream& ts, std::ostream& out) {
    const std::string name = ts.expect_ident("homomorphism name");
    auto it = homs_.find(name);
    if (it == homs_.end()) throw Error(ErrorCode::UnknownIdentifier, "no homomorphism named '" + name + "'", name);
    const FreeElement a = bind(it->second.hom.source(), parse_expression(ts));
    expect_end(ts);
    const HomImage img = apply_ump(it->second.hom, a);
    if (const auto* v = std::get_if<double>(&img)) {
      out << "value " << format_real(*v) << "\n";
    } else if (const auto* b = std::get_if<BasicElement>(&img)) {
      out << "value " << to_string(*b) << "\n";
    } else {
      out << "value " << to_string(std::get<FreeElement>(img).term()) << "\n";
    }
  }

  void cmd_ffunctor(TokenStream& ts, std::ostream& out) {
    const std::string src_name = ts.expect_ident("weighted-set name");
    const WeightedSet& src = weighted_set(src_name);
    ts.expect_arrow();
    const std::string dst_name = ts.expect_ident("weighted-set name");
    const WeightedSet& dst = weighted_set(dst_name);
    ts.expect('{');
    std::map<std::string, std::string> map;
    if (!ts.peek().is('}')) {
      do {
        const Token at = ts.peek();
        const std::string x = ts.expect_ident("generator name");
        ts.expect(':');
        if (!map.emplace(x, ts.expect_ident("generator name")).second) ts.fail(at, "'" + x + "' assigned twice");
      } while (ts.accept(','));
    }
    ts.expect('}');
    expect_end(ts);
    const Homomorphism h = free_functor(validate_morphism(src, dst, map));
    const auto& free = std::get<Homomorphism::Free>(h.target());
    out << "ffunctor " << src_name << " -> " << dst_name << " {";
    bool first = true;
    for (const auto& x : src.names()) {
      out << (first ? " " : ", ") << x << ": " << to_string(free.substitution.at(x).term());
      first = false;
    }
    out << (first ? "}" : " }") << "\n";
  }

  void cmd_grid(TokenStream& ts, std::ostream& out) {
    const WeightedSet& ctx = weighted_set(ts.expect_ident("weighted-set name"));
    const FreeElement a = bind(ctx, parse_expression(ts));
    const Token res_tok = ts.peek();
    const double res = ts.expect_number();
    if (!(res >= 2.0) || res != static_cast<double>(static_cast<std::size_t>(res))) {
      ts.fail(res_tok, "grid resolution must be an integer >= 2");
    }
    expect_end(ts);
    const std::string file = file_operand_;
    const auto rows = sample_grid(a, static_cast<std::size_t>(res));
    const std::filesystem::path path = std::filesystem::path(file).is_absolute() ? std::filesystem::path(file)
                                                                                  : base_dir_ / file;
    std::ofstream csv(path, std::ios::binary);
    if (!csv) throw Error(ErrorCode::InvalidArgument, "cannot open '" + path.string() + "' for writing");
    const YosidaBox box = yosida_box(ctx);
    for (const auto& n : box.names()) csv << "u_" << n << ",";
    csv << "value\n";
    for (const auto& r : rows) {
      for (double u : r.unit) csv << format_real(u) << ",";
      csv << format_real(r.value) << "\n";
    }
    if (!csv) throw Error(ErrorCode::InvalidArgument, "failed writing '" + path.string() + "'");
    out << "grid " << rows.size() << " rows -> " << file << "\n";
  }

  void cmd_atoms(TokenStream& ts, std::ostream& out) {
    const Token at = ts.peek();
    const double kd = ts.expect_number();
    if (!(kd >= 0.0) || kd != static_cast<double>(static_cast<std::size_t>(kd))) {
      ts.fail(at, "atoms needs a nonnegative integer");
    }
    expect_end(ts);
    const auto algebra = FiniteBasicAlgebra::of_dimension(static_cast<std::size_t>(kd));
    const auto xs = atoms(algebra);
    out << "atoms " << xs.size() << "\n";
    for (std::size_t i = 0; i < xs.size(); ++i) {
      out << "  " << algebra.atom_names()[i] << " = " << to_string(xs[i].element()) << "\n";
    }
  }

  // dualize N -> K { i: j, ... } with 1-based elements of {1..N} and {1..K}.
  void cmd_dualize(TokenStream& ts, std::ostream& out) {
    auto read_size = [&](const char* what) {
      const Token at = ts.peek();
      const double v = ts.expect_number();
      if (!(v >= 0.0) || v != static_cast<double>(static_cast<std::size_t>(v))) {
        ts.fail(at, std::string(what) + " must be a nonnegative integer");
      }
      return static_cast<std::size_t>(v);
    };
    const std::size_t n = read_size("domain size");
    ts.expect_arrow();
    const std::size_t k = read_size("codomain size");
    ts.expect('{');
    std::vector<std::size_t> image(n, 0);
    std::vector<bool> given(n, false);
    if (!ts.peek().is('}')) {
      do {
        const Token at = ts.peek();
        const std::size_t i = read_size("element");
        ts.expect(':');
        const Token at_j = ts.peek();
        const std::size_t j = read_size("element");
        if (i < 1 || i > n) ts.fail(at, "element outside 1.." + std::to_string(n));
        if (j < 1 || j > k) ts.fail(at_j, "element outside 1.." + std::to_string(k));
        if (given[i - 1]) ts.fail(at, "element assigned twice");
        given[i - 1] = true;
        image[i - 1] = j - 1;
      } while (ts.accept(','));
    }
    ts.expect('}');
    expect_end(ts);
    for (std::size_t i = 0; i < n; ++i) {
      if (!given[i]) throw Error(ErrorCode::UnknownElement, "no image for " + std::to_string(i + 1));
    }
    auto names = [](std::size_t m) {
      std::vector<std::string> v;
      for (std::size_t i = 1; i <= m; ++i) v.push_back(std::to_string(i));
      return v;
    };
    const FiniteMap phi(names(n), names(k), image);
    const NormalHom b_phi = functor_B(phi);
    const auto x_b_phi = functor_X(b_phi);
    auto list = [](const std::vector<std::size_t>& v) {
      std::string s = "[";
      for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + std::to_string(v[i] + 1);
      return s + "]";
    };
    out << "phi = " << list(image) << "\n";
    out << "B(phi) : R^" << k << " -> R^" << n << " atom map " << list(b_phi.atom_map()) << "\n";
    out << "X(B(phi)) = " << list(x_b_phi) << "\n";
    // eta conjugation: X(B(phi))(eta(s)) = eta(phi(s)), with eta the identity on indices.
    const bool duality = x_b_phi == image;
    const auto eta_s = eta(phi.domain);
    const auto eta_t = eta(phi.codomain);
    bool natural = true;
    for (std::size_t s = 0; s < n; ++s) {
      natural = natural && atom_index(eta_s[s]) == s && atom_index(eta_t[x_b_phi[s]]) == image[s];
    }
    out << "duality " << (duality && natural ? "ok" : "FAILED") << "\n";
    if (!(duality && natural)) throw Error(ErrorCode::InvalidArgument, "X(B(phi)) differs from phi");
  }

  /// `grid` takes a file path as its last word, which need not be a token;
  /// it is split off before tokenizing.
  std::string_view split_file_operand(std::string_view line, std::size_t line_no) {
    file_operand_.clear();
    std::size_t b = line.find_first_not_of(" \t");
    if (b == std::string_view::npos || line.substr(b, 4) != "grid") return line;
    if (b + 4 < line.size() && !std::isspace(static_cast<unsigned char>(line[b + 4]))) return line;
    std::string_view body = line.substr(0, line.find('#'));
    while (!body.empty() && std::isspace(static_cast<unsigned char>(body.back()))) body.remove_suffix(1);
    const std::size_t cut = body.find_last_of(" \t");
    if (cut == std::string_view::npos || cut < b + 4) throw ParseError("expected an output file", line_no, body.size() + 1);
    file_operand_ = std::string(body.substr(cut + 1));
    return body.substr(0, cut);
  }

  NormConfig defaults_;
  std::filesystem::path base_dir_;
  std::map<std::string, WeightedSet> wsets_;
  std::map<std::string, FreeElement> elements_;
  std::map<std::string, NamedHom> homs_;
  std::string file_operand_;
  bool budget_hit_ = false;
};

}  // namespace fbal
