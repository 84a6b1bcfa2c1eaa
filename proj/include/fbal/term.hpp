#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "error.hpp"
#include "format.hpp"

namespace fbal {

enum class Kind { Const, Gen, Add, Neg, Mul, Join, Meet };

/// Immutable l-algebra term. Subterms are shared; copying is cheap.
///
/// Only the seven primitive node kinds exist. Subtraction, absolute value,
/// scaling and truncation are expanded when they are built:
///   sub(a, b)      = a + (-b)
///   abs(a)         = a v (-a)
///   scale(r, a)    = r * a
///   truncate(a, c) = (a v -c) ^ c
class Term {
  struct Node {
    Kind kind;
    double value = 0.0;
    std::string name;
    std::shared_ptr<const Node> lhs;
    std::shared_ptr<const Node> rhs;
    std::size_t size = 1;
  };

 public:
  /// Const 0.
  Term() : Term(constant(0.0)) {}

  static Term constant(double c) {
    if (!std::isfinite(c)) throw Error(ErrorCode::NonFiniteScalar, "scalar constants must be finite");
    return Term(std::make_shared<const Node>(Node{Kind::Const, c, {}, nullptr, nullptr, 1}));
  }
  static Term gen(std::string name) {
    return Term(std::make_shared<const Node>(Node{Kind::Gen, 0.0, std::move(name), nullptr, nullptr, 1}));
  }
  static Term add(const Term& a, const Term& b) { return binary(Kind::Add, a, b); }
  static Term mul(const Term& a, const Term& b) { return binary(Kind::Mul, a, b); }
  static Term join(const Term& a, const Term& b) { return binary(Kind::Join, a, b); }
  static Term meet(const Term& a, const Term& b) { return binary(Kind::Meet, a, b); }
  static Term neg(const Term& a) {
    return Term(std::make_shared<const Node>(Node{Kind::Neg, 0.0, {}, a.node_, nullptr, a.size() + 1}));
  }

  static Term sub(const Term& a, const Term& b) { return add(a, neg(b)); }
  static Term abs(const Term& a) { return join(a, neg(a)); }
  static Term scale(double r, const Term& a) { return mul(constant(r), a); }
  static Term truncate(const Term& a, double c) { return meet(join(a, constant(-c)), constant(c)); }

  Kind kind() const noexcept { return node_->kind; }
  double value() const noexcept { return node_->value; }
  const std::string& name() const noexcept { return node_->name; }
  /// Left operand, or the operand of Neg.
  Term lhs() const { return Term(node_->lhs); }
  Term rhs() const { return Term(node_->rhs); }
  /// Number of nodes.
  std::size_t size() const noexcept { return node_->size; }

  bool is_const() const noexcept { return kind() == Kind::Const; }
  bool is_const(double c) const noexcept { return kind() == Kind::Const && value() == c; }
  bool is_binary() const noexcept {
    return kind() == Kind::Add || kind() == Kind::Mul || kind() == Kind::Join || kind() == Kind::Meet;
  }

  bool same_node(const Term& other) const noexcept { return node_ == other.node_; }

  friend bool operator==(const Term& a, const Term& b);

 private:
  explicit Term(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

  static Term binary(Kind k, const Term& a, const Term& b) {
    return Term(std::make_shared<const Node>(Node{k, 0.0, {}, a.node_, b.node_, a.size() + b.size() + 1}));
  }

  std::shared_ptr<const Node> node_;
};

inline Term operator+(const Term& a, const Term& b) { return Term::add(a, b); }
inline Term operator-(const Term& a, const Term& b) { return Term::sub(a, b); }
inline Term operator*(const Term& a, const Term& b) { return Term::mul(a, b); }
inline Term operator-(const Term& a) { return Term::neg(a); }

/// Structural equality.
inline bool operator==(const Term& a, const Term& b) {
  if (a.node_ == b.node_) return true;
  if (a.kind() != b.kind() || a.size() != b.size()) return false;
  switch (a.kind()) {
    case Kind::Const: return a.value() == b.value();
    case Kind::Gen: return a.name() == b.name();
    case Kind::Neg: return a.lhs() == b.lhs();
    default: return a.lhs() == b.lhs() && a.rhs() == b.rhs();
  }
}

/// Total order on terms compatible with structural equality.
inline int compare(const Term& a, const Term& b) {
  if (a.same_node(b)) return 0;
  if (a.kind() != b.kind()) return a.kind() < b.kind() ? -1 : 1;
  switch (a.kind()) {
    case Kind::Const:
      return a.value() < b.value() ? -1 : (b.value() < a.value() ? 1 : 0);
    case Kind::Gen: return a.name().compare(b.name()) < 0 ? -1 : (a.name() == b.name() ? 0 : 1);
    case Kind::Neg: return compare(a.lhs(), b.lhs());
    default:
      if (int c = compare(a.lhs(), b.lhs()); c != 0) return c;
      return compare(a.rhs(), b.rhs());
  }
}

/// An assignment of finite reals to generator names.
class Point {
 public:
  Point() = default;
  Point(std::initializer_list<std::pair<const std::string, double>> init) {
    for (const auto& [k, v] : init) set(k, v);
  }
  explicit Point(const std::map<std::string, double>& values) {
    for (const auto& [k, v] : values) set(k, v);
  }

  void set(const std::string& name, double v) {
    if (!std::isfinite(v)) throw Error(ErrorCode::NonFiniteScalar, "value of '" + name + "' is not finite", name);
    values_[name] = v;
  }
  bool has(const std::string& name) const { return values_.count(name) != 0; }
  double at(const std::string& name) const {
    auto it = values_.find(name);
    if (it == values_.end()) throw Error(ErrorCode::MissingAssignment, "no value for '" + name + "'", name);
    return it->second;
  }
  const std::map<std::string, double>& values() const noexcept { return values_; }

 private:
  std::map<std::string, double> values_;
};

/// Pointwise evaluation in round-to-nearest double arithmetic.
inline double eval(const Term& t, const Point& p) {
  switch (t.kind()) {
    case Kind::Const: return t.value();
    case Kind::Gen: return p.at(t.name());
    case Kind::Add: return eval(t.lhs(), p) + eval(t.rhs(), p);
    case Kind::Neg: return -eval(t.lhs(), p);
    case Kind::Mul: return eval(t.lhs(), p) * eval(t.rhs(), p);
    case Kind::Join: return std::max(eval(t.lhs(), p), eval(t.rhs(), p));
    case Kind::Meet: return std::min(eval(t.lhs(), p), eval(t.rhs(), p));
  }
  return 0.0;
}

namespace detail {
inline void collect_generators(const Term& t, std::vector<std::string>& out, std::set<std::string>& seen) {
  switch (t.kind()) {
    case Kind::Const: return;
    case Kind::Gen:
      if (seen.insert(t.name()).second) out.push_back(t.name());
      return;
    case Kind::Neg: collect_generators(t.lhs(), out, seen); return;
    default:
      collect_generators(t.lhs(), out, seen);
      collect_generators(t.rhs(), out, seen);
  }
}
}  // namespace detail

/// Generator names in first-occurrence (left-to-right) order.
inline std::vector<std::string> free_generators(const Term& t) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  detail::collect_generators(t, out, seen);
  return out;
}

/// Local rewrites that keep the double-precision value at every point:
/// constant folding, x+0, x*1, x*0, --x, a v a, a ^ a.
inline Term simplify(const Term& t) {
  switch (t.kind()) {
    case Kind::Const:
    case Kind::Gen: return t;
    case Kind::Neg: {
      Term a = simplify(t.lhs());
      if (a.is_const()) return Term::constant(-a.value());
      if (a.kind() == Kind::Neg) return a.lhs();
      return a.same_node(t.lhs()) ? t : Term::neg(a);
    }
    default: break;
  }
  Term a = simplify(t.lhs());
  Term b = simplify(t.rhs());
  const Kind k = t.kind();
  if (a.is_const() && b.is_const()) {
    const double x = a.value(), y = b.value();
    switch (k) {
      case Kind::Add: return Term::constant(x + y);
      case Kind::Mul: return Term::constant(x * y);
      case Kind::Join: return Term::constant(std::max(x, y));
      case Kind::Meet: return Term::constant(std::min(x, y));
      default: break;
    }
  }
  switch (k) {
    case Kind::Add:
      if (b.is_const(0.0)) return a;
      if (a.is_const(0.0)) return b;
      break;
    case Kind::Mul:
      if (b.is_const(1.0)) return a;
      if (a.is_const(1.0)) return b;
      if (a.is_const(0.0) || b.is_const(0.0)) return Term::constant(0.0);
      break;
    case Kind::Join:
    case Kind::Meet:
      if (a == b) return a;
      break;
    default: break;
  }
  if (a.same_node(t.lhs()) && b.same_node(t.rhs())) return t;
  switch (k) {
    case Kind::Add: return Term::add(a, b);
    case Kind::Mul: return Term::mul(a, b);
    case Kind::Join: return Term::join(a, b);
    default: return Term::meet(a, b);
  }
}

/// Capture-free substitution of terms for generators; unmapped generators stay.
inline Term substitute(const Term& t, const std::map<std::string, Term>& subst) {
  switch (t.kind()) {
    case Kind::Const: return t;
    case Kind::Gen: {
      auto it = subst.find(t.name());
      return it == subst.end() ? t : it->second;
    }
    case Kind::Neg: return Term::neg(substitute(t.lhs(), subst));
    case Kind::Add: return Term::add(substitute(t.lhs(), subst), substitute(t.rhs(), subst));
    case Kind::Mul: return Term::mul(substitute(t.lhs(), subst), substitute(t.rhs(), subst));
    case Kind::Join: return Term::join(substitute(t.lhs(), subst), substitute(t.rhs(), subst));
    case Kind::Meet: return Term::meet(substitute(t.lhs(), subst), substitute(t.rhs(), subst));
  }
  return t;
}

namespace detail {

inline void flatten_sum(const Term& t, bool negate, std::vector<std::pair<bool, Term>>& out);
inline Term commutative_form(const Term& t);

inline void flatten_sum(const Term& t, bool negate, std::vector<std::pair<bool, Term>>& out) {
  if (t.kind() == Kind::Add) {
    flatten_sum(t.lhs(), negate, out);
    flatten_sum(t.rhs(), negate, out);
  } else if (t.kind() == Kind::Neg) {
    flatten_sum(t.lhs(), !negate, out);
  } else {
    out.emplace_back(negate, t);
  }
}

inline void flatten_same(const Term& t, Kind k, std::vector<Term>& out) {
  if (t.kind() == k) {
    flatten_same(t.lhs(), k, out);
    flatten_same(t.rhs(), k, out);
  } else {
    out.push_back(t);
  }
}

inline void sort_terms(std::vector<Term>& v) {
  std::stable_sort(v.begin(), v.end(), [](const Term& a, const Term& b) { return compare(a, b) < 0; });
}

inline Term commutative_form(const Term& t) {
  switch (t.kind()) {
    case Kind::Const:
    case Kind::Gen: return t;
    case Kind::Neg:
    case Kind::Add: {
      std::vector<std::pair<bool, Term>> raw;
      flatten_sum(t, false, raw);
      // Normalize each summand, then re-flatten: normalization may expose sums.
      std::vector<std::pair<bool, Term>> parts;
      for (auto& [neg, s] : raw) {
        Term c = commutative_form(s);
        if (c.kind() == Kind::Add || c.kind() == Kind::Neg) {
          std::vector<std::pair<bool, Term>> inner;
          flatten_sum(c, neg, inner);
          parts.insert(parts.end(), inner.begin(), inner.end());
        } else {
          parts.emplace_back(neg, c);
        }
      }
      std::vector<Term> pos, neg;
      for (auto& [n, s] : parts) {
        if (s.is_const()) {
          const double v = n ? -s.value() : s.value();
          if (v != 0.0) pos.push_back(Term::constant(v));
        } else {
          (n ? neg : pos).push_back(s);
        }
      }
      // Cancel s against -s, and constant c against constant -c.
      for (std::size_t i = 0; i < pos.size(); ++i) {
        for (std::size_t j = 0; j < neg.size(); ++j) {
          if (pos[i] == neg[j]) {
            pos.erase(pos.begin() + static_cast<std::ptrdiff_t>(i));
            neg.erase(neg.begin() + static_cast<std::ptrdiff_t>(j));
            --i;
            break;
          }
        }
      }
      for (std::size_t i = 0; i < pos.size(); ++i) {
        if (!pos[i].is_const()) continue;
        for (std::size_t j = i + 1; j < pos.size(); ++j) {
          if (pos[j].is_const() && pos[j].value() == -pos[i].value()) {
            pos.erase(pos.begin() + static_cast<std::ptrdiff_t>(j));
            pos.erase(pos.begin() + static_cast<std::ptrdiff_t>(i));
            --i;
            break;
          }
        }
      }
      sort_terms(pos);
      sort_terms(neg);
      std::vector<Term> all = pos;
      for (auto& n : neg) all.push_back(Term::neg(n));
      if (all.empty()) return Term::constant(0.0);
      Term acc = all.front();
      for (std::size_t i = 1; i < all.size(); ++i) acc = Term::add(acc, all[i]);
      return acc;
    }
    case Kind::Mul: {
      std::vector<Term> raw;
      flatten_same(t, Kind::Mul, raw);
      std::vector<Term> factors;
      bool negative = false;
      for (auto& f : raw) {
        Term c = commutative_form(f);
        while (c.kind() == Kind::Neg) {
          negative = !negative;
          c = c.lhs();
        }
        if (c.is_const() && c.value() < 0.0) {
          negative = !negative;
          c = Term::constant(-c.value());
        }
        if (c.is_const(0.0)) return Term::constant(0.0);
        if (c.is_const(1.0)) continue;
        if (c.kind() == Kind::Mul) {
          flatten_same(c, Kind::Mul, factors);
        } else {
          factors.push_back(c);
        }
      }
      sort_terms(factors);
      Term acc = factors.empty() ? Term::constant(1.0) : factors.front();
      for (std::size_t i = 1; i < factors.size(); ++i) acc = Term::mul(acc, factors[i]);
      if (!negative) return acc;
      return acc.is_const() ? Term::constant(-acc.value()) : Term::neg(acc);
    }
    case Kind::Join:
    case Kind::Meet: {
      std::vector<Term> raw;
      flatten_same(t, t.kind(), raw);
      std::vector<Term> parts;
      for (auto& p : raw) flatten_same(commutative_form(p), t.kind(), parts);
      sort_terms(parts);
      parts.erase(std::unique(parts.begin(), parts.end()), parts.end());
      Term acc = parts.front();
      for (std::size_t i = 1; i < parts.size(); ++i) {
        acc = t.kind() == Kind::Join ? Term::join(acc, parts[i]) : Term::meet(acc, parts[i]);
      }
      return acc;
    }
  }
  return t;
}

}  // namespace detail

/// Rewrites a term modulo commutativity and associativity of +, *, v, ^,
/// idempotence of v and ^, unit/zero laws and cancellation of s - s. The
/// result denotes the same real function. Double-precision evaluation may
/// differ in the last bits because sums and products are reassociated.
inline Term commutative_normal_form(const Term& t) { return detail::commutative_form(t); }

namespace detail {
inline void print_term(const Term& t, std::string& out) {
  switch (t.kind()) {
    case Kind::Const:
      if (t.value() < 0.0) {
        out += "(" + format_real(t.value()) + ")";
      } else {
        out += format_real(t.value());
      }
      return;
    case Kind::Gen: out += t.name(); return;
    case Kind::Neg:
      // A bare "-3" reads back as the literal -3, so parenthesize constants.
      out += "(-";
      if (t.lhs().is_const() && t.lhs().value() >= 0.0) {
        out += "(" + format_real(t.lhs().value()) + ")";
      } else {
        print_term(t.lhs(), out);
      }
      out += ")";
      return;
    case Kind::Add:
    case Kind::Mul:
      out += "(";
      print_term(t.lhs(), out);
      out += t.kind() == Kind::Add ? " + " : " * ";
      print_term(t.rhs(), out);
      out += ")";
      return;
    case Kind::Join:
    case Kind::Meet:
      out += t.kind() == Kind::Join ? "max(" : "min(";
      print_term(t.lhs(), out);
      out += ", ";
      print_term(t.rhs(), out);
      out += ")";
      return;
  }
}
}  // namespace detail

/// Fully parenthesized text that the expression parser reads back to the
/// identical tree.
inline std::string to_string(const Term& t) {
  std::string out;
  detail::print_term(t, out);
  return out;
}

}  // namespace fbal
