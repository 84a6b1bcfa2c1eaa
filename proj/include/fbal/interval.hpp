#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <limits>
#include <map>
#include <queue>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "error.hpp"
#include "term.hpp"

namespace fbal {

/// Closed interval [lo, hi]. Infinite endpoints only appear as overflow
/// saturation.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  static Interval point(double v) { return {v, v}; }

  double width() const { return hi - lo; }
  double mid() const { return lo + (hi - lo) / 2.0; }
  double mag() const { return std::max(std::fabs(lo), std::fabs(hi)); }
  bool contains(double v) const { return lo <= v && v <= hi; }
  bool contains(const Interval& o) const { return lo <= o.lo && o.hi <= hi; }

  friend bool operator==(const Interval& a, const Interval& b) { return a.lo == b.lo && a.hi == b.hi; }
};

namespace ia {

constexpr double kInf = std::numeric_limits<double>::infinity();

inline double down(double v) { return std::isnan(v) ? -kInf : std::nextafter(v, -kInf); }
inline double up(double v) { return std::isnan(v) ? kInf : std::nextafter(v, kInf); }

// 0 * inf stands for 0 * (some finite overflowed value).
inline double product(double a, double b) {
  const double p = a * b;
  return std::isnan(p) ? 0.0 : p;
}

// Rounded sum and product with a flag for "no rounding error occurred"
// (TwoSum and FMA residuals); exact results need no outward nudge.
inline double sum_lo(double a, double b) {
  const double s = a + b;
  if (!std::isfinite(s)) return down(s);
  const double bb = s - a;
  return (a - (s - bb)) + (b - bb) == 0.0 ? s : std::nextafter(s, -kInf);
}
inline double sum_hi(double a, double b) {
  const double s = a + b;
  if (!std::isfinite(s)) return up(s);
  const double bb = s - a;
  return (a - (s - bb)) + (b - bb) == 0.0 ? s : std::nextafter(s, kInf);
}
inline bool exact_product(double a, double b, double p) {
  if (p == 0.0) return a == 0.0 || b == 0.0;
  return std::isfinite(p) && std::fabs(p) >= std::numeric_limits<double>::min() && std::fma(a, b, -p) == 0.0;
}

inline bool exact(const Interval& a) { return a.lo == a.hi; }

inline Interval add(const Interval& a, const Interval& b) {
  if (exact(a) && a.lo == 0.0) return b;
  if (exact(b) && b.lo == 0.0) return a;
  return {sum_lo(a.lo, b.lo), sum_hi(a.hi, b.hi)};
}

inline Interval neg(const Interval& a) { return {-a.hi, -a.lo}; }

inline Interval mul(const Interval& a, const Interval& b) {
  if (exact(a) && a.lo == 1.0) return b;
  if (exact(b) && b.lo == 1.0) return a;
  if ((exact(a) && a.lo == 0.0) || (exact(b) && b.lo == 0.0)) return {0.0, 0.0};
  const double x[4] = {a.lo, a.lo, a.hi, a.hi};
  const double y[4] = {b.lo, b.hi, b.lo, b.hi};
  double lo = kInf, hi = -kInf;
  for (int i = 0; i < 4; ++i) {
    const double p = product(x[i], y[i]);
    const bool ok = exact_product(x[i], y[i], p);
    lo = std::min(lo, ok ? p : down(p));
    hi = std::max(hi, ok ? p : up(p));
  }
  return {lo, hi};
}

inline Interval join(const Interval& a, const Interval& b) { return {std::max(a.lo, b.lo), std::max(a.hi, b.hi)}; }
inline Interval meet(const Interval& a, const Interval& b) { return {std::min(a.lo, b.lo), std::min(a.hi, b.hi)}; }
inline Interval hull(const Interval& a, const Interval& b) { return {std::min(a.lo, b.lo), std::max(a.hi, b.hi)}; }

}  // namespace ia

/// Axis-aligned box: an ordered list of named closed intervals.
class BoxRegion {
 public:
  BoxRegion() = default;
  BoxRegion(std::vector<std::string> names, std::vector<Interval> sides) : names_(std::move(names)) {
    if (names_.size() != sides.size()) throw Error(ErrorCode::LengthMismatch, "box names and sides differ in length");
    for (std::size_t i = 0; i < names_.size(); ++i) {
      for (std::size_t j = 0; j < i; ++j) {
        if (names_[i] == names_[j]) throw Error(ErrorCode::DuplicateName, "'" + names_[i] + "' repeated", names_[i]);
      }
      if (std::isnan(sides[i].lo) || std::isnan(sides[i].hi) || sides[i].lo > sides[i].hi) {
        throw Error(ErrorCode::InvalidArgument, "empty side for '" + names_[i] + "'", names_[i]);
      }
    }
    sides_ = std::move(sides);
  }

  std::size_t dim() const noexcept { return names_.size(); }
  const std::vector<std::string>& names() const noexcept { return names_; }
  const std::vector<Interval>& sides() const noexcept { return sides_; }
  const Interval& side(std::size_t i) const { return sides_.at(i); }

  Point midpoint() const {
    Point p;
    for (std::size_t i = 0; i < dim(); ++i) p.set(names_[i], sides_[i].mid());
    return p;
  }

  bool contains(const Point& p) const {
    for (std::size_t i = 0; i < dim(); ++i) {
      if (!p.has(names_[i]) || !sides_[i].contains(p.at(names_[i]))) return false;
    }
    return true;
  }

  /// Same names in the same order, each side inside the other's.
  bool subset_of(const BoxRegion& other) const {
    if (names_ != other.names_) return false;
    for (std::size_t i = 0; i < dim(); ++i) {
      if (!other.sides_[i].contains(sides_[i])) return false;
    }
    return true;
  }

 private:
  std::vector<std::string> names_;
  std::vector<Interval> sides_;
};

/// Flat, hash-consed form of a term with generators resolved to box
/// coordinates. Structurally identical subterms share one slot.
class CompiledTerm {
 public:
  struct Node {
    Kind kind;
    double value;
    std::uint32_t gen;  // coordinate for Gen
    std::uint32_t lhs;
    std::uint32_t rhs;
  };

  CompiledTerm(const Term& t, const std::vector<std::string>& coords) {
    std::map<std::string, std::uint32_t> index;
    for (std::size_t i = 0; i < coords.size(); ++i) index.emplace(coords[i], static_cast<std::uint32_t>(i));
    root_ = build(t, index);
  }

  const std::vector<Node>& nodes() const noexcept { return nodes_; }
  std::uint32_t root() const noexcept { return root_; }

 private:
  struct Key {
    Kind kind;
    std::uint64_t bits;
    std::uint32_t a, b;
    bool operator==(const Key& o) const { return kind == o.kind && bits == o.bits && a == o.a && b == o.b; }
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const {
      std::uint64_t h = static_cast<std::uint64_t>(k.kind) * 0x9E3779B97F4A7C15ull;
      h ^= k.bits + 0x9E3779B97F4A7C15ull + (h << 6) + (h >> 2);
      h ^= (static_cast<std::uint64_t>(k.a) << 32 | k.b) + 0x9E3779B97F4A7C15ull + (h << 6) + (h >> 2);
      return static_cast<std::size_t>(h);
    }
  };

  std::uint32_t intern(const Node& n) {
    std::uint64_t bits = 0;
    if (n.kind == Kind::Const) {
      const double v = n.value == 0.0 ? 0.0 : n.value;
      std::memcpy(&bits, &v, sizeof v);
    } else if (n.kind == Kind::Gen) {
      bits = n.gen;
    }
    Key key{n.kind, bits, n.lhs, n.rhs};
    auto [it, inserted] = table_.emplace(key, static_cast<std::uint32_t>(nodes_.size()));
    if (inserted) nodes_.push_back(n);
    return it->second;
  }

  std::uint32_t build(const Term& t, const std::map<std::string, std::uint32_t>& index) {
    constexpr std::uint32_t none = 0xffffffffu;
    switch (t.kind()) {
      case Kind::Const: return intern({Kind::Const, t.value(), 0, none, none});
      case Kind::Gen: {
        auto it = index.find(t.name());
        if (it == index.end()) {
          throw Error(ErrorCode::MissingGenerator, "'" + t.name() + "' is not a coordinate of the box", t.name());
        }
        return intern({Kind::Gen, 0.0, it->second, none, none});
      }
      case Kind::Neg: {
        const auto a = build(t.lhs(), index);
        return intern({Kind::Neg, 0.0, 0, a, none});
      }
      default: {
        const auto a = build(t.lhs(), index);
        const auto b = build(t.rhs(), index);
        return intern({t.kind(), 0.0, 0, a, b});
      }
    }
  }

  std::vector<Node> nodes_;
  std::unordered_map<Key, std::uint32_t, KeyHash> table_;
  std::uint32_t root_ = 0;
};

namespace detail {

/// Naive outward-rounded interval evaluation.
inline Interval evaluate_naive(const CompiledTerm& ct, const std::vector<Interval>& sides) {
  const auto& nodes = ct.nodes();
  std::vector<Interval> v(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto& n = nodes[i];
    switch (n.kind) {
      case Kind::Const: v[i] = Interval::point(n.value); break;
      case Kind::Gen: v[i] = sides[n.gen]; break;
      case Kind::Neg: v[i] = ia::neg(v[n.lhs]); break;
      case Kind::Add: v[i] = ia::add(v[n.lhs], v[n.rhs]); break;
      case Kind::Mul: v[i] = ia::mul(v[n.lhs], v[n.rhs]); break;
      case Kind::Join: v[i] = ia::join(v[n.lhs], v[n.rhs]); break;
      case Kind::Meet: v[i] = ia::meet(v[n.lhs], v[n.rhs]); break;
    }
  }
  return v[ct.root()];
}

/// Interval evaluation with box-local reduction. On the given box a join whose
/// operand enclosures are ordered is replaced by the larger operand (dually
/// for meet), and s + (-s) collapses to 0 once both sides have been reduced
/// to the same symbolic form. Each rewrite agrees with double-precision
/// evaluation at every point of the box, so the result still encloses both
/// the real and the floating-point value of the term.
class ReducedEvaluator {
 public:
  explicit ReducedEvaluator(const CompiledTerm& ct) : ct_(ct), value_(ct.nodes().size()), form_(ct.nodes().size()) {}

  Interval operator()(const std::vector<Interval>& sides) {
    table_.clear();
    forms_.clear();
    const auto& nodes = ct_.nodes();
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const auto& n = nodes[i];
      switch (n.kind) {
        case Kind::Const:
          value_[i] = Interval::point(n.value);
          form_[i] = intern(Kind::Const, bits(n.value), 0);
          break;
        case Kind::Gen:
          value_[i] = sides[n.gen];
          form_[i] = intern(Kind::Gen, n.gen, 0);
          break;
        case Kind::Neg: {
          value_[i] = ia::neg(value_[n.lhs]);
          const auto& f = forms_[form_[n.lhs]];
          if (f.kind == Kind::Neg) {
            form_[i] = static_cast<std::uint32_t>(f.a);
          } else if (f.kind == Kind::Const) {
            double c;
            std::memcpy(&c, &f.a, sizeof c);
            form_[i] = intern(Kind::Const, bits(-c), 0);
          } else {
            form_[i] = intern(Kind::Neg, form_[n.lhs], 0);
          }
          break;
        }
        case Kind::Add: {
          const auto fa = form_[n.lhs], fb = form_[n.rhs];
          if (is_negation_of(fa, fb) || is_negation_of(fb, fa)) {
            value_[i] = Interval::point(0.0);
            form_[i] = intern(Kind::Const, bits(0.0), 0);
          } else {
            value_[i] = ia::add(value_[n.lhs], value_[n.rhs]);
            form_[i] = intern(Kind::Add, fa, fb);
          }
          break;
        }
        case Kind::Mul:
          value_[i] = ia::mul(value_[n.lhs], value_[n.rhs]);
          form_[i] = intern(Kind::Mul, form_[n.lhs], form_[n.rhs]);
          break;
        case Kind::Join:
        case Kind::Meet: {
          const Interval& a = value_[n.lhs];
          const Interval& b = value_[n.rhs];
          const bool is_join = n.kind == Kind::Join;
          std::uint32_t pick = 0xffffffffu;
          if (form_[n.lhs] == form_[n.rhs]) {
            pick = n.lhs;
          } else if (a.hi <= b.lo) {
            pick = is_join ? n.rhs : n.lhs;
          } else if (b.hi <= a.lo) {
            pick = is_join ? n.lhs : n.rhs;
          }
          if (pick != 0xffffffffu) {
            value_[i] = value_[pick];
            form_[i] = form_[pick];
          } else {
            value_[i] = is_join ? ia::join(a, b) : ia::meet(a, b);
            form_[i] = intern(n.kind, form_[n.lhs], form_[n.rhs]);
          }
          break;
        }
      }
    }
    return value_[ct_.root()];
  }

 private:
  struct Form {
    Kind kind;
    std::uint64_t a;
    std::uint64_t b;
  };
  struct FormHash {
    std::size_t operator()(const std::pair<int, std::pair<std::uint64_t, std::uint64_t>>& k) const {
      std::uint64_t h = static_cast<std::uint64_t>(k.first) * 0x9E3779B97F4A7C15ull;
      h ^= k.second.first + 0x9E3779B97F4A7C15ull + (h << 6) + (h >> 2);
      h ^= k.second.second + 0x9E3779B97F4A7C15ull + (h << 6) + (h >> 2);
      return static_cast<std::size_t>(h);
    }
  };

  static std::uint64_t bits(double v) {
    if (v == 0.0) v = 0.0;
    std::uint64_t b;
    std::memcpy(&b, &v, sizeof v);
    return b;
  }

  std::uint32_t intern(Kind k, std::uint64_t a, std::uint64_t b) {
    auto [it, inserted] =
        table_.emplace(std::make_pair(static_cast<int>(k), std::make_pair(a, b)), static_cast<std::uint32_t>(forms_.size()));
    if (inserted) forms_.push_back({k, a, b});
    return it->second;
  }

  bool is_negation_of(std::uint32_t f, std::uint32_t g) const {
    const auto& ff = forms_[f];
    if (ff.kind == Kind::Neg) return ff.a == g;
    if (ff.kind == Kind::Const && forms_[g].kind == Kind::Const) {
      double x, y;
      std::memcpy(&x, &ff.a, sizeof x);
      std::memcpy(&y, &forms_[g].a, sizeof y);
      return x == -y;
    }
    return false;
  }

  const CompiledTerm& ct_;
  std::vector<Interval> value_;
  std::vector<std::uint32_t> form_;
  std::vector<Form> forms_;
  std::unordered_map<std::pair<int, std::pair<std::uint64_t, std::uint64_t>>, std::uint32_t, FormHash> table_;
};

}  // namespace detail

/// Encloses {t(p) : p in box}. Generators of t must be coordinates of box.
inline Interval interval_eval(const Term& t, const BoxRegion& box) {
  return detail::evaluate_naive(CompiledTerm(t, box.names()), box.sides());
}

/// interval_eval with box-local join/meet selection and s - s cancellation.
/// Never wider than interval_eval on the same box.
inline Interval interval_eval_reduced(const Term& t, const BoxRegion& box) {
  CompiledTerm ct(t, box.names());
  detail::ReducedEvaluator ev(ct);
  return ev(box.sides());
}

/// Certified enclosure of the exact real value t(p).
inline Interval point_bound(const Term& t, const Point& p) {
  std::vector<std::string> names;
  std::vector<Interval> sides;
  for (const auto& g : free_generators(t)) {
    names.push_back(g);
    sides.push_back(Interval::point(p.at(g)));
  }
  return interval_eval(t, BoxRegion(std::move(names), std::move(sides)));
}

/// Per-coordinate bounds L_i on |dt/dx_i| over the box, so that
/// |t(p) - t(q)| <= sum_i L_i |p_i - q_i| for p, q in the box.
inline std::vector<double> lipschitz_bound(const Term& t, const BoxRegion& box) {
  CompiledTerm ct(t, box.names());
  const auto& nodes = ct.nodes();
  const std::size_t d = box.dim();
  std::vector<Interval> val(nodes.size());
  std::vector<std::vector<Interval>> grad(nodes.size(), std::vector<Interval>(d));
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto& n = nodes[i];
    auto& g = grad[i];
    switch (n.kind) {
      case Kind::Const: val[i] = Interval::point(n.value); break;
      case Kind::Gen:
        val[i] = box.side(n.gen);
        g[n.gen] = Interval::point(1.0);
        break;
      case Kind::Neg:
        val[i] = ia::neg(val[n.lhs]);
        for (std::size_t k = 0; k < d; ++k) g[k] = ia::neg(grad[n.lhs][k]);
        break;
      case Kind::Add:
        val[i] = ia::add(val[n.lhs], val[n.rhs]);
        for (std::size_t k = 0; k < d; ++k) g[k] = ia::add(grad[n.lhs][k], grad[n.rhs][k]);
        break;
      case Kind::Mul:
        val[i] = ia::mul(val[n.lhs], val[n.rhs]);
        for (std::size_t k = 0; k < d; ++k) {
          g[k] = ia::add(ia::mul(grad[n.lhs][k], val[n.rhs]), ia::mul(val[n.lhs], grad[n.rhs][k]));
        }
        break;
      case Kind::Join:
      case Kind::Meet: {
        const Interval& a = val[n.lhs];
        const Interval& b = val[n.rhs];
        const bool is_join = n.kind == Kind::Join;
        val[i] = is_join ? ia::join(a, b) : ia::meet(a, b);
        const bool left_only = is_join ? b.hi < a.lo : a.hi < b.lo;
        const bool right_only = is_join ? a.hi < b.lo : b.hi < a.lo;
        for (std::size_t k = 0; k < d; ++k) {
          if (left_only) {
            g[k] = grad[n.lhs][k];
          } else if (right_only) {
            g[k] = grad[n.rhs][k];
          } else {
            g[k] = ia::hull(grad[n.lhs][k], grad[n.rhs][k]);
          }
        }
        break;
      }
    }
  }
  std::vector<double> out(d);
  for (std::size_t k = 0; k < d; ++k) out[k] = grad[ct.root()][k].mag();
  return out;
}

enum class Branching { WidestDimension, RoundRobin };

struct BnBConfig {
  double tol = 1e-9;
  std::size_t max_nodes = 1000000;
  Branching branching = Branching::WidestDimension;
};

enum class EnclosureStatus { Converged, BudgetExhausted };

/// Certified two-sided bound on an extremum. `witness` is the box point whose
/// certified value produced `lo`.
struct Enclosure {
  double lo = 0.0;
  double hi = 0.0;
  EnclosureStatus status = EnclosureStatus::Converged;
  std::size_t nodes_expanded = 0;
  std::vector<double> witness;

  bool converged() const noexcept { return status == EnclosureStatus::Converged; }
  bool contains(double v) const noexcept { return lo <= v && v <= hi; }
  double gap() const noexcept { return hi - lo; }

  friend bool operator==(const Enclosure& a, const Enclosure& b) {
    return a.lo == b.lo && a.hi == b.hi && a.status == b.status && a.nodes_expanded == b.nodes_expanded &&
           a.witness == b.witness;
  }
};

namespace detail {

struct Cell {
  std::vector<Interval> sides;
  double ub;
  std::size_t depth;
};

// Pops the highest upper bound first; ties go to the lexicographically
// smallest box.
struct CellOrder {
  bool operator()(const Cell& a, const Cell& b) const {
    if (a.ub != b.ub) return a.ub < b.ub;
    for (std::size_t i = 0; i < a.sides.size(); ++i) {
      if (a.sides[i].lo != b.sides[i].lo) return a.sides[i].lo > b.sides[i].lo;
    }
    for (std::size_t i = 0; i < a.sides.size(); ++i) {
      if (a.sides[i].hi != b.sides[i].hi) return a.sides[i].hi > b.sides[i].hi;
    }
    return false;
  }
};

inline std::vector<double> midpoint(const std::vector<Interval>& sides) {
  std::vector<double> m(sides.size());
  for (std::size_t i = 0; i < sides.size(); ++i) m[i] = sides[i].mid();
  return m;
}

inline bool splittable(const Interval& s) {
  const double m = s.mid();
  return s.lo < m && m < s.hi;
}

inline std::size_t choose_dimension(const Cell& c, Branching rule) {
  const std::size_t d = c.sides.size();
  if (rule == Branching::RoundRobin) {
    for (std::size_t k = 0; k < d; ++k) {
      const std::size_t i = (c.depth + k) % d;
      if (splittable(c.sides[i])) return i;
    }
    return d;
  }
  std::size_t best = d;
  double best_width = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    if (!splittable(c.sides[i])) continue;
    const double w = c.sides[i].width();
    if (best == d || w > best_width) {
      best = i;
      best_width = w;
    }
  }
  return best;
}

/// Best-first branch and bound for sup of t over the box.
inline Enclosure maximize(const Term& t, const BoxRegion& box, const BnBConfig& cfg) {
  if (!(cfg.tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "tolerance must be positive");
  if (cfg.max_nodes == 0) throw Error(ErrorCode::InvalidArgument, "node budget must be positive");
  CompiledTerm ct(t, box.names());
  ReducedEvaluator upper(ct);
  auto lower_at = [&](const std::vector<double>& p) {
    std::vector<Interval> pt(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) pt[i] = Interval::point(p[i]);
    return upper(pt).lo;
  };

  Enclosure result;
  std::priority_queue<Cell, std::vector<Cell>, CellOrder> queue;
  Cell root{box.sides(), upper(box.sides()).hi, 0};
  result.witness = midpoint(root.sides);
  double lo = lower_at(result.witness);
  double stuck_hi = -ia::kInf;
  queue.push(std::move(root));

  for (;;) {
    double hi = std::max(lo, stuck_hi);
    if (!queue.empty()) hi = std::max(hi, queue.top().ub);
    result.lo = lo;
    result.hi = hi;
    if (hi - lo <= cfg.tol) {
      result.status = EnclosureStatus::Converged;
      break;
    }
    if (queue.empty() || result.nodes_expanded >= cfg.max_nodes) {
      result.status = EnclosureStatus::BudgetExhausted;
      break;
    }
    Cell cell = queue.top();
    queue.pop();
    const std::size_t dim = choose_dimension(cell, cfg.branching);
    if (dim == cell.sides.size()) {
      // Degenerate box: nothing left to split.
      stuck_hi = std::max(stuck_hi, cell.ub);
      continue;
    }
    ++result.nodes_expanded;
    const double m = cell.sides[dim].mid();
    Cell halves[2] = {cell, cell};
    halves[0].sides[dim].hi = m;
    halves[1].sides[dim].lo = m;
    for (auto& h : halves) {
      h.depth = cell.depth + 1;
      h.ub = std::min(cell.ub, upper(h.sides).hi);
      auto mid = midpoint(h.sides);
      const double v = lower_at(mid);
      if (v > lo) {
        lo = v;
        result.witness = std::move(mid);
      }
    }
    for (auto& h : halves) {
      if (h.ub > lo) queue.push(std::move(h));
    }
  }
  return result;
}

}  // namespace detail

/// Enclosure of max_{p in box} t(p).
inline Enclosure bnb_max(const Term& t, const BoxRegion& box, const BnBConfig& cfg = {}) {
  return detail::maximize(t, box, cfg);
}

/// Enclosure of min_{p in box} t(p), computed as -max(-t).
inline Enclosure bnb_min(const Term& t, const BoxRegion& box, const BnBConfig& cfg = {}) {
  Enclosure e = detail::maximize(Term::neg(t), box, cfg);
  const double lo = -e.hi, hi = -e.lo;
  e.lo = lo;
  e.hi = hi;
  return e;
}

/// Enclosure of sup_{p in box} |t(p)|.
inline Enclosure bnb_sup_abs(const Term& t, const BoxRegion& box, const BnBConfig& cfg = {}) {
  return detail::maximize(Term::abs(t), box, cfg);
}

}  // namespace fbal
