#pragma once

#include <cmath>
#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "basic.hpp"
#include "error.hpp"
#include "interval.hpp"
#include "term.hpp"
#include "wset.hpp"

namespace fbal {

/// An element of the free algebra F(X, w), represented as a term over the
/// generators of X. Semantically it is the function the term defines on the
/// box prod_x [-w(x), w(x)], with generators acting as coordinate projections.
class FreeElement {
 public:
  const WeightedSet& context() const noexcept { return context_; }
  const Term& term() const noexcept { return term_; }

  friend FreeElement admit(const WeightedSet& ctx, const Term& t);

 private:
  FreeElement(WeightedSet ctx, Term t) : context_(std::move(ctx)), term_(std::move(t)) {}

  WeightedSet context_;
  Term term_;
};

/// Brings a term into F(ctx): every generator must be an element of ctx, and
/// generators of weight 0 are replaced by 0 (their norm is w(x) = 0).
inline FreeElement admit(const WeightedSet& ctx, const Term& t) {
  std::map<std::string, Term> zeros;
  for (const auto& g : free_generators(t)) {
    auto i = ctx.index_of(g);
    if (!i) throw Error(ErrorCode::UnknownElement, "'" + g + "' is not a generator of the context", g);
    if (ctx.weight(*i) == 0.0) zeros.emplace(g, Term::constant(0.0));
  }
  return FreeElement(ctx, zeros.empty() ? t : substitute(t, zeros));
}

/// The image f(x) of a generator.
inline FreeElement generator(const WeightedSet& ctx, const std::string& x) {
  if (!ctx.contains(x)) throw Error(ErrorCode::UnknownElement, "'" + x + "' is not a generator of the context", x);
  return admit(ctx, Term::gen(x));
}

inline FreeElement constant(const WeightedSet& ctx, double c) { return admit(ctx, Term::constant(c)); }

namespace detail {
inline void same_context(const FreeElement& a, const FreeElement& b) {
  if (!(a.context() == b.context())) throw Error(ErrorCode::ContextMismatch, "elements live in different free algebras");
}
}  // namespace detail

inline FreeElement operator+(const FreeElement& a, const FreeElement& b) {
  detail::same_context(a, b);
  return admit(a.context(), a.term() + b.term());
}
inline FreeElement operator-(const FreeElement& a, const FreeElement& b) {
  detail::same_context(a, b);
  return admit(a.context(), a.term() - b.term());
}
inline FreeElement operator*(const FreeElement& a, const FreeElement& b) {
  detail::same_context(a, b);
  return admit(a.context(), a.term() * b.term());
}
inline FreeElement operator-(const FreeElement& a) { return admit(a.context(), -a.term()); }
inline FreeElement join(const FreeElement& a, const FreeElement& b) {
  detail::same_context(a, b);
  return admit(a.context(), Term::join(a.term(), b.term()));
}
inline FreeElement meet(const FreeElement& a, const FreeElement& b) {
  detail::same_context(a, b);
  return admit(a.context(), Term::meet(a.term(), b.term()));
}
inline FreeElement abs(const FreeElement& a) { return admit(a.context(), Term::abs(a.term())); }
inline FreeElement scale(double r, const FreeElement& a) { return admit(a.context(), Term::scale(r, a.term())); }
inline FreeElement truncate(const FreeElement& a, double c) { return admit(a.context(), Term::truncate(a.term(), c)); }

/// The box prod_{x in X'} [-w(x), w(x)] over the positive support X', and the
/// coordinatewise homeomorphism tau_x(u) = 2 w(x) u - w(x) from [0,1].
class YosidaBox {
 public:
  explicit YosidaBox(const WeightedSet& ctx) : support_(positive_support(ctx)) {}

  std::size_t dim() const noexcept { return support_.size(); }
  const std::vector<std::string>& names() const noexcept { return support_.names(); }
  double radius(std::size_t i) const { return support_.weight(i); }

  BoxRegion region() const {
    std::vector<Interval> sides;
    for (double w : support_.weights()) sides.push_back({-w, w});
    return BoxRegion(support_.names(), std::move(sides));
  }

  double tau(std::size_t i, double u) const {
    const double w = radius(i);
    return 2.0 * w * u - w;
  }
  double tau_inverse(std::size_t i, double a) const {
    const double w = radius(i);
    return (a + w) / (2.0 * w);
  }

  Point from_unit_cube(const std::vector<double>& u) const {
    if (u.size() != dim()) throw Error(ErrorCode::LengthMismatch, "unit-cube point has the wrong dimension");
    Point p;
    for (std::size_t i = 0; i < dim(); ++i) p.set(names()[i], tau(i, u[i]));
    return p;
  }
  std::vector<double> to_unit_cube(const Point& p) const {
    std::vector<double> u(dim());
    for (std::size_t i = 0; i < dim(); ++i) u[i] = tau_inverse(i, p.at(names()[i]));
    return u;
  }

 private:
  WeightedSet support_;
};

inline YosidaBox yosida_box(const WeightedSet& ctx) { return YosidaBox(ctx); }

struct NormConfig {
  double tol = 1e-9;
  std::size_t budget = 1000000;

  BnBConfig bnb() const {
    BnBConfig c;
    c.tol = tol;
    c.max_nodes = budget;
    return c;
  }
};

/// Certified enclosure of ||a||, the sup of |a| over the Yosida box.
inline Enclosure norm(const FreeElement& a, const NormConfig& cfg = {}) {
  if (!(cfg.tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "tolerance must be positive");
  return bnb_sup_abs(a.term(), yosida_box(a.context()).region(), cfg.bnb());
}

enum class Equality { Equal, NotEqual, Unknown };

struct EqResult {
  Equality verdict;
  Enclosure distance;  // encloses ||a - b||
};

/// Three-valued equality test through a certified enclosure of ||a - b||.
/// The difference is first brought to commutative normal form, which denotes
/// the same function.
inline EqResult eq(const FreeElement& a, const FreeElement& b, const NormConfig& cfg = {}) {
  detail::same_context(a, b);
  if (!(cfg.tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "tolerance must be positive");
  NormConfig inner = cfg;
  inner.tol = cfg.tol / 2.0;
  const Term diff = commutative_normal_form(a.term() - b.term());
  Enclosure e = bnb_sup_abs(diff, yosida_box(a.context()).region(), inner.bnb());
  Equality v = Equality::Unknown;
  if (e.hi <= cfg.tol) {
    v = Equality::Equal;
  } else if (e.lo > cfg.tol) {
    v = Equality::NotEqual;
  }
  return {v, std::move(e)};
}

/// A bal-morphism out of F(X, w), determined by where it sends generators.
/// Targets: R (one point of the Yosida box), R^k (one point per atom), or
/// another free algebra (a term per generator with certified norm <= w(x)).
class Homomorphism {
 public:
  struct Reals {
    Point point;
  };
  struct FiniteBasic {
    FiniteBasicAlgebra algebra;
    std::vector<Point> points;  // one per atom
  };
  struct Free {
    WeightedSet context;
    std::map<std::string, FreeElement> substitution;
  };
  using Target = std::variant<Reals, FiniteBasic, Free>;

  const WeightedSet& source() const noexcept { return source_; }
  const Target& target() const noexcept { return target_; }

  /// x |-> values(x) in R; requires |values(x)| <= w(x) for every x.
  static Homomorphism into_reals(const WeightedSet& ctx, const std::map<std::string, double>& values) {
    validate_real_morphism(ctx, values);
    return Homomorphism(ctx, Reals{Point(values)});
  }

  /// x |-> (values(x)_1, ..., values(x)_k) in R^k.
  static Homomorphism into_basic(const WeightedSet& ctx, const FiniteBasicAlgebra& algebra,
                                 const std::map<std::string, std::vector<double>>& values) {
    std::vector<std::map<std::string, double>> per_atom(algebra.dim());
    for (const auto& [x, vs] : values) {
      if (vs.size() != algebra.dim()) {
        throw Error(ErrorCode::LengthMismatch,
                    "'" + x + "' needs " + std::to_string(algebra.dim()) + " coordinates", x);
      }
      for (std::size_t i = 0; i < vs.size(); ++i) per_atom[i][x] = vs[i];
    }
    std::vector<Point> points;
    for (std::size_t i = 0; i < algebra.dim(); ++i) {
      validate_real_morphism(ctx, per_atom[i]);
      points.emplace_back(per_atom[i]);
    }
    if (algebra.dim() == 0) {
      // R^0 is the zero algebra: every map into it is fine, but it must be total.
      for (const auto& x : ctx.names()) {
        if (!values.count(x)) throw Error(ErrorCode::UnknownElement, "no image given for '" + x + "'", x);
      }
    }
    return Homomorphism(ctx, FiniteBasic{algebra, std::move(points)});
  }

  /// x |-> terms(x) in F(target); certifies ||terms(x)|| <= w(x).
  static Homomorphism into_free(const WeightedSet& ctx, const WeightedSet& target,
                                const std::map<std::string, Term>& terms, const NormConfig& cfg = {}) {
    std::map<std::string, FreeElement> subst;
    for (const auto& [x, t] : terms) {
      if (!ctx.contains(x)) throw Error(ErrorCode::UnknownElement, "'" + x + "' is not in the source", x);
    }
    for (std::size_t i = 0; i < ctx.size(); ++i) {
      const auto& x = ctx.name(i);
      auto it = terms.find(x);
      if (it == terms.end()) throw Error(ErrorCode::UnknownElement, "no image given for '" + x + "'", x);
      FreeElement image = admit(target, it->second);
      const Enclosure e = norm(image, cfg);
      if (!(e.hi <= ctx.weight(i))) {
        throw Error(ErrorCode::NormCertificationFailed,
                    "could not certify ||h(" + x + ")|| <= " + format_real(ctx.weight(i)) + " (enclosure [" +
                        format_real(e.lo) + ", " + format_real(e.hi) + "])",
                    x);
      }
      subst.emplace(x, std::move(image));
    }
    return Homomorphism(ctx, Free{target, std::move(subst)});
  }

  friend Homomorphism free_functor(const WSetMorphism& phi);

 private:
  Homomorphism(WeightedSet src, Target t) : source_(std::move(src)), target_(std::move(t)) {}

  WeightedSet source_;
  Target target_;
};

/// F(phi): x |-> f(phi(x)). ||f(phi(x))|| = w2(phi(x)) <= w1(x), so no
/// numerical certificate is needed.
inline Homomorphism free_functor(const WSetMorphism& phi) {
  std::map<std::string, FreeElement> subst;
  for (std::size_t i = 0; i < phi.source().size(); ++i) {
    subst.emplace(phi.source().name(i), generator(phi.target(), phi.target().name(phi.image_index(i))));
  }
  return Homomorphism(phi.source(), Homomorphism::Free{phi.target(), std::move(subst)});
}

using HomImage = std::variant<double, BasicElement, FreeElement>;

/// The unique extension of h to F(X, w), applied to a.
inline HomImage apply_ump(const Homomorphism& h, const FreeElement& a) {
  if (!(h.source() == a.context())) throw Error(ErrorCode::ContextMismatch, "element is not in the source of h");
  return std::visit(
      [&](const auto& tgt) -> HomImage {
        using T = std::decay_t<decltype(tgt)>;
        if constexpr (std::is_same_v<T, Homomorphism::Reals>) {
          return eval(a.term(), tgt.point);
        } else if constexpr (std::is_same_v<T, Homomorphism::FiniteBasic>) {
          std::vector<double> v;
          v.reserve(tgt.points.size());
          for (const auto& p : tgt.points) v.push_back(eval(a.term(), p));
          return BasicElement(tgt.algebra, std::move(v));
        } else {
          std::map<std::string, Term> s;
          for (const auto& [x, img] : tgt.substitution) s.emplace(x, img.term());
          return admit(tgt.context, substitute(a.term(), s));
        }
      },
      h.target());
}

struct GridRow {
  std::vector<double> unit;  // unit-cube coordinates
  double value;
};

constexpr std::size_t kMaxGridDim = 3;

/// Values of a on the regular grid of [0,1]^{X'}, mapped into the Yosida box
/// through tau. The first generator varies slowest.
inline std::vector<GridRow> sample_grid(const FreeElement& a, std::size_t resolution) {
  const YosidaBox box = yosida_box(a.context());
  const std::size_t d = box.dim();
  if (d > kMaxGridDim) {
    throw Error(ErrorCode::DimensionTooLarge, "grid export supports at most " + std::to_string(kMaxGridDim) +
                                                  " positive-weight generators, got " + std::to_string(d));
  }
  if (resolution < 2) throw Error(ErrorCode::InvalidArgument, "resolution must be at least 2");
  std::size_t rows = 1;
  for (std::size_t i = 0; i < d; ++i) rows *= resolution;
  std::vector<GridRow> out;
  out.reserve(rows);
  std::vector<std::size_t> idx(d, 0);
  const double step = 1.0 / static_cast<double>(resolution - 1);
  for (std::size_t r = 0; r < rows; ++r) {
    std::vector<double> u(d);
    for (std::size_t i = 0; i < d; ++i) u[i] = idx[i] == resolution - 1 ? 1.0 : static_cast<double>(idx[i]) * step;
    out.push_back({u, eval(a.term(), box.from_unit_cube(u))});
    for (std::size_t i = d; i-- > 0;) {
      if (++idx[i] < resolution) break;
      idx[i] = 0;
    }
  }
  return out;
}

}  // namespace fbal
