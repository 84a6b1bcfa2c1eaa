#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "error.hpp"
#include "format.hpp"

namespace fbal {

/// The basic algebra R^k = B({atom_1, ..., atom_k}) with pointwise order and
/// operations. k = 0 is the zero algebra.
class FiniteBasicAlgebra {
 public:
  FiniteBasicAlgebra() = default;
  explicit FiniteBasicAlgebra(std::vector<std::string> atom_names) : names_(std::move(atom_names)) {
    for (std::size_t i = 0; i < names_.size(); ++i) {
      for (std::size_t j = 0; j < i; ++j) {
        if (names_[i] == names_[j]) throw Error(ErrorCode::DuplicateName, "atom '" + names_[i] + "' repeated", names_[i]);
      }
    }
  }

  /// R^k with atoms named e1..ek.
  static FiniteBasicAlgebra of_dimension(std::size_t k) {
    std::vector<std::string> n;
    for (std::size_t i = 0; i < k; ++i) n.push_back("e" + std::to_string(i + 1));
    return FiniteBasicAlgebra(std::move(n));
  }

  std::size_t dim() const noexcept { return names_.size(); }
  const std::vector<std::string>& atom_names() const noexcept { return names_; }

  friend bool operator==(const FiniteBasicAlgebra& a, const FiniteBasicAlgebra& b) { return a.names_ == b.names_; }

 private:
  std::vector<std::string> names_;
};

class BasicElement {
 public:
  BasicElement(FiniteBasicAlgebra algebra, std::vector<double> values)
      : algebra_(std::move(algebra)), values_(std::move(values)) {
    if (values_.size() != algebra_.dim()) {
      throw Error(ErrorCode::LengthMismatch, "expected " + std::to_string(algebra_.dim()) + " coordinates, got " +
                                                 std::to_string(values_.size()));
    }
    for (double v : values_) {
      if (!std::isfinite(v)) throw Error(ErrorCode::NonFiniteScalar, "coordinates must be finite");
    }
  }

  static BasicElement constant(const FiniteBasicAlgebra& a, double c) {
    return BasicElement(a, std::vector<double>(a.dim(), c));
  }

  const FiniteBasicAlgebra& algebra() const noexcept { return algebra_; }
  const std::vector<double>& values() const noexcept { return values_; }
  double operator[](std::size_t i) const { return values_.at(i); }
  std::size_t dim() const noexcept { return values_.size(); }

  /// Sup norm, i.e. the least r with |a| <= r.1.
  double norm() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::fabs(v));
    return m;
  }

  bool is_idempotent() const {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return v * v == v; });
  }

  /// Pointwise order.
  bool leq(const BasicElement& o) const {
    check_same(o);
    for (std::size_t i = 0; i < values_.size(); ++i) {
      if (!(values_[i] <= o.values_[i])) return false;
    }
    return true;
  }

  template <class F>
  BasicElement zip(const BasicElement& o, F f) const {
    check_same(o);
    std::vector<double> r(values_.size());
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = f(values_[i], o.values_[i]);
    return BasicElement(algebra_, std::move(r));
  }

  template <class F>
  BasicElement map(F f) const {
    std::vector<double> r(values_.size());
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = f(values_[i]);
    return BasicElement(algebra_, std::move(r));
  }

  friend BasicElement operator+(const BasicElement& a, const BasicElement& b) {
    return a.zip(b, [](double x, double y) { return x + y; });
  }
  friend BasicElement operator-(const BasicElement& a, const BasicElement& b) {
    return a.zip(b, [](double x, double y) { return x - y; });
  }
  friend BasicElement operator*(const BasicElement& a, const BasicElement& b) {
    return a.zip(b, [](double x, double y) { return x * y; });
  }
  friend BasicElement operator-(const BasicElement& a) {
    return a.map([](double x) { return -x; });
  }
  friend BasicElement join(const BasicElement& a, const BasicElement& b) {
    return a.zip(b, [](double x, double y) { return std::max(x, y); });
  }
  friend BasicElement meet(const BasicElement& a, const BasicElement& b) {
    return a.zip(b, [](double x, double y) { return std::min(x, y); });
  }
  friend BasicElement abs(const BasicElement& a) { return join(a, -a); }

  friend bool operator==(const BasicElement& a, const BasicElement& b) {
    return a.algebra_ == b.algebra_ && a.values_ == b.values_;
  }

  void check_same(const BasicElement& o) const {
    if (!(algebra_ == o.algebra_)) throw Error(ErrorCode::AlgebraMismatch, "elements of different algebras");
  }

 private:
  FiniteBasicAlgebra algebra_;
  std::vector<double> values_;
};

inline std::string to_string(const BasicElement& a) {
  std::string s = "(";
  for (std::size_t i = 0; i < a.dim(); ++i) {
    if (i) s += ", ";
    s += format_real(a[i]);
  }
  return s + ")";
}

/// An element e with e.e = e, i.e. a 0/1 vector.
class Idempotent {
 public:
  explicit Idempotent(BasicElement e) : e_(std::move(e)) {
    if (!e_.is_idempotent()) throw Error(ErrorCode::InvalidArgument, "not an idempotent: " + to_string(e_));
  }
  Idempotent(const FiniteBasicAlgebra& a, std::vector<double> v) : Idempotent(BasicElement(a, std::move(v))) {}

  static Idempotent zero(const FiniteBasicAlgebra& a) { return Idempotent(BasicElement::constant(a, 0.0)); }
  static Idempotent one(const FiniteBasicAlgebra& a) { return Idempotent(BasicElement::constant(a, 1.0)); }

  const BasicElement& element() const noexcept { return e_; }
  const FiniteBasicAlgebra& algebra() const noexcept { return e_.algebra(); }
  double operator[](std::size_t i) const { return e_[i]; }

  bool leq(const Idempotent& o) const { return e_.leq(o.e_); }
  bool is_zero() const { return e_.norm() == 0.0; }

  /// e v f = e + f - ef
  friend Idempotent join(const Idempotent& e, const Idempotent& f) {
    check(e, f);
    return Idempotent(e.e_ + f.e_ - e.e_ * f.e_);
  }
  /// e ^ f = ef
  friend Idempotent meet(const Idempotent& e, const Idempotent& f) {
    check(e, f);
    return Idempotent(e.e_ * f.e_);
  }
  /// not e = 1 - e
  friend Idempotent complement(const Idempotent& e) {
    return Idempotent(BasicElement::constant(e.algebra(), 1.0) - e.e_);
  }

  friend bool operator==(const Idempotent& a, const Idempotent& b) { return a.e_ == b.e_; }

 private:
  static void check(const Idempotent& e, const Idempotent& f) {
    if (!(e.algebra() == f.algebra())) throw Error(ErrorCode::AlgebraMismatch, "idempotents of different algebras");
  }
  BasicElement e_;
};

constexpr std::size_t kMaxEnumerationDim = 20;

/// All 2^k idempotents, in binary counting order (bit i is coordinate i).
inline std::vector<Idempotent> all_idempotents(const FiniteBasicAlgebra& a) {
  if (a.dim() > kMaxEnumerationDim) {
    throw Error(ErrorCode::DimensionTooLarge, "refusing to enumerate 2^" + std::to_string(a.dim()) + " idempotents");
  }
  std::vector<Idempotent> out;
  const std::uint64_t n = std::uint64_t{1} << a.dim();
  out.reserve(n);
  for (std::uint64_t mask = 0; mask < n; ++mask) {
    std::vector<double> v(a.dim());
    for (std::size_t i = 0; i < a.dim(); ++i) v[i] = (mask >> i) & 1u ? 1.0 : 0.0;
    out.emplace_back(a, std::move(v));
  }
  return out;
}

/// Characteristic vector of coordinate i.
inline Idempotent atom(const FiniteBasicAlgebra& a, std::size_t i) {
  std::vector<double> v(a.dim(), 0.0);
  v.at(i) = 1.0;
  return Idempotent(a, std::move(v));
}

/// The atoms of Id(A), in atom-name order.
inline std::vector<Idempotent> atoms(const FiniteBasicAlgebra& a) {
  std::vector<Idempotent> out;
  for (std::size_t i = 0; i < a.dim(); ++i) out.push_back(atom(a, i));
  return out;
}

/// Index of `e` among atoms(A), or dim() when e is not an atom.
inline std::size_t atom_index(const Idempotent& e) {
  std::size_t found = e.algebra().dim();
  for (std::size_t i = 0; i < e.algebra().dim(); ++i) {
    if (e[i] == 1.0) {
      if (found != e.algebra().dim()) return e.algebra().dim();
      found = i;
    }
  }
  return found;
}

/// An l-algebra morphism A -> C given by reindexing: alpha(a)_j = a_{atom_map[j]}.
/// Every normal homomorphism between finite basic algebras has this form.
class NormalHom {
 public:
  NormalHom(FiniteBasicAlgebra source, FiniteBasicAlgebra target, std::vector<std::size_t> atom_map)
      : source_(std::move(source)), target_(std::move(target)), map_(std::move(atom_map)) {
    if (map_.size() != target_.dim()) {
      throw Error(ErrorCode::LengthMismatch, "atom map must have one entry per target atom");
    }
    for (auto j : map_) {
      if (j >= source_.dim()) throw Error(ErrorCode::UnknownElement, "atom map points outside the source");
    }
  }

  static NormalHom identity(const FiniteBasicAlgebra& a) {
    std::vector<std::size_t> m(a.dim());
    for (std::size_t i = 0; i < m.size(); ++i) m[i] = i;
    return NormalHom(a, a, std::move(m));
  }

  const FiniteBasicAlgebra& source() const noexcept { return source_; }
  const FiniteBasicAlgebra& target() const noexcept { return target_; }
  const std::vector<std::size_t>& atom_map() const noexcept { return map_; }

  BasicElement operator()(const BasicElement& a) const {
    if (!(a.algebra() == source_)) throw Error(ErrorCode::AlgebraMismatch, "element is not in the source algebra");
    std::vector<double> v(target_.dim());
    for (std::size_t j = 0; j < v.size(); ++j) v[j] = a[map_[j]];
    return BasicElement(target_, std::move(v));
  }
  Idempotent operator()(const Idempotent& e) const { return Idempotent((*this)(e.element())); }

  friend bool operator==(const NormalHom& a, const NormalHom& b) {
    return a.source_ == b.source_ && a.target_ == b.target_ && a.map_ == b.map_;
  }

 private:
  FiniteBasicAlgebra source_;
  FiniteBasicAlgebra target_;
  std::vector<std::size_t> map_;
};

/// beta after alpha.
inline NormalHom compose(const NormalHom& beta, const NormalHom& alpha) {
  if (!(alpha.target() == beta.source())) throw Error(ErrorCode::AlgebraMismatch, "homomorphisms do not compose");
  std::vector<std::size_t> m(beta.target().dim());
  for (std::size_t j = 0; j < m.size(); ++j) m[j] = alpha.atom_map()[beta.atom_map()[j]];
  return NormalHom(alpha.source(), beta.target(), std::move(m));
}

/// A map between finite sets, phi : domain -> codomain, as indices.
struct FiniteMap {
  std::vector<std::string> domain;
  std::vector<std::string> codomain;
  std::vector<std::size_t> image;

  FiniteMap(std::vector<std::string> dom, std::vector<std::string> cod, std::vector<std::size_t> img)
      : domain(std::move(dom)), codomain(std::move(cod)), image(std::move(img)) {
    if (image.size() != domain.size()) throw Error(ErrorCode::LengthMismatch, "map must be total on its domain");
    for (auto j : image) {
      if (j >= codomain.size()) throw Error(ErrorCode::UnknownElement, "map leaves its codomain");
    }
  }

  friend bool operator==(const FiniteMap& a, const FiniteMap& b) {
    return a.domain == b.domain && a.codomain == b.codomain && a.image == b.image;
  }
};

/// psi after phi.
inline FiniteMap compose(const FiniteMap& psi, const FiniteMap& phi) {
  if (phi.codomain != psi.domain) throw Error(ErrorCode::TargetMismatch, "maps do not compose");
  std::vector<std::size_t> img(phi.domain.size());
  for (std::size_t i = 0; i < img.size(); ++i) img[i] = psi.image[phi.image[i]];
  return FiniteMap(phi.domain, psi.codomain, std::move(img));
}

/// B(phi) : B(codomain) -> B(domain), f |-> f . phi.
inline NormalHom functor_B(const FiniteMap& phi) {
  return NormalHom(FiniteBasicAlgebra(phi.codomain), FiniteBasicAlgebra(phi.domain), phi.image);
}

/// X(alpha) : X_C -> X_A for alpha : A -> C, where each atom x of C goes to
/// the meet of all idempotents a of A with x <= alpha(a). Enumerates Id(A).
inline std::vector<std::size_t> functor_X(const NormalHom& alpha) {
  const auto& A = alpha.source();
  const auto& C = alpha.target();
  const auto ids = all_idempotents(A);
  std::vector<std::size_t> out(C.dim());
  for (std::size_t j = 0; j < C.dim(); ++j) {
    const Idempotent x = atom(C, j);
    Idempotent m = Idempotent::one(A);
    for (const auto& a : ids) {
      if (x.leq(alpha(a))) m = meet(m, a);
    }
    const std::size_t i = atom_index(m);
    if (i == A.dim()) {
      throw Error(ErrorCode::InvalidArgument, "meet for atom '" + C.atom_names()[j] + "' is not an atom");
    }
    out[j] = i;
  }
  return out;
}

/// eta_S : S -> X_{B(S)}, s |-> characteristic function of {s}.
inline std::vector<Idempotent> eta(const std::vector<std::string>& set) {
  const FiniteBasicAlgebra b(set);
  std::vector<Idempotent> out;
  out.reserve(set.size());
  for (std::size_t i = 0; i < set.size(); ++i) {
    std::vector<double> chi(set.size(), 0.0);
    chi[i] = 1.0;
    out.emplace_back(b, std::move(chi));
  }
  // eta must hit every atom exactly once.
  const auto xs = atoms(b);
  for (const auto& x : xs) {
    if (std::count(out.begin(), out.end(), x) != 1) {
      throw Error(ErrorCode::InvalidArgument, "eta is not a bijection onto the atoms");
    }
  }
  return out;
}

/// The real r with a - r.1 in the maximal ideal (1 - x)A, for an atom x.
/// (1 - x)A = { b : bx = 0 }, so r is the single value of a on the support of x.
inline double residue(const BasicElement& a, const Idempotent& x) {
  const BasicElement ax = a * x.element();
  double r = 0.0;
  for (double v : ax.values()) r += v;
  const BasicElement rest = (a - BasicElement::constant(a.algebra(), r)) * x.element();
  if (rest.norm() != 0.0) throw Error(ErrorCode::InvalidArgument, "not an atom");
  return r;
}

/// B(X_A): functions on the atoms of A. Atoms of A are named after A's
/// coordinates.
inline FiniteBasicAlgebra double_dual(const FiniteBasicAlgebra& a) { return FiniteBasicAlgebra(a.atom_names()); }

/// theta_A(a)(x) = residue of a modulo (1 - x)A.
inline BasicElement theta(const BasicElement& a) {
  const auto xs = atoms(a.algebra());
  std::vector<double> v;
  v.reserve(xs.size());
  for (const auto& x : xs) v.push_back(residue(a, x));
  return BasicElement(double_dual(a.algebra()), std::move(v));
}

struct NormalityReport {
  std::size_t trials = 0;
  std::size_t failures = 0;
  bool passed() const noexcept { return failures == 0; }
};

/// Samples random finite families in the source and checks that alpha maps
/// their join and meet to the join and meet of the images.
inline NormalityReport check_normal(const NormalHom& alpha, std::size_t trials, std::uint64_t seed = 1) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coord(-10.0, 10.0);
  std::uniform_int_distribution<std::size_t> family_size(1, 6);
  NormalityReport report;
  const auto& A = alpha.source();
  for (std::size_t t = 0; t < trials; ++t) {
    const std::size_t n = family_size(rng);
    std::vector<BasicElement> family;
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<double> v(A.dim());
      for (auto& x : v) x = coord(rng);
      family.emplace_back(A, std::move(v));
    }
    BasicElement sup = family.front(), inf = family.front();
    BasicElement image_sup = alpha(family.front()), image_inf = image_sup;
    for (std::size_t i = 1; i < n; ++i) {
      sup = join(sup, family[i]);
      inf = meet(inf, family[i]);
      image_sup = join(image_sup, alpha(family[i]));
      image_inf = meet(image_inf, alpha(family[i]));
    }
    ++report.trials;
    if (!(alpha(sup) == image_sup) || !(alpha(inf) == image_inf)) ++report.failures;
  }
  return report;
}

}  // namespace fbal
