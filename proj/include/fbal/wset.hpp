#pragma once

#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "error.hpp"
#include "format.hpp"

namespace fbal {

/// A finite weighted set (X, w). Element order is the declaration order and
/// drives every downstream coordinate indexing.
class WeightedSet {
 public:
  WeightedSet() = default;

  std::size_t size() const noexcept { return names_.size(); }
  bool empty() const noexcept { return names_.empty(); }

  const std::vector<std::string>& names() const noexcept { return names_; }
  const std::vector<double>& weights() const noexcept { return weights_; }

  const std::string& name(std::size_t i) const { return names_.at(i); }
  double weight(std::size_t i) const { return weights_.at(i); }

  std::optional<std::size_t> index_of(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  bool contains(const std::string& name) const { return index_.count(name) != 0; }

  double weight(const std::string& name) const {
    auto i = index_of(name);
    if (!i) throw Error(ErrorCode::UnknownElement, "'" + name + "' is not an element", name);
    return weights_[*i];
  }

  friend bool operator==(const WeightedSet& a, const WeightedSet& b) {
    return a.names_ == b.names_ && a.weights_ == b.weights_;
  }

  friend WeightedSet make_weighted_set(std::vector<std::string> names, std::vector<double> weights);

 private:
  std::vector<std::string> names_;
  std::vector<double> weights_;
  std::map<std::string, std::size_t> index_;
};

inline WeightedSet make_weighted_set(std::vector<std::string> names, std::vector<double> weights) {
  if (names.size() != weights.size()) {
    throw Error(ErrorCode::LengthMismatch, std::to_string(names.size()) + " names but " +
                                               std::to_string(weights.size()) + " weights");
  }
  WeightedSet ws;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (!std::isfinite(weights[i]) || weights[i] < 0.0) {
      throw Error(ErrorCode::NegativeWeight,
                  "weight of '" + names[i] + "' must be finite and >= 0, got " + format_real(weights[i]),
                  names[i]);
    }
    if (!ws.index_.emplace(names[i], i).second) {
      throw Error(ErrorCode::DuplicateName, "'" + names[i] + "' declared twice", names[i]);
    }
  }
  ws.names_ = std::move(names);
  ws.weights_ = std::move(weights);
  return ws;
}

/// A weight-nonincreasing map between weighted sets. Only constructible
/// through validate_morphism / compose / identity_morphism.
class WSetMorphism {
 public:
  const WeightedSet& source() const noexcept { return source_; }
  const WeightedSet& target() const noexcept { return target_; }

  /// Index in target() of the image of source element i.
  std::size_t image_index(std::size_t i) const { return map_.at(i); }
  const std::string& image(const std::string& x) const {
    auto i = source_.index_of(x);
    if (!i) throw Error(ErrorCode::UnknownElement, "'" + x + "' is not in the source", x);
    return target_.name(map_[*i]);
  }
  const std::vector<std::size_t>& indices() const noexcept { return map_; }

  friend bool operator==(const WSetMorphism& a, const WSetMorphism& b) {
    return a.source_ == b.source_ && a.target_ == b.target_ && a.map_ == b.map_;
  }

 private:
  WSetMorphism(WeightedSet s, WeightedSet t, std::vector<std::size_t> m)
      : source_(std::move(s)), target_(std::move(t)), map_(std::move(m)) {}

  friend WSetMorphism validate_morphism(const WeightedSet&, const WeightedSet&,
                                        const std::map<std::string, std::string>&);
  friend WSetMorphism compose(const WSetMorphism&, const WSetMorphism&);

  WeightedSet source_;
  WeightedSet target_;
  std::vector<std::size_t> map_;
};

/// Accepts `map` iff it is total on src, lands in tgt, and
/// w_tgt(map(x)) <= w_src(x) for every x (exact comparison).
inline WSetMorphism validate_morphism(const WeightedSet& src, const WeightedSet& tgt,
                                      const std::map<std::string, std::string>& map) {
  for (const auto& [from, to] : map) {
    if (!src.contains(from)) {
      throw Error(ErrorCode::UnknownElement, "'" + from + "' is not in the source", from);
    }
  }
  std::vector<std::size_t> indices;
  indices.reserve(src.size());
  for (std::size_t i = 0; i < src.size(); ++i) {
    const auto& x = src.name(i);
    auto it = map.find(x);
    if (it == map.end()) {
      throw Error(ErrorCode::UnknownElement, "no image given for '" + x + "'", x);
    }
    auto j = tgt.index_of(it->second);
    if (!j) {
      throw Error(ErrorCode::UnknownElement, "'" + it->second + "' is not in the target", it->second);
    }
    if (!(tgt.weight(*j) <= src.weight(i))) {
      throw Error(ErrorCode::WeightViolation,
                  "w(" + it->second + ") = " + format_real(tgt.weight(*j)) + " exceeds w(" + x +
                      ") = " + format_real(src.weight(i)),
                  x);
    }
    indices.push_back(*j);
  }
  return WSetMorphism(src, tgt, std::move(indices));
}

inline WSetMorphism identity_morphism(const WeightedSet& ws) {
  std::map<std::string, std::string> m;
  for (const auto& n : ws.names()) m.emplace(n, n);
  return validate_morphism(ws, ws, m);
}

/// g after f.
inline WSetMorphism compose(const WSetMorphism& g, const WSetMorphism& f) {
  if (!(f.target() == g.source())) {
    throw Error(ErrorCode::TargetMismatch, "target of the first map is not the source of the second");
  }
  std::vector<std::size_t> m;
  m.reserve(f.source().size());
  for (std::size_t i = 0; i < f.source().size(); ++i) m.push_back(g.image_index(f.image_index(i)));
  return WSetMorphism(f.source(), g.target(), std::move(m));
}

/// Restriction to the elements of strictly positive weight.
inline WeightedSet positive_support(const WeightedSet& ws) {
  std::vector<std::string> names;
  std::vector<double> weights;
  for (std::size_t i = 0; i < ws.size(); ++i) {
    if (ws.weight(i) > 0.0) {
      names.push_back(ws.name(i));
      weights.push_back(ws.weight(i));
    }
  }
  return make_weighted_set(std::move(names), std::move(weights));
}

/// The finite piece of (R, |.|) hit by `values`: one element per distinct
/// value, named by its formatted text, with weight |v|.
inline WeightedSet real_line_image(const std::vector<double>& values) {
  std::vector<std::string> names;
  std::vector<double> weights;
  std::map<std::string, bool> seen;
  for (double v : values) {
    if (!std::isfinite(v)) throw Error(ErrorCode::NonFiniteScalar, "non-finite value");
    auto key = format_real(v);
    if (seen.emplace(key, true).second) {
      names.push_back(key);
      weights.push_back(std::fabs(v));
    }
  }
  return make_weighted_set(std::move(names), std::move(weights));
}

/// Validates g : (X, w) -> (R, |.|), i.e. |g(x)| <= w(x) for every x.
inline WSetMorphism validate_real_morphism(const WeightedSet& src, const std::map<std::string, double>& g) {
  std::vector<double> values;
  std::map<std::string, std::string> as_names;
  for (const auto& [x, v] : g) {
    values.push_back(v);
    as_names.emplace(x, format_real(v));
  }
  return validate_morphism(src, real_line_image(values), as_names);
}

}  // namespace fbal
