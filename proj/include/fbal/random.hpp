#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "term.hpp"
#include "wset.hpp"

namespace fbal {

/// Seeded generators for property checks. All draws go through one
/// std::mt19937_64, so a seed fixes the whole sequence.
class RandomSource {
 public:
  explicit RandomSource(std::uint64_t seed) : rng_(seed) {}

  std::mt19937_64& engine() noexcept { return rng_; }

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  std::size_t index(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }
  bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(rng_); }

  /// Constant on the grid of quarter steps in [-3, 3].
  double small_constant() { return static_cast<double>(static_cast<int>(index(25)) - 12) / 4.0; }

  /// Weighted set x1..xn with weights uniform in [0, max_weight]; with
  /// probability zero_prob a weight is exactly 0.
  WeightedSet weighted_set(std::size_t n, double max_weight = 10.0, double zero_prob = 0.0) {
    std::vector<std::string> names;
    std::vector<double> weights;
    for (std::size_t i = 0; i < n; ++i) {
      names.push_back("x" + std::to_string(i + 1));
      weights.push_back(coin(zero_prob) ? 0.0 : uniform(0.0, max_weight));
    }
    return make_weighted_set(std::move(names), std::move(weights));
  }

  /// Random term with at most max_size nodes over the given generators.
  Term term(const std::vector<std::string>& gens, std::size_t max_size) {
    if (max_size <= 1 || coin(0.15)) return leaf(gens);
    if (max_size == 2 || coin(0.1)) return Term::neg(term(gens, max_size - 1));
    const std::size_t budget = max_size - 1;
    const std::size_t left = 1 + index(budget - 1);
    Term a = term(gens, left);
    Term b = term(gens, budget - left);
    switch (index(4)) {
      case 0: return Term::add(a, b);
      case 1: return Term::mul(a, b);
      case 2: return Term::join(a, b);
      default: return Term::meet(a, b);
    }
  }

  Term leaf(const std::vector<std::string>& gens) {
    if (gens.empty() || coin(0.3)) return Term::constant(small_constant());
    return Term::gen(gens[index(gens.size())]);
  }

 private:
  std::mt19937_64 rng_;
};

}  // namespace fbal
