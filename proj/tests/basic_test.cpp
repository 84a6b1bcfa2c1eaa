#include <gtest/gtest.h>

#include <functional>

#include "fbal/basic.hpp"

using namespace fbal;

namespace {

std::vector<std::string> set_of(std::size_t n) {
  std::vector<std::string> v;
  for (std::size_t i = 0; i < n; ++i) v.push_back("s" + std::to_string(i));
  return v;
}

// Every map {0..n-1} -> {0..m-1}.
void for_each_map(std::size_t n, std::size_t m, const std::function<void(const std::vector<std::size_t>&)>& f) {
  if (m == 0 && n > 0) return;
  std::vector<std::size_t> img(n, 0);
  for (;;) {
    f(img);
    std::size_t k = 0;
    while (k < n && ++img[k] == m) img[k++] = 0;
    if (k == n) return;
  }
}

}  // namespace

TEST(Idempotents, Operations) {
  const auto A = FiniteBasicAlgebra::of_dimension(3);
  const Idempotent e(A, {1, 0, 1}), f(A, {0, 0, 1});
  EXPECT_EQ(join(e, f), Idempotent(A, {1, 0, 1}));
  EXPECT_EQ(complement(e), Idempotent(A, {0, 1, 0}));
  EXPECT_EQ(meet(e, complement(e)), Idempotent::zero(A));
  EXPECT_EQ(meet(e, f), f);
  EXPECT_THROW(Idempotent(A, {1, 0.5, 0}), Error);
  try {
    join(e, Idempotent(FiniteBasicAlgebra::of_dimension(2), {1, 0}));
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), ErrorCode::AlgebraMismatch);
  }
}

TEST(Idempotents, BooleanAlgebraAxiomsExhaustive) {
  for (std::size_t k = 0; k <= 4; ++k) {
    const auto A = FiniteBasicAlgebra::of_dimension(k);
    const auto ids = all_idempotents(A);
    ASSERT_EQ(ids.size(), std::size_t{1} << k);
    const auto zero = Idempotent::zero(A), one = Idempotent::one(A);
    for (const auto& a : ids) {
      EXPECT_EQ(join(a, complement(a)), one);
      EXPECT_EQ(meet(a, complement(a)), zero);
      EXPECT_EQ(join(a, zero), a);
      EXPECT_EQ(meet(a, one), a);
      EXPECT_EQ(complement(complement(a)), a);
      for (const auto& b : ids) {
        EXPECT_EQ(join(a, b), join(b, a));
        EXPECT_EQ(meet(a, b), meet(b, a));
        EXPECT_EQ(join(a, meet(a, b)), a);
        EXPECT_EQ(meet(a, join(a, b)), a);
        EXPECT_EQ(complement(join(a, b)), meet(complement(a), complement(b)));
        for (const auto& c : ids) {
          EXPECT_EQ(join(a, join(b, c)), join(join(a, b), c));
          EXPECT_EQ(meet(a, meet(b, c)), meet(meet(a, b), c));
          EXPECT_EQ(meet(a, join(b, c)), join(meet(a, b), meet(a, c)));
          EXPECT_EQ(join(a, meet(b, c)), meet(join(a, b), join(a, c)));
        }
      }
    }
  }
}

TEST(Atoms, Examples) {
  const auto xs = atoms(FiniteBasicAlgebra::of_dimension(3));
  ASSERT_EQ(xs.size(), 3u);
  EXPECT_EQ(xs[0].element().values(), (std::vector<double>{1, 0, 0}));
  EXPECT_EQ(xs[2].element().values(), (std::vector<double>{0, 0, 1}));
  EXPECT_TRUE(atoms(FiniteBasicAlgebra::of_dimension(0)).empty());
}

TEST(Atoms, AreMinimalNonzeroExhaustive) {
  for (std::size_t k = 0; k <= 4; ++k) {
    const auto A = FiniteBasicAlgebra::of_dimension(k);
    const auto ids = all_idempotents(A);
    std::size_t minimal = 0;
    for (const auto& e : ids) {
      if (e.is_zero()) continue;
      bool is_min = true;
      for (const auto& f : ids) {
        if (!f.is_zero() && f.leq(e) && !(f == e)) is_min = false;
      }
      if (is_min) {
        ++minimal;
        EXPECT_LT(atom_index(e), k);
      }
    }
    EXPECT_EQ(minimal, k);
    for (const auto& x : atoms(A)) {
      for (const auto& f : ids) {
        const bool strictly_between = !f.is_zero() && f.leq(x) && !(f == x);
        EXPECT_FALSE(strictly_between);
      }
    }
  }
}

TEST(FunctorB, Examples) {
  const FiniteMap id(set_of(3), set_of(3), {0, 1, 2});
  EXPECT_EQ(functor_B(id), NormalHom::identity(FiniteBasicAlgebra(set_of(3))));

  const FiniteMap constant(set_of(2), {"*"}, {0, 0});
  const NormalHom diag = functor_B(constant);
  const BasicElement r(diag.source(), {2.5});
  EXPECT_EQ(diag(r).values(), (std::vector<double>{2.5, 2.5}));
}

TEST(FunctorB, ContravariantExhaustive) {
  for (std::size_t a = 1; a <= 3; ++a) {
    for (std::size_t b = 1; b <= 3; ++b) {
      for (std::size_t c = 1; c <= 3; ++c) {
        for_each_map(a, b, [&](const auto& f) {
          for_each_map(b, c, [&](const auto& g) {
            const FiniteMap phi(set_of(a), set_of(b), f);
            FiniteMap psi(set_of(b), set_of(c), g);
            psi.domain = set_of(b);
            // psi . phi, with sets sharing names where they must.
            const FiniteMap psi_phi = compose(psi, phi);
            EXPECT_EQ(functor_B(psi_phi), compose(functor_B(phi), functor_B(psi)));
          });
        });
      }
    }
  }
}

TEST(FunctorX, Examples) {
  // alpha : R^2 -> R^3, (a, b) |-> (a, a, b).
  const auto R2 = FiniteBasicAlgebra::of_dimension(2), R3 = FiniteBasicAlgebra::of_dimension(3);
  const NormalHom alpha(R2, R3, {0, 0, 1});
  // Oracle: of the four idempotents of R^2, those a with e1 <= alpha(a) are
  // (1,0) and (1,1); their meet is (1,0), the first atom.
  const auto ids = all_idempotents(R2);
  Idempotent m = Idempotent::one(R2);
  for (const auto& a : ids) {
    if (atom(R3, 0).leq(alpha(a))) m = meet(m, a);
  }
  EXPECT_EQ(m, Idempotent(R2, {1, 0}));
  EXPECT_EQ(functor_X(alpha), (std::vector<std::size_t>{0, 0, 1}));

  EXPECT_EQ(functor_X(NormalHom::identity(R3)), (std::vector<std::size_t>{0, 1, 2}));
}

TEST(FunctorX, DimensionGuard) {
  const auto big = FiniteBasicAlgebra::of_dimension(21);
  try {
    functor_X(NormalHom::identity(big));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DimensionTooLarge);
  }
}

TEST(Duality, XOfBIsPhiExhaustive) {
  for (std::size_t n = 0; n <= 4; ++n) {
    for (std::size_t m = 1; m <= 4; ++m) {
      for_each_map(n, m, [&](const auto& img) {
        const FiniteMap phi(set_of(n), set_of(m), img);
        // With eta identifying s with the s-th atom, X(B(phi)) = phi.
        EXPECT_EQ(functor_X(functor_B(phi)), img);
      });
    }
  }
}

TEST(Duality, XIsContravariantExhaustive) {
  for (std::size_t a = 1; a <= 3; ++a) {
    for (std::size_t b = 1; b <= 3; ++b) {
      for (std::size_t c = 1; c <= 3; ++c) {
        const auto A = FiniteBasicAlgebra::of_dimension(a), B = FiniteBasicAlgebra::of_dimension(b),
                   C = FiniteBasicAlgebra::of_dimension(c);
        for_each_map(b, a, [&](const auto& am) {
          for_each_map(c, b, [&](const auto& bm) {
            const NormalHom alpha(A, B, am), beta(B, C, bm);
            const auto xa = functor_X(alpha), xb = functor_X(beta), xba = functor_X(compose(beta, alpha));
            for (std::size_t j = 0; j < c; ++j) EXPECT_EQ(xba[j], xa[xb[j]]);
          });
        });
      }
    }
  }
}

TEST(Eta, Examples) {
  const auto e = eta({"a", "b"});
  ASSERT_EQ(e.size(), 2u);
  EXPECT_EQ(e[0].element().values(), (std::vector<double>{1, 0}));
  for (std::size_t n = 0; n <= 6; ++n) {
    const auto en = eta(set_of(n));
    EXPECT_EQ(en.size(), atoms(FiniteBasicAlgebra(set_of(n))).size());
    for (std::size_t i = 0; i < n; ++i) EXPECT_EQ(atom_index(en[i]), i);
  }
}

TEST(Eta, NaturalityExhaustive) {
  // X(B(phi)) . eta_S = eta_T . phi
  for (std::size_t n = 1; n <= 4; ++n) {
    for (std::size_t m = 1; m <= 4; ++m) {
      for_each_map(n, m, [&](const auto& img) {
        const FiniteMap phi(set_of(n), set_of(m), img);
        const auto xb = functor_X(functor_B(phi));
        const auto es = eta(phi.domain), et = eta(phi.codomain);
        for (std::size_t s = 0; s < n; ++s) EXPECT_EQ(et[xb[atom_index(es[s])]], et[img[s]]);
      });
    }
  }
}

TEST(Theta, Examples) {
  const auto R2 = FiniteBasicAlgebra::of_dimension(2);
  const BasicElement a(R2, {3, -1});
  // a - a_i.1 vanishes at i, so it lies in (1 - e_i)A and the residue is a_i.
  EXPECT_EQ(residue(a, atom(R2, 0)), 3.0);
  EXPECT_EQ(residue(a, atom(R2, 1)), -1.0);
  EXPECT_EQ(theta(a).values(), (std::vector<double>{3, -1}));
  EXPECT_EQ(theta(BasicElement::constant(R2, 1.0)).values(), (std::vector<double>{1, 1}));
}

TEST(Theta, IsAnLAlgebraIsomorphism) {
  const double grid[] = {-2.0, -0.5, 0.0, 1.0, 3.0};
  for (std::size_t k = 0; k <= 3; ++k) {
    const auto A = FiniteBasicAlgebra::of_dimension(k);
    std::vector<BasicElement> elems;
    std::size_t count = 1;
    for (std::size_t i = 0; i < k; ++i) count *= 5;
    for (std::size_t c = 0; c < count; ++c) {
      std::vector<double> v(k);
      for (std::size_t i = 0, r = c; i < k; ++i, r /= 5) v[i] = grid[r % 5];
      elems.emplace_back(A, v);
    }
    for (const auto& a : elems) {
      for (const auto& b : elems) {
        EXPECT_EQ(theta(a + b), theta(a) + theta(b));
        EXPECT_EQ(theta(a * b), theta(a) * theta(b));
        EXPECT_EQ(theta(join(a, b)), join(theta(a), theta(b)));
        EXPECT_EQ(theta(meet(a, b)), meet(theta(a), theta(b)));
        // Injective.
        if (theta(a) == theta(b)) {
          EXPECT_EQ(a, b);
        }
      }
    }
    EXPECT_EQ(theta(BasicElement::constant(A, 1.0)), BasicElement::constant(double_dual(A), 1.0));
  }
}

TEST(NormalHom, PreservesOperations) {
  const auto A = FiniteBasicAlgebra::of_dimension(3), C = FiniteBasicAlgebra::of_dimension(4);
  const NormalHom alpha(A, C, {2, 0, 0, 1});
  const BasicElement a(A, {1.5, -2, 0.25}), b(A, {-1, 4, 2});
  EXPECT_EQ(alpha(a + b), alpha(a) + alpha(b));
  EXPECT_EQ(alpha(a * b), alpha(a) * alpha(b));
  EXPECT_EQ(alpha(join(a, b)), join(alpha(a), alpha(b)));
  EXPECT_EQ(alpha(meet(a, b)), meet(alpha(a), alpha(b)));
  EXPECT_EQ(alpha(BasicElement::constant(A, 1)), BasicElement::constant(C, 1));
  EXPECT_THROW(NormalHom(A, C, {3, 0, 0, 1}), Error);
}

TEST(CheckNormal, Passes) {
  const auto A = FiniteBasicAlgebra::of_dimension(3);
  EXPECT_TRUE(check_normal(NormalHom::identity(A), 100).passed());
  for_each_map(4, 3, [&](const auto& img) {
    const auto report = check_normal(functor_B(FiniteMap(set_of(4), set_of(3), img)), 10, img[0] + 1);
    EXPECT_EQ(report.trials, 10u);
    EXPECT_TRUE(report.passed());
  });
}

TEST(ZeroAlgebra, Degenerates) {
  const auto Z = FiniteBasicAlgebra::of_dimension(0);
  EXPECT_EQ(all_idempotents(Z).size(), 1u);
  EXPECT_EQ(Idempotent::zero(Z), Idempotent::one(Z));
  EXPECT_TRUE(functor_X(NormalHom::identity(Z)).empty());
  EXPECT_EQ(theta(BasicElement(Z, {})).dim(), 0u);
}
