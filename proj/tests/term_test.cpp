#include <gtest/gtest.h>

#include <cmath>

#include "fbal/random.hpp"
#include "fbal/term.hpp"

using namespace fbal;

namespace {
const Term x = Term::gen("x");
const Term y = Term::gen("y");
Term c(double v) { return Term::constant(v); }
}  // namespace

TEST(Build, DerivedFormsExpand) {
  EXPECT_EQ(Term::abs(x), Term::join(x, Term::neg(x)));
  EXPECT_EQ(Term::truncate(x, 1.0), Term::meet(Term::join(x, c(-1.0)), c(1.0)));
  EXPECT_EQ(Term::scale(2.0, x), Term::mul(c(2.0), x));
  EXPECT_EQ(Term::sub(x, y), Term::add(x, Term::neg(y)));
}

TEST(Build, RejectsNonFiniteScalars) {
  EXPECT_THROW(Term::constant(NAN), Error);
  EXPECT_THROW(Term::constant(-INFINITY), Error);
  try {
    Term::truncate(x, INFINITY);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonFiniteScalar);
  }
}

TEST(Build, SizeAndEquality) {
  EXPECT_EQ(Term::abs(x).size(), 4u);
  EXPECT_FALSE(Term::add(x, y) == Term::add(y, x));
  EXPECT_TRUE(c(0.0) == c(-0.0));
}

TEST(Eval, Examples) {
  EXPECT_EQ(eval(x, {{"x", 0.3}}), 0.3);
  EXPECT_EQ(eval(Term::abs(x), {{"x", -0.7}}), 0.7);
  EXPECT_EQ(eval(Term::meet(Term::join(x, c(-1)), c(1)), {{"x", 5.0}}), 1.0);
}

TEST(Eval, MissingAssignment) {
  try {
    eval(x + y, {{"x", 1.0}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MissingAssignment);
    EXPECT_EQ(e.subject(), "y");
  }
}

TEST(Eval, IsAHomomorphism) {
  RandomSource rs(3);
  for (int i = 0; i < 500; ++i) {
    const Term s = rs.term({"x", "y"}, 10), t = rs.term({"x", "y"}, 10);
    const Point p{{"x", rs.uniform(-3, 3)}, {"y", rs.uniform(-3, 3)}};
    const double a = eval(s, p), b = eval(t, p);
    EXPECT_EQ(eval(s + t, p), a + b);
    EXPECT_EQ(eval(s * t, p), a * b);
    EXPECT_EQ(eval(Term::join(s, t), p), std::max(a, b));
    EXPECT_EQ(eval(Term::meet(s, t), p), std::min(a, b));
    EXPECT_EQ(eval(-s, p), -a);
    EXPECT_EQ(eval(Term::abs(s), p), std::fabs(a));
    // Lattice laws, pointwise.
    EXPECT_EQ(eval(Term::join(s, t), p), eval(Term::join(t, s), p));
    EXPECT_EQ(eval(Term::meet(s, Term::join(s, t)), p), a);
    EXPECT_EQ(eval(Term::join(s, Term::meet(s, t)), p), a);
  }
}

TEST(FreeGenerators, FirstOccurrenceOrder) {
  EXPECT_TRUE(free_generators(c(3)).empty());
  EXPECT_EQ(free_generators(x + y * x), (std::vector<std::string>{"x", "y"}));
  EXPECT_EQ(free_generators(Term::abs(Term::gen("z"))), (std::vector<std::string>{"z"}));
  EXPECT_EQ(free_generators(Term::join(y, x * y)), (std::vector<std::string>{"y", "x"}));
}

TEST(Simplify, Examples) {
  EXPECT_EQ(simplify(x + c(0)), x);
  EXPECT_EQ(simplify(c(2) * c(3)), c(6));
  EXPECT_EQ(simplify(Term::join(x, x)), x);
  EXPECT_EQ(simplify(Term::meet(x * y, x * y)), x * y);
  EXPECT_EQ(simplify(-(-x)), x);
  EXPECT_EQ(simplify(x * c(1)), x);
  EXPECT_EQ(simplify(c(0) * (x + y)), c(0));
  EXPECT_EQ(simplify(c(1) + c(2)), c(3));
}

TEST(Simplify, PreservesValuesExactly) {
  RandomSource rs(17);
  for (int i = 0; i < 500; ++i) {
    const Term t = rs.term({"x", "y"}, 16);
    const Term s = simplify(t);
    EXPECT_LE(s.size(), t.size());
    for (int k = 0; k < 5; ++k) {
      const Point p{{"x", rs.uniform(-2, 2)}, {"y", rs.uniform(-2, 2)}};
      EXPECT_EQ(eval(s, p), eval(t, p)) << to_string(t);
    }
  }
}

TEST(Substitute, ReplacesGenerators) {
  const Term t = Term::abs(x) + y;
  EXPECT_EQ(substitute(t, {{"x", y * y}}), Term::abs(y * y) + y);
  EXPECT_EQ(substitute(t, {}), t);
}

TEST(CommutativeNormalForm, IdentifiesCommutedTerms) {
  EXPECT_EQ(commutative_normal_form(Term::join(x, y)), commutative_normal_form(Term::join(y, x)));
  EXPECT_EQ(commutative_normal_form(x * (y * x)), commutative_normal_form((x * x) * y));
  EXPECT_EQ(commutative_normal_form(x + y - x), y);
  EXPECT_EQ(commutative_normal_form(x - x), c(0));
  EXPECT_EQ(commutative_normal_form(c(0.5) + x + c(-0.5)), x);
  EXPECT_EQ(commutative_normal_form(Term::meet(x, Term::meet(y, x))), commutative_normal_form(Term::meet(y, x)));
  EXPECT_EQ(commutative_normal_form((-x) * (-y)), commutative_normal_form(x * y));
}

TEST(CommutativeNormalForm, DenotesTheSameFunction) {
  RandomSource rs(23);
  for (int i = 0; i < 500; ++i) {
    const Term t = rs.term({"x", "y"}, 14);
    const Term n = commutative_normal_form(t);
    for (int k = 0; k < 5; ++k) {
      const Point p{{"x", rs.uniform(-2, 2)}, {"y", rs.uniform(-2, 2)}};
      const double a = eval(t, p), b = eval(n, p);
      // Reassociation only perturbs rounding.
      EXPECT_NEAR(a, b, 1e-9 * (1.0 + std::fabs(a))) << to_string(t) << " vs " << to_string(n);
    }
  }
}

TEST(Print, CanonicalText) {
  EXPECT_EQ(to_string(Term::abs(x) - c(1)), "(max(x, (-x)) + (-(1)))");
  EXPECT_EQ(to_string(c(-3) * x), "((-3) * x)");
  EXPECT_EQ(to_string(c(0.1)), "0.10000000000000001");
  EXPECT_EQ(to_string(Term::meet(x, c(1e21))), "min(x, 1e+21)");
  EXPECT_EQ(to_string(-c(-2)), "(-(-2))");
}
