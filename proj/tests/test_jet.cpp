#include <cmath>

#include <gtest/gtest.h>

#include "carnot/jet.hpp"
#include "support/random_expr.hpp"

using namespace carnot;

namespace {

const std::vector<std::string> kXYZ{"x", "y", "z"};

// Symbolic derivative for the multi-index, evaluated at p.
double symbolic_derivative(Expr e, const std::vector<int>& alpha, const std::vector<double>& p) {
  for (std::size_t v = 0; v < alpha.size(); ++v) {
    for (int k = 0; k < alpha[v]; ++k) e = differentiate(e, kXYZ[v]);
  }
  return evaluate(e, kXYZ, p);
}

}  // namespace

TEST(Jet, SpaceCounts) {
  auto s = JetSpace::get(3, 4);
  EXPECT_EQ(s->count(0), 1u);
  EXPECT_EQ(s->count(1), 4u);
  EXPECT_EQ(s->count(4), 35u);
}

TEST(Jet, PolynomialProduct) {
  JetPoint p(kXYZ, {1.0, 2.0, 3.0}, 3);
  Jet x = p.coordinate(0), y = p.coordinate(1);
  Jet f = x * x * y;
  EXPECT_DOUBLE_EQ(f.value(), 2.0);
  EXPECT_DOUBLE_EQ(f.derivative_value({1, 0, 0}), 4.0);
  EXPECT_DOUBLE_EQ(f.derivative_value({2, 1, 0}), 2.0);
  EXPECT_DOUBLE_EQ(f.derivative_value({3, 0, 0}), 0.0);
}

TEST(Jet, DerivativeLowersOrder) {
  JetPoint p(kXYZ, {0.1, 0.2, 0.3}, 2);
  Jet f = sin(p.coordinate(0));
  Jet d = f.derivative(0);
  EXPECT_EQ(d.order(), 1);
  EXPECT_NEAR(d.value(), std::cos(0.1), 1e-15);
  EXPECT_THROW(f.derivative(0).derivative(0).derivative(0), NumericalError);
  EXPECT_TRUE(Jet(3.0).derivative(1).is_constant());
}

TEST(Jet, DomainErrors) {
  JetPoint p(kXYZ, {0.0, -1.0, 0.3}, 2);
  EXPECT_THROW(Jet(1.0) / p.coordinate(0), DomainError);
  EXPECT_THROW(log(p.coordinate(1)), DomainError);
  EXPECT_THROW(sqrt(p.coordinate(1)), DomainError);
}

TEST(JetProperty, MatchesSymbolicDerivatives) {
  testkit::RandomExpr gen(21, kXYZ);
  const std::vector<std::vector<int>> alphas = {{1, 0, 0}, {0, 1, 1}, {2, 0, 1}, {0, 3, 0}, {1, 1, 1}};
  for (int i = 0; i < 80; ++i) {
    Expr e = gen(3);
    std::vector<double> pt = gen.point(0.8);
    JetPoint p(kXYZ, pt, 3);
    Jet j = evaluate_jet(e, p);
    EXPECT_NEAR(j.value(), evaluate(e, kXYZ, pt), 1e-12 * std::max(1.0, std::abs(j.value())));
    for (const auto& alpha : alphas) {
      double exact = symbolic_derivative(e, alpha, pt);
      double got = j.is_constant() ? 0.0 : j.derivative_value(alpha);
      EXPECT_LE(std::abs(got - exact), 1e-9 * std::max(1.0, std::abs(exact))) << to_string(e);
    }
  }
}

TEST(JetProperty, DerivativeCommutesWithExpansion) {
  testkit::RandomExpr gen(22, kXYZ);
  for (int i = 0; i < 50; ++i) {
    Expr e = gen(3);
    JetPoint p(kXYZ, gen.point(0.8), 4);
    Jet a = evaluate_jet(e, p).derivative(2);
    Jet b = evaluate_jet(differentiate(e, "z"), p).truncated(3);
    if (a.is_constant() || b.is_constant()) {
      EXPECT_NEAR(a.value(), b.value(), 1e-12);
      continue;
    }
    ASSERT_EQ(a.coefficients().size(), b.coefficients().size());
    for (std::size_t k = 0; k < a.coefficients().size(); ++k) {
      EXPECT_NEAR(a.coefficients()[k], b.coefficients()[k], 1e-9 * std::max(1.0, std::abs(b.coefficients()[k])));
    }
  }
}

TEST(JetProperty, DivisionInvertsMultiplication) {
  testkit::RandomExpr gen(23, kXYZ);
  for (int i = 0; i < 50; ++i) {
    JetPoint p(kXYZ, gen.point(), 5);
    Jet a = evaluate_jet(gen(3), p);
    Jet b = evaluate_jet(Expr(2) + pow(gen(2), 2), p);
    Jet back = (a / b) * b;
    for (std::size_t k = 0; k < std::min(a.coefficients().size(), back.coefficients().size()); ++k) {
      EXPECT_NEAR(back.coefficients()[k], a.coefficients()[k], 1e-10);
    }
  }
}
