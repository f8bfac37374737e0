#include <cmath>

#include <gtest/gtest.h>

#include "carnot/manifold.hpp"
#include "carnot/models.hpp"
#include "support/random_expr.hpp"

namespace carnot {
namespace {

std::vector<std::string> xyz() { return {"x", "y", "z"}; }

VectorField field(const std::vector<std::string>& c, const std::vector<std::string>& t) {
  VectorField v;
  for (const auto& s : t) v.push_back(parse(s, c));
  return v;
}

FramedManifold heisenberg_model() {
  auto c = xyz();
  return FramedManifold(c, {field(c, {"1", "0", "-y/2"}), field(c, {"0", "1", "x/2"}), field(c, {"0", "0", "1"})}, 2,
                        {}, StructureClass::contact);
}

double eval_at(const Expr& e, const std::vector<std::string>& c, const std::vector<double>& p) {
  return evaluate(e, c, p);
}

TEST(Bracket, CoordinateFieldsCommute) {
  auto c = xyz();
  VectorField b = bracket(c, field(c, {"1", "0", "0"}), field(c, {"0", "1", "0"}));
  for (const Expr& e : b) EXPECT_TRUE(e.is_zero());
}

TEST(Bracket, HeisenbergModelGivesVerticalField) {
  auto c = xyz();
  VectorField b = bracket(c, field(c, {"1", "0", "-y/2"}), field(c, {"0", "1", "x/2"}));
  EXPECT_TRUE(b[0].is_zero());
  EXPECT_TRUE(b[1].is_zero());
  EXPECT_TRUE(b[2].is_one());
}

TEST(Bracket, AntisymmetryAndJacobiOnRandomFields) {
  auto c = xyz();
  testkit::RandomExpr gen(7, c);
  for (int trial = 0; trial < 4; ++trial) {
    VectorField x, y, w;
    for (int k = 0; k < 3; ++k) {
      x.push_back(gen(2));
      y.push_back(gen(2));
      w.push_back(gen(2));
    }
    VectorField xy = bracket(c, x, y), yx = bracket(c, y, x);
    for (int k = 0; k < 3; ++k) EXPECT_TRUE(simplify(xy[k] + yx[k]).is_zero()) << simplify(xy[k] + yx[k]);
    VectorField j1 = bracket(c, bracket(c, x, y), w);
    VectorField j2 = bracket(c, bracket(c, y, w), x);
    VectorField j3 = bracket(c, bracket(c, w, x), y);
    for (int i = 0; i < 20; ++i) {
      std::vector<double> p = gen.point();
      for (int k = 0; k < 3; ++k) {
        double s = eval_at(j1[k], c, p) + eval_at(j2[k], c, p) + eval_at(j3[k], c, p);
        double scale = 1.0 + std::abs(eval_at(j1[k], c, p));
        EXPECT_LE(std::abs(s), 1e-8 * scale);
        EXPECT_NEAR(eval_at(xy[k], c, p), -eval_at(yx[k], c, p), 1e-12);
      }
    }
  }
}

TEST(StructureFunctions, CoordinateFrameIsAbelian) {
  auto c = xyz();
  FramedManifold m(c, {field(c, {"1", "0", "0"}), field(c, {"0", "1", "0"}), field(c, {"0", "0", "1"})}, 3);
  for (const auto& a : structure_functions(m)) {
    for (const auto& b : a) {
      for (const Expr& e : b) EXPECT_TRUE(e.is_zero());
    }
  }
}

TEST(StructureFunctions, HeisenbergModel) {
  auto cf = structure_functions(heisenberg_model());
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      for (int k = 0; k < 3; ++k) {
        int expected = (i == 0 && j == 1 && k == 2) ? 1 : (i == 1 && j == 0 && k == 2) ? -1 : 0;
        EXPECT_EQ(cf[i][j][k], Expr(expected)) << i << j << k;
      }
    }
  }
}

// Left-invariant frame of the group of cartan_235() in exponential
// coordinates: X_i(x) = e_i + 1/2 ad_x e_i + 1/12 ad_x^2 e_i, from the
// Baker-Campbell-Hausdorff series truncated at step 3.
FramedManifold bch_cartan_frame() {
  ExactAlgebra alg = cartan_235().algebra;
  std::vector<std::string> c = {"x1", "x2", "x3", "x4", "x5"};
  int n = 5;
  auto ad = [&](const std::vector<Expr>& v) {
    std::vector<Expr> out(n, Expr(0));
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) {
        for (int k = 0; k < n; ++k) {
          const Rational& q = alg.constant(a, b, k);
          if (q != 0) out[k] = out[k] + Expr::rational(q) * Expr::variable(c[a]) * v[b];
        }
      }
    }
    for (auto& e : out) e = simplify(e);
    return out;
  };
  std::vector<VectorField> frame;
  for (int i = 0; i < n; ++i) {
    std::vector<Expr> e(n, Expr(0));
    e[i] = Expr(1);
    std::vector<Expr> a1 = ad(e), a2 = ad(a1);
    VectorField x(n);
    for (int k = 0; k < n; ++k) x[k] = simplify(e[k] + a1[k] / Expr(2) + a2[k] / Expr(12));
    frame.push_back(x);
  }
  return FramedManifold(c, frame, 2, {}, StructureClass::two_three_five);
}

void expect_cartan_constants(const FramedManifold& m) {
  ExactAlgebra alg = cartan_235().algebra;
  auto cf = structure_functions(m);
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 5; ++j) {
      for (int k = 0; k < 5; ++k) {
        EXPECT_EQ(cf[i][j][k], Expr::rational(alg.constant(i, j, k))) << i << j << k;
      }
    }
  }
}

TEST(StructureFunctions, CartanGroupMatchesAlgebraConstants) {
  expect_cartan_constants(bch_cartan_frame());
  expect_cartan_constants(cartan_group());
}

TEST(GrowthFlag, ModelValues) {
  std::vector<double> p = {0.3, -0.2, 0.5};
  EXPECT_EQ(growth_flag(heisenberg_model(), p, 5), (std::vector<int>{2, 3}));
  EXPECT_EQ(growth_flag(cartan_group(), {0.1, 0.2, 0.3, 0.4, 0.5}, 5), (std::vector<int>{2, 3, 5}));
  auto c = xyz();
  FramedManifold flat(c, {field(c, {"1", "0", "0"}), field(c, {"0", "1", "0"}), field(c, {"0", "0", "1"})}, 3);
  EXPECT_EQ(growth_flag(flat, p, 4), (std::vector<int>{3}));
}

TEST(GrowthFlag, MartinetRankJump) {
  auto c = xyz();
  FramedManifold m(c, {field(c, {"1", "0", "0"}), field(c, {"0", "1", "x^2/2"}), field(c, {"0", "0", "1"})}, 2);
  EXPECT_EQ(growth_flag(m, {0.0, 0.3, 0.1}, 3), (std::vector<int>{2, 2, 3}));
  EXPECT_EQ(growth_flag(m, {0.5, 0.3, 0.1}, 3), (std::vector<int>{2, 3}));
  EXPECT_FALSE(equiregular(m, {{0.5, 0.3, 0.1}, {0.0, 0.3, 0.1}}));
  EXPECT_THROW(symbol_at(m, {0.0, 0.3, 0.1}), NumericalError);
  auto flag = growth_flag(cartan_perturbed(), {0.2, -0.4, 0.1, 0.9, -0.3}, 6);
  for (std::size_t i = 1; i < flag.size(); ++i) EXPECT_GE(flag[i], flag[i - 1]);
}

TEST(Symbol, HeisenbergModelIsItsOwnAlgebra) {
  auto sym = symbol_at(heisenberg_model(), {0.7, -0.1, 2.0});
  EXPECT_LE(sym.algebra.jacobi_residual(), 1e-8);
  auto lambda = heisenberg_normal_form(sym);
  ASSERT_EQ(lambda.size(), 1u);
  EXPECT_NEAR(lambda[0], 1.0, 1e-12);
}

TEST(Symbol, CartanSymbolHasOneDimensionalIsometries) {
  for (const FramedManifold& m : {cartan_group(), cartan_perturbed()}) {
    auto sym = symbol_at(m, {0.3, 0.1, -0.2, 0.6, 0.4});
    EXPECT_EQ(sym.algebra.layer_dims(), (std::vector<int>{2, 1, 2}));
    EXPECT_LE(sym.algebra.jacobi_residual(), 1e-8);
    EXPECT_EQ(isometry_algebra(sym).size(), 1u);
  }
}

TEST(Symbol, VaryingHeisenbergWeightsMatchEigenvalueOracle) {
  // h_2 with |A_2| = |B_2| = 1 + x1^2, i.e. orthonormal fields A_2/(1+x1^2).
  FramedManifold base = heisenberg_group({1.0, 1.0});
  std::vector<VectorField> frame = base.frame();
  Expr w = parse("1 + x1^2", base.coords());
  for (int i : {1, 3}) {
    for (auto& e : frame[i]) e = simplify(e / w);
  }
  FramedManifold m(base.coords(), frame, 4, {}, StructureClass::contact);
  auto pts = sample_points(ChartBox(5, {-1.0, 1.0}), 10, 42);
  for (const auto& p : pts) {
    auto lambda = heisenberg_normal_form(symbol_at(m, p));
    double oracle = 1 + p[0] * p[0];
    EXPECT_NEAR(lambda[1], oracle, 1e-9);
  }
  EXPECT_FALSE(check_constant_symbol(m, pts).constant);
}

TEST(ConstantSymbol, Verdicts) {
  auto pts3 = sample_points(ChartBox(3, {-1.0, 1.0}), 10, 42);
  SymbolVerdict h = check_constant_symbol(heisenberg_group({1.0}), pts3);
  EXPECT_TRUE(h.constant);
  ASSERT_EQ(h.lambda.size(), 1u);
  EXPECT_NEAR(h.lambda[0], 1.0, 1e-12);

  auto pts5 = sample_points(ChartBox(5, {-1.0, 1.0}), 10, 42);
  SymbolVerdict h2 = check_constant_symbol(heisenberg_group({1.0, 2.0}), pts5);
  EXPECT_TRUE(h2.constant);
  EXPECT_NEAR(h2.lambda[1], 2.0, 1e-9);
  EXPECT_TRUE(check_constant_symbol(conformal_heisenberg({1.0, 2.0}, "x1*y2"), pts5).constant);

  EXPECT_TRUE(check_constant_symbol(cartan_perturbed(), pts5).constant);
  auto c = xyz();
  FramedManifold generic(c, {field(c, {"1", "0", "0"}), field(c, {"0", "1", "x"}), field(c, {"0", "0", "1"})}, 2);
  EXPECT_THROW(check_constant_symbol(generic, pts3), PreconditionError);
}

TEST(FramedManifold, GramSchmidtOrthonormalizes) {
  auto c = xyz();
  ExprMatrix g = {{parse("2 + x^2", c), parse("y/3", c)}, {parse("y/3", c), parse("1 + exp(z)", c)}};
  FramedManifold m(c, {field(c, {"1", "0", "0"}), field(c, {"0", "1", "0"}), field(c, {"0", "0", "1"})}, 2, g);
  testkit::RandomExpr gen(3, c);
  for (int i = 0; i < 10; ++i) {
    std::vector<double> p = gen.point();
    Eigen::Matrix2d gm, e;
    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < 2; ++b) {
        gm(a, b) = evaluate(g[a][b], c, p);
        e(a, b) = evaluate(m.orthonormal_frame()[a][b], c, p);
      }
    }
    Eigen::Matrix2d gram = e * gm * e.transpose();
    EXPECT_LE((gram - Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(FramedManifold, Validation) {
  auto c = xyz();
  std::vector<VectorField> f = {field(c, {"1", "0", "0"}), field(c, {"0", "1", "0"}), field(c, {"0", "0", "1"})};
  EXPECT_THROW(FramedManifold(c, f, 4), PreconditionError);
  EXPECT_THROW(FramedManifold(c, {f[0], f[1]}, 2), PreconditionError);
  FramedManifold singular(c, {f[0], f[0], f[2]}, 2);
  EXPECT_THROW(singular.check_point({0, 0, 0}), NumericalError);
}

TEST(Sampling, SeededAndInsideTheBox) {
  ChartBox box = {{-1.0, 1.0}, {0.0, 2.0}};
  auto a = sample_points(box, 10, 42), b = sample_points(box, 10, 42), c = sample_points(box, 10, 43);
  EXPECT_EQ(a, b);
  EXPECT_NE(a, c);
  for (const auto& p : a) {
    EXPECT_GE(p[0], -1.0);
    EXPECT_LE(p[0], 1.0);
    EXPECT_GE(p[1], 0.0);
    EXPECT_LE(p[1], 2.0);
  }
}

TEST(Models, AffineChartPreservesStructureConstants) {
  Eigen::MatrixXd a(5, 5);
  a << 1, 0.5, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 2, 0, 0, 0.25, 0, 0, 1, 0, 0, 0, 0, 0.5, 1;
  Eigen::VectorXd b(5);
  b << 0.3, -0.1, 0.2, 0, 1;
  FramedManifold m = affine_chart(cartan_group(), a, b);
  EXPECT_EQ(growth_flag(m, {0.1, 0.2, 0.3, 0.4, 0.5}, 5), (std::vector<int>{2, 3, 5}));
  expect_cartan_constants(m);
}

}  // namespace
}  // namespace carnot
