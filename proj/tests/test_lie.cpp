#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "carnot/lie.hpp"

using namespace carnot;

namespace {

// Applies the change of basis e'_i = sum_j P(j, i) e_j within each layer.
CarnotAlgebra<double> change_basis(const CarnotAlgebra<double>& a, const Eigen::MatrixXd& p) {
  const NumericAlgebra& g = a.algebra;
  int n = g.dimension();
  Eigen::MatrixXd pinv = p.inverse();
  NumericAlgebra h(g.layer_dims(), g.labels());
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      std::vector<double> u(n), v(n);
      for (int k = 0; k < n; ++k) {
        u[k] = p(k, i);
        v[k] = p(k, j);
      }
      std::vector<double> w = g.bracket(u, v);
      Eigen::VectorXd wc = pinv * Eigen::Map<Eigen::VectorXd>(w.data(), n);
      h.set_bracket(i, j, std::vector<double>(wc.data(), wc.data() + n));
    }
  }
  int r = g.layer_dims()[0];
  Eigen::MatrixXd p1 = p.block(0, 0, r, r);
  return {h, p1.transpose() * a.metric * p1};
}

Eigen::MatrixXd random_layered_basis_change(const NumericAlgebra& g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  int n = g.dimension();
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k <= g.step(); ++k) {
    int s = g.layer_start(k), d = g.layer_dims()[k - 1];
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) p(s + i, s + j) = (i == j ? 1.0 : 0.0) + u(rng);
    }
  }
  return p;
}

}  // namespace

TEST(Lie, FreeNilpotentDimensionsMatchWitt) {
  // Witt's necklace formula, evaluated independently of the library.
  auto witt = [](int r, int k) {
    long total = 0;
    for (int d = 1; d <= k; ++d) {
      if (k % d) continue;
      int mu = 1, x = d;
      for (int p = 2; p <= x; ++p) {
        int e = 0;
        while (x % p == 0) {
          x /= p;
          ++e;
        }
        if (e > 1) mu = 0;
        if (e == 1) mu = -mu;
      }
      total += mu * static_cast<long>(std::pow(r, k / d));
    }
    return total / k;
  };
  for (auto [r, s] : std::vector<std::pair<int, int>>{{2, 1}, {2, 2}, {2, 3}, {2, 4}, {2, 5}, {3, 2}, {3, 3}, {4, 2}}) {
    ExactAlgebra g = free_nilpotent(r, s);
    ASSERT_EQ(g.step(), s);
    for (int k = 1; k <= s; ++k) EXPECT_EQ(g.layer_dims()[k - 1], witt(r, k)) << r << "," << s << "," << k;
    EXPECT_EQ(g.jacobi_residual(), 0.0);
    EXPECT_NO_THROW(g.validate());
  }
}

TEST(Lie, FreeNilpotentDimensionCap) {
  EXPECT_THROW(free_nilpotent(3, 5), ResourceError);
  EXPECT_NO_THROW(free_nilpotent(2, 6));
}

TEST(Lie, FreeNilpotentTwoThreeIsCartan) {
  CarnotAlgebra<double> f{to_numeric(free_nilpotent(2, 3)), Eigen::MatrixXd::Identity(2, 2)};
  EXPECT_EQ(f.algebra.layer_dims(), (std::vector<int>{2, 1, 2}));
  EXPECT_EQ(isometry_algebra(f).size(), 1u);
}

TEST(Lie, ValidationRejectsBadConstants) {
  NumericAlgebra bad({2, 1});
  bad.set_bracket(0, 1, {1.0, 0.0, 0.0});
  EXPECT_THROW(bad.validate(), PreconditionError);
  NumericAlgebra nogen({2, 1});
  EXPECT_THROW(nogen.validate(), PreconditionError);
}

TEST(Lie, IsometryAlgebraDimensions) {
  EXPECT_EQ(isometry_algebra(to_numeric(heisenberg({1.0}))).size(), 1u);
  EXPECT_EQ(isometry_algebra(to_numeric(heisenberg({1.0, 1.0}))).size(), 4u);
  EXPECT_EQ(isometry_algebra(to_numeric(heisenberg({1.0, 2.0}))).size(), 2u);
  EXPECT_EQ(isometry_algebra(to_numeric(cartan_235())).size(), 1u);
}

TEST(Lie, IsometriesAreSkewDerivations) {
  for (const auto& a : {to_numeric(heisenberg({1.0, 2.0})), to_numeric(cartan_235())}) {
    const NumericAlgebra& g = a.algebra;
    int n = g.dimension(), r = g.layer_dims()[0];
    for (const Eigen::MatrixXd& d : isometry_algebra(a)) {
      Eigen::MatrixXd skew = a.metric * d.block(0, 0, r, r) + d.block(0, 0, r, r).transpose() * a.metric;
      EXPECT_LE(skew.norm(), 1e-12);
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          std::vector<double> ei(n, 0.0), ej(n, 0.0), dei(n), dej(n);
          ei[i] = ej[j] = 1.0;
          for (int k = 0; k < n; ++k) {
            dei[k] = d(k, i);
            dej[k] = d(k, j);
          }
          std::vector<double> lhs = g.bracket(ei, ej), a1 = g.bracket(dei, ej), a2 = g.bracket(ei, dej);
          Eigen::VectorXd dl = d * Eigen::Map<Eigen::VectorXd>(lhs.data(), n);
          for (int k = 0; k < n; ++k) EXPECT_NEAR(dl(k), a1[k] + a2[k], 1e-12);
        }
      }
    }
  }
}

TEST(Lie, NormalFormRoundTrip) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0.5, 3.0);
  for (int trial = 0; trial < 20; ++trial) {
    int n = 1 + trial % 3;
    std::vector<double> lambda;
    for (int j = 0; j < n; ++j) lambda.push_back(u(rng));
    std::vector<double> expect = lambda;
    std::sort(expect.begin(), expect.end());
    for (double& l : expect) l /= lambda.empty() ? 1.0 : *std::min_element(lambda.begin(), lambda.end());
    CarnotAlgebra<double> h = to_numeric(heisenberg(lambda));
    CarnotAlgebra<double> moved = change_basis(h, random_layered_basis_change(h.algebra, rng));
    std::vector<double> got = heisenberg_normal_form(moved);
    ASSERT_EQ(got.size(), expect.size());
    for (int j = 0; j < n; ++j) EXPECT_NEAR(got[j], expect[j], 1e-9);
  }
  std::vector<double> two = heisenberg_normal_form(to_numeric(heisenberg({1.0, 2.0})));
  EXPECT_NEAR(two[0], 1.0, 1e-12);
  EXPECT_NEAR(two[1], 2.0, 1e-12);
}

TEST(Lie, NormalFormRejectsDegenerateForm) {
  NumericAlgebra g({4, 1});
  g.set_bracket(0, 2, {0, 0, 0, 0, 1});
  CarnotAlgebra<double> a{g, Eigen::MatrixXd::Identity(4, 4)};
  EXPECT_THROW(heisenberg_normal_form(a), PreconditionError);
  EXPECT_THROW(heisenberg_normal_form(to_numeric(cartan_235())), PreconditionError);
}

TEST(Lie, InducedInnerProductValues) {
  auto h = to_numeric(heisenberg({1.0}));
  EXPECT_NEAR(induced_inner_product(h)(2, 2), 0.5, 1e-15);
  EXPECT_NEAR(induced_inner_product(h, InnerProductConvention::coisometric)(2, 2), 1.0, 1e-15);
  auto c = to_numeric(cartan_235());
  Eigen::MatrixXd ordered = induced_inner_product(c);
  Eigen::MatrixXd cois = induced_inner_product(c, InnerProductConvention::coisometric);
  Eigen::VectorXd expect_ordered(5), expect_cois(5);
  expect_ordered << 1, 1, 0.5, 0.5, 0.5;
  expect_cois << 1, 1, 1, 1, 1;
  EXPECT_LE((ordered - Eigen::MatrixXd(expect_ordered.asDiagonal())).norm(), 1e-14);
  EXPECT_LE((cois - Eigen::MatrixXd(expect_cois.asDiagonal())).norm(), 1e-14);
}

TEST(Lie, OrderedBracketIsCoisometry) {
  // The map g_{-1} (x) g_{-j+1} -> g_{-j} written in orthonormal bases (found
  // by eigen-decomposition here) must satisfy B B^T = I.
  for (const auto& a : {to_numeric(heisenberg({1.0, 1.7})), to_numeric(cartan_235()),
                        CarnotAlgebra<double>{to_numeric(free_nilpotent(2, 4)), Eigen::MatrixXd::Identity(2, 2)},
                        CarnotAlgebra<double>{to_numeric(free_nilpotent(3, 3)), Eigen::MatrixXd::Identity(3, 3)}}) {
    const NumericAlgebra& g = a.algebra;
    Eigen::MatrixXd gram = induced_inner_product(a);
    int n = g.dimension();
    auto on_basis = [&](int k) {
      int s = g.layer_start(k), d = g.layer_dims()[k - 1];
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram.block(s, s, d, d));
      Eigen::MatrixXd b = Eigen::MatrixXd::Zero(n, d);
      b.block(s, 0, d, d) = es.eigenvectors() * es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal();
      return b;
    };
    for (int j = 2; j <= g.step(); ++j) {
      Eigen::MatrixXd b1 = on_basis(1), bj = on_basis(j - 1), target = on_basis(j);
      int s = g.layer_start(j), d = g.layer_dims()[j - 1];
      Eigen::MatrixXd to_on = target.block(s, 0, d, d).inverse();
      Eigen::MatrixXd big(d, b1.cols() * bj.cols());
      int col = 0;
      for (int p = 0; p < b1.cols(); ++p) {
        for (int q = 0; q < bj.cols(); ++q, ++col) {
          std::vector<double> u(b1.col(p).data(), b1.col(p).data() + n), v(bj.col(q).data(), bj.col(q).data() + n);
          std::vector<double> w = g.bracket(u, v);
          big.col(col) = to_on * Eigen::Map<Eigen::VectorXd>(w.data() + s, d);
        }
      }
      EXPECT_LE((big * big.transpose() - Eigen::MatrixXd::Identity(d, d)).norm(), 1e-10);
    }
  }
}

TEST(Lie, SerializationRoundTrip) {
  for (const auto& a : {heisenberg({1.0, 2.0}), cartan_235(),
                        CarnotAlgebra<Rational>{free_nilpotent(3, 3), Eigen::MatrixXd::Identity(3, 3)}}) {
    CarnotAlgebra<Rational> b = deserialize_exact(serialize(a));
    ASSERT_EQ(b.algebra.layer_dims(), a.algebra.layer_dims());
    EXPECT_EQ(b.algebra.labels(), a.algebra.labels());
    int n = a.algebra.dimension();
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        for (int k = 0; k < n; ++k) EXPECT_EQ(b.algebra.constant(i, j, k), a.algebra.constant(i, j, k));
      }
    }
    EXPECT_EQ(b.metric, a.metric);
    EXPECT_EQ(serialize(b), serialize(a));
  }
  auto num = to_numeric(heisenberg({1.0, 1.5}));
  EXPECT_EQ(serialize(deserialize_numeric(serialize(num))), serialize(num));
  EXPECT_THROW(deserialize_exact("{\"layers\": [2]"), PreconditionError);
}
