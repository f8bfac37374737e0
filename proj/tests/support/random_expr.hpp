#ifndef CARNOT_TESTS_RANDOM_EXPR_HPP
#define CARNOT_TESTS_RANDOM_EXPR_HPP

#include <random>
#include <string>
#include <vector>

#include "carnot/expr.hpp"

namespace carnot::testkit {

// Seeded generator of expressions that are smooth and finite on [-1, 1]^n.
class RandomExpr {
 public:
  RandomExpr(std::uint64_t seed, std::vector<std::string> vars) : rng_(seed), vars_(std::move(vars)) {}

  Expr operator()(int depth) {
    if (depth == 0 || pick(5) == 0) return leaf();
    Expr a = (*this)(depth - 1);
    switch (pick(10)) {
      case 0:
        return a + (*this)(depth - 1);
      case 1:
        return a - (*this)(depth - 1);
      case 2:
        return a * (*this)(depth - 1);
      case 3:
        return a / (Expr(2) + pow((*this)(depth - 1), 2));
      case 4:
        return pow(a, static_cast<int>(pick(4)));
      case 5:
        return sin(a);
      case 6:
        return cos(a);
      case 7:
        return exp(a / Expr(4));
      case 8:
        return sqrt(Expr(1) + pow(a, 2));
      default:
        return log(Expr(2) + pow(a, 2));
    }
  }

  std::vector<double> point(double box = 1.0) {
    std::uniform_real_distribution<double> u(-box, box);
    std::vector<double> p;
    for (std::size_t i = 0; i < vars_.size(); ++i) p.push_back(u(rng_));
    return p;
  }

  std::mt19937_64& rng() { return rng_; }

 private:
  unsigned pick(unsigned n) { return static_cast<unsigned>(rng_() % n); }

  Expr leaf() {
    switch (pick(4)) {
      case 0:
        return Expr::rational(Rational(static_cast<long>(pick(7)) - 3, 1 + static_cast<long>(pick(3))));
      case 1:
        return Expr::real(0.25 * (static_cast<double>(pick(9)) - 4.0) + 0.1);
      default:
        return Expr::variable(vars_[pick(static_cast<unsigned>(vars_.size()))]);
    }
  }

  std::mt19937_64 rng_;
  std::vector<std::string> vars_;
};

}  // namespace carnot::testkit

#endif
