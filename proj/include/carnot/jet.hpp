#ifndef CARNOT_JET_HPP
#define CARNOT_JET_HPP

#include <climits>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "carnot/expr.hpp"

namespace carnot {

/// Monomials in n variables of total degree <= K, in graded order, together
/// with the index tables used by jet arithmetic.  Shared and immutable.
class JetSpace {
 public:
  static std::shared_ptr<const JetSpace> get(int nvars, int max_order);

  JetSpace(int nvars, int max_order);

  int nvars() const { return nvars_; }
  int max_order() const { return max_order_; }
  /// Number of monomials of degree <= order.
  std::size_t count(int order) const { return order < 0 ? 0 : counts_[order]; }
  int degree(std::size_t i) const { return degrees_[i]; }
  int exponent(std::size_t i, int var) const { return exponents_[i * nvars_ + var]; }
  std::size_t index(const std::vector<int>& alpha) const;
  /// row(i)[j] is the index of monomial i times monomial j, for
  /// j < count(max_order - degree(i)).
  const std::uint32_t* row(std::size_t i) const { return table_.data() + row_start_[i]; }
  /// Index of monomial i times variable var (valid for degree(i) < max_order).
  std::uint32_t raise(std::size_t i, int var) const { return raise_[i * nvars_ + var]; }

 private:
  int nvars_;
  int max_order_;
  std::vector<std::size_t> counts_;
  std::vector<int> degrees_;
  std::vector<int> exponents_;
  std::vector<std::size_t> row_start_;
  std::vector<std::uint32_t> table_;
  std::vector<std::uint32_t> raise_;
};

using JetSpacePtr = std::shared_ptr<const JetSpace>;

/// Truncated multivariate Taylor polynomial of a function at a point.  A jet
/// of order k knows all partial derivatives up to order k; differentiating
/// lowers the order by one.  Constants carry no space and infinite order.
class Jet {
 public:
  static constexpr int kExact = INT_MAX;

  Jet() : Jet(0.0) {}
  Jet(double value) : order_(kExact), c_{value} {}  // NOLINT
  Jet(JetSpacePtr space, int order, std::vector<double> coefficients);

  static Jet variable(const JetSpacePtr& space, int var, double value, int order = -1);

  bool is_constant() const { return order_ == kExact; }
  int order() const { return order_; }
  double value() const { return c_[0]; }
  const JetSpacePtr& space() const { return space_; }
  const std::vector<double>& coefficients() const { return c_; }
  /// Partial derivative of the given total order multi-index at the base
  /// point (alpha! times the Taylor coefficient).
  double derivative_value(const std::vector<int>& alpha) const;

  Jet derivative(int var) const;
  Jet truncated(int order) const;

  Jet& operator+=(const Jet& b);
  Jet& operator-=(const Jet& b);
  Jet& operator*=(const Jet& b);
  Jet& operator/=(const Jet& b);

  friend Jet operator+(const Jet& a, const Jet& b);
  friend Jet operator-(const Jet& a, const Jet& b);
  friend Jet operator*(const Jet& a, const Jet& b);
  friend Jet operator/(const Jet& a, const Jet& b);
  friend Jet operator-(const Jet& a);

 private:
  Jet scaled(double s) const;

  JetSpacePtr space_;
  int order_;
  std::vector<double> c_;

  friend Jet compose(const Jet& b, const std::vector<double>& taylor);
};

Jet pow(const Jet& b, int k);
Jet sqrt(const Jet& b);
Jet exp(const Jet& b);
Jet log(const Jet& b);
Jet sin(const Jet& b);
Jet cos(const Jet& b);
Jet tan(const Jet& b);

/// Base point for jet evaluation of expressions.
struct JetPoint {
  JetSpacePtr space;
  std::vector<std::string> coords;
  std::vector<double> values;

  JetPoint(std::vector<std::string> coords, std::vector<double> values, int order);
  Jet coordinate(int i) const { return Jet::variable(space, i, values[i]); }
  int order() const { return space->max_order(); }
};

/// Taylor expansion of e at the point.  Throws DomainError like evaluate().
Jet evaluate_jet(const Expr& e, const JetPoint& p);

}  // namespace carnot

#endif
