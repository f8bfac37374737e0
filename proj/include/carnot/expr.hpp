#ifndef CARNOT_EXPR_HPP
#define CARNOT_EXPR_HPP

#include <cstdint>
#include <functional>
#include <map>
#include <ostream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <gmpxx.h>

#include "carnot/errors.hpp"

namespace carnot {

using Rational = mpq_class;

/// A point of a chart: coordinate name -> value.
using Point = std::map<std::string, double>;

/// Immutable symbolic expression.  Nodes are hash-consed: structurally equal
/// expressions share one node, so equality is pointer equality and a DAG of
/// shared subterms is never duplicated.  Nodes live for the whole process and
/// may be shared freely between threads.
class Expr {
 public:
  enum class Kind : std::uint8_t {
    rational,
    real,
    variable,
    negate,
    sum,
    product,
    quotient,
    power,
    sqrt,
    exp,
    log,
    sin,
    cos,
    tan
  };

  struct Node {
    Kind kind;
    int exponent = 0;
    double real = 0.0;
    Rational rational;
    std::string name;
    std::vector<const Node*> children;
    std::uint64_t id = 0;
    std::size_t hash = 0;
  };

  /// The exact constant 0.
  Expr();
  Expr(int value);  // NOLINT: exact integer constant

  static Expr rational(const Rational& value);
  static Expr real(double value);
  static Expr variable(const std::string& name);
  /// Unsimplified node, as produced by the parser.
  static Expr raw(Kind kind, const std::vector<Expr>& operands, int exponent = 0);

  Kind kind() const { return node_->kind; }
  const Node* node() const { return node_; }
  std::uint64_t id() const { return node_->id; }
  std::size_t size() const { return node_->children.size(); }
  Expr operator[](std::size_t i) const { return Expr(node_->children[i]); }
  const Rational& rational_value() const { return node_->rational; }
  double real_value() const { return node_->real; }
  const std::string& name() const { return node_->name; }
  int exponent() const { return node_->exponent; }

  bool is_number() const { return kind() == Kind::rational || kind() == Kind::real; }
  bool is_zero() const;
  bool is_one() const;
  /// Numeric value of a constant node.
  double number() const;

  friend bool operator==(const Expr& a, const Expr& b) { return a.node_ == b.node_; }
  friend bool operator!=(const Expr& a, const Expr& b) { return a.node_ != b.node_; }

  std::string str() const;

  explicit Expr(const Node* node) : node_(node) {}

 private:
  const Node* node_;
};

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr& operator+=(Expr& a, const Expr& b);
Expr& operator-=(Expr& a, const Expr& b);
Expr& operator*=(Expr& a, const Expr& b);

Expr sum(const std::vector<Expr>& terms);
Expr product(const std::vector<Expr>& factors);
Expr pow(const Expr& base, int exponent);
Expr sqrt(const Expr& e);
Expr exp(const Expr& e);
Expr log(const Expr& e);
Expr sin(const Expr& e);
Expr cos(const Expr& e);
Expr tan(const Expr& e);

/// Canonical form: constants folded (exactly for rationals), 0/1 identities,
/// flattened sums and products, like terms and like factors collected,
/// operands in a canonical order.  Idempotent.
Expr simplify(const Expr& e);

/// Partial derivative with respect to a coordinate; memoized over the DAG.
Expr differentiate(const Expr& e, const std::string& var);

/// Evaluation in double precision.  Throws DomainError on division by zero,
/// log or sqrt outside their domain and missing coordinates.
double evaluate(const Expr& e, const Point& p);

/// Evaluation with coordinates bound by position.
double evaluate(const Expr& e, const std::vector<std::string>& coords,
                const std::vector<double>& values);

std::string to_string(const Expr& e);
inline std::ostream& operator<<(std::ostream& os, const Expr& e) { return os << to_string(e); }

/// Parses text over the given coordinate names.  The result is simplified.
Expr parse(std::string_view text, const std::vector<std::string>& coords);
/// Same grammar, no simplification.
Expr parse_raw(std::string_view text, const std::vector<std::string>& coords);

/// Names of the variables occurring in e.
std::vector<std::string> variables(const Expr& e);

/// Generic bottom-up evaluation over the DAG (each node visited once).  The
/// policy provides constant, variable, neg, add, mul, div, pow, sqrt, exp,
/// log, sin, cos, tan.
template <class Policy>
auto evaluate_with(const Expr& e, Policy& policy) {
  using T = decltype(policy.constant(0.0));
  std::unordered_map<const Expr::Node*, T> memo;
  std::function<T(const Expr::Node*)> go = [&](const Expr::Node* n) -> T {
    auto it = memo.find(n);
    if (it != memo.end()) return it->second;
    T r{};
    switch (n->kind) {
      case Expr::Kind::rational:
        r = policy.constant(n->rational.get_d());
        break;
      case Expr::Kind::real:
        r = policy.constant(n->real);
        break;
      case Expr::Kind::variable:
        r = policy.variable(n->name);
        break;
      case Expr::Kind::negate:
        r = policy.neg(go(n->children[0]));
        break;
      case Expr::Kind::sum:
        r = go(n->children[0]);
        for (std::size_t i = 1; i < n->children.size(); ++i) r = policy.add(r, go(n->children[i]));
        break;
      case Expr::Kind::product:
        r = go(n->children[0]);
        for (std::size_t i = 1; i < n->children.size(); ++i) r = policy.mul(r, go(n->children[i]));
        break;
      case Expr::Kind::quotient:
        r = policy.div(go(n->children[0]), go(n->children[1]));
        break;
      case Expr::Kind::power:
        r = policy.pow(go(n->children[0]), n->exponent);
        break;
      case Expr::Kind::sqrt:
        r = policy.sqrt(go(n->children[0]));
        break;
      case Expr::Kind::exp:
        r = policy.exp(go(n->children[0]));
        break;
      case Expr::Kind::log:
        r = policy.log(go(n->children[0]));
        break;
      case Expr::Kind::sin:
        r = policy.sin(go(n->children[0]));
        break;
      case Expr::Kind::cos:
        r = policy.cos(go(n->children[0]));
        break;
      case Expr::Kind::tan:
        r = policy.tan(go(n->children[0]));
        break;
    }
    memo.emplace(n, r);
    return r;
  };
  return go(e.node());
}

}  // namespace carnot

#endif
