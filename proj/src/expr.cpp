#include "carnot/expr.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <memory>
#include <mutex>
#include <set>
#include <unordered_set>

namespace carnot {

namespace {

using Kind = Expr::Kind;
using Node = Expr::Node;

std::size_t mix(std::size_t h, std::size_t v) {
  return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
}

std::size_t structural_hash(const Node& n) {
  std::size_t h = std::hash<int>()(static_cast<int>(n.kind));
  h = mix(h, std::hash<int>()(n.exponent));
  switch (n.kind) {
    case Kind::rational:
      h = mix(h, std::hash<std::string>()(n.rational.get_str()));
      break;
    case Kind::real: {
      std::uint64_t bits;
      std::memcpy(&bits, &n.real, sizeof bits);
      h = mix(h, std::hash<std::uint64_t>()(bits));
      break;
    }
    case Kind::variable:
      h = mix(h, std::hash<std::string>()(n.name));
      break;
    default:
      break;
  }
  for (const Node* c : n.children) h = mix(h, std::hash<std::uint64_t>()(c->id));
  return h;
}

struct NodeHash {
  std::size_t operator()(const Node* n) const { return n->hash; }
};

struct NodeEq {
  bool operator()(const Node* a, const Node* b) const {
    if (a->kind != b->kind || a->exponent != b->exponent || a->children != b->children) return false;
    switch (a->kind) {
      case Kind::rational:
        return a->rational == b->rational;
      case Kind::real:
        return std::memcmp(&a->real, &b->real, sizeof(double)) == 0;
      case Kind::variable:
        return a->name == b->name;
      default:
        return true;
    }
  }
};

class Interner {
 public:
  const Node* intern(Node proto) {
    proto.hash = structural_hash(proto);
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = table_.find(&proto);
    if (it != table_.end()) return *it;
    auto owned = std::make_unique<Node>(std::move(proto));
    owned->id = next_id_++;
    const Node* p = owned.get();
    storage_.push_back(std::move(owned));
    table_.insert(p);
    return p;
  }

 private:
  std::mutex mutex_;
  std::unordered_set<const Node*, NodeHash, NodeEq> table_;
  std::vector<std::unique_ptr<Node>> storage_;
  std::uint64_t next_id_ = 1;
};

Interner& interner() {
  static Interner* instance = new Interner();
  return *instance;
}

const Node* make_node(Kind kind, std::vector<const Node*> children, int exponent = 0) {
  Node n;
  n.kind = kind;
  n.children = std::move(children);
  n.exponent = exponent;
  return interner().intern(std::move(n));
}

// Exact rational or double, with floats winning.
struct Number {
  bool exact = true;
  Rational q = 0;
  double d = 0.0;

  static Number of(const Expr& e) {
    Number n;
    if (e.kind() == Kind::rational) {
      n.q = e.rational_value();
    } else {
      n.exact = false;
      n.d = e.real_value();
    }
    return n;
  }
  double value() const { return exact ? q.get_d() : d; }
  bool is_zero() const { return exact ? q == 0 : d == 0.0; }
  bool is_one() const { return exact ? q == 1 : d == 1.0; }
  bool negative() const { return exact ? q < 0 : d < 0.0; }
  Expr expr() const { return exact ? Expr::rational(q) : Expr::real(d); }
};

Number operator+(const Number& a, const Number& b) {
  Number r;
  if (a.exact && b.exact) {
    r.q = a.q + b.q;
  } else {
    r.exact = false;
    r.d = a.value() + b.value();
  }
  return r;
}

Number operator*(const Number& a, const Number& b) {
  Number r;
  if (a.exact && b.exact) {
    r.q = a.q * b.q;
  } else {
    r.exact = false;
    r.d = a.value() * b.value();
  }
  return r;
}

Number one() { Number n; n.q = 1; return n; }

// Splits a canonical term into numeric coefficient and remaining factor.
std::pair<Number, Expr> split_coefficient(const Expr& t) {
  if (t.kind() == Kind::product && t[0].is_number()) {
    Number c = Number::of(t[0]);
    if (t.size() == 2) return {c, t[1]};
    std::vector<const Node*> rest(t.node()->children.begin() + 1, t.node()->children.end());
    return {c, Expr(make_node(Kind::product, std::move(rest)))};
  }
  return {one(), t};
}

Expr with_coefficient(const Number& c, const Expr& rest) {
  if (c.is_one()) return rest;
  std::vector<const Node*> ch{c.expr().node()};
  if (rest.kind() == Kind::product) {
    ch.insert(ch.end(), rest.node()->children.begin(), rest.node()->children.end());
  } else {
    ch.push_back(rest.node());
  }
  return Expr(make_node(Kind::product, std::move(ch)));
}

bool perfect_square(const mpz_class& z, mpz_class& root) {
  if (z < 0) return false;
  if (!mpz_perfect_square_p(z.get_mpz_t())) return false;
  mpz_sqrt(root.get_mpz_t(), z.get_mpz_t());
  return true;
}

}  // namespace

Expr::Expr() : node_(rational(Rational(0)).node_) {}

Expr::Expr(int value) : node_(rational(Rational(value)).node_) {}

Expr Expr::rational(const Rational& value) {
  Node n;
  n.kind = Kind::rational;
  n.rational = value;
  n.rational.canonicalize();
  return Expr(interner().intern(std::move(n)));
}

Expr Expr::real(double value) {
  Node n;
  n.kind = Kind::real;
  n.real = value == 0.0 ? 0.0 : value;
  return Expr(interner().intern(std::move(n)));
}

Expr Expr::variable(const std::string& name) {
  Node n;
  n.kind = Kind::variable;
  n.name = name;
  return Expr(interner().intern(std::move(n)));
}

Expr Expr::raw(Kind kind, const std::vector<Expr>& operands, int exponent) {
  std::vector<const Node*> ch;
  for (const Expr& e : operands) ch.push_back(e.node());
  return Expr(make_node(kind, std::move(ch), exponent));
}

bool Expr::is_zero() const {
  return (kind() == Kind::rational && rational_value() == 0) ||
         (kind() == Kind::real && real_value() == 0.0);
}

bool Expr::is_one() const {
  return (kind() == Kind::rational && rational_value() == 1) ||
         (kind() == Kind::real && real_value() == 1.0);
}

double Expr::number() const {
  return kind() == Kind::rational ? rational_value().get_d() : real_value();
}

std::string Expr::str() const { return to_string(*this); }

Expr sum(const std::vector<Expr>& terms) {
  Number constant;
  std::vector<std::pair<Expr, Number>> collected;
  std::unordered_map<const Node*, std::size_t> index;
  // Numeric multiples of sums are distributed, so c (a + b) and c a + c b
  // collect alike.
  std::function<void(const Expr&, const Number&)> add = [&](const Expr& t, const Number& scale) {
    if (t.kind() == Kind::sum) {
      for (std::size_t i = 0; i < t.size(); ++i) add(t[i], scale);
      return;
    }
    if (t.is_number()) {
      constant = constant + scale * Number::of(t);
      return;
    }
    auto [c, rest] = split_coefficient(t);
    if (rest.kind() == Kind::sum) {
      add(rest, scale * c);
      return;
    }
    Number sc = scale * c;
    auto it = index.find(rest.node());
    if (it == index.end()) {
      index.emplace(rest.node(), collected.size());
      collected.emplace_back(rest, sc);
    } else {
      collected[it->second].second = collected[it->second].second + sc;
    }
  };
  for (const Expr& t : terms) add(t, one());

  std::vector<std::pair<Expr, Number>> kept;
  for (auto& [rest, c] : collected) {
    if (!c.is_zero()) kept.emplace_back(rest, c);
  }
  std::sort(kept.begin(), kept.end(),
            [](const auto& a, const auto& b) { return a.first.id() < b.first.id(); });
  std::vector<const Node*> ch;
  for (auto& [rest, c] : kept) ch.push_back(with_coefficient(c, rest).node());
  if (!constant.is_zero() || (!constant.exact && ch.empty())) ch.push_back(constant.expr().node());
  if (ch.empty()) return Expr();
  if (ch.size() == 1) return Expr(ch[0]);
  return Expr(make_node(Kind::sum, std::move(ch)));
}

Expr product(const std::vector<Expr>& factors) {
  Number coefficient = one();
  std::vector<std::pair<Expr, long>> powers;
  std::unordered_map<const Node*, std::size_t> index;
  auto add_power = [&](const Expr& base, long k) {
    auto it = index.find(base.node());
    if (it == index.end()) {
      index.emplace(base.node(), powers.size());
      powers.emplace_back(base, k);
    } else {
      powers[it->second].second += k;
    }
  };
  std::function<void(const Expr&)> add = [&](const Expr& f) {
    if (f.kind() == Kind::product) {
      for (std::size_t i = 0; i < f.size(); ++i) add(f[i]);
    } else if (f.is_number()) {
      coefficient = coefficient * Number::of(f);
    } else if (f.kind() == Kind::power) {
      add_power(f[0], f.exponent());
    } else {
      add_power(f, 1);
    }
  };
  for (const Expr& f : factors) add(f);
  if (coefficient.is_zero()) return coefficient.expr();

  std::vector<std::pair<Expr, long>> kept;
  for (auto& [base, k] : powers) {
    if (k != 0) kept.emplace_back(base, k);
  }
  std::sort(kept.begin(), kept.end(),
            [](const auto& a, const auto& b) { return a.first.id() < b.first.id(); });
  std::vector<const Node*> ch;
  for (auto& [base, k] : kept) {
    ch.push_back(k == 1 ? base.node() : make_node(Kind::power, {base.node()}, static_cast<int>(k)));
  }
  if (ch.empty()) return coefficient.expr();
  if (coefficient.is_one() && ch.size() == 1) return Expr(ch[0]);
  if (!coefficient.is_one()) ch.insert(ch.begin(), coefficient.expr().node());
  return Expr(make_node(Kind::product, std::move(ch)));
}

Expr pow(const Expr& base, int k) {
  if (k == 0) return Expr(1);
  if (k == 1) return base;
  if (base.kind() == Kind::rational) {
    const Rational& q = base.rational_value();
    if (q == 0) {
      if (k > 0) return Expr(0);
      return Expr(make_node(Kind::power, {base.node()}, k));
    }
    mpz_class num, den;
    unsigned long a = static_cast<unsigned long>(k < 0 ? -static_cast<long>(k) : k);
    mpz_pow_ui(num.get_mpz_t(), q.get_num_mpz_t(), a);
    mpz_pow_ui(den.get_mpz_t(), q.get_den_mpz_t(), a);
    Rational r = k > 0 ? Rational(num, den) : Rational(den, num);
    r.canonicalize();
    return Expr::rational(r);
  }
  if (base.kind() == Kind::real) {
    if (base.real_value() == 0.0 && k < 0) return Expr(make_node(Kind::power, {base.node()}, k));
    return Expr::real(std::pow(base.real_value(), k));
  }
  if (base.kind() == Kind::power) {
    long e = static_cast<long>(base.exponent()) * k;
    return pow(base[0], static_cast<int>(e));
  }
  if (base.kind() == Kind::product) {
    std::vector<Expr> f;
    for (std::size_t i = 0; i < base.size(); ++i) f.push_back(pow(base[i], k));
    return product(f);
  }
  return Expr(make_node(Kind::power, {base.node()}, k));
}

Expr operator+(const Expr& a, const Expr& b) { return sum({a, b}); }
Expr operator-(const Expr& a, const Expr& b) { return sum({a, -b}); }
Expr operator*(const Expr& a, const Expr& b) { return product({a, b}); }
Expr operator/(const Expr& a, const Expr& b) { return product({a, pow(b, -1)}); }
Expr operator-(const Expr& a) { return product({Expr(-1), a}); }
Expr& operator+=(Expr& a, const Expr& b) { return a = a + b; }
Expr& operator-=(Expr& a, const Expr& b) { return a = a - b; }
Expr& operator*=(Expr& a, const Expr& b) { return a = a * b; }

Expr sqrt(const Expr& e) {
  if (e.kind() == Kind::rational) {
    const Rational& q = e.rational_value();
    mpz_class rn, rd;
    if (perfect_square(q.get_num(), rn) && perfect_square(q.get_den(), rd)) {
      return Expr::rational(Rational(rn, rd));
    }
  }
  if (e.kind() == Kind::real && e.real_value() >= 0.0) return Expr::real(std::sqrt(e.real_value()));
  return Expr(make_node(Kind::sqrt, {e.node()}));
}

Expr exp(const Expr& e) {
  if (e.is_zero() && e.kind() == Kind::rational) return Expr(1);
  if (e.kind() == Kind::real) return Expr::real(std::exp(e.real_value()));
  return Expr(make_node(Kind::exp, {e.node()}));
}

Expr log(const Expr& e) {
  if (e.kind() == Kind::rational && e.rational_value() == 1) return Expr(0);
  if (e.kind() == Kind::real && e.real_value() > 0.0) return Expr::real(std::log(e.real_value()));
  return Expr(make_node(Kind::log, {e.node()}));
}

Expr sin(const Expr& e) {
  if (e.kind() == Kind::rational && e.rational_value() == 0) return Expr(0);
  if (e.kind() == Kind::real) return Expr::real(std::sin(e.real_value()));
  return Expr(make_node(Kind::sin, {e.node()}));
}

Expr cos(const Expr& e) {
  if (e.kind() == Kind::rational && e.rational_value() == 0) return Expr(1);
  if (e.kind() == Kind::real) return Expr::real(std::cos(e.real_value()));
  return Expr(make_node(Kind::cos, {e.node()}));
}

Expr tan(const Expr& e) {
  if (e.kind() == Kind::rational && e.rational_value() == 0) return Expr(0);
  if (e.kind() == Kind::real) return Expr::real(std::tan(e.real_value()));
  return Expr(make_node(Kind::tan, {e.node()}));
}

Expr simplify(const Expr& e) {
  std::unordered_map<const Node*, Expr> memo;
  std::function<Expr(const Expr&)> go = [&](const Expr& x) -> Expr {
    auto it = memo.find(x.node());
    if (it != memo.end()) return it->second;
    std::vector<Expr> ch;
    for (std::size_t i = 0; i < x.size(); ++i) ch.push_back(go(x[i]));
    Expr r;
    switch (x.kind()) {
      case Kind::rational:
      case Kind::real:
      case Kind::variable:
        r = x;
        break;
      case Kind::negate:
        r = -ch[0];
        break;
      case Kind::sum:
        r = sum(ch);
        break;
      case Kind::product:
        r = product(ch);
        break;
      case Kind::quotient:
        r = ch[0] / ch[1];
        break;
      case Kind::power:
        r = pow(ch[0], x.exponent());
        break;
      case Kind::sqrt:
        r = sqrt(ch[0]);
        break;
      case Kind::exp:
        r = exp(ch[0]);
        break;
      case Kind::log:
        r = log(ch[0]);
        break;
      case Kind::sin:
        r = sin(ch[0]);
        break;
      case Kind::cos:
        r = cos(ch[0]);
        break;
      case Kind::tan:
        r = tan(ch[0]);
        break;
    }
    memo.emplace(x.node(), r);
    return r;
  };
  return go(e);
}

Expr differentiate(const Expr& e, const std::string& var) {
  std::unordered_map<const Node*, Expr> memo;
  std::function<Expr(const Expr&)> d = [&](const Expr& x) -> Expr {
    auto it = memo.find(x.node());
    if (it != memo.end()) return it->second;
    Expr r;
    switch (x.kind()) {
      case Kind::rational:
      case Kind::real:
        r = Expr(0);
        break;
      case Kind::variable:
        r = Expr(x.name() == var ? 1 : 0);
        break;
      case Kind::negate:
        r = -d(x[0]);
        break;
      case Kind::sum: {
        std::vector<Expr> t;
        for (std::size_t i = 0; i < x.size(); ++i) t.push_back(d(x[i]));
        r = sum(t);
        break;
      }
      case Kind::product: {
        std::vector<Expr> t;
        for (std::size_t i = 0; i < x.size(); ++i) {
          Expr di = d(x[i]);
          if (di.is_zero()) continue;
          std::vector<Expr> f{di};
          for (std::size_t j = 0; j < x.size(); ++j) {
            if (j != i) f.push_back(x[j]);
          }
          t.push_back(product(f));
        }
        r = sum(t);
        break;
      }
      case Kind::quotient:
        r = (d(x[0]) * x[1] - x[0] * d(x[1])) / pow(x[1], 2);
        break;
      case Kind::power:
        r = Expr(x.exponent()) * pow(x[0], x.exponent() - 1) * d(x[0]);
        break;
      case Kind::sqrt:
        r = d(x[0]) / (Expr(2) * x);
        break;
      case Kind::exp:
        r = x * d(x[0]);
        break;
      case Kind::log:
        r = d(x[0]) / x[0];
        break;
      case Kind::sin:
        r = cos(x[0]) * d(x[0]);
        break;
      case Kind::cos:
        r = -sin(x[0]) * d(x[0]);
        break;
      case Kind::tan:
        r = (Expr(1) + pow(tan(x[0]), 2)) * d(x[0]);
        break;
    }
    memo.emplace(x.node(), r);
    return r;
  };
  return d(e);
}

namespace {

struct DoublePolicy {
  std::function<double(const std::string&)> lookup;
  double constant(double v) const { return v; }
  double variable(const std::string& name) const { return lookup(name); }
  double neg(double a) const { return -a; }
  double add(double a, double b) const { return a + b; }
  double mul(double a, double b) const { return a * b; }
  double div(double a, double b) const {
    if (b == 0.0) throw DomainError("division by zero");
    return a / b;
  }
  double pow(double a, int k) const {
    if (a == 0.0 && k < 0) throw DomainError("division by zero");
    return std::pow(a, k);
  }
  double sqrt(double a) const {
    if (a < 0.0) throw DomainError("sqrt of negative value");
    return std::sqrt(a);
  }
  double exp(double a) const { return std::exp(a); }
  double log(double a) const {
    if (a <= 0.0) throw DomainError("log of non-positive value");
    return std::log(a);
  }
  double sin(double a) const { return std::sin(a); }
  double cos(double a) const { return std::cos(a); }
  double tan(double a) const { return std::tan(a); }
};

}  // namespace

double evaluate(const Expr& e, const Point& p) {
  DoublePolicy policy{[&](const std::string& name) {
    auto it = p.find(name);
    if (it == p.end()) throw DomainError("missing coordinate '" + name + "'");
    return it->second;
  }};
  return evaluate_with(e, policy);
}

double evaluate(const Expr& e, const std::vector<std::string>& coords,
                const std::vector<double>& values) {
  DoublePolicy policy{[&](const std::string& name) {
    for (std::size_t i = 0; i < coords.size() && i < values.size(); ++i) {
      if (coords[i] == name) return values[i];
    }
    throw DomainError("missing coordinate '" + name + "'");
  }};
  return evaluate_with(e, policy);
}

std::vector<std::string> variables(const Expr& e) {
  std::set<std::string> names;
  std::unordered_set<const Node*> seen;
  std::function<void(const Node*)> go = [&](const Node* n) {
    if (!seen.insert(n).second) return;
    if (n->kind == Kind::variable) names.insert(n->name);
    for (const Node* c : n->children) go(c);
  };
  go(e.node());
  return {names.begin(), names.end()};
}

namespace {

enum Precedence { kSum = 1, kProduct = 2, kUnary = 3, kPower = 4, kAtom = 5 };

std::string format_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  std::string s(buf);
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

bool negative_term(const Expr& t) {
  if (t.is_number()) return t.number() < 0;
  if (t.kind() == Kind::product && t[0].is_number()) return t[0].number() < 0;
  return false;
}

std::string print(const Expr& e, int parent);

std::string wrap(const std::string& s, int own, int parent) {
  return own < parent ? "(" + s + ")" : s;
}

std::string print_product(const Expr& e, int parent) {
  std::vector<std::string> num, den;
  bool negative = false;
  for (std::size_t i = 0; i < e.size(); ++i) {
    Expr f = e[i];
    if (i == 0 && f.is_number()) {
      double v = f.number();
      if (v == -1.0 && f.kind() == Kind::rational) {
        negative = true;
        continue;
      }
      if (v < 0) {
        negative = true;
        f = f.kind() == Kind::rational ? Expr::rational(-f.rational_value()) : Expr::real(-v);
      }
      num.push_back(print(f, kPower));
      continue;
    }
    if (f.kind() == Kind::power && f.exponent() < 0) {
      den.push_back(print(f.exponent() == -1 ? f[0] : Expr::raw(Kind::power, {f[0]}, -f.exponent()),
                          kPower));
    } else {
      num.push_back(print(f, kUnary));
    }
  }
  std::string s;
  for (std::size_t i = 0; i < num.size(); ++i) s += (i ? "*" : "") + num[i];
  if (s.empty()) s = "1";
  for (const std::string& d : den) s += "/" + d;
  if (negative) return wrap("-" + s, kUnary, parent);
  return wrap(s, kProduct, parent);
}

std::string print(const Expr& e, int parent) {
  switch (e.kind()) {
    case Kind::rational: {
      const Rational& q = e.rational_value();
      std::string s = q.get_str();
      bool atomic = q.get_den() == 1 && q >= 0;
      if (atomic) return s;
      return wrap(s, q.get_den() == 1 ? kUnary : kProduct, parent);
    }
    case Kind::real: {
      std::string s = format_real(e.real_value());
      return e.real_value() < 0 ? wrap(s, kUnary, parent) : s;
    }
    case Kind::variable:
      return e.name();
    case Kind::negate:
      return wrap("-" + print(e[0], kUnary), kUnary, parent);
    case Kind::sum: {
      std::string s = print(e[0], kSum);
      for (std::size_t i = 1; i < e.size(); ++i) {
        if (negative_term(e[i])) {
          s += " - " + print(-e[i], kProduct);
        } else {
          s += " + " + print(e[i], kProduct);
        }
      }
      return wrap(s, kSum, parent);
    }
    case Kind::product:
      return print_product(e, parent);
    case Kind::quotient:
      return wrap(print(e[0], kProduct) + "/" + print(e[1], kPower), kProduct, parent);
    case Kind::power: {
      std::string k = std::to_string(e.exponent());
      if (e.exponent() < 0) k = "(" + k + ")";
      return wrap(print(e[0], kAtom) + "^" + k, kPower, parent);
    }
    case Kind::sqrt:
      return "sqrt(" + print(e[0], 0) + ")";
    case Kind::exp:
      return "exp(" + print(e[0], 0) + ")";
    case Kind::log:
      return "log(" + print(e[0], 0) + ")";
    case Kind::sin:
      return "sin(" + print(e[0], 0) + ")";
    case Kind::cos:
      return "cos(" + print(e[0], 0) + ")";
    case Kind::tan:
      return "tan(" + print(e[0], 0) + ")";
  }
  return "?";
}

}  // namespace

std::string to_string(const Expr& e) { return print(e, 0); }

}  // namespace carnot
