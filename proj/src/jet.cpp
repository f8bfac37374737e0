#include "carnot/jet.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <unordered_map>

namespace carnot {

namespace {

std::uint64_t pack(const int* alpha, int n, int base) {
  std::uint64_t key = 0;
  for (int v = 0; v < n; ++v) key = key * static_cast<std::uint64_t>(base) + static_cast<std::uint64_t>(alpha[v]);
  return key;
}

// Monomials of exactly degree d in n variables, in a fixed order.
void monomials_of_degree(int n, int d, std::vector<int>& current, int var,
                         std::vector<std::vector<int>>& out) {
  if (var == n - 1) {
    current[var] = d;
    out.push_back(current);
    return;
  }
  for (int k = d; k >= 0; --k) {
    current[var] = k;
    monomials_of_degree(n, d - k, current, var + 1, out);
  }
  current[var] = 0;
}

}  // namespace

JetSpace::JetSpace(int nvars, int max_order) : nvars_(nvars), max_order_(max_order) {
  if (nvars < 1 || max_order < 0) throw PreconditionError("invalid jet space");
  std::vector<std::vector<int>> monos;
  for (int d = 0; d <= max_order; ++d) {
    std::vector<int> cur(nvars, 0);
    monomials_of_degree(nvars, d, cur, 0, monos);
    counts_.push_back(monos.size());
  }
  if (monos.size() > 2000000) throw ResourceError("jet space too large");
  std::unordered_map<std::uint64_t, std::uint32_t> lookup;
  const int base = max_order + 1;
  for (std::size_t i = 0; i < monos.size(); ++i) {
    int deg = 0;
    for (int v = 0; v < nvars; ++v) {
      exponents_.push_back(monos[i][v]);
      deg += monos[i][v];
    }
    degrees_.push_back(deg);
    lookup.emplace(pack(monos[i].data(), nvars, base), static_cast<std::uint32_t>(i));
  }
  std::vector<int> sum(nvars);
  for (std::size_t i = 0; i < monos.size(); ++i) {
    row_start_.push_back(table_.size());
    std::size_t lim = count(max_order - degrees_[i]);
    for (std::size_t j = 0; j < lim; ++j) {
      for (int v = 0; v < nvars; ++v) sum[v] = monos[i][v] + monos[j][v];
      table_.push_back(lookup.at(pack(sum.data(), nvars, base)));
    }
  }
  raise_.assign(monos.size() * nvars, 0);
  for (std::size_t i = 0; i < count(max_order - 1); ++i) {
    for (int v = 0; v < nvars; ++v) {
      sum = monos[i];
      sum[v] += 1;
      raise_[i * nvars + v] = lookup.at(pack(sum.data(), nvars, base));
    }
  }
}

std::size_t JetSpace::index(const std::vector<int>& alpha) const {
  int deg = 0;
  for (int a : alpha) deg += a;
  if (deg > max_order_) throw PreconditionError("monomial degree exceeds jet order");
  for (std::size_t i = count(deg - 1); i < count(deg); ++i) {
    bool same = true;
    for (int v = 0; v < nvars_ && same; ++v) same = exponents_[i * nvars_ + v] == alpha[v];
    if (same) return i;
  }
  throw PreconditionError("monomial not found");
}

std::shared_ptr<const JetSpace> JetSpace::get(int nvars, int max_order) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, std::shared_ptr<const JetSpace>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto key = std::make_pair(nvars, max_order);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  auto space = std::make_shared<const JetSpace>(nvars, max_order);
  cache.emplace(key, space);
  return space;
}

Jet::Jet(JetSpacePtr space, int order, std::vector<double> coefficients)
    : space_(std::move(space)), order_(order), c_(std::move(coefficients)) {
  c_.resize(space_->count(order_), 0.0);
}

Jet Jet::variable(const JetSpacePtr& space, int var, double value, int order) {
  if (order < 0) order = space->max_order();
  std::vector<double> c(space->count(order), 0.0);
  c[0] = value;
  if (order >= 1) c[1 + var] = 1.0;
  return Jet(space, order, std::move(c));
}

double Jet::derivative_value(const std::vector<int>& alpha) const {
  int deg = 0;
  double factorial = 1.0;
  for (int a : alpha) {
    deg += a;
    for (int k = 2; k <= a; ++k) factorial *= k;
  }
  if (is_constant()) return deg == 0 ? c_[0] : 0.0;
  if (deg > order_) throw NumericalError("derivative order exceeds jet order");
  return factorial * c_[space_->index(alpha)];
}

Jet Jet::derivative(int var) const {
  if (is_constant()) return Jet(0.0);
  if (order_ == 0) throw NumericalError("jet order exhausted; raise the jet order");
  std::vector<double> out(space_->count(order_ - 1));
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = (space_->exponent(i, var) + 1) * c_[space_->raise(i, var)];
  }
  return Jet(space_, order_ - 1, std::move(out));
}

Jet Jet::truncated(int order) const {
  if (is_constant() || order >= order_) return *this;
  std::vector<double> c(c_.begin(), c_.begin() + static_cast<long>(space_->count(order)));
  return Jet(space_, order, std::move(c));
}

Jet Jet::scaled(double s) const {
  Jet r = *this;
  for (double& x : r.c_) x *= s;
  return r;
}

Jet operator+(const Jet& a, const Jet& b) {
  if (a.is_constant() && b.is_constant()) return Jet(a.value() + b.value());
  if (a.is_constant()) {
    Jet r = b;
    r.c_[0] += a.value();
    return r;
  }
  if (b.is_constant()) {
    Jet r = a;
    r.c_[0] += b.value();
    return r;
  }
  int k = std::min(a.order_, b.order_);
  std::vector<double> c(a.space_->count(k));
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = a.c_[i] + b.c_[i];
  return Jet(a.space_, k, std::move(c));
}

Jet operator-(const Jet& a) { return a.scaled(-1.0); }

Jet operator-(const Jet& a, const Jet& b) { return a + (-b); }

Jet operator*(const Jet& a, const Jet& b) {
  if (a.is_constant()) return b.scaled(a.value());
  if (b.is_constant()) return a.scaled(b.value());
  const JetSpace& s = *a.space_;
  int k = std::min(a.order_, b.order_);
  std::size_t n = s.count(k);
  std::vector<double> out(n, 0.0);
  const double* bc = b.c_.data();
  for (std::size_t i = 0; i < n; ++i) {
    double ai = a.c_[i];
    if (ai == 0.0) continue;
    std::size_t lim = s.count(k - s.degree(i));
    const std::uint32_t* row = s.row(i);
    for (std::size_t j = 0; j < lim; ++j) out[row[j]] += ai * bc[j];
  }
  return Jet(a.space_, k, std::move(out));
}

Jet operator/(const Jet& a, const Jet& b) {
  double b0 = b.value();
  if (b0 == 0.0) throw DomainError("division by zero");
  if (b.is_constant()) return a.scaled(1.0 / b0);
  const JetSpace& s = *b.space_;
  int k = a.is_constant() ? b.order_ : std::min(a.order_, b.order_);
  std::size_t n = s.count(k);
  std::vector<double> acc(n, 0.0), c(n, 0.0);
  if (a.is_constant()) {
    acc[0] = a.value();
  } else {
    std::copy(a.c_.begin(), a.c_.begin() + static_cast<long>(n), acc.begin());
  }
  for (int d = 0; d <= k; ++d) {
    for (std::size_t i = s.count(d - 1); i < s.count(d); ++i) c[i] = acc[i] / b0;
    if (d == k) break;
    std::size_t lim = s.count(k - d);
    for (std::size_t i = s.count(d - 1); i < s.count(d); ++i) {
      double ci = c[i];
      if (ci == 0.0) continue;
      const std::uint32_t* row = s.row(i);
      for (std::size_t j = 1; j < lim; ++j) acc[row[j]] -= b.c_[j] * ci;
    }
  }
  return Jet(b.space_, k, std::move(c));
}

Jet& Jet::operator+=(const Jet& b) { return *this = *this + b; }
Jet& Jet::operator-=(const Jet& b) { return *this = *this - b; }
Jet& Jet::operator*=(const Jet& b) { return *this = *this * b; }
Jet& Jet::operator/=(const Jet& b) { return *this = *this / b; }

// f(b) from the Taylor coefficients of f at b(0), by Horner in b - b(0).
Jet compose(const Jet& b, const std::vector<double>& taylor) {
  Jet u = b;
  u.c_[0] = 0.0;
  Jet r(taylor.back());
  for (int m = static_cast<int>(taylor.size()) - 2; m >= 0; --m) r = Jet(taylor[m]) + u * r;
  return r;
}

Jet pow(const Jet& b, int k) {
  if (k < 0) {
    if (b.value() == 0.0) throw DomainError("division by zero");
    return Jet(1.0) / pow(b, -k);
  }
  Jet result(1.0), base = b;
  while (k > 0) {
    if (k & 1) result = result * base;
    k >>= 1;
    if (k) base = base * base;
  }
  return result;
}

Jet sqrt(const Jet& b) {
  double b0 = b.value();
  if (b0 < 0.0) throw DomainError("sqrt of negative value");
  if (b.is_constant()) return Jet(std::sqrt(b0));
  if (b0 == 0.0) throw DomainError("sqrt is not smooth at zero");
  std::vector<double> t(b.order() + 1);
  double binom = 1.0;
  for (int m = 0; m <= b.order(); ++m) {
    t[m] = binom * std::sqrt(b0) * std::pow(b0, -m);
    binom *= (0.5 - m) / (m + 1);
  }
  return compose(b, t);
}

Jet exp(const Jet& b) {
  if (b.is_constant()) return Jet(std::exp(b.value()));
  std::vector<double> t(b.order() + 1);
  double e = std::exp(b.value()), f = 1.0;
  for (int m = 0; m <= b.order(); ++m) {
    if (m > 0) f *= m;
    t[m] = e / f;
  }
  return compose(b, t);
}

Jet log(const Jet& b) {
  double b0 = b.value();
  if (b0 <= 0.0) throw DomainError("log of non-positive value");
  if (b.is_constant()) return Jet(std::log(b0));
  std::vector<double> t(b.order() + 1);
  t[0] = std::log(b0);
  for (int m = 1; m <= b.order(); ++m) t[m] = ((m % 2) ? 1.0 : -1.0) / (m * std::pow(b0, m));
  return compose(b, t);
}

namespace {

std::vector<double> trig_taylor(double x, int order, int shift) {
  double cyc[4] = {std::sin(x), std::cos(x), -std::sin(x), -std::cos(x)};
  std::vector<double> t(order + 1);
  double f = 1.0;
  for (int m = 0; m <= order; ++m) {
    if (m > 0) f *= m;
    t[m] = cyc[(m + shift) % 4] / f;
  }
  return t;
}

}  // namespace

Jet sin(const Jet& b) {
  if (b.is_constant()) return Jet(std::sin(b.value()));
  return compose(b, trig_taylor(b.value(), b.order(), 0));
}

Jet cos(const Jet& b) {
  if (b.is_constant()) return Jet(std::cos(b.value()));
  return compose(b, trig_taylor(b.value(), b.order(), 1));
}

Jet tan(const Jet& b) {
  if (b.is_constant()) return Jet(std::tan(b.value()));
  return sin(b) / cos(b);
}

JetPoint::JetPoint(std::vector<std::string> c, std::vector<double> v, int order)
    : space(JetSpace::get(static_cast<int>(c.size()), order)), coords(std::move(c)), values(std::move(v)) {
  if (coords.size() != values.size()) throw PreconditionError("point dimension mismatch");
}

namespace {

struct JetPolicy {
  const JetPoint& p;
  Jet constant(double v) const { return Jet(v); }
  Jet variable(const std::string& name) const {
    for (std::size_t i = 0; i < p.coords.size(); ++i) {
      if (p.coords[i] == name) return p.coordinate(static_cast<int>(i));
    }
    throw DomainError("missing coordinate '" + name + "'");
  }
  Jet neg(const Jet& a) const { return -a; }
  Jet add(const Jet& a, const Jet& b) const { return a + b; }
  Jet mul(const Jet& a, const Jet& b) const { return a * b; }
  Jet div(const Jet& a, const Jet& b) const { return a / b; }
  Jet pow(const Jet& a, int k) const { return carnot::pow(a, k); }
  Jet sqrt(const Jet& a) const { return carnot::sqrt(a); }
  Jet exp(const Jet& a) const { return carnot::exp(a); }
  Jet log(const Jet& a) const { return carnot::log(a); }
  Jet sin(const Jet& a) const { return carnot::sin(a); }
  Jet cos(const Jet& a) const { return carnot::cos(a); }
  Jet tan(const Jet& a) const { return carnot::tan(a); }
};

}  // namespace

Jet evaluate_jet(const Expr& e, const JetPoint& p) {
  JetPolicy policy{p};
  return evaluate_with(e, policy);
}

}  // namespace carnot
