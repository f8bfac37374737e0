#include "carnot/lie.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>

#include "json.hpp"

namespace carnot {

namespace {

bool is_zero(const Rational& q) { return q == 0; }
bool is_zero(double d) { return d == 0.0; }
double to_double(const Rational& q) { return q.get_d(); }
double to_double(double d) { return d; }

}  // namespace

template <class T>
StratifiedAlgebra<T>::StratifiedAlgebra(std::vector<int> layer_dims, std::vector<std::string> labels)
    : layers_(std::move(layer_dims)), labels_(std::move(labels)) {
  int start = 0;
  for (std::size_t k = 0; k < layers_.size(); ++k) {
    if (layers_[k] <= 0) throw PreconditionError("empty layer in stratified algebra");
    starts_.push_back(start);
    for (int i = 0; i < layers_[k]; ++i) degree_.push_back(static_cast<int>(k) + 1);
    start += layers_[k];
  }
  dim_ = start;
  if (labels_.empty()) {
    for (int i = 0; i < dim_; ++i) labels_.push_back("e" + std::to_string(i + 1));
  }
  if (static_cast<int>(labels_.size()) != dim_) throw PreconditionError("label count does not match dimension");
  c_.assign(static_cast<std::size_t>(dim_) * dim_ * dim_, T(0));
}

template <class T>
void StratifiedAlgebra<T>::set_bracket(int a, int b, const std::vector<T>& v) {
  for (int c = 0; c < dim_; ++c) {
    c_[(a * dim_ + b) * dim_ + c] = v[c];
    c_[(b * dim_ + a) * dim_ + c] = -v[c];
  }
}

template <class T>
std::vector<T> StratifiedAlgebra<T>::bracket(const std::vector<T>& u, const std::vector<T>& v) const {
  std::vector<T> r(dim_, T(0));
  for (int a = 0; a < dim_; ++a) {
    if (is_zero(u[a])) continue;
    for (int b = 0; b < dim_; ++b) {
      if (is_zero(v[b])) continue;
      T w = u[a] * v[b];
      for (int c = 0; c < dim_; ++c) {
        const T& k = constant(a, b, c);
        if (!is_zero(k)) r[c] += w * k;
      }
    }
  }
  return r;
}

template <class T>
double StratifiedAlgebra<T>::jacobi_residual() const {
  double worst = 0.0;
  for (int a = 0; a < dim_; ++a) {
    for (int b = a + 1; b < dim_; ++b) {
      for (int c = b + 1; c < dim_; ++c) {
        for (int e = 0; e < dim_; ++e) {
          T s(0);
          for (int m = 0; m < dim_; ++m) {
            s += constant(a, b, m) * constant(m, c, e) + constant(b, c, m) * constant(m, a, e) +
                 constant(c, a, m) * constant(m, b, e);
          }
          worst = std::max(worst, std::abs(to_double(s)));
        }
      }
    }
  }
  return worst;
}

template <class T>
void StratifiedAlgebra<T>::validate() const {
  const bool exact = std::is_same_v<T, Rational>;
  for (int a = 0; a < dim_; ++a) {
    for (int b = 0; b < dim_; ++b) {
      for (int c = 0; c < dim_; ++c) {
        const T& k = constant(a, b, c);
        if (to_double(k + constant(b, a, c)) != 0.0) throw PreconditionError("structure constants not antisymmetric");
        if (!is_zero(k) && degree_[c] != degree_[a] + degree_[b]) {
          throw PreconditionError("bracket does not respect the grading");
        }
      }
    }
  }
  double jac = jacobi_residual();
  if (exact ? jac != 0.0 : jac > 1e-10) throw PreconditionError("Jacobi identity fails");
  for (int k = 2; k <= step(); ++k) {
    Eigen::MatrixXd span(layers_[k - 1], layers_[0] * layers_[k - 2]);
    int col = 0;
    for (int a = starts_[0]; a < starts_[0] + layers_[0]; ++a) {
      for (int b = starts_[k - 2]; b < starts_[k - 2] + layers_[k - 2]; ++b, ++col) {
        for (int c = 0; c < layers_[k - 1]; ++c) span(c, col) = to_double(constant(a, b, starts_[k - 1] + c));
      }
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(span);
    lu.setThreshold(1e-10);
    if (lu.rank() != layers_[k - 1]) throw PreconditionError("first layer does not generate layer " + std::to_string(k));
  }
}

template class StratifiedAlgebra<Rational>;
template class StratifiedAlgebra<double>;

NumericAlgebra to_numeric(const ExactAlgebra& a) {
  NumericAlgebra r(a.layer_dims(), a.labels());
  int n = a.dimension();
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      std::vector<double> v(n);
      for (int c = 0; c < n; ++c) v[c] = a.constant(i, j, c).get_d();
      r.set_bracket(i, j, v);
    }
  }
  return r;
}

CarnotAlgebra<double> to_numeric(const CarnotAlgebra<Rational>& a) { return {to_numeric(a.algebra), a.metric}; }

long witt_dimension(int rank, int k) {
  auto mobius = [](int d) {
    int m = 1;
    for (int p = 2; p * p <= d; ++p) {
      if (d % p == 0) {
        d /= p;
        if (d % p == 0) return 0;
        m = -m;
      }
    }
    if (d > 1) m = -m;
    return m;
  };
  long total = 0;
  for (int d = 1; d <= k; ++d) {
    if (k % d) continue;
    long p = 1;
    for (int i = 0; i < k / d; ++i) p *= rank;
    total += mobius(d) * p;
  }
  return total / k;
}

namespace {

using Word = std::string;
using Poly = std::map<Word, Rational>;

void lyndon_words(int rank, int max_len, std::vector<std::vector<Word>>& by_length) {
  // Duval's generation in lexicographic order.
  by_length.assign(max_len + 1, {});
  std::vector<int> w{-1};
  while (!w.empty()) {
    w.back() += 1;
    Word s;
    for (int x : w) s.push_back(static_cast<char>('a' + x));
    by_length[s.size()].push_back(s);
    std::size_t m = w.size();
    while (static_cast<int>(w.size()) < max_len) w.push_back(w[w.size() - m]);
    while (!w.empty() && w.back() == rank - 1) w.pop_back();
  }
}

bool is_lyndon(const Word& w) {
  for (std::size_t i = 1; i < w.size(); ++i) {
    if (w.substr(i) + w.substr(0, i) <= w) return false;
  }
  return true;
}

Poly bracket(const Poly& p, const Poly& q) {
  Poly r;
  for (const auto& [u, a] : p) {
    for (const auto& [v, b] : q) {
      r[u + v] += a * b;
      r[v + u] -= a * b;
    }
  }
  for (auto it = r.begin(); it != r.end();) it = it->second == 0 ? r.erase(it) : std::next(it);
  return r;
}

}  // namespace

ExactAlgebra free_nilpotent(int rank, int step) {
  if (rank < 2 || step < 1) throw PreconditionError("free nilpotent algebra needs rank >= 2 and step >= 1");
  long total = 0;
  for (int k = 1; k <= step; ++k) {
    total += witt_dimension(rank, k);
    if (total > 64) throw ResourceError("free nilpotent algebra dimension exceeds 64");
  }
  std::vector<std::vector<Word>> words;
  lyndon_words(rank, step, words);

  std::map<Word, Poly> poly;
  std::map<Word, std::string> label;
  std::map<Word, int> index;
  std::vector<int> layers;
  std::vector<std::string> labels;
  for (int k = 1; k <= step; ++k) {
    layers.push_back(static_cast<int>(words[k].size()));
    for (const Word& w : words[k]) {
      if (k == 1) {
        poly[w] = Poly{{w, Rational(1)}};
        label[w] = std::string(1, static_cast<char>('1' + (w[0] - 'a')));
      } else {
        std::size_t split = 1;
        for (std::size_t i = 1; i < w.size(); ++i) {
          if (is_lyndon(w.substr(i))) {
            split = i;
            break;
          }
        }
        Word u = w.substr(0, split), v = w.substr(split);
        poly[w] = bracket(poly.at(u), poly.at(v));
        label[w] = "[" + label.at(u) + "," + label.at(v) + "]";
      }
      index[w] = static_cast<int>(labels.size());
      labels.push_back(label[w]);
    }
  }
  ExactAlgebra alg(layers, labels);
  int n = alg.dimension();
  std::vector<Word> all;
  for (int k = 1; k <= step; ++k) all.insert(all.end(), words[k].begin(), words[k].end());
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      std::vector<Rational> v(n, Rational(0));
      if (all[i].size() + all[j].size() <= static_cast<std::size_t>(step)) {
        Poly q = bracket(poly.at(all[i]), poly.at(all[j]));
        while (!q.empty()) {
          const Word lead = q.begin()->first;
          Rational a = q.begin()->second;
          auto it = index.find(lead);
          if (it == index.end()) throw NumericalError("Lie polynomial with non-Lyndon leading word");
          v[it->second] += a;
          for (const auto& [w, b] : poly.at(lead)) {
            Rational& slot = q[w];
            slot -= a * b;
            if (slot == 0) q.erase(w);
          }
        }
      }
      alg.set_bracket(i, j, v);
    }
  }
  return alg;
}

CarnotAlgebra<Rational> heisenberg(const std::vector<double>& lambda) {
  int n = static_cast<int>(lambda.size());
  if (n < 1) throw PreconditionError("Heisenberg algebra needs n >= 1");
  std::vector<std::string> labels;
  for (int j = 0; j < n; ++j) labels.push_back("A" + std::to_string(j + 1));
  for (int j = 0; j < n; ++j) labels.push_back("B" + std::to_string(j + 1));
  labels.push_back("C");
  ExactAlgebra alg({2 * n, 1}, labels);
  for (int j = 0; j < n; ++j) {
    std::vector<Rational> v(2 * n + 1, Rational(0));
    v[2 * n] = 1;
    alg.set_bracket(j, n + j, v);
  }
  Eigen::MatrixXd metric = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  for (int j = 0; j < n; ++j) {
    if (!(lambda[j] > 0)) throw PreconditionError("Heisenberg weights must be positive");
    metric(j, j) = metric(n + j, n + j) = lambda[j] * lambda[j];
  }
  return {alg, metric};
}

CarnotAlgebra<Rational> cartan_235() {
  ExactAlgebra alg({2, 1, 2}, {"X1", "X2", "X3", "X4", "X5"});
  auto unit = [](int k) {
    std::vector<Rational> v(5, Rational(0));
    v[k] = 1;
    return v;
  };
  alg.set_bracket(0, 1, unit(2));
  alg.set_bracket(0, 2, unit(3));
  alg.set_bracket(1, 2, unit(4));
  return {alg, Eigen::MatrixXd::Identity(2, 2)};
}

namespace {

// Columns: a basis of layer k (full coordinates) orthonormal for the Gram block.
Eigen::MatrixXd orthonormal_layer(const Eigen::MatrixXd& gram, int start, int d, int n) {
  Eigen::LLT<Eigen::MatrixXd> llt(gram.block(start, start, d, d));
  if (llt.info() != Eigen::Success) throw NumericalError("induced inner product is not positive definite");
  Eigen::MatrixXd inv_lt = llt.matrixU().solve(Eigen::MatrixXd::Identity(d, d));
  Eigen::MatrixXd basis = Eigen::MatrixXd::Zero(n, d);
  basis.block(start, 0, d, d) = inv_lt;
  return basis;
}

}  // namespace

Eigen::MatrixXd induced_inner_product(const CarnotAlgebra<double>& a, InnerProductConvention convention) {
  const NumericAlgebra& g = a.algebra;
  int n = g.dimension();
  int r = g.layer_dims()[0];
  if (a.metric.rows() != r || a.metric.cols() != r) throw PreconditionError("metric size does not match first layer");
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(n, n);
  gram.block(0, 0, r, r) = a.metric;
  std::vector<Eigen::MatrixXd> on{orthonormal_layer(gram, 0, r, n)};
  for (int j = 2; j <= g.step(); ++j) {
    int start = g.layer_start(j), d = g.layer_dims()[j - 1];
    Eigen::MatrixXd inv = Eigen::MatrixXd::Zero(d, d);
    auto accumulate = [&](const Eigen::MatrixXd& bu, const Eigen::MatrixXd& bv, bool unordered) {
      for (int p = 0; p < bu.cols(); ++p) {
        for (int q = unordered ? p + 1 : 0; q < bv.cols(); ++q) {
          std::vector<double> u(bu.col(p).data(), bu.col(p).data() + n);
          std::vector<double> v(bv.col(q).data(), bv.col(q).data() + n);
          std::vector<double> w = g.bracket(u, v);
          Eigen::VectorXd beta = Eigen::Map<Eigen::VectorXd>(w.data() + start, d);
          inv += beta * beta.transpose();
        }
      }
    };
    if (convention == InnerProductConvention::ordered) {
      accumulate(on[0], on[j - 2], false);
    } else {
      for (int i = 1; 2 * i <= j; ++i) accumulate(on[i - 1], on[j - i - 1], 2 * i == j);
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(inv);
    if (!lu.isInvertible()) throw NumericalError("bracket is not onto layer " + std::to_string(j));
    gram.block(start, start, d, d) = lu.inverse();
    on.push_back(orthonormal_layer(gram, start, d, n));
  }
  return gram;
}

std::vector<Eigen::MatrixXd> isometry_algebra(const CarnotAlgebra<double>& a) {
  const NumericAlgebra& g = a.algebra;
  int n = g.dimension();
  std::vector<std::vector<int>> var(n, std::vector<int>(n, -1));
  int nv = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (g.degree(i) == g.degree(j)) var[i][j] = nv++;
    }
  }
  std::vector<Eigen::VectorXd> rows;
  for (int p = 0; p < n; ++p) {
    for (int q = p + 1; q < n; ++q) {
      for (int c = 0; c < n; ++c) {
        Eigen::VectorXd row = Eigen::VectorXd::Zero(nv);
        for (int m = 0; m < n; ++m) {
          if (var[c][m] >= 0) row(var[c][m]) += g.constant(p, q, m);
          if (var[m][p] >= 0) row(var[m][p]) -= g.constant(m, q, c);
          if (var[m][q] >= 0) row(var[m][q]) -= g.constant(p, m, c);
        }
        if (row.norm() > 0) rows.push_back(row);
      }
    }
  }
  int r = g.layer_dims()[0];
  for (int p = 0; p < r; ++p) {
    for (int q = p; q < r; ++q) {
      Eigen::VectorXd row = Eigen::VectorXd::Zero(nv);
      for (int m = 0; m < r; ++m) {
        row(var[m][q]) += a.metric(p, m);
        row(var[m][p]) += a.metric(m, q);
      }
      rows.push_back(row);
    }
  }
  Eigen::MatrixXd sys(static_cast<int>(rows.size()), nv);
  for (std::size_t i = 0; i < rows.size(); ++i) sys.row(static_cast<int>(i)) = rows[i].transpose();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(sys, Eigen::ComputeFullV);
  const Eigen::VectorXd& s = svd.singularValues();
  double cutoff = 1e-10 * std::max(1.0, s.size() ? s(0) : 0.0);
  int rank = 0;
  for (int i = 0; i < s.size(); ++i) rank += s(i) > cutoff;
  std::vector<Eigen::MatrixXd> basis;
  for (int k = rank; k < nv; ++k) {
    Eigen::VectorXd v = svd.matrixV().col(k);
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (var[i][j] >= 0) d(i, j) = v(var[i][j]);
      }
    }
    basis.push_back(d);
  }
  return basis;
}

std::vector<double> heisenberg_normal_form(const CarnotAlgebra<double>& a) {
  const NumericAlgebra& g = a.algebra;
  if (g.step() != 2 || g.layer_dims()[1] != 1 || g.layer_dims()[0] % 2) {
    throw PreconditionError("normal form needs layers (2n, 1)");
  }
  int m = g.layer_dims()[0];
  Eigen::MatrixXd omega(m, m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) omega(i, j) = g.constant(i, j, m);
  }
  Eigen::LLT<Eigen::MatrixXd> llt(a.metric);
  if (llt.info() != Eigen::Success) throw PreconditionError("metric is not positive definite");
  Eigen::MatrixXd linv = llt.matrixL().solve(Eigen::MatrixXd::Identity(m, m));
  Eigen::MatrixXd w = linv * omega * linv.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(w.transpose() * w);
  Eigen::VectorXd sigma = es.eigenvalues();
  double top = sigma(m - 1);
  if (!(top > 0) || sigma(0) <= 1e-12 * top) throw PreconditionError("bracket form is degenerate");
  std::vector<double> lambda;
  for (int k = m - 1; k >= 0; k -= 2) lambda.push_back(std::pow(sigma(k) / top, -0.25));
  return lambda;
}

namespace {

using nlohmann::json;

json scalar_json(const Rational& q) { return q.get_str(); }
json scalar_json(double d) { return d; }
template <class T>
T scalar_from(const json& j);
template <>
Rational scalar_from<Rational>(const json& j) {
  Rational q(j.get<std::string>());
  q.canonicalize();
  return q;
}
template <>
double scalar_from<double>(const json& j) {
  return j.get<double>();
}

template <class T>
std::string serialize_impl(const CarnotAlgebra<T>& a) {
  const auto& g = a.algebra;
  json doc;
  doc["layers"] = g.layer_dims();
  doc["labels"] = g.labels();
  json brackets = json::array();
  for (int i = 0; i < g.dimension(); ++i) {
    for (int j = i + 1; j < g.dimension(); ++j) {
      json value = json::object();
      for (int c = 0; c < g.dimension(); ++c) {
        if (!is_zero(g.constant(i, j, c))) value[std::to_string(c)] = scalar_json(g.constant(i, j, c));
      }
      if (!value.empty()) brackets.push_back({{"a", i}, {"b", j}, {"value", value}});
    }
  }
  doc["brackets"] = brackets;
  json metric = json::array();
  for (int i = 0; i < a.metric.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < a.metric.cols(); ++j) row.push_back(a.metric(i, j));
    metric.push_back(row);
  }
  doc["metric"] = metric;
  return doc.dump(2);
}

template <class T>
CarnotAlgebra<T> deserialize_impl(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
    StratifiedAlgebra<T> g(doc.at("layers").get<std::vector<int>>(), doc.at("labels").get<std::vector<std::string>>());
    int n = g.dimension();
    for (const json& b : doc.at("brackets")) {
      std::vector<T> v(n, T(0));
      for (const auto& [key, val] : b.at("value").items()) v.at(std::stoi(key)) = scalar_from<T>(val);
      g.set_bracket(b.at("a").get<int>(), b.at("b").get<int>(), v);
    }
    const json& m = doc.at("metric");
    Eigen::MatrixXd metric(m.size(), m.size());
    for (std::size_t i = 0; i < m.size(); ++i) {
      for (std::size_t j = 0; j < m.size(); ++j) metric(i, j) = m.at(i).at(j).get<double>();
    }
    g.validate();
    return {g, metric};
  } catch (const json::exception& e) {
    throw PreconditionError(std::string("malformed algebra description: ") + e.what());
  }
}

}  // namespace

std::string serialize(const CarnotAlgebra<Rational>& a) { return serialize_impl(a); }
std::string serialize(const CarnotAlgebra<double>& a) { return serialize_impl(a); }
CarnotAlgebra<Rational> deserialize_exact(const std::string& text) { return deserialize_impl<Rational>(text); }
CarnotAlgebra<double> deserialize_numeric(const std::string& text) { return deserialize_impl<double>(text); }

}  // namespace carnot
