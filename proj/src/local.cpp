#include "carnot/local.hpp"

#include <algorithm>
#include <cmath>

#include "carnot/errors.hpp"

namespace carnot {

JetMatrix JetMatrix::identity(int n) {
  JetMatrix m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = Jet(1.0);
  return m;
}

JetMatrix JetMatrix::from_values(const Eigen::MatrixXd& v) {
  JetMatrix m(static_cast<int>(v.rows()), static_cast<int>(v.cols()));
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) m(i, j) = Jet(v(i, j));
  }
  return m;
}

JetVector JetMatrix::column(int j) const {
  JetVector v(rows_);
  for (int i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
  return v;
}

JetVector JetMatrix::row(int i) const {
  JetVector v(cols_);
  for (int j = 0; j < cols_; ++j) v[j] = (*this)(i, j);
  return v;
}

void JetMatrix::set_column(int j, const JetVector& v) {
  for (int i = 0; i < rows_; ++i) (*this)(i, j) = v[i];
}

JetMatrix JetMatrix::transpose() const {
  JetMatrix t(cols_, rows_);
  for (int i = 0; i < rows_; ++i) {
    for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  }
  return t;
}

Eigen::MatrixXd JetMatrix::values() const {
  Eigen::MatrixXd m(rows_, cols_);
  for (int i = 0; i < rows_; ++i) {
    for (int j = 0; j < cols_; ++j) m(i, j) = (*this)(i, j).value();
  }
  return m;
}

namespace {

bool is_exact_zero(const Jet& x) { return x.is_constant() && x.value() == 0.0; }

}  // namespace

JetMatrix JetMatrix::inverse() const {
  if (rows_ != cols_) throw PreconditionError("inverse of a non-square matrix");
  int n = rows_;
  JetMatrix a = *this, inv = identity(n);
  double scale = 0.0;
  for (const Jet& x : a_) scale = std::max(scale, std::abs(x.value()));
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    for (int r = col + 1; r < n; ++r) {
      if (std::abs(a(r, col).value()) > std::abs(a(pivot, col).value())) pivot = r;
    }
    if (std::abs(a(pivot, col).value()) <= 1e-12 * std::max(scale, 1e-300)) {
      throw NumericalError("singular frame matrix");
    }
    if (pivot != col) {
      for (int j = 0; j < n; ++j) {
        std::swap(a(pivot, j), a(col, j));
        std::swap(inv(pivot, j), inv(col, j));
      }
    }
    Jet p = a(col, col);
    for (int j = 0; j < n; ++j) {
      if (!is_exact_zero(a(col, j))) a(col, j) = a(col, j) / p;
      if (!is_exact_zero(inv(col, j))) inv(col, j) = inv(col, j) / p;
    }
    for (int r = 0; r < n; ++r) {
      if (r == col || is_exact_zero(a(r, col))) continue;
      Jet f = a(r, col);
      for (int j = 0; j < n; ++j) {
        if (!is_exact_zero(a(col, j))) a(r, j) = a(r, j) - f * a(col, j);
        if (!is_exact_zero(inv(col, j))) inv(r, j) = inv(r, j) - f * inv(col, j);
      }
    }
  }
  return inv;
}

JetMatrix operator*(const JetMatrix& a, const JetMatrix& b) {
  JetMatrix r(a.rows_, b.cols_);
  for (int i = 0; i < a.rows_; ++i) {
    for (int j = 0; j < b.cols_; ++j) {
      Jet s(0.0);
      for (int k = 0; k < a.cols_; ++k) {
        if (is_exact_zero(a(i, k)) || is_exact_zero(b(k, j))) continue;
        s += a(i, k) * b(k, j);
      }
      r(i, j) = s;
    }
  }
  return r;
}

JetMatrix operator+(const JetMatrix& a, const JetMatrix& b) {
  JetMatrix r(a.rows_, a.cols_);
  for (std::size_t i = 0; i < a.a_.size(); ++i) r.a_[i] = a.a_[i] + b.a_[i];
  return r;
}

JetMatrix operator-(const JetMatrix& a, const JetMatrix& b) {
  JetMatrix r(a.rows_, a.cols_);
  for (std::size_t i = 0; i < a.a_.size(); ++i) r.a_[i] = a.a_[i] - b.a_[i];
  return r;
}

JetMatrix operator*(const Jet& s, const JetMatrix& a) {
  JetMatrix r = a;
  for (Jet& x : r.a_) {
    if (!is_exact_zero(x)) x = s * x;
  }
  return r;
}

JetVector operator*(const JetMatrix& a, const JetVector& v) {
  JetVector r(a.rows_);
  for (int i = 0; i < a.rows_; ++i) {
    Jet s(0.0);
    for (int k = 0; k < a.cols_; ++k) {
      if (is_exact_zero(a(i, k)) || is_exact_zero(v[k])) continue;
      s += a(i, k) * v[k];
    }
    r[i] = s;
  }
  return r;
}

JetVector zeros(int n) { return JetVector(n, Jet(0.0)); }

JetVector unit(int n, int i) {
  JetVector v = zeros(n);
  v[i] = Jet(1.0);
  return v;
}

JetVector operator+(const JetVector& a, const JetVector& b) {
  JetVector r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

JetVector operator-(const JetVector& a, const JetVector& b) {
  JetVector r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

JetVector operator-(const JetVector& a) {
  JetVector r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = -a[i];
  return r;
}

JetVector operator*(const Jet& s, const JetVector& v) {
  JetVector r(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) r[i] = is_exact_zero(v[i]) ? v[i] : s * v[i];
  return r;
}

Jet dot(const JetVector& a, const JetVector& b) {
  Jet s(0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (is_exact_zero(a[i]) || is_exact_zero(b[i])) continue;
    s += a[i] * b[i];
  }
  return s;
}

Eigen::VectorXd values(const JetVector& v) {
  Eigen::VectorXd r(static_cast<int>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) r(static_cast<int>(i)) = v[i].value();
  return r;
}

Jet apply(const JetVector& field, const Jet& f) {
  if (f.is_constant()) return Jet(0.0);
  Jet s(0.0);
  for (std::size_t i = 0; i < field.size(); ++i) {
    if (is_exact_zero(field[i])) continue;
    s += field[i] * f.derivative(static_cast<int>(i));
  }
  return s;
}

JetVector bracket(const JetVector& x, const JetVector& y) {
  JetVector r(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) r[k] = apply(x, y[k]) - apply(y, x[k]);
  return r;
}

JetMatrix cholesky(const JetMatrix& g) {
  int n = g.rows();
  JetMatrix l(n, n);
  for (int j = 0; j < n; ++j) {
    Jet d = g(j, j);
    for (int k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (!(d.value() > 0.0)) throw NumericalError("matrix is not positive definite");
    l(j, j) = sqrt(d);
    for (int i = j + 1; i < n; ++i) {
      Jet s = g(i, j);
      for (int k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / l(j, j);
    }
  }
  return l;
}

}  // namespace carnot
