#ifndef CARNOT_LOCAL_HPP
#define CARNOT_LOCAL_HPP

#include <vector>

#include <Eigen/Dense>

#include "carnot/jet.hpp"

namespace carnot {

/// Pointwise (jet-valued) linear algebra and vector-field calculus.
using JetVector = std::vector<Jet>;

class JetMatrix {
 public:
  JetMatrix() = default;
  JetMatrix(int rows, int cols) : rows_(rows), cols_(cols), a_(static_cast<std::size_t>(rows) * cols) {}
  static JetMatrix identity(int n);
  static JetMatrix from_values(const Eigen::MatrixXd& m);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  Jet& operator()(int i, int j) { return a_[static_cast<std::size_t>(i) * cols_ + j]; }
  const Jet& operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * cols_ + j]; }

  JetVector column(int j) const;
  JetVector row(int i) const;
  void set_column(int j, const JetVector& v);
  JetMatrix transpose() const;
  Eigen::MatrixXd values() const;

  /// Inverse by Gauss-Jordan elimination, pivoting on base-point values.
  JetMatrix inverse() const;

  friend JetMatrix operator*(const JetMatrix& a, const JetMatrix& b);
  friend JetMatrix operator+(const JetMatrix& a, const JetMatrix& b);
  friend JetMatrix operator-(const JetMatrix& a, const JetMatrix& b);
  friend JetMatrix operator*(const Jet& s, const JetMatrix& a);
  friend JetVector operator*(const JetMatrix& a, const JetVector& v);

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<Jet> a_;
};

JetVector zeros(int n);
JetVector unit(int n, int i);
JetVector operator+(const JetVector& a, const JetVector& b);
JetVector operator-(const JetVector& a, const JetVector& b);
JetVector operator-(const JetVector& a);
JetVector operator*(const Jet& s, const JetVector& v);
Jet dot(const JetVector& a, const JetVector& b);
Eigen::VectorXd values(const JetVector& v);

/// Directional derivative X(f) = sum_i X^i d_i f.
Jet apply(const JetVector& field, const Jet& f);
/// Lie bracket of coordinate vector fields.
JetVector bracket(const JetVector& x, const JetVector& y);

/// Cholesky factor L (lower triangular, G = L L^T) of a jet-valued SPD matrix.
JetMatrix cholesky(const JetMatrix& g);

}  // namespace carnot

#endif
