#ifndef CARNOT_SPENCER_HPP
#define CARNOT_SPENCER_HPP

#include <vector>

#include <Eigen/Dense>

#include "carnot/lie.hpp"

namespace carnot {

/// Element of the cochain space Λ^k g_-^* (x) g, g = g_- + g_0, with g_0 the
/// isometry algebra.  Coefficients are over the orthonormal product basis
/// A_{i_1}^* ^ ... ^ A_{i_k}^* (x) (A_r or D_s), multi-indices increasing,
/// index (subset_rank * dim g + r).
struct Cochain {
  int degree = 0;
  Eigen::VectorXd coefficients;
};

class SpencerComplex {
 public:
  explicit SpencerComplex(const CarnotAlgebra<double>& a,
                          InnerProductConvention convention = InnerProductConvention::coisometric);

  int minus_dimension() const { return n_; }
  int zero_dimension() const { return m_; }
  int total_dimension() const { return n_ + m_; }
  std::size_t cochain_dimension(int k) const;

  /// Bracket on g in the orthonormal basis (A_1..A_n, D_1..D_m); the mixed
  /// rule is [D + A, D' + B] = [D, D'] + DB - D'A + [A, B].
  Eigen::VectorXd bracket(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const;
  /// Structure constants of g_- in its orthonormal basis.
  double constant(int a, int b, int c) const { return c_[(a * n_ + b) * n_ + c]; }
  /// Orthonormal basis D_s of g_0 as matrices on g_- (orthonormal coordinates).
  const std::vector<Eigen::MatrixXd>& isometries() const { return d_; }

  /// Matrix of the differential from degree k to degree k+1.
  const Eigen::MatrixXd& differential(int k) const;

  Cochain d(const Cochain& alpha) const;
  Cochain dstar(const Cochain& kappa) const;
  double inner(const Cochain& a, const Cochain& b) const;
  Cochain zero(int k) const;

  /// Sorted k-subsets of {0..n-1} in the rank order used for coefficients.
  const std::vector<std::vector<int>>& subsets(int k) const { return subsets_[k]; }

 private:
  int n_ = 0;
  int m_ = 0;
  std::vector<double> c_;
  std::vector<Eigen::MatrixXd> d_;
  std::vector<std::vector<std::vector<int>>> subsets_;
  std::vector<Eigen::MatrixXd> diff_;
};

}  // namespace carnot

#endif
