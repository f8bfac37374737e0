#ifndef CARNOT_LIE_HPP
#define CARNOT_LIE_HPP

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "carnot/expr.hpp"

namespace carnot {

/// Nilpotent graded Lie algebra g_{-1} + ... + g_{-s} generated by its first
/// layer.  The basis is ordered by layer; basis vector i has degree(i) in
/// 1..s.  The scalar is Rational (exact) or double.
template <class T>
class StratifiedAlgebra {
 public:
  StratifiedAlgebra() = default;
  explicit StratifiedAlgebra(std::vector<int> layer_dims, std::vector<std::string> labels = {});

  int dimension() const { return dim_; }
  int step() const { return static_cast<int>(layers_.size()); }
  const std::vector<int>& layer_dims() const { return layers_; }
  /// First basis index of layer k (1-based layer).
  int layer_start(int k) const { return starts_[k - 1]; }
  int degree(int i) const { return degree_[i]; }
  const std::vector<std::string>& labels() const { return labels_; }

  /// Structure constant: [e_a, e_b] = sum_c constant(a, b, c) e_c.
  const T& constant(int a, int b, int c) const { return c_[(a * dim_ + b) * dim_ + c]; }
  /// Sets [e_a, e_b] = v and [e_b, e_a] = -v.
  void set_bracket(int a, int b, const std::vector<T>& v);
  std::vector<T> bracket(const std::vector<T>& u, const std::vector<T>& v) const;

  /// Throws PreconditionError unless the constants are antisymmetric, graded,
  /// satisfy Jacobi (exactly for Rational, to 1e-10 for double) and the first
  /// layer generates.
  void validate() const;
  /// Largest Jacobi defect over basis triples.
  double jacobi_residual() const;

 private:
  int dim_ = 0;
  std::vector<int> layers_;
  std::vector<int> starts_;
  std::vector<int> degree_;
  std::vector<std::string> labels_;
  std::vector<T> c_;
};

using ExactAlgebra = StratifiedAlgebra<Rational>;
using NumericAlgebra = StratifiedAlgebra<double>;

/// A stratified algebra with an inner product on its first layer (given in
/// the basis of that layer).
template <class T>
struct CarnotAlgebra {
  StratifiedAlgebra<T> algebra;
  Eigen::MatrixXd metric;
};

NumericAlgebra to_numeric(const ExactAlgebra& a);
CarnotAlgebra<double> to_numeric(const CarnotAlgebra<Rational>& a);

/// Free nilpotent Lie algebra of rank r and step s, with a basis of bracketed
/// Lyndon words.  Throws ResourceError when the dimension exceeds 64.
ExactAlgebra free_nilpotent(int rank, int step);
/// Dimension of the degree-k component of the free Lie algebra on r letters.
long witt_dimension(int rank, int k);

/// Heisenberg algebra A_j, B_j, C with [A_j, B_j] = C and
/// |A_j| = |B_j| = lambda_j.
CarnotAlgebra<Rational> heisenberg(const std::vector<double>& lambda);
/// Growth (2,3,5) algebra: [X1,X2] = X3, [X1,X3] = X4, [X2,X3] = X5.
CarnotAlgebra<Rational> cartan_235();

/// How the inner product of g_{-j} is induced from lower layers.
///  ordered:     the bracket g_{-1} (x) g_{-j+1} -> g_{-j} is a co-isometry.
///  coisometric: the full bracket from the sum of g_{-i} (x) g_{-j+i}, i <= j-i,
///               with unordered pairs when i = j - i, is a co-isometry.
enum class InnerProductConvention { ordered, coisometric };

/// Gram matrix of the induced inner product on the whole algebra.
Eigen::MatrixXd induced_inner_product(const CarnotAlgebra<double>& a,
                                      InnerProductConvention convention = InnerProductConvention::ordered);

/// Basis of the strata-preserving derivations that are skew on g_{-1}
/// (matrices acting on coefficient vectors in the algebra basis).
std::vector<Eigen::MatrixXd> isometry_algebra(const CarnotAlgebra<double>& a);

/// For a Heisenberg-type algebra (layers 2n, 1): the weights 1 = l_1 <= ... <= l_n
/// with a isometric to heisenberg(l) up to scaling of the centre.
std::vector<double> heisenberg_normal_form(const CarnotAlgebra<double>& a);

std::string serialize(const CarnotAlgebra<Rational>& a);
std::string serialize(const CarnotAlgebra<double>& a);
CarnotAlgebra<Rational> deserialize_exact(const std::string& text);
CarnotAlgebra<double> deserialize_numeric(const std::string& text);

}  // namespace carnot

#endif
