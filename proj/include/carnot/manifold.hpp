#ifndef CARNOT_MANIFOLD_HPP
#define CARNOT_MANIFOLD_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "carnot/expr.hpp"
#include "carnot/jet.hpp"
#include "carnot/lie.hpp"
#include "carnot/local.hpp"

namespace carnot {

/// Coefficients of a vector field in the coordinate basis d/dx_1..d/dx_n.
using VectorField = std::vector<Expr>;
using ExprMatrix = std::vector<std::vector<Expr>>;

enum class StructureClass { generic, contact, two_three_five };

std::string to_string(StructureClass c);
StructureClass structure_class_from_string(const std::string& s);

/// A sub-Riemannian manifold on a single chart: a frame X_1..X_n of TM whose
/// first r fields span the horizontal bundle E, and a metric on E given as
/// the Gram matrix of X_1..X_r (identity when omitted).
class FramedManifold {
 public:
  FramedManifold(std::vector<std::string> coords, std::vector<VectorField> frame, int horizontal_rank,
                 ExprMatrix metric = {}, StructureClass cls = StructureClass::generic);

  const std::vector<std::string>& coords() const { return coords_; }
  int dimension() const { return static_cast<int>(coords_.size()); }
  int horizontal_rank() const { return rank_; }
  StructureClass structure_class() const { return class_; }
  const std::vector<VectorField>& frame() const { return frame_; }
  const ExprMatrix& metric() const { return metric_; }

  /// The frame with X_1..X_r replaced by their Gram-Schmidt orthonormalization
  /// with respect to the metric.  The remaining fields are unchanged.
  const std::vector<VectorField>& orthonormal_frame() const { return on_frame_; }

  /// Taylor jets of the orthonormal frame at p.
  std::vector<JetVector> frame_jets(const JetPoint& p) const;
  JetPoint jet_point(const std::vector<double>& p, int order) const;

  /// Throws NumericalError if the frame is singular (|det| <= 1e-9) or the
  /// metric is not positive definite at p.
  void check_point(const std::vector<double>& p) const;

 private:
  std::vector<std::string> coords_;
  std::vector<VectorField> frame_;
  int rank_;
  ExprMatrix metric_;
  StructureClass class_;
  std::vector<VectorField> on_frame_;
};

/// [X,Y]^k = sum_m X^m d_m Y^k - Y^m d_m X^k.
VectorField bracket(const std::vector<std::string>& coords, const VectorField& x, const VectorField& y);
/// Directional derivative X(f).
Expr apply(const std::vector<std::string>& coords, const VectorField& x, const Expr& f);

/// c[i][j][k] with [X_i, X_j] = sum_k c_ij^k X_k for the orthonormal frame,
/// solved symbolically by Gauss-Jordan elimination.  Throws NumericalError
/// when no symbolic pivot is available.
std::vector<std::vector<std::vector<Expr>>> structure_functions(const FramedManifold& m);

/// Cumulative ranks of E^{-1} within E^{-2} within ... at p.  Stops when the
/// rank reaches n, when it stops growing, or after max_step layers.
std::vector<int> growth_flag(const FramedManifold& m, const std::vector<double>& p, int max_step);

/// The nilpotentization gr_p at p with its first-layer inner product.  Layer
/// bases are orthonormal complements of E^{-k+1} in E^{-k} for the auxiliary
/// Euclidean structure that makes the orthonormal frame orthonormal; the
/// algebra depends on that choice only up to isometry.
CarnotAlgebra<double> symbol_at(const FramedManifold& m, const std::vector<double>& p);

/// True when every point in the sample has the same growth flag.
bool equiregular(const FramedManifold& m, const std::vector<std::vector<double>>& sample);

struct SymbolVerdict {
  bool constant = false;
  /// Heisenberg weights (contact) at the first sample point.
  std::vector<double> lambda;
  /// "h_n(lambda)" for contact, "cartan(2,3,5)" for two-three-five.
  std::string tag;
  /// Largest pairwise deviation of the weights across the sample.
  double deviation = 0.0;
  std::vector<int> growth;
};

/// Throws PreconditionError for the generic class, where constancy of the
/// symbol cannot be decided by these means.
SymbolVerdict check_constant_symbol(const FramedManifold& m, const std::vector<std::vector<double>>& sample);

/// Axis-aligned sampling box, one interval per coordinate.
using ChartBox = std::vector<std::pair<double, double>>;

/// count points drawn uniformly from the box with a seeded generator.
std::vector<std::vector<double>> sample_points(const ChartBox& box, int count, std::uint64_t seed);

}  // namespace carnot

#endif
