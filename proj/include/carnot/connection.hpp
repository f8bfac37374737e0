#ifndef CARNOT_CONNECTION_HPP
#define CARNOT_CONNECTION_HPP

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "carnot/lie.hpp"
#include "carnot/local.hpp"
#include "carnot/manifold.hpp"

namespace carnot {

/// A frame e_0..e_{n-1} of TM near a point, as jets of coordinate
/// components, with a degree per field.  Fields are ordered by degree; an
/// adapted frame has fields of degree k spanning (TM)_{-k}.
class LocalFrame {
 public:
  LocalFrame() = default;
  LocalFrame(std::vector<JetVector> fields, std::vector<int> degrees);

  int size() const { return static_cast<int>(fields_.size()); }
  int degree(int a) const { return degrees_[a]; }
  int step() const { return degrees_.empty() ? 0 : degrees_.back(); }
  /// Number of fields of each degree 1..step.
  std::vector<int> layer_dims() const;
  const std::vector<int>& degrees() const { return degrees_; }
  const JetVector& field(int a) const { return fields_[a]; }
  const std::vector<JetVector>& fields() const { return fields_; }

  /// Frame components of a coordinate vector.
  JetVector components(const JetVector& v) const;
  /// Coordinate vector with the given frame components.
  JetVector vector(const JetVector& comps) const;
  /// Structure functions [e_a, e_b] = sum_c c(a, b, c) e_c, computed once.
  const Jet& c(int a, int b, int c) const;
  /// e_a(f).
  Jet derivative(int a, const Jet& f) const { return apply(fields_[a], f); }
  /// Frame components of [u, v] for u, v given by frame components.
  JetVector bracket(const JetVector& u, const JetVector& v) const;
  /// Structure constants of the symbol in this frame at the base point:
  /// c(a, b, c) when deg c = deg a + deg b, else 0.
  NumericAlgebra symbol() const;

 private:
  void compute() const;

  std::vector<JetVector> fields_;
  std::vector<int> degrees_;
  mutable JetMatrix coframe_;
  mutable std::vector<Jet> c_;
};

/// Rescales the layers k >= 2 of an adapted frame so that it becomes
/// orthonormal for the taming metric g_I.  The first layer must already be
/// g-orthonormal.  The inner product on gr is the coisometric one: for each
/// k the bracket from the orthonormal pairs (a < b, deg a + deg b = k) onto
/// gr_{-k} is a co-isometry.
LocalFrame tame(const std::vector<JetVector>& fields, const std::vector<int>& degrees);

/// The orthonormal frame of m at p with degrees from the growth vector,
/// tamed.  The frame is assumed adapted (fields r+1..r+d_2 complement E in
/// E^{-2}, and so on); this is checked at the base point.
LocalFrame adapted_frame(const FramedManifold& m, const JetPoint& p);

/// Christoffel symbols nabla_{e_a} e_b = sum_c gamma(a, b, c) e_c in a
/// g_I-orthonormal adapted frame.
class FrameConnection {
 public:
  explicit FrameConnection(LocalFrame frame);

  const LocalFrame& frame() const { return frame_; }
  int size() const { return frame_.size(); }
  Jet& operator()(int a, int b, int c) { return gamma_[index(a, b, c)]; }
  const Jet& operator()(int a, int b, int c) const { return gamma_[index(a, b, c)]; }
  /// Covariant derivative of the frame-component vector v along u.
  JetVector covariant(const JetVector& u, const JetVector& v) const;

 private:
  std::size_t index(int a, int b, int c) const { return (static_cast<std::size_t>(a) * n_ + b) * n_ + c; }

  LocalFrame frame_;
  int n_;
  std::vector<Jet> gamma_;
};

/// Dense n^k arrays of jets indexed in row-major order.
struct Tensor3 {
  int n = 0;
  std::vector<Jet> v;
  explicit Tensor3(int n_ = 0) : n(n_), v(static_cast<std::size_t>(n_) * n_ * n_) {}
  Jet& operator()(int a, int b, int c) { return v[(static_cast<std::size_t>(a) * n + b) * n + c]; }
  const Jet& operator()(int a, int b, int c) const { return v[(static_cast<std::size_t>(a) * n + b) * n + c]; }
};

struct Tensor4 {
  int n = 0;
  std::vector<Jet> v;
  explicit Tensor4(int n_ = 0) : n(n_), v(static_cast<std::size_t>(n_) * n_ * n_ * n_) {}
  Jet& operator()(int a, int b, int c, int d) {
    return v[((static_cast<std::size_t>(a) * n + b) * n + c) * n + d];
  }
  const Jet& operator()(int a, int b, int c, int d) const {
    return v[((static_cast<std::size_t>(a) * n + b) * n + c) * n + d];
  }
};

FrameConnection flat_frame_connection(const LocalFrame& frame);
FrameConnection levi_civita(const LocalFrame& frame);

/// T(e_a, e_b) = sum_c T(a, b, c) e_c.
Tensor3 torsion(const FrameConnection& nabla);
/// R(e_a, e_b) e_j = sum_k R(a, b, j, k) e_k.
Tensor4 curvature(const FrameConnection& nabla);
/// The degree-zero torsion: -c(a, b, c) when deg c = deg a + deg b.
Tensor3 t_zero(const LocalFrame& frame);
/// chi(e_c) = sum_{a<b} s(a, b, c) e_a ^ e_b for the selector of the grading.
Tensor3 selector(const LocalFrame& frame);
/// Frobenius-orthonormal basis of s_I at the base point, as matrices in the
/// frame (D e_j = sum_k D(k, j) e_k).
std::vector<Eigen::MatrixXd> isometries(const LocalFrame& frame);

/// Pointwise residuals of the structural identities.  All are maxima of
/// absolute frame components at the base point.
struct ConnectionResiduals {
  double grading = 0;        // gamma(a, b, c) with deg b != deg c
  double metric = 0;         // gamma(a, b, c) + gamma(a, c, b) on E
  double strong = 0;         // nabla of the degree-zero torsion
  double torsion_identity = 0;
  double rcond = 0;
  double tcond = 0;
  double flat_torsion = 0;   // T - T_0
  double flat_curvature = 0; // R
  double holonomy = 0;       // R(e_a, e_b) off s_I
  double selector_grading = 0;
  double selector_bracket = 0;
};

ConnectionResiduals residuals(const FrameConnection& nabla);

/// Source of frame connections along a chart.
class ConnectionModel {
 public:
  virtual ~ConnectionModel() = default;
  /// Frame and connection at p with at least `extra` derivatives of the
  /// Christoffel symbols available.
  virtual FrameConnection at(const std::vector<double>& p, int extra) const = 0;
};

/// All left-invariant-style frame fields parallel (gamma = 0) on the tamed
/// adapted frame of m.
class ParallelFrameModel : public ConnectionModel {
 public:
  explicit ParallelFrameModel(FramedManifold m) : m_(std::move(m)) {}
  FrameConnection at(const std::vector<double>& p, int extra) const override;

 private:
  FramedManifold m_;
};

/// Levi-Civita connection of the taming metric of the adapted frame.
class LeviCivitaModel : public ConnectionModel {
 public:
  explicit LeviCivitaModel(FramedManifold m) : m_(std::move(m)) {}
  FrameConnection at(const std::vector<double>& p, int extra) const override;

 private:
  FramedManifold m_;
};

/// Adds eps * mu(Y) D to another model, with mu the dual of the first frame
/// field and D the first basis element of s_I at each point.
class PerturbedModel : public ConnectionModel {
 public:
  PerturbedModel(const ConnectionModel& base, double eps) : base_(base), eps_(eps) {}
  FrameConnection at(const std::vector<double>& p, int extra) const override;

 private:
  const ConnectionModel& base_;
  double eps_;
};

struct CheckResult {
  std::string name;
  double residual = 0;
  double tolerance = 0;
  bool pass = false;
};

using Report = std::vector<CheckResult>;

bool all_pass(const Report& r);
const CheckResult& find_check(const Report& r, const std::string& name);

/// Maxima of residuals over the sample.
ConnectionResiduals max_residuals(const ConnectionModel& model, const std::vector<std::vector<double>>& sample);

/// grading, metric and strong compatibility.
Report check_compatible(const ConnectionModel& model, const std::vector<std::vector<double>>& sample,
                        double tolerance = 1e-8);
/// Strong compatibility followed by the Morimoto normalization conditions.
Report check_morimoto(const ConnectionModel& model, const std::vector<std::vector<double>>& sample,
                      double tolerance = 1e-8);
/// T = T_0 and R = 0.  The verdict is all_pass of the report.
Report flatness_check(const ConnectionModel& model, const std::vector<std::vector<double>>& sample,
                      double tolerance = 1e-8);

}  // namespace carnot

#endif
