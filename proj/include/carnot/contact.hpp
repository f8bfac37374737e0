#ifndef CARNOT_CONTACT_HPP
#define CARNOT_CONTACT_HPP

#include <vector>

#include "carnot/connection.hpp"
#include "carnot/manifold.hpp"

namespace carnot {

/// Contact structure of a sub-Riemannian manifold of constant symbol
/// h_n(lambda) at a point.  Horizontal quantities are 2n x 2n matrices or
/// 2n-vectors in the orthonormal horizontal frame X_1..X_2n of the manifold:
/// (A v)_a = sum_b A(a, b) v_b.
struct ContactData {
  int n = 0;
  /// Eigenvalues of Lambda with multiplicity (one per pair), and the distinct
  /// values: -(J^theta)^2 = Lambda^-2 on E, so J = Lambda J^theta squares to
  /// -id.
  std::vector<double> lambda;
  std::vector<double> distinct;
  /// Weights of the symbol: it is isometric to h_n(symbol_lambda), the
  /// algebra with |A_j| = |B_j| = symbol_lambda_j.  lambda = symbol_lambda^2.
  std::vector<double> symbol_lambda;
  /// X_1..X_2n followed by the last field of the manifold frame.
  LocalFrame base;
  /// +1 or -1: theta = orientation * alpha / m, where alpha is the
  /// annihilator of E with alpha(last field) = 1.
  int orientation = 1;
  Jet m;
  JetMatrix j_theta;
  JetMatrix lambda_map;
  JetMatrix j;
  /// Orthogonal projections onto the eigenbundles E[1], ..., E[k].
  std::vector<JetMatrix> pr;
  /// Reeb field in components of the base frame.
  JetVector reeb;
};

/// Builds the contact data.  The orientation of Ann(E) is fixed by the first
/// pair a < b (lexicographic) with theta([X_a, X_b]) != 0 at the point,
/// requiring theta([X_a, X_b]) > 0; flip reverses it.  Throws
/// PreconditionError unless the growth is (2n, 2n+1) and NumericalError when
/// the eigenvalue pattern does not match the symbol at the point.
ContactData extract_contact_data(const FramedManifold& m, const JetPoint& p, bool flip = false);

/// How brackets in the definition of Upsilon are split into horizontal and
/// vertical parts: along the Reeb field, or along the graded vertical field
/// Z^W (then W is found as the solution of the resulting linear equation).
enum class UpsilonProjection { reeb, graded };

/// Upsilon_ij for i != j (indices into distinct eigenvalues); entry i * k + j,
/// horizontal components.  Diagonal entries are zero.  Brackets are split
/// along Z^0 - J w (along the Reeb field when w is empty).
std::vector<JetVector> upsilon_fields(const ContactData& cd, const JetVector& w = {});

/// W = (2 / tr Lambda^-2) sum_{i != j} (lambda[i]^2 / lambda[j]) Upsilon_ij.
/// With the graded projection Upsilon depends affinely on W and the equation
/// is solved exactly, one eigenbundle at a time.
JetVector morimoto_w(const ContactData& cd, UpsilonProjection projection = UpsilonProjection::graded);

/// The tamed adapted frame X_1..X_2n, Z for the grading with vertical
/// direction Z^W = Z^0 - J W.
LocalFrame contact_grading_frame(const ContactData& cd, const JetVector& w);

/// A horizontal 2n x 2n matrix extended by zero on the vertical field.
JetMatrix extend_by_zero(const JetMatrix& horizontal);

struct ContactOptions {
  UpsilonProjection projection = UpsilonProjection::graded;
  bool flip = false;
  /// Use the Reeb grading (W = 0) instead of the Morimoto grading.
  bool reeb_grading = false;
};

/// The grading and the three connections on the grading frame:
/// nabla' (eigenbundles parallel, built from the Levi-Civita connection of
/// g_I and the tensor tau), nabla'' = nabla' + (1/2) (nabla' J) J, and the
/// Morimoto connection nabla'' + (1/2) R''(chi(.)).
struct ContactConnections {
  ContactData data;
  JetVector w;
  LocalFrame frame;
  /// <tau_{e_a} X_b, X_c> for horizontal b, c.
  Tensor3 tau;
  FrameConnection prime;
  FrameConnection double_prime;
  FrameConnection morimoto;
};

ContactConnections contact_connections(const FramedManifold& m, const JetPoint& p,
                                       const ContactOptions& options = {});

/// (nabla_{e_a} J) as matrices on frame components, J extended by zero.
std::vector<JetMatrix> covariant_j(const ContactData& cd, const FrameConnection& nabla);

/// The closed-form selector chi(e_Z) for the unit vertical field e_Z of the
/// grading frame, built from an orthonormal basis {u_j, J u_j} adapted to the
/// eigenbundles.  Entry (a, b), a < b, is the coefficient of X_a ^ X_b.
Eigen::MatrixXd closed_form_selector(const ContactData& cd);

struct ContactLemmaResiduals {
  double trace_j = 0;         // tr_{E[j]} <(nabla'_. J) X, .>
  double bianchi = 0;         // cyclic <(nabla'_X J) X1, X2> on one E[j]
  double t_dd_iso = 0;        // <T''_Y, D> for D in s_I
  double prime_torsion = 0;   // T'(X1, X2) - T_0(X1, X2) on one E[j]
  double prime_tau = 0;       // <T'(Y, X1), X2> - <tau_Y X1, X2> on one E[j]
  double tcond_identity = 0;  // -T''(chi(e_Z)) against its closed form
  double selector = 0;        // closed-form selector against the Gram solve
};

ContactLemmaResiduals contact_lemma_residuals(const FramedManifold& m, const std::vector<double>& p,
                                              const ContactOptions& options = {});

enum class ContactStage { prime, double_prime, morimoto };

/// Contact connection model along the chart.
class ContactModel : public ConnectionModel {
 public:
  explicit ContactModel(FramedManifold m, ContactOptions options = {},
                        ContactStage stage = ContactStage::morimoto)
      : m_(std::move(m)), options_(options), stage_(stage) {}
  FrameConnection at(const std::vector<double>& p, int extra) const override;
  /// Jet order used for a given number of extra derivatives.
  static int order(int extra) { return extra + 7; }
  /// W at p, horizontal components.
  std::vector<double> w_at(const std::vector<double>& p) const;

 private:
  FramedManifold m_;
  ContactOptions options_;
  ContactStage stage_;
};

}  // namespace carnot

#endif
