#ifndef CARNOT_G235_HPP
#define CARNOT_G235_HPP

#include <array>
#include <vector>

#include "carnot/connection.hpp"
#include "carnot/manifold.hpp"

namespace carnot {

/// X1, X2 (orthonormal horizontal), X3 = [X1, X2], X4 = [X1, X3],
/// X5 = [X2, X3] with degrees 1, 1, 2, 3, 3.  Throws PreconditionError
/// unless the growth vector is (2, 3, 5).
LocalFrame bracket_frame_235(const FramedManifold& m, const JetPoint& p);

/// Inside X_i(...) in the Y2 formula: the printed c25^4 + c25^5, or
/// c24^4 + c25^5, the coefficient of Z in the same formula.
enum class Y2Reading { printed, corrected };

/// The frame X1, X2, Z, Y1, Y2 of the canonical grading (Z spans the
/// degree -2 part, Y1, Y2 the degree -3 part), declared orthonormal.
LocalFrame canonical_frame_235(const FramedManifold& m, const JetPoint& p, Y2Reading reading = Y2Reading::corrected);

/// The strongly compatible connection of a frame X1, X2, Z, Y1, Y2 of a
/// (2,3,5) grading: all layers parallel, nabla Z = 0, the horizontal block
/// from the Levi-Civita connection along X1, X2 and from
/// <[U, X_j], X_k> + (1/2) (L_U g)(X_j, X_k) along U = Z, Y1, Y2, and the
/// Y block equal to the X block.
FrameConnection graded_connection_235(const LocalFrame& f);

/// The connection of the canonical frame.
class Canonical235Model : public ConnectionModel {
 public:
  explicit Canonical235Model(FramedManifold m, Y2Reading reading = Y2Reading::corrected)
      : m_(std::move(m)), reading_(reading) {}
  FrameConnection at(const std::vector<double>& p, int extra) const override;

 private:
  FramedManifold m_;
  Y2Reading reading_;
};

/// Flatness test for the canonical connection: R = 0 and T = T_0, i.e.
/// T(X2, X1) = Z and T(Z, X_j) = Y_j are the only torsion components.
Report flatness_235(const FramedManifold& m, const std::vector<std::vector<double>>& sample, double tolerance = 1e-8,
                    Y2Reading reading = Y2Reading::corrected);

/// The intrinsic grading: ker theta = E + (TM)'_{-3} with d Psi(u, w1, w2) = 0,
/// and (TM)'_{-2} + (TM)'_{-3} = ker beta_1 ^ ker beta_2.  Vectors are in
/// components of the bracket frame.
struct IntrinsicGrading235 {
  LocalFrame bracket;
  JetVector theta;
  /// Spans (TM)'_{-2}, theta(Z') = 1.
  JetVector z_prime;
  /// l' X1, l' X2: the basis of (TM)'_{-3} with phi(l' X) = X.
  std::array<JetVector, 2> ell_prime;
  /// Coefficients of a vector in the basis X1, X2, Z', l'X1, l'X2.
  JetMatrix split;
};

IntrinsicGrading235 intrinsic_grading_235(const FramedManifold& m, const JetPoint& p);

/// phi: TM -> E with kernel E^{-2} and phi([X, [X, JX]]) = |X|^2 JX, on
/// bracket-frame components.
JetVector phi_235(const JetVector& v);

/// W2 as printed (W2 = W1 = Upsilon) or as forced by the normalization
/// (W2 = (3/4) Upsilon).
enum class WReading { printed, solved };

/// A from the displayed formula, or solved from Tcond(l X, X), which is
/// affine in A with coefficient 3.
enum class AReading { display, solved };

struct Morimoto235Options {
  WReading w_reading = WReading::solved;
  AReading a_reading = AReading::solved;
  /// Added to mu on every frame field (negative control).
  double mu_offset = 0.0;
};

struct Morimoto235 {
  IntrinsicGrading235 intrinsic;
  /// Horizontal components.
  JetVector upsilon;
  JetMatrix a;
  /// X1, X2, Z, l X1, l X2.
  LocalFrame frame;
  FrameConnection base{LocalFrame()};
  /// mu on the frame fields; nabla = nabla^0 + mu D.
  std::vector<Jet> mu;
  FrameConnection connection{LocalFrame()};
};

Morimoto235 morimoto_235(const FramedManifold& m, const JetPoint& p, const Morimoto235Options& options = {});

/// The generator D of s_I on frames X1, X2, Z, l X1, l X2: D X1 = X2,
/// D X2 = -X1, D Z = 0, and the same on the last two fields.
Eigen::MatrixXd d_235();

class Morimoto235Model : public ConnectionModel {
 public:
  explicit Morimoto235Model(FramedManifold m, Morimoto235Options options = {})
      : m_(std::move(m)), options_(options) {}
  FrameConnection at(const std::vector<double>& p, int extra) const override;
  static int order(int extra) { return extra + 9; }

 private:
  FramedManifold m_;
  Morimoto235Options options_;
};

/// q_{X_a} X_b = phi([X_a, l' X_b]) - nabla^0_{X_a} X_b at the base point, with
/// nabla^0 the base connection of the intrinsic grading: q[a] is the matrix
/// of q_{X_a} on horizontal components.
std::array<Eigen::Matrix2d, 2> q_map_235(const FramedManifold& m, const std::vector<double>& p);

struct Lemma235Residuals {
  double q1 = 0;            // tr <q_X ., .> = 0
  double q2 = 0;            // q_X Y = -q_{JY} J X
  double q2_trace = 0;      // tr q_. . = 0
  double q_swap = 0;        // q_X Y = q_Y X - 2 <JX, Y> J Upsilon
  double q3 = 0;            // tr <q_X ., J .> = 2 <J Upsilon, X>
  double q4 = 0;            // <q_X Y1, Y2> - <q_X Y2, Y1> = 2 <J Upsilon, X> <J Y1, Y2>
  double q5 = 0;            // J q_X + q_X J = -2 <J Upsilon, X> id
  double intrinsic = 0;     // d Psi(u, l'X1, l'X2) = 0, theta(l'X) = 0, phi(l'X) = X
  double mu_minus_one = 0;  // mu(X) = (1/4) <J Upsilon, X>
  double t0_horizontal = 0; // T^0(X1, X2) = -<J X1, X2> Z
  double t0_tau = 0;        // <T^0(U, X_j), X_k> = (1/2) (L_U g)(X_j, X_k) for U = Z, l X
  double isometric = 0;     // the Morimoto frame is g_I-orthonormal (coisometric symbol)
};

Lemma235Residuals lemma_residuals_235(const FramedManifold& m, const std::vector<double>& p);

}  // namespace carnot

#endif
