#include "carnot/g235.hpp"

#include <algorithm>
#include <cmath>

#include "carnot/errors.hpp"

namespace carnot {

namespace {

constexpr int kDim = 5;
const std::vector<int> kDegrees{1, 1, 2, 3, 3};

bool is_exact_zero(const Jet& x) { return x.is_constant() && x.value() == 0.0; }

// u(f) for u given by frame components.
Jet derive(const LocalFrame& f, const JetVector& u, const Jet& x) {
  Jet out(0.0);
  if (x.is_constant()) return out;
  for (int a = 0; a < f.size(); ++a) {
    if (!is_exact_zero(u[a])) out += u[a] * f.derivative(a, x);
  }
  return out;
}

// Solves [m00 m01; m10 m11] x = r.
std::array<Jet, 2> solve2(const Jet& m00, const Jet& m01, const Jet& m10, const Jet& m11, const Jet& r0,
                          const Jet& r1) {
  Jet det = m00 * m11 - m01 * m10;
  if (std::abs(det.value()) <= 1e-12) throw NumericalError("singular 2x2 system in the (2,3,5) grading");
  return {(m11 * r0 - m01 * r1) / det, (m00 * r1 - m10 * r0) / det};
}

// J on horizontal components: J X1 = X2, J X2 = -X1.
std::array<Jet, 2> rot(const Jet& x0, const Jet& x1) { return {-x1, x0}; }

JetVector horizontal_vector(const Jet& x0, const Jet& x1) {
  JetVector v = zeros(kDim);
  v[0] = x0;
  v[1] = x1;
  return v;
}

}  // namespace

LocalFrame bracket_frame_235(const FramedManifold& m, const JetPoint& p) {
  std::vector<int> flag = growth_flag(m, p.values, 3);
  if (m.dimension() != kDim || m.horizontal_rank() != 2 || flag != std::vector<int>{2, 3, 5}) {
    throw PreconditionError("(2,3,5) analysis needs growth vector (2, 3, 5)");
  }
  std::vector<JetVector> on = m.frame_jets(p);
  JetVector x3 = bracket(on[0], on[1]);
  JetVector x4 = bracket(on[0], x3);
  JetVector x5 = bracket(on[1], x3);
  return LocalFrame({on[0], on[1], x3, x4, x5}, kDegrees);
}

LocalFrame canonical_frame_235(const FramedManifold& m, const JetPoint& p, Y2Reading reading) {
  LocalFrame b = bracket_frame_235(m, p);
  // c(i, j, k) with the 1-based indices of the formulas.
  auto c = [&b](int i, int j, int k) -> const Jet& { return b.c(i - 1, j - 1, k - 1); };
  Jet s1 = c(1, 4, 4) + c(1, 5, 5);
  Jet s2 = c(2, 4, 4) + c(2, 5, 5);
  Jet t = reading == Y2Reading::printed ? c(2, 5, 4) + c(2, 5, 5) : s2;

  JetVector z = unit(kDim, 2);
  z[0] = c(2, 3, 3) + s2;
  z[1] = -(c(1, 3, 3) + s1);

  JetVector y1 = unit(kDim, 3) - s1 * z;
  y1[0] += c(2, 4, 3) - b.derivative(1, s1) + c(2, 4, 4) * s1 + c(2, 4, 5) * s2;
  y1[1] -= c(1, 4, 3) - b.derivative(0, s1) + c(1, 4, 4) * s1 + c(1, 4, 5) * s2;

  JetVector y2 = unit(kDim, 4) - s2 * z;
  y2[0] += c(2, 5, 3) - b.derivative(1, t) + c(2, 5, 4) * s1 + c(2, 5, 5) * s2;
  y2[1] -= c(1, 5, 3) - b.derivative(0, t) + c(1, 5, 4) * s1 + c(1, 5, 5) * s2;

  return LocalFrame({b.field(0), b.field(1), b.vector(z), b.vector(y1), b.vector(y2)}, kDegrees);
}

FrameConnection graded_connection_235(const LocalFrame& f) {
  FrameConnection nabla(f);
  for (int a = 0; a < kDim; ++a) {
    for (int j = 0; j < 2; ++j) {
      for (int k = 0; k < 2; ++k) {
        if (j == k) continue;
        Jet g = f.c(a, j, k) - f.c(a, k, j);
        if (a < 2) g -= f.c(j, k, a);
        g = Jet(0.5) * g;
        nabla(a, j, k) = g;
        nabla(a, j + 3, k + 3) = g;
      }
    }
  }
  return nabla;
}

FrameConnection Canonical235Model::at(const std::vector<double>& p, int extra) const {
  return graded_connection_235(canonical_frame_235(m_, m_.jet_point(p, extra + 5), reading_));
}

Report flatness_235(const FramedManifold& m, const std::vector<std::vector<double>>& sample, double tolerance,
                    Y2Reading reading) {
  return flatness_check(Canonical235Model(m, reading), sample, tolerance);
}

JetVector phi_235(const JetVector& v) { return {-v[4], v[3]}; }

IntrinsicGrading235 intrinsic_grading_235(const FramedManifold& m, const JetPoint& p) {
  IntrinsicGrading235 g;
  g.bracket = bracket_frame_235(m, p);
  const LocalFrame& b = g.bracket;

  // d Psi = theta ^ (alpha1 ^ alpha5 - alpha2 ^ alpha4 + a3 Psi) with
  // Psi = alpha4 ^ alpha5 and theta = alpha3 - a1 alpha4 - a2 alpha5, where
  // a_i = d Psi(X_i, X4, X5) = -(c_i4^4 + c_i5^5).
  g.theta = zeros(kDim);
  g.theta[2] = Jet(1.0);
  g.theta[3] = b.c(0, 3, 3) + b.c(0, 4, 4);
  g.theta[4] = b.c(1, 3, 3) + b.c(1, 4, 4);

  // beta_1 = d theta(X2, .), beta_2 = -d theta(X1, .).
  auto dtheta = [&](int u, int v) {
    Jet x = b.derivative(u, g.theta[v]) - b.derivative(v, g.theta[u]);
    for (int k = 2; k < kDim; ++k) x -= b.c(u, v, k) * g.theta[k];
    return x;
  };
  std::array<JetVector, 2> beta;
  for (int v = 0; v < kDim; ++v) {
    beta[0].push_back(dtheta(1, v));
    beta[1].push_back(-dtheta(0, v));
  }

  // Z' in E^{-2} with beta(Z') = 0 and theta(Z') = 1; l' X in ker theta ^ ker beta.
  auto solve_horizontal = [&](const JetVector& tail) {
    Jet r0 = Jet(0.0), r1 = Jet(0.0);
    for (int k = 2; k < kDim; ++k) {
      r0 -= beta[0][k] * tail[k];
      r1 -= beta[1][k] * tail[k];
    }
    std::array<Jet, 2> x = solve2(beta[0][0], beta[0][1], beta[1][0], beta[1][1], r0, r1);
    JetVector v = tail;
    v[0] = x[0];
    v[1] = x[1];
    return v;
  };
  g.z_prime = solve_horizontal(unit(kDim, 2));
  JetVector t4 = unit(kDim, 3), t5 = unit(kDim, 4);
  t4[2] = -g.theta[3];
  t5[2] = -g.theta[4];
  JetVector u4 = solve_horizontal(t4);
  JetVector u5 = solve_horizontal(t5);
  // phi(U4) = X2 and phi(U5) = -X1.
  g.ell_prime = {-u5, u4};

  JetMatrix basis(kDim, kDim);
  basis.set_column(0, unit(kDim, 0));
  basis.set_column(1, unit(kDim, 1));
  basis.set_column(2, g.z_prime);
  basis.set_column(3, g.ell_prime[0]);
  basis.set_column(4, g.ell_prime[1]);
  g.split = basis.inverse();
  return g;
}

Eigen::MatrixXd d_235() {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(kDim, kDim);
  d(1, 0) = 1;
  d(0, 1) = -1;
  d(4, 3) = 1;
  d(3, 4) = -1;
  return d;
}

namespace {

// l' on bracket-frame components: l'(pr'_{-1} v).
JetVector ell_prime_of(const IntrinsicGrading235& g, const JetVector& v) {
  JetVector coef = g.split * v;
  return coef[0] * g.ell_prime[0] + coef[1] * g.ell_prime[1];
}

// J Upsilon = (1/4) tr_E phi(l'[., J.] - [., l'J.] - [l'., J.]); both
// terms of the trace coincide.
std::array<Jet, 2> j_upsilon(const IntrinsicGrading235& g) {
  const LocalFrame& b = g.bracket;
  JetVector e0 = unit(kDim, 0), e1 = unit(kDim, 1);
  JetVector v = ell_prime_of(g, b.bracket(e0, e1)) - b.bracket(e0, g.ell_prime[1]) - b.bracket(g.ell_prime[0], e1);
  JetVector w = phi_235(v);
  return {Jet(0.5) * w[0], Jet(0.5) * w[1]};
}

// mu solved degree by degree from
// <R(chi(e_c)), D> = <T_{e_c}, D> for nabla = nabla^0 + mu D.
std::vector<Jet> solve_mu(const FrameConnection& base) {
  const LocalFrame& f = base.frame();
  int n = f.size();
  Eigen::MatrixXd d = d_235();
  Eigen::MatrixXd gram = d.transpose() * d;
  double dd = d.squaredNorm();
  Tensor3 t0 = torsion(base);
  Tensor4 r0 = curvature(base);
  Tensor3 s = selector(f);

  std::vector<Jet> p(n);
  for (int c = 0; c < n; ++c) {
    Jet x(0.0);
    for (int a = 0; a < n; ++a) {
      for (int b = a + 1; b < n; ++b) {
        if (is_exact_zero(s(a, b, c))) continue;
        Jet pair(0.0);
        for (int j = 0; j < n; ++j) {
          for (int k = 0; k < n; ++k) {
            if (d(k, j) != 0.0) pair += Jet(d(k, j)) * r0(a, b, j, k);
          }
        }
        x += s(a, b, c) * pair;
      }
    }
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        if (d(k, j) != 0.0) x -= Jet(d(k, j)) * t0(c, j, k);
      }
    }
    p[c] = x;
  }

  // P_c + |D|^2 dmu(chi(e_c)) - |D|^2 mu_c + sum_j <D e_c, D e_j> mu_j = 0.
  std::vector<Jet> mu(n, Jet(0.0));
  for (int deg = 1; deg <= f.step(); ++deg) {
    std::vector<int> idx;
    for (int c = 0; c < n; ++c) {
      if (f.degree(c) == deg) idx.push_back(c);
    }
    int m = static_cast<int>(idx.size());
    JetMatrix lhs(m, m);
    JetVector rhs(m);
    for (int i = 0; i < m; ++i) {
      int c = idx[i];
      Jet r = -p[c];
      for (int k = 0; k < n; ++k) {
        if (f.degree(k) < deg && gram(c, k) != 0.0) r -= Jet(gram(c, k)) * mu[k];
      }
      for (int l = 0; l < m; ++l) lhs(i, l) = Jet(gram(c, idx[l]) - (c == idx[l] ? dd : 0.0));
      for (int a = 0; a < n; ++a) {
        for (int b = a + 1; b < n; ++b) {
          if (is_exact_zero(s(a, b, c))) continue;
          Jet w = Jet(dd) * s(a, b, c);
          Jet known = f.derivative(a, mu[b]) - f.derivative(b, mu[a]);
          for (int k = 0; k < n; ++k) {
            if (f.degree(k) < deg) known -= f.c(a, b, k) * mu[k];
          }
          r -= w * known;
          for (int l = 0; l < m; ++l) lhs(i, l) -= w * f.c(a, b, idx[l]);
        }
      }
      rhs[i] = r;
    }
    JetVector x = lhs.inverse() * rhs;
    for (int i = 0; i < m; ++i) mu[idx[i]] = x[i];
  }
  return mu;
}

}  // namespace

namespace {

// X1, X2, Z' + J W1, l'X + <J W2, X> Z' + A X.
LocalFrame grading_frame(const IntrinsicGrading235& g, const std::array<Jet, 2>& jw1, const std::array<Jet, 2>& jw2,
                         const JetMatrix& a) {
  const LocalFrame& b = g.bracket;
  JetVector z = g.z_prime + horizontal_vector(jw1[0], jw1[1]);
  std::array<JetVector, 2> ell;
  for (int i = 0; i < 2; ++i) ell[i] = g.ell_prime[i] + jw2[i] * g.z_prime + horizontal_vector(a(0, i), a(1, i));
  return LocalFrame({b.field(0), b.field(1), b.vector(z), b.vector(ell[0]), b.vector(ell[1])}, kDegrees);
}

FrameConnection add_mu(const FrameConnection& base, const std::vector<Jet>& mu) {
  FrameConnection out = base;
  Eigen::MatrixXd d = d_235();
  for (int a = 0; a < kDim; ++a) {
    for (int j = 0; j < kDim; ++j) {
      for (int k = 0; k < kDim; ++k) {
        if (d(k, j) != 0.0) out(a, j, k) += Jet(d(k, j)) * mu[a];
      }
    }
  }
  return out;
}

// The displayed formula
// 2 <A X_a, X_b> = d mu_{-1}(X_a, X_b) + 2 <J Upsilon, X_a> <J Upsilon, X_b>
//                  - <J phi([Z', l' X_a]) - [Z', J X_a], X_b>
// with mu_{-1} = <Upsilon, .> and the pairing of g_I.  A also enters the
// right-hand side through the l X components of [Z', J X_a].
JetMatrix display_a(const IntrinsicGrading235& g, const JetVector& u, const std::array<Jet, 2>& ju,
                    const std::array<Jet, 2>& jw1, const std::array<Jet, 2>& jw2) {
  const LocalFrame& b = g.bracket;
  // pr_{-1} X3 = -(Z' + J W1) horizontally.
  Jet dmu = b.derivative(0, u[1]) - b.derivative(1, u[0]) + u[0] * (g.z_prime[0] + jw1[0]) +
            u[1] * (g.z_prime[1] + jw1[1]);
  std::array<JetVector, 2> jx = {unit(kDim, 1), -unit(kDim, 0)};
  JetMatrix rhs(2, 2);   // rhs(a, b)
  JetMatrix lift(2, 2);  // lift(i, a): l'X_i coefficient of [Z', J X_a]
  for (int a = 0; a < 2; ++a) {
    JetVector ph = phi_235(b.bracket(g.z_prime, g.ell_prime[a]));
    std::array<Jet, 2> jph = rot(ph[0], ph[1]);
    JetVector coef = g.split * b.bracket(g.z_prime, jx[a]);
    Jet along_z = coef[2] - coef[3] * jw2[0] - coef[4] * jw2[1];
    for (int bb = 0; bb < 2; ++bb) {
      Jet dm = a == bb ? Jet(0.0) : (a == 0 ? dmu : -dmu);
      rhs(a, bb) = dm + Jet(2.0) * ju[a] * ju[bb] - jph[bb] + coef[bb] - along_z * jw1[bb];
    }
    lift(0, a) = coef[3];
    lift(1, a) = coef[4];
  }
  // Row b of A: sum_i A(b, i) (2 delta_ia + lift(i, a)) = rhs(a, b).
  JetMatrix kinv = (Jet(2.0) * JetMatrix::identity(2) + lift).inverse();
  JetMatrix a(2, 2);
  for (int bb = 0; bb < 2; ++bb) {
    for (int c = 0; c < 2; ++c) {
      Jet x(0.0);
      for (int i = 0; i < 2; ++i) x += rhs(i, bb) * kinv(i, c);
      a(bb, c) = x;
    }
  }
  return a;
}

// Tcond(l X_i, X_d) = 3 <A X_i, X_d> + (its value at A = 0): the A-dependence
// is algebraic through the components [l X_i, X_j]_Z, [l X_i, Z]_Y and
// pr_{-1} [Z, X_j], with the coefficient fixed by the symbol.
JetMatrix solved_a(const IntrinsicGrading235& g, const std::array<Jet, 2>& jw1, const std::array<Jet, 2>& jw2) {
  JetMatrix zero(2, 2);
  LocalFrame f = grading_frame(g, jw1, jw2, zero);
  FrameConnection base = graded_connection_235(f);
  FrameConnection nabla = add_mu(base, solve_mu(base));
  Tensor3 t = torsion(nabla);
  Tensor3 t0 = t_zero(f);
  Tensor3 s = selector(f);
  JetMatrix a(2, 2);
  for (int i = 0; i < 2; ++i) {
    int c = 3 + i;
    for (int d = 0; d < 2; ++d) {
      Jet v(0.0);
      for (int p = 0; p < kDim; ++p) {
        for (int q = p + 1; q < kDim; ++q) {
          if (!is_exact_zero(s(p, q, c))) v += s(p, q, c) * t(p, q, d);
        }
      }
      for (int j = 0; j < kDim; ++j) {
        for (int k = 0; k < kDim; ++k) {
          if (!is_exact_zero(t0(d, j, k))) v += t(c, j, k) * t0(d, j, k);
        }
      }
      a(d, i) = Jet(-1.0 / 3.0) * v;
    }
  }
  return a;
}

}  // namespace

Morimoto235 morimoto_235(const FramedManifold& m, const JetPoint& p, const Morimoto235Options& options) {
  Morimoto235 out;
  out.intrinsic = intrinsic_grading_235(m, p);
  const IntrinsicGrading235& g = out.intrinsic;

  std::array<Jet, 2> ju = j_upsilon(g);
  std::array<Jet, 2> minus_u = rot(ju[0], ju[1]);
  out.upsilon = {-minus_u[0], -minus_u[1]};

  // Tcond(Z, X) and Tcond(l X, Z) give mu_{-1} = J (W1 - W2) = J (Upsilon - W2),
  // and Rcond on E gives 3 mu_{-1} = 2 J (Upsilon - W1) + J W2; hence W1 = Upsilon,
  // W2 = (3/4) Upsilon and mu_{-1} = (1/4) <J Upsilon, .>.
  double w2 = options.w_reading == WReading::printed ? 1.0 : 0.75;
  std::array<Jet, 2> jw1 = ju;
  std::array<Jet, 2> jw2 = {Jet(w2) * ju[0], Jet(w2) * ju[1]};

  out.a = options.a_reading == AReading::display ? display_a(g, out.upsilon, ju, jw1, jw2) : solved_a(g, jw1, jw2);
  out.frame = grading_frame(g, jw1, jw2, out.a);
  out.base = graded_connection_235(out.frame);
  out.mu = solve_mu(out.base);
  if (options.mu_offset != 0.0) {
    for (Jet& x : out.mu) x += Jet(options.mu_offset);
  }
  out.connection = add_mu(out.base, out.mu);
  return out;
}

FrameConnection Morimoto235Model::at(const std::vector<double>& p, int extra) const {
  return morimoto_235(m_, m_.jet_point(p, order(extra)), options_).connection;
}

namespace {

std::array<Eigen::Matrix2d, 2> q_values(const IntrinsicGrading235& g) {
  const LocalFrame& b = g.bracket;
  LocalFrame f({b.field(0), b.field(1), b.vector(g.z_prime), b.vector(g.ell_prime[0]), b.vector(g.ell_prime[1])},
               kDegrees);
  FrameConnection base = graded_connection_235(f);
  std::array<Eigen::Matrix2d, 2> q;
  for (int a = 0; a < 2; ++a) {
    for (int bb = 0; bb < 2; ++bb) {
      JetVector ph = phi_235(b.bracket(unit(kDim, a), g.ell_prime[bb]));
      for (int c = 0; c < 2; ++c) q[a](c, bb) = ph[c].value() - base(a, bb, c).value();
    }
  }
  return q;
}

}  // namespace

std::array<Eigen::Matrix2d, 2> q_map_235(const FramedManifold& m, const std::vector<double>& p) {
  return q_values(intrinsic_grading_235(m, m.jet_point(p, 5)));
}

Lemma235Residuals lemma_residuals_235(const FramedManifold& m, const std::vector<double>& p) {
  Morimoto235 mm = morimoto_235(m, m.jet_point(p, Morimoto235Model::order(0)));
  const IntrinsicGrading235& g = mm.intrinsic;
  const LocalFrame& b = g.bracket;
  Lemma235Residuals out;

  std::array<Eigen::Matrix2d, 2> q = q_values(g);
  Eigen::Matrix2d j;
  j << 0, -1, 1, 0;
  Eigen::Vector2d up(mm.upsilon[0].value(), mm.upsilon[1].value());
  Eigen::Vector2d ju = j * up;
  auto qv = [&](const Eigen::Vector2d& x, const Eigen::Vector2d& y) -> Eigen::Vector2d {
    return x(0) * q[0] * y + x(1) * q[1] * y;
  };
  Eigen::Vector2d e[2] = {Eigen::Vector2d(1, 0), Eigen::Vector2d(0, 1)};
  Eigen::Vector2d trace = Eigen::Vector2d::Zero();
  for (int a = 0; a < 2; ++a) {
    double tr1 = 0.0, tr3 = 0.0;
    for (int bb = 0; bb < 2; ++bb) {
      tr1 += qv(e[a], e[bb]).dot(e[bb]);
      tr3 += qv(e[a], e[bb]).dot(j * e[bb]);
      out.q2 = std::max(out.q2, (qv(e[a], e[bb]) + qv(j * e[bb], j * e[a])).cwiseAbs().maxCoeff());
      Eigen::Vector2d swap = qv(e[a], e[bb]) - qv(e[bb], e[a]) + 2.0 * (j * e[a]).dot(e[bb]) * ju;
      out.q_swap = std::max(out.q_swap, swap.cwiseAbs().maxCoeff());
    }
    trace += qv(e[a], e[a]);
    out.q1 = std::max(out.q1, std::abs(tr1));
    out.q3 = std::max(out.q3, std::abs(tr3 - 2.0 * ju.dot(e[a])));
    double skew = qv(e[a], e[0]).dot(e[1]) - qv(e[a], e[1]).dot(e[0]);
    out.q4 = std::max(out.q4, std::abs(skew - 2.0 * ju.dot(e[a]) * (j * e[0]).dot(e[1])));
    Eigen::Matrix2d q5 = j * q[a] + q[a] * j + 2.0 * ju.dot(e[a]) * Eigen::Matrix2d::Identity();
    out.q5 = std::max(out.q5, q5.cwiseAbs().maxCoeff());
    out.mu_minus_one = std::max(out.mu_minus_one, std::abs(mm.mu[a].value() - 0.25 * ju(a)));
  }
  out.q2_trace = trace.cwiseAbs().maxCoeff();

  // The defining properties of the intrinsic grading.
  auto psi = [](const JetVector& v, const JetVector& w) { return v[3] * w[4] - v[4] * w[3]; };
  auto dpsi = [&](const JetVector& u, const JetVector& v, const JetVector& w) {
    return derive(b, u, psi(v, w)) - derive(b, v, psi(u, w)) + derive(b, w, psi(u, v)) -
           psi(b.bracket(u, v), w) + psi(b.bracket(u, w), v) - psi(b.bracket(v, w), u);
  };
  for (int a = 0; a < 2; ++a) {
    out.intrinsic = std::max(out.intrinsic, std::abs(dpsi(unit(kDim, a), g.ell_prime[0], g.ell_prime[1]).value()));
    out.intrinsic = std::max(out.intrinsic, std::abs(dot(g.theta, g.ell_prime[a]).value()));
    JetVector ph = phi_235(g.ell_prime[a]);
    out.intrinsic = std::max(out.intrinsic, std::abs(ph[a].value() - 1.0));
    out.intrinsic = std::max(out.intrinsic, std::abs(ph[1 - a].value()));
  }

  // nabla^0 of the Morimoto grading.
  const LocalFrame& f = mm.frame;
  Tensor3 t0 = torsion(mm.base);
  for (int k = 0; k < kDim; ++k) {
    double want = k == 2 ? -1.0 : 0.0;
    out.t0_horizontal = std::max(out.t0_horizontal, std::abs(t0(0, 1, k).value() - want));
  }
  for (int u = 2; u < kDim; ++u) {
    for (int jj = 0; jj < 2; ++jj) {
      for (int k = 0; k < 2; ++k) {
        double lie = -0.5 * (f.c(u, jj, k).value() + f.c(u, k, jj).value());
        out.t0_tau = std::max(out.t0_tau, std::abs(t0(u, jj, k).value() - lie));
      }
    }
  }
  LocalFrame tamed = tame(f.fields(), kDegrees);
  for (int a = 0; a < kDim; ++a) {
    double diff = (values(tamed.field(a)) - values(f.field(a))).cwiseAbs().maxCoeff();
    out.isometric = std::max(out.isometric, diff);
  }
  return out;
}

}  // namespace carnot
