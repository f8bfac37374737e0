#include "carnot/contact.hpp"

#include <algorithm>
#include <cmath>

#include "carnot/errors.hpp"

namespace carnot {

namespace {

bool is_exact_zero(const Jet& x) { return x.is_constant() && x.value() == 0.0; }

JetVector pad(const JetVector& h) {
  JetVector v = h;
  v.push_back(Jet(0.0));
  return v;
}

JetVector horizontal(const JetVector& v) { return JetVector(v.begin(), v.end() - 1); }

// Splits v = h + s z (z with nonzero last component) and returns h.
JetVector split_along(const JetVector& v, const JetVector& z) {
  Jet s = v.back() / z.back();
  JetVector h = horizontal(v);
  for (std::size_t a = 0; a < h.size(); ++a) h[a] -= s * z[a];
  return h;
}

// u(f) for u given by frame components.
Jet derive(const LocalFrame& f, const JetVector& u, const Jet& x) {
  Jet out(0.0);
  if (x.is_constant()) return out;
  for (int a = 0; a < f.size(); ++a) {
    if (!is_exact_zero(u[a])) out += u[a] * f.derivative(a, x);
  }
  return out;
}

int block_dimension(const ContactData& cd, int j) {
  int d = 0;
  for (double l : cd.lambda) {
    if (std::abs(l - cd.distinct[j]) <= 1e-6 * cd.distinct[j]) d += 2;
  }
  return d;
}

// sum_j lambda_j^-2 over lambda with multiplicity, i.e. tr(Lambda^-2) / 2.
double half_trace_inverse_square(const ContactData& cd) {
  double s = 0.0;
  for (double l : cd.lambda) s += 1.0 / (l * l);
  return s;
}

}  // namespace

ContactData extract_contact_data(const FramedManifold& m, const JetPoint& p, bool flip) {
  int dim = m.dimension();
  int r = m.horizontal_rank();
  std::vector<int> flag = growth_flag(m, p.values, 2);
  if (dim % 2 == 0 || r != dim - 1 || flag.size() != 2 || flag[0] != r || flag[1] != dim) {
    throw PreconditionError("contact analysis needs growth vector (2n, 2n+1)");
  }
  ContactData cd;
  cd.n = r / 2;
  std::vector<int> degrees(dim, 1);
  degrees.back() = 2;
  cd.base = LocalFrame(m.frame_jets(p), degrees);
  const LocalFrame& base = cd.base;
  int v = dim - 1;

  cd.orientation = 0;
  for (int a = 0; a < r && cd.orientation == 0; ++a) {
    for (int b = a + 1; b < r && cd.orientation == 0; ++b) {
      double x = base.c(a, b, v).value();
      if (std::abs(x) > 1e-9) cd.orientation = x > 0 ? 1 : -1;
    }
  }
  if (cd.orientation == 0) throw PreconditionError("horizontal bundle is not contact at the point");
  if (flip) cd.orientation = -cd.orientation;
  Jet sigma(static_cast<double>(cd.orientation));

  // d(alpha)(X_a, X_b) = -alpha([X_a, X_b]) for the annihilator alpha.
  JetMatrix jraw(r, r);
  for (int a = 0; a < r; ++a) {
    for (int b = 0; b < r; ++b) {
      if (a != b) jraw(a, b) = -(sigma * base.c(a, b, v));
    }
  }
  JetMatrix praw = Jet(-1.0) * (jraw * jraw);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(praw.values());
  Eigen::VectorXd nu = eig.eigenvalues().reverse();
  if (nu(r - 1) <= 1e-12 * std::max(nu(0), 1e-300)) throw PreconditionError("horizontal bundle is not contact at the point");
  for (int i = 0; i < r; i += 2) {
    if (std::abs(nu(i) - nu(i + 1)) > 1e-6 * nu(0)) throw NumericalError("eigenvalues of -J^2 are not paired");
    double l = std::sqrt(nu(0) / nu(i));
    cd.lambda.push_back(l);
    cd.symbol_lambda.push_back(std::sqrt(l));
    if (cd.distinct.empty() || l > cd.distinct.back() * (1 + 1e-6)) cd.distinct.push_back(l);
  }

  Jet trace(0.0);
  for (int a = 0; a < r; ++a) trace += praw(a, a);
  cd.m = sqrt(trace / Jet(2.0 * half_trace_inverse_square(cd)));
  Jet inv_m = Jet(1.0) / cd.m;
  cd.j_theta = inv_m * jraw;
  JetMatrix pm = Jet(-1.0) * (cd.j_theta * cd.j_theta);

  int k = static_cast<int>(cd.distinct.size());
  JetMatrix id = JetMatrix::identity(r);
  cd.lambda_map = JetMatrix(r, r);
  for (int j = 0; j < k; ++j) {
    double mj = 1.0 / (cd.distinct[j] * cd.distinct[j]);
    JetMatrix pr = id;
    for (int i = 0; i < k; ++i) {
      if (i == j) continue;
      double mi = 1.0 / (cd.distinct[i] * cd.distinct[i]);
      pr = Jet(1.0 / (mj - mi)) * (pr * (pm - Jet(mi) * id));
    }
    cd.pr.push_back(pr);
    cd.lambda_map = cd.lambda_map + Jet(cd.distinct[j]) * pr;
  }
  cd.j = cd.lambda_map * cd.j_theta;

  // Reeb field: theta(Z0) = 1 and d theta(Z0, X_b) = 0.
  JetVector theta = zeros(dim);
  theta[v] = sigma * inv_m;
  JetMatrix omega(dim, dim);
  for (int a = 0; a < dim; ++a) {
    for (int b = a + 1; b < dim; ++b) {
      Jet x = base.derivative(a, theta[b]) - base.derivative(b, theta[a]);
      for (int c = 0; c < dim; ++c) {
        if (!is_exact_zero(theta[c])) x -= base.c(a, b, c) * theta[c];
      }
      omega(a, b) = x;
      omega(b, a) = -x;
    }
  }
  Jet zv = sigma * cd.m;
  JetMatrix mt(r, r);
  JetVector rhs(r);
  for (int b = 0; b < r; ++b) {
    for (int a = 0; a < r; ++a) mt(b, a) = omega(a, b);
    rhs[b] = -(zv * omega(v, b));
  }
  cd.reeb = pad(mt.inverse() * rhs);
  cd.reeb[v] = zv;
  return cd;
}

std::vector<JetVector> upsilon_fields(const ContactData& cd, const JetVector& w) {
  int r = 2 * cd.n;
  int k = static_cast<int>(cd.distinct.size());
  JetVector z = cd.reeb;
  if (!w.empty()) {
    JetVector jw = cd.j * w;
    for (int a = 0; a < r; ++a) z[a] -= jw[a];
  }
  std::vector<JetVector> h(k, zeros(r));
  for (int j = 0; j < k; ++j) {
    JetMatrix pj_j = cd.pr[j] * cd.j;
    for (int b = 0; b < r; ++b) {
      JetVector beta = cd.base.bracket(pad(cd.pr[j].column(b)), pad(pj_j.column(b)));
      h[j] = h[j] + split_along(beta, z);
    }
  }
  std::vector<JetVector> out(static_cast<std::size_t>(k) * k, zeros(r));
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      if (i != j) out[i * k + j] = Jet(0.5) * (cd.j * (cd.pr[i] * h[j]));
    }
  }
  return out;
}

JetVector morimoto_w(const ContactData& cd, UpsilonProjection projection) {
  int r = 2 * cd.n;
  int k = static_cast<int>(cd.distinct.size());
  // The coefficient 2 / tr Lambda^-2 belongs to a unit Z^W.  Under the
  // coisometric taming |Z^W|^2 = 2 / tr Lambda^-2, and the normalization
  // condition then gives coefficient 1.
  double c = 1.0;
  std::vector<JetVector> ups = upsilon_fields(cd);
  JetVector w = zeros(r);
  for (int i = 0; i < k; ++i) {
    double li = cd.distinct[i];
    JetVector wi = zeros(r);
    // Splitting along Z^0 - J W instead of Z^0 shifts Upsilon_ij by
    // -(dim E[j] / (2 lambda[j])) pr[i] W.
    double shift = 0.0;
    for (int j = 0; j < k; ++j) {
      if (j == i) continue;
      double lj = cd.distinct[j];
      wi = wi + Jet(c * li * li / lj) * ups[i * k + j];
      shift += c * li * li * block_dimension(cd, j) / (2.0 * lj * lj);
    }
    if (projection == UpsilonProjection::graded) wi = Jet(1.0 / (1.0 + shift)) * wi;
    w = w + wi;
  }
  return w;
}

LocalFrame contact_grading_frame(const ContactData& cd, const JetVector& w) {
  int r = 2 * cd.n;
  JetVector z = cd.reeb;
  JetVector jw = cd.j * w;
  for (int a = 0; a < r; ++a) z[a] -= jw[a];
  std::vector<JetVector> fields(cd.base.fields().begin(), cd.base.fields().begin() + r);
  fields.push_back(cd.base.vector(z));
  std::vector<int> degrees(r + 1, 1);
  degrees.back() = 2;
  return tame(fields, degrees);
}

JetMatrix extend_by_zero(const JetMatrix& h) {
  JetMatrix out(h.rows() + 1, h.cols() + 1);
  for (int i = 0; i < h.rows(); ++i) {
    for (int j = 0; j < h.cols(); ++j) out(i, j) = h(i, j);
  }
  return out;
}

std::vector<JetMatrix> covariant_j(const ContactData& cd, const FrameConnection& nabla) {
  const LocalFrame& f = nabla.frame();
  int n = f.size();
  JetMatrix j = extend_by_zero(cd.j);
  std::vector<JetMatrix> out;
  for (int a = 0; a < n; ++a) {
    JetMatrix g(n, n), dj(n, n);
    for (int b = 0; b < n; ++b) {
      for (int c = 0; c < n; ++c) {
        g(c, b) = nabla(a, b, c);
        dj(c, b) = f.derivative(a, j(c, b));
      }
    }
    out.push_back(dj + g * j - j * g);
  }
  return out;
}

ContactConnections contact_connections(const FramedManifold& m, const JetPoint& p, const ContactOptions& options) {
  ContactData cd = extract_contact_data(m, p, options.flip);
  int r = 2 * cd.n;
  int n = r + 1;
  int k = static_cast<int>(cd.distinct.size());
  JetVector w = options.reeb_grading ? zeros(r) : morimoto_w(cd, options.projection);
  LocalFrame f = contact_grading_frame(cd, w);
  FrameConnection lc = levi_civita(f);

  std::vector<JetMatrix> pr;
  for (const auto& x : cd.pr) pr.push_back(extend_by_zero(x));

  // nabla'_Y X = sum_j pr[j] (nabla^I_{pr[j] Y} pr[j] X + [Y - pr[j] Y, pr[j] X]) + tau_Y X
  // with <tau_Y X1, X2> = (1/2) sum_j (L_{Y - pr[j] Y} g_I)(pr[j] X1, pr[j] X2).
  FrameConnection prime(f);
  Tensor3 tau(n);
  for (int a = 0; a < n; ++a) {
    JetVector y = unit(n, a);
    for (int j = 0; j < k; ++j) {
      JetVector py = pr[j].column(a);
      JetVector u = y - py;
      std::vector<JetVector> px(r), brackets(r);
      for (int b = 0; b < r; ++b) {
        px[b] = pr[j].column(b);
        brackets[b] = f.bracket(u, px[b]);
      }
      for (int b = 0; b < r; ++b) {
        JetVector t = pr[j] * (lc.covariant(py, px[b]) + brackets[b]);
        for (int c = 0; c < r; ++c) prime(a, b, c) += t[c];
        for (int c = 0; c < r; ++c) {
          Jet l = derive(f, u, pr[j](b, c)) - dot(brackets[b], px[c]) - dot(px[b], brackets[c]);
          tau(a, b, c) += Jet(0.5) * l;
        }
      }
    }
    for (int b = 0; b < r; ++b) {
      for (int c = 0; c < r; ++c) prime(a, b, c) += tau(a, b, c);
    }
  }

  FrameConnection dprime = prime;
  JetMatrix j = extend_by_zero(cd.j);
  std::vector<JetMatrix> dj = covariant_j(cd, prime);
  for (int a = 0; a < n; ++a) {
    JetMatrix corr = dj[a] * j;
    for (int b = 0; b < n; ++b) {
      for (int c = 0; c < n; ++c) {
        if (!is_exact_zero(corr(c, b))) dprime(a, b, c) += Jet(0.5) * corr(c, b);
      }
    }
  }

  FrameConnection mori = dprime;
  Tensor4 rdd = curvature(dprime);
  Tensor3 s = selector(f);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      for (int c = b + 1; c < n; ++c) {
        if (is_exact_zero(s(b, c, a))) continue;
        for (int x = 0; x < n; ++x) {
          for (int y = 0; y < n; ++y) mori(a, x, y) += Jet(0.5) * s(b, c, a) * rdd(b, c, x, y);
        }
      }
    }
  }
  return {std::move(cd), std::move(w), f, std::move(tau), std::move(prime), std::move(dprime), std::move(mori)};
}

Eigen::MatrixXd closed_form_selector(const ContactData& cd) {
  int r = 2 * cd.n;
  Eigen::MatrixXd j = cd.j.values();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(r + 1, r + 1);
  double s = half_trace_inverse_square(cd);
  for (std::size_t q = 0; q < cd.pr.size(); ++q) {
    Eigen::MatrixXd p = cd.pr[q].values();
    std::vector<Eigen::VectorXd> basis;
    for (int c = 0; c < r; ++c) {
      Eigen::VectorXd u = p.col(c);
      for (const auto& e : basis) u -= e.dot(u) * e;
      if (u.norm() < 1e-8) continue;
      u.normalize();
      Eigen::VectorXd ju = j * u;
      for (const auto& e : basis) ju -= e.dot(ju) * e;
      ju.normalize();
      basis.push_back(u);
      basis.push_back(ju);
      double wgt = std::sqrt(s) / (s * cd.distinct[q]);
      for (int a = 0; a < r; ++a) {
        for (int b = a + 1; b < r; ++b) out(a, b) += wgt * (u(a) * ju(b) - u(b) * ju(a));
      }
    }
  }
  return out;
}

ContactLemmaResiduals contact_lemma_residuals(const FramedManifold& m, const std::vector<double>& p,
                                              const ContactOptions& options) {
  ContactConnections cc = contact_connections(m, m.jet_point(p, ContactModel::order(1)), options);
  const ContactData& cd = cc.data;
  const LocalFrame& f = cc.frame;
  int r = 2 * cd.n;
  int n = r + 1;
  int k = static_cast<int>(cd.distinct.size());
  ContactLemmaResiduals out;

  std::vector<Eigen::MatrixXd> dj;
  for (const auto& x : covariant_j(cd, cc.prime)) dj.push_back(x.values());
  std::vector<Eigen::MatrixXd> pr;
  for (const auto& x : cd.pr) pr.push_back(extend_by_zero(x).values());

  // (nabla'_u J) for u given by components.
  auto dj_along = [&](const Eigen::VectorXd& u) {
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(n, n);
    for (int a = 0; a < n; ++a) s += u(a) * dj[a];
    return s;
  };

  for (int j = 0; j < k; ++j) {
    for (int x = 0; x < r; ++x) {
      double t = 0.0;
      for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) t += pr[j](a, b) * dj[a](b, x);
      }
      out.trace_j = std::max(out.trace_j, std::abs(t));
    }
    for (int a = 0; a < r; ++a) {
      for (int b = 0; b < r; ++b) {
        for (int c = 0; c < r; ++c) {
          Eigen::VectorXd x = pr[j].col(a), x1 = pr[j].col(b), x2 = pr[j].col(c);
          double cyc = x2.dot(dj_along(x) * x1) + x.dot(dj_along(x1) * x2) + x1.dot(dj_along(x2) * x);
          out.bianchi = std::max(out.bianchi, std::abs(cyc));
        }
      }
    }
  }

  Tensor3 tp = torsion(cc.prime);
  Tensor3 tdd = torsion(cc.double_prime);
  Tensor3 t0 = t_zero(f);
  std::vector<Eigen::MatrixXd> iso = isometries(f);
  for (int c = 0; c < n; ++c) {
    for (const auto& d : iso) {
      double v = 0.0;
      for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) v += tdd(c, a, b).value() * d(b, a);
      }
      out.t_dd_iso = std::max(out.t_dd_iso, std::abs(v));
    }
  }

  auto bilinear = [&](const Tensor3& t, const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
    Eigen::VectorXd s = Eigen::VectorXd::Zero(n);
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) {
        double w = u(a) * v(b);
        if (w == 0.0) continue;
        for (int c = 0; c < n; ++c) s(c) += w * t(a, b, c).value();
      }
    }
    return s;
  };
  for (int j = 0; j < k; ++j) {
    for (int a = 0; a < r; ++a) {
      for (int b = 0; b < r; ++b) {
        Eigen::VectorXd x1 = pr[j].col(a), x2 = pr[j].col(b);
        Eigen::VectorXd d = bilinear(tp, x1, x2) - bilinear(t0, x1, x2);
        // Components in the other eigenbundles are -pr[i][X1, X2], which
        // need not vanish; compare the E[j] and vertical parts.
        d = pr[j] * d + Eigen::VectorXd::Unit(n, r) * d(r);
        out.prime_torsion = std::max(out.prime_torsion, d.cwiseAbs().maxCoeff());
        for (int y = 0; y < n; ++y) {
          Eigen::VectorXd ey = Eigen::VectorXd::Unit(n, y);
          double lhs = bilinear(tp, ey, x1).dot(x2);
          double rhs = 0.0;
          for (int c = 0; c < r; ++c) {
            for (int e = 0; e < r; ++e) rhs += x1(c) * x2(e) * cc.tau(y, c, e).value();
          }
          out.prime_tau = std::max(out.prime_tau, std::abs(lhs - rhs));
        }
      }
    }
  }

  // -T''(chi(e_Z)) = e_Z - sqrt(S) / S sum_{i != j} lambda[j]^-1 J Upsilon_ij
  // with S = tr Lambda^-2 / 2.
  Tensor3 s = selector(f);
  int z = r;
  Eigen::VectorXd lhs = Eigen::VectorXd::Zero(n);
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      double w = s(a, b, z).value();
      if (w == 0.0) continue;
      for (int c = 0; c < n; ++c) lhs(c) -= w * tdd(a, b, c).value();
    }
  }
  double sq = half_trace_inverse_square(cd);
  std::vector<JetVector> ups = upsilon_fields(cd, options.projection == UpsilonProjection::graded ? cc.w : JetVector{});
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  rhs(z) = 1.0;
  Eigen::MatrixXd jv = cd.j.values();
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      if (i == j) continue;
      rhs.head(r) -= std::sqrt(sq) / (sq * cd.distinct[j]) * (jv * values(ups[i * k + j]));
    }
  }
  out.tcond_identity = (lhs - rhs).cwiseAbs().maxCoeff();

  Eigen::MatrixXd closed = closed_form_selector(cd);
  for (int a = 0; a < r; ++a) {
    for (int b = a + 1; b < r; ++b) {
      out.selector = std::max(out.selector, std::abs(closed(a, b) - s(a, b, z).value()));
    }
  }
  return out;
}

FrameConnection ContactModel::at(const std::vector<double>& p, int extra) const {
  ContactConnections cc = contact_connections(m_, m_.jet_point(p, order(extra)), options_);
  switch (stage_) {
    case ContactStage::prime:
      return cc.prime;
    case ContactStage::double_prime:
      return cc.double_prime;
    case ContactStage::morimoto:
      break;
  }
  return cc.morimoto;
}

std::vector<double> ContactModel::w_at(const std::vector<double>& p) const {
  ContactData cd = extract_contact_data(m_, m_.jet_point(p, 3), options_.flip);
  if (options_.reeb_grading) return std::vector<double>(2 * cd.n, 0.0);
  Eigen::VectorXd w = values(morimoto_w(cd, options_.projection));
  return {w.data(), w.data() + w.size()};
}

}  // namespace carnot
