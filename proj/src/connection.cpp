#include "carnot/connection.hpp"

#include <algorithm>
#include <cmath>

#include "carnot/errors.hpp"

namespace carnot {

namespace {

bool is_exact_zero(const Jet& x) { return x.is_constant() && x.value() == 0.0; }

double absval(const Jet& x) { return std::abs(x.value()); }

}  // namespace

LocalFrame::LocalFrame(std::vector<JetVector> fields, std::vector<int> degrees)
    : fields_(std::move(fields)), degrees_(std::move(degrees)) {
  if (fields_.size() != degrees_.size()) throw PreconditionError("one degree per frame field");
  for (std::size_t a = 0; a < fields_.size(); ++a) {
    if (fields_[a].size() != fields_.size()) throw PreconditionError("frame fields must have n components");
    if (degrees_[a] < 1 || (a > 0 && degrees_[a] < degrees_[a - 1])) {
      throw PreconditionError("frame fields must be ordered by degree");
    }
  }
}

std::vector<int> LocalFrame::layer_dims() const {
  std::vector<int> dims(step(), 0);
  for (int d : degrees_) ++dims[d - 1];
  return dims;
}

void LocalFrame::compute() const {
  if (!c_.empty()) return;
  int n = size();
  JetMatrix f(n, n);
  for (int a = 0; a < n; ++a) f.set_column(a, fields_[a]);
  coframe_ = f.inverse();
  c_.assign(static_cast<std::size_t>(n) * n * n, Jet(0.0));
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      JetVector k = coframe_ * carnot::bracket(fields_[a], fields_[b]);
      for (int c = 0; c < n; ++c) {
        c_[(static_cast<std::size_t>(a) * n + b) * n + c] = k[c];
        c_[(static_cast<std::size_t>(b) * n + a) * n + c] = -k[c];
      }
    }
  }
}

JetVector LocalFrame::components(const JetVector& v) const {
  compute();
  return coframe_ * v;
}

JetVector LocalFrame::vector(const JetVector& comps) const {
  int n = size();
  JetVector v = zeros(n);
  for (int a = 0; a < n; ++a) {
    if (is_exact_zero(comps[a])) continue;
    v = v + comps[a] * fields_[a];
  }
  return v;
}

const Jet& LocalFrame::c(int a, int b, int c) const {
  compute();
  int n = size();
  return c_[(static_cast<std::size_t>(a) * n + b) * n + c];
}

JetVector LocalFrame::bracket(const JetVector& u, const JetVector& v) const {
  int n = size();
  JetVector out = zeros(n);
  for (int a = 0; a < n; ++a) {
    if (is_exact_zero(u[a])) continue;
    for (int b = 0; b < n; ++b) {
      if (!v[b].is_constant()) out[b] += u[a] * derivative(a, v[b]);
    }
  }
  for (int b = 0; b < n; ++b) {
    if (is_exact_zero(v[b])) continue;
    for (int a = 0; a < n; ++a) {
      if (!u[a].is_constant()) out[a] -= v[b] * derivative(b, u[a]);
    }
  }
  for (int a = 0; a < n; ++a) {
    if (is_exact_zero(u[a])) continue;
    for (int b = 0; b < n; ++b) {
      if (a == b || is_exact_zero(v[b])) continue;
      Jet w = u[a] * v[b];
      for (int k = 0; k < n; ++k) {
        if (!is_exact_zero(c(a, b, k))) out[k] += w * c(a, b, k);
      }
    }
  }
  return out;
}

NumericAlgebra LocalFrame::symbol() const {
  int n = size();
  NumericAlgebra alg(layer_dims());
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      std::vector<double> v(n, 0.0);
      bool any = false;
      for (int k = 0; k < n; ++k) {
        if (degrees_[k] == degrees_[a] + degrees_[b]) {
          v[k] = c(a, b, k).value();
          any = any || v[k] != 0.0;
        }
      }
      if (any) alg.set_bracket(a, b, v);
    }
  }
  return alg;
}

LocalFrame tame(const std::vector<JetVector>& fields, const std::vector<int>& degrees) {
  std::vector<JetVector> e = fields;
  int n = static_cast<int>(e.size());
  int s = degrees.empty() ? 0 : degrees.back();
  for (int k = 2; k <= s; ++k) {
    LocalFrame current(e, degrees);
    int start = static_cast<int>(std::find(degrees.begin(), degrees.end(), k) - degrees.begin());
    int end = static_cast<int>(std::upper_bound(degrees.begin(), degrees.end(), k) - degrees.begin());
    int d = end - start;
    JetMatrix gram(d, d);
    for (int a = 0; a < n; ++a) {
      for (int b = a + 1; b < n; ++b) {
        if (degrees[a] + degrees[b] != k) continue;
        for (int i = 0; i < d; ++i) {
          const Jet& bi = current.c(a, b, start + i);
          if (is_exact_zero(bi)) continue;
          for (int j = 0; j < d; ++j) {
            const Jet& bj = current.c(a, b, start + j);
            if (!is_exact_zero(bj)) gram(i, j) += bi * bj;
          }
        }
      }
    }
    JetMatrix l = cholesky(gram);
    std::vector<JetVector> layer(e.begin() + start, e.begin() + end);
    for (int j = 0; j < d; ++j) {
      JetVector v = zeros(n);
      for (int i = j; i < d; ++i) {
        if (!is_exact_zero(l(i, j))) v = v + l(i, j) * layer[i];
      }
      e[start + j] = v;
    }
  }
  return LocalFrame(std::move(e), degrees);
}

LocalFrame adapted_frame(const FramedManifold& m, const JetPoint& p) {
  std::vector<int> flag = growth_flag(m, p.values, m.dimension());
  if (flag.back() != m.dimension()) throw PreconditionError("horizontal bundle is not bracket generating");
  std::vector<int> degrees;
  int prev = 0;
  for (std::size_t k = 0; k < flag.size(); ++k) {
    for (int i = prev; i < flag[k]; ++i) degrees.push_back(static_cast<int>(k) + 1);
    prev = flag[k];
  }
  std::vector<JetVector> fields = m.frame_jets(p);
  // The first d_1 + ... + d_k fields must span E^{-k}: each bracket of
  // fields of degrees i, j must lie in the span of fields of degree <= i+j.
  LocalFrame raw(fields, degrees);
  int n = m.dimension();
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      for (int c = 0; c < n; ++c) {
        if (degrees[c] > degrees[a] + degrees[b] && absval(raw.c(a, b, c)) > 1e-8) {
          throw PreconditionError("frame is not adapted to the growth flag");
        }
      }
    }
  }
  return tame(fields, degrees);
}

FrameConnection::FrameConnection(LocalFrame frame)
    : frame_(std::move(frame)), n_(frame_.size()),
      gamma_(static_cast<std::size_t>(n_) * n_ * n_, Jet(0.0)) {}

JetVector FrameConnection::covariant(const JetVector& u, const JetVector& v) const {
  JetVector out = zeros(n_);
  for (int a = 0; a < n_; ++a) {
    if (is_exact_zero(u[a])) continue;
    for (int b = 0; b < n_; ++b) {
      if (!v[b].is_constant()) out[b] += u[a] * frame_.derivative(a, v[b]);
      if (is_exact_zero(v[b])) continue;
      Jet w = u[a] * v[b];
      for (int c = 0; c < n_; ++c) {
        const Jet& g = (*this)(a, b, c);
        if (!is_exact_zero(g)) out[c] += w * g;
      }
    }
  }
  return out;
}

FrameConnection flat_frame_connection(const LocalFrame& frame) { return FrameConnection(frame); }

FrameConnection levi_civita(const LocalFrame& frame) {
  FrameConnection nabla(frame);
  int n = frame.size();
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      for (int c = 0; c < n; ++c) {
        nabla(a, b, c) = Jet(0.5) * (frame.c(a, b, c) - frame.c(a, c, b) - frame.c(b, c, a));
      }
    }
  }
  return nabla;
}

Tensor3 torsion(const FrameConnection& nabla) {
  int n = nabla.size();
  const LocalFrame& f = nabla.frame();
  Tensor3 t(n);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      for (int c = 0; c < n; ++c) t(a, b, c) = nabla(a, b, c) - nabla(b, a, c) - f.c(a, b, c);
    }
  }
  return t;
}

Tensor4 curvature(const FrameConnection& nabla) {
  int n = nabla.size();
  const LocalFrame& f = nabla.frame();
  Tensor4 r(n);
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      for (int j = 0; j < n; ++j) {
        for (int k = 0; k < n; ++k) {
          Jet s = f.derivative(a, nabla(b, j, k)) - f.derivative(b, nabla(a, j, k));
          for (int m = 0; m < n; ++m) {
            if (!is_exact_zero(nabla(b, j, m)) && !is_exact_zero(nabla(a, m, k))) s += nabla(b, j, m) * nabla(a, m, k);
            if (!is_exact_zero(nabla(a, j, m)) && !is_exact_zero(nabla(b, m, k))) s -= nabla(a, j, m) * nabla(b, m, k);
            if (!is_exact_zero(f.c(a, b, m)) && !is_exact_zero(nabla(m, j, k))) s -= f.c(a, b, m) * nabla(m, j, k);
          }
          r(a, b, j, k) = s;
          r(b, a, j, k) = -s;
        }
      }
    }
  }
  return r;
}

Tensor3 t_zero(const LocalFrame& frame) {
  int n = frame.size();
  Tensor3 t(n);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      for (int c = 0; c < n; ++c) {
        if (frame.degree(c) == frame.degree(a) + frame.degree(b)) t(a, b, c) = -frame.c(a, b, c);
      }
    }
  }
  return t;
}

Tensor3 selector(const LocalFrame& frame) {
  int n = frame.size();
  Tensor3 s(n);
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      for (int c = 0; c < n; ++c) {
        if (frame.degree(c) == frame.degree(a) + frame.degree(b)) s(a, b, c) = frame.c(a, b, c);
      }
    }
  }
  return s;
}

std::vector<Eigen::MatrixXd> isometries(const LocalFrame& frame) {
  CarnotAlgebra<double> g{frame.symbol(), Eigen::MatrixXd::Identity(frame.layer_dims()[0], frame.layer_dims()[0])};
  std::vector<Eigen::MatrixXd> raw = isometry_algebra(g), out;
  for (Eigen::MatrixXd d : raw) {
    for (const auto& e : out) d -= (e.cwiseProduct(d).sum()) * e;
    double norm = d.norm();
    if (norm > 1e-10) out.push_back(d / norm);
  }
  return out;
}

namespace {

// Frobenius pairing of R(chi(e_c)) with D.
double curvature_on_selector(const Tensor4& r, const Tensor3& s, int c, const Eigen::MatrixXd& d) {
  int n = r.n;
  double total = 0.0;
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      double w = s(a, b, c).value();
      if (w == 0.0) continue;
      for (int j = 0; j < n; ++j) {
        for (int k = 0; k < n; ++k) total += w * r(a, b, j, k).value() * d(k, j);
      }
    }
  }
  return total;
}

}  // namespace

ConnectionResiduals residuals(const FrameConnection& nabla) {
  const LocalFrame& f = nabla.frame();
  int n = f.size();
  int r = f.layer_dims()[0];
  ConnectionResiduals out;

  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      for (int c = 0; c < n; ++c) {
        if (f.degree(b) != f.degree(c)) out.grading = std::max(out.grading, absval(nabla(a, b, c)));
        if (b < r && c < r) out.metric = std::max(out.metric, std::abs(nabla(a, b, c).value() + nabla(a, c, b).value()));
      }
    }
  }

  Tensor3 t = torsion(nabla);
  Tensor3 t0 = t_zero(f);
  Tensor3 s = selector(f);
  Tensor4 rc = curvature(nabla);
  std::vector<Eigen::MatrixXd> iso = isometries(f);

  // nabla T_0.
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      for (int c = b + 1; c < n; ++c) {
        for (int d = 0; d < n; ++d) {
          double v = f.derivative(a, t0(b, c, d)).value();
          for (int e = 0; e < n; ++e) {
            v += nabla(a, e, d).value() * t0(b, c, e).value();
            v -= nabla(a, b, e).value() * t0(e, c, d).value();
            v -= nabla(a, c, e).value() * t0(b, e, d).value();
          }
          out.strong = std::max(out.strong, std::abs(v));
        }
      }
    }
  }

  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      for (int c = 0; c < n; ++c) {
        int i = f.degree(a) + f.degree(b);
        double tv = t(a, b, c).value();
        if (f.degree(c) == i) {
          out.torsion_identity = std::max(out.torsion_identity, std::abs(tv - t0(a, b, c).value()));
        } else if (f.degree(c) > i) {
          out.torsion_identity = std::max(out.torsion_identity, std::abs(tv));
        }
        out.flat_torsion = std::max(out.flat_torsion, std::abs(tv - t0(a, b, c).value()));
      }
    }
  }

  for (const Jet& x : rc.v) out.flat_curvature = std::max(out.flat_curvature, absval(x));

  // Holonomy: R(e_a, e_b) minus its projection to s_I.
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      Eigen::MatrixXd m(n, n);
      for (int j = 0; j < n; ++j) {
        for (int k = 0; k < n; ++k) m(k, j) = rc(a, b, j, k).value();
      }
      for (const auto& d : iso) m -= d.cwiseProduct(m).sum() * d;
      out.holonomy = std::max(out.holonomy, m.cwiseAbs().maxCoeff());
    }
  }

  // Rcond: <R(chi(e_c)), D> = <T_{e_c}, D> with (T_c)_{kj} = T(c, j, k).
  for (int c = 0; c < n; ++c) {
    for (const auto& d : iso) {
      double lhs = curvature_on_selector(rc, s, c, d);
      double rhs = 0.0;
      for (int j = 0; j < n; ++j) {
        for (int k = 0; k < n; ++k) rhs += t(c, j, k).value() * d(k, j);
      }
      out.rcond = std::max(out.rcond, std::abs(lhs - rhs));
    }
  }

  // Tcond: <T(chi(e_c)), e_d> = -<T_{e_c}, T0_{e_d}> for deg d < deg c.
  for (int c = 0; c < n; ++c) {
    for (int d = 0; d < n; ++d) {
      if (f.degree(d) >= f.degree(c)) continue;
      double v = 0.0;
      for (int a = 0; a < n; ++a) {
        for (int b = a + 1; b < n; ++b) v += s(a, b, c).value() * t(a, b, d).value();
      }
      for (int j = 0; j < n; ++j) {
        for (int k = 0; k < n; ++k) v += t(c, j, k).value() * t0(d, j, k).value();
      }
      out.tcond = std::max(out.tcond, std::abs(v));
    }
  }

  // Selector axioms: chi(e_c) in wedge^2 E^{-k+1}, and
  // sum s(a, b, c) [e_a, e_b] = e_c modulo E^{-k+1}.
  for (int c = 0; c < n; ++c) {
    for (int a = 0; a < n; ++a) {
      for (int b = a + 1; b < n; ++b) {
        if (f.degree(a) >= f.degree(c) || f.degree(b) >= f.degree(c)) {
          out.selector_grading = std::max(out.selector_grading, absval(s(a, b, c)));
        }
      }
    }
    if (f.degree(c) == 1) continue;
    for (int d = 0; d < n; ++d) {
      if (f.degree(d) < f.degree(c)) continue;
      double v = c == d ? -1.0 : 0.0;
      for (int a = 0; a < n; ++a) {
        for (int b = a + 1; b < n; ++b) v += s(a, b, c).value() * f.c(a, b, d).value();
      }
      out.selector_bracket = std::max(out.selector_bracket, std::abs(v));
    }
  }
  return out;
}

namespace {

int frame_order(const FramedManifold& m, const std::vector<double>& p, int extra) {
  int s = static_cast<int>(growth_flag(m, p, m.dimension()).size());
  // Taming uses s - 1 derivatives, the structure functions one more, the
  // checks one more on top of the requested ones.
  return s + 1 + extra + 1;
}

}  // namespace

FrameConnection ParallelFrameModel::at(const std::vector<double>& p, int extra) const {
  return flat_frame_connection(adapted_frame(m_, m_.jet_point(p, frame_order(m_, p, extra))));
}

FrameConnection LeviCivitaModel::at(const std::vector<double>& p, int extra) const {
  return levi_civita(adapted_frame(m_, m_.jet_point(p, frame_order(m_, p, extra + 1))));
}

FrameConnection PerturbedModel::at(const std::vector<double>& p, int extra) const {
  FrameConnection nabla = base_.at(p, extra);
  std::vector<Eigen::MatrixXd> iso = isometries(nabla.frame());
  if (iso.empty()) return nabla;
  int n = nabla.size();
  for (int b = 0; b < n; ++b) {
    for (int c = 0; c < n; ++c) nabla(0, b, c) += Jet(eps_ * iso[0](c, b));
  }
  return nabla;
}

bool all_pass(const Report& r) {
  return std::all_of(r.begin(), r.end(), [](const CheckResult& c) { return c.pass; });
}

const CheckResult& find_check(const Report& r, const std::string& name) {
  for (const auto& c : r) {
    if (c.name == name) return c;
  }
  throw PreconditionError("no check named " + name);
}

ConnectionResiduals max_residuals(const ConnectionModel& model, const std::vector<std::vector<double>>& sample) {
  ConnectionResiduals out;
  for (const auto& p : sample) {
    ConnectionResiduals r = residuals(model.at(p, 1));
    out.grading = std::max(out.grading, r.grading);
    out.metric = std::max(out.metric, r.metric);
    out.strong = std::max(out.strong, r.strong);
    out.torsion_identity = std::max(out.torsion_identity, r.torsion_identity);
    out.rcond = std::max(out.rcond, r.rcond);
    out.tcond = std::max(out.tcond, r.tcond);
    out.flat_torsion = std::max(out.flat_torsion, r.flat_torsion);
    out.flat_curvature = std::max(out.flat_curvature, r.flat_curvature);
    out.holonomy = std::max(out.holonomy, r.holonomy);
    out.selector_grading = std::max(out.selector_grading, r.selector_grading);
    out.selector_bracket = std::max(out.selector_bracket, r.selector_bracket);
  }
  return out;
}

namespace {

CheckResult make(const std::string& name, double residual, double tolerance) {
  return {name, residual, tolerance, residual <= tolerance};
}

}  // namespace

Report check_compatible(const ConnectionModel& model, const std::vector<std::vector<double>>& sample,
                        double tolerance) {
  ConnectionResiduals r = max_residuals(model, sample);
  return {make("grading_parallel", r.grading, tolerance), make("metric", r.metric, tolerance),
          make("strong", r.strong, tolerance)};
}

Report check_morimoto(const ConnectionModel& model, const std::vector<std::vector<double>>& sample,
                      double tolerance) {
  ConnectionResiduals r = max_residuals(model, sample);
  return {make("grading_parallel", r.grading, tolerance), make("metric", r.metric, tolerance),
          make("strong", r.strong, tolerance), make("rcond", r.rcond, tolerance),
          make("tcond", r.tcond, tolerance)};
}

Report flatness_check(const ConnectionModel& model, const std::vector<std::vector<double>>& sample,
                      double tolerance) {
  ConnectionResiduals r = max_residuals(model, sample);
  return {make("strong", std::max({r.grading, r.metric, r.strong}), tolerance),
          make("torsion", r.flat_torsion, tolerance), make("curvature", r.flat_curvature, tolerance)};
}

}  // namespace carnot
