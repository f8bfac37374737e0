#include "carnot/manifold.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Dense>

namespace carnot {

std::string to_string(StructureClass c) {
  switch (c) {
    case StructureClass::generic:
      return "generic";
    case StructureClass::contact:
      return "contact";
    case StructureClass::two_three_five:
      return "two-three-five";
  }
  return "generic";
}

StructureClass structure_class_from_string(const std::string& s) {
  if (s == "generic") return StructureClass::generic;
  if (s == "contact") return StructureClass::contact;
  if (s == "two-three-five") return StructureClass::two_three_five;
  throw PreconditionError("unknown structure class '" + s + "'");
}

namespace {

bool is_identity(const ExprMatrix& m) {
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (std::size_t j = 0; j < m[i].size(); ++j) {
      Expr e = simplify(m[i][j]);
      if (i == j ? !e.is_one() : !e.is_zero()) return false;
    }
  }
  return true;
}

std::vector<VectorField> orthonormalize(const std::vector<VectorField>& frame, int r, const ExprMatrix& g) {
  std::vector<VectorField> out = frame;
  if (g.empty() || is_identity(g)) return out;
  int n = static_cast<int>(frame.size());
  // e_i = sum_j c[i][j] X_j; <u, v> = u^T g v on coefficient vectors.
  auto inner = [&](const std::vector<Expr>& u, const std::vector<Expr>& v) {
    std::vector<Expr> terms;
    for (int a = 0; a < r; ++a) {
      if (u[a].is_zero()) continue;
      for (int b = 0; b < r; ++b) {
        if (v[b].is_zero() || g[a][b].is_zero()) continue;
        terms.push_back(u[a] * g[a][b] * v[b]);
      }
    }
    return sum(terms);
  };
  std::vector<std::vector<Expr>> c;
  for (int k = 0; k < r; ++k) {
    std::vector<Expr> v(r, Expr(0));
    v[k] = Expr(1);
    std::vector<Expr> unit_k = v;
    for (int j = 0; j < k; ++j) {
      Expr p = inner(unit_k, c[j]);
      if (p.is_zero()) continue;
      for (int b = 0; b < r; ++b) v[b] = v[b] - p * c[j][b];
    }
    Expr norm = sqrt(inner(v, v));
    for (int b = 0; b < r; ++b) v[b] = simplify(v[b] / norm);
    c.push_back(v);
  }
  for (int i = 0; i < r; ++i) {
    for (int k = 0; k < n; ++k) {
      std::vector<Expr> terms;
      for (int j = 0; j < r; ++j) {
        if (!c[i][j].is_zero() && !frame[j][k].is_zero()) terms.push_back(c[i][j] * frame[j][k]);
      }
      out[i][k] = simplify(sum(terms));
    }
  }
  return out;
}

}  // namespace

FramedManifold::FramedManifold(std::vector<std::string> coords, std::vector<VectorField> frame, int horizontal_rank,
                               ExprMatrix metric, StructureClass cls)
    : coords_(std::move(coords)), frame_(std::move(frame)), rank_(horizontal_rank), metric_(std::move(metric)),
      class_(cls) {
  int n = dimension();
  if (n == 0) throw PreconditionError("manifold needs at least one coordinate");
  if (static_cast<int>(frame_.size()) != n) {
    throw PreconditionError("expected " + std::to_string(n) + " frame fields, got " + std::to_string(frame_.size()));
  }
  for (const VectorField& x : frame_) {
    if (static_cast<int>(x.size()) != n) throw PreconditionError("frame field has the wrong number of coefficients");
  }
  if (rank_ < 1 || rank_ > n) {
    throw PreconditionError("horizontal_rank " + std::to_string(rank_) + " outside 1.." + std::to_string(n));
  }
  if (!metric_.empty()) {
    if (static_cast<int>(metric_.size()) != rank_) throw PreconditionError("metric must be r x r");
    for (int i = 0; i < rank_; ++i) {
      if (static_cast<int>(metric_[i].size()) != rank_) throw PreconditionError("metric must be r x r");
      for (int j = 0; j < i; ++j) {
        if (simplify(metric_[i][j] - metric_[j][i]) != Expr(0)) throw PreconditionError("metric must be symmetric");
      }
    }
  }
  on_frame_ = orthonormalize(frame_, rank_, metric_);
}

JetPoint FramedManifold::jet_point(const std::vector<double>& p, int order) const {
  if (static_cast<int>(p.size()) != dimension()) throw PreconditionError("point has the wrong dimension");
  return JetPoint(coords_, p, order);
}

std::vector<JetVector> FramedManifold::frame_jets(const JetPoint& p) const {
  std::vector<JetVector> out;
  out.reserve(on_frame_.size());
  for (const VectorField& x : on_frame_) {
    JetVector v;
    v.reserve(x.size());
    for (const Expr& e : x) v.push_back(evaluate_jet(e, p));
    out.push_back(std::move(v));
  }
  return out;
}

void FramedManifold::check_point(const std::vector<double>& p) const {
  int n = dimension();
  Eigen::MatrixXd f(n, n);
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < n; ++k) f(k, i) = evaluate(frame_[i][k], coords_, p);
  }
  if (!(std::abs(f.determinant()) > 1e-9)) throw NumericalError("frame is singular at the point");
  if (!metric_.empty()) {
    Eigen::MatrixXd g(rank_, rank_);
    for (int i = 0; i < rank_; ++i) {
      for (int j = 0; j < rank_; ++j) g(i, j) = evaluate(metric_[i][j], coords_, p);
    }
    Eigen::LLT<Eigen::MatrixXd> llt(g);
    if (llt.info() != Eigen::Success) throw NumericalError("metric is not positive definite at the point");
  }
}

Expr apply(const std::vector<std::string>& coords, const VectorField& x, const Expr& f) {
  std::vector<Expr> terms;
  for (std::size_t m = 0; m < coords.size(); ++m) {
    if (x[m].is_zero()) continue;
    Expr d = differentiate(f, coords[m]);
    if (!d.is_zero()) terms.push_back(x[m] * d);
  }
  return simplify(sum(terms));
}

VectorField bracket(const std::vector<std::string>& coords, const VectorField& x, const VectorField& y) {
  VectorField out(coords.size());
  for (std::size_t k = 0; k < coords.size(); ++k) out[k] = simplify(apply(coords, x, y[k]) - apply(coords, y, x[k]));
  return out;
}

std::vector<std::vector<std::vector<Expr>>> structure_functions(const FramedManifold& m) {
  int n = m.dimension();
  const auto& frame = m.orthonormal_frame();
  const auto& coords = m.coords();
  // Generic anchor point used only to rank candidate pivots.
  std::vector<double> anchor(n);
  for (int i = 0; i < n; ++i) anchor[i] = 0.1234 + 0.0317 * i;
  auto magnitude = [&](const Expr& e) {
    try {
      return std::abs(evaluate(e, coords, anchor));
    } catch (const DomainError&) {
      return 0.0;
    }
  };

  // Gauss-Jordan on [F | I], F(k, i) = X_i^k.
  std::vector<std::vector<Expr>> a(n, std::vector<Expr>(n)), inv(n, std::vector<Expr>(n, Expr(0)));
  for (int i = 0; i < n; ++i) {
    inv[i][i] = Expr(1);
    for (int k = 0; k < n; ++k) a[k][i] = frame[i][k];
  }
  for (int col = 0; col < n; ++col) {
    int pivot = -1;
    double best = -1.0;
    for (int r = col; r < n; ++r) {
      if (a[r][col].is_zero()) continue;
      double v = magnitude(a[r][col]);
      if (v > best) {
        best = v;
        pivot = r;
      }
    }
    if (pivot < 0) throw NumericalError("frame is symbolically singular");
    std::swap(a[pivot], a[col]);
    std::swap(inv[pivot], inv[col]);
    Expr p = a[col][col];
    for (int j = 0; j < n; ++j) {
      a[col][j] = simplify(a[col][j] / p);
      inv[col][j] = simplify(inv[col][j] / p);
    }
    for (int r = 0; r < n; ++r) {
      if (r == col || a[r][col].is_zero()) continue;
      Expr f = a[r][col];
      for (int j = 0; j < n; ++j) {
        if (!a[col][j].is_zero()) a[r][j] = simplify(a[r][j] - f * a[col][j]);
        if (!inv[col][j].is_zero()) inv[r][j] = simplify(inv[r][j] - f * inv[col][j]);
      }
    }
  }

  std::vector<std::vector<std::vector<Expr>>> c(
      n, std::vector<std::vector<Expr>>(n, std::vector<Expr>(n, Expr(0))));
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      VectorField b = bracket(coords, frame[i], frame[j]);
      for (int k = 0; k < n; ++k) {
        std::vector<Expr> terms;
        for (int l = 0; l < n; ++l) {
          if (!inv[k][l].is_zero() && !b[l].is_zero()) terms.push_back(inv[k][l] * b[l]);
        }
        Expr v = simplify(sum(terms));
        c[i][j][k] = v;
        c[j][i][k] = simplify(-v);
      }
    }
  }
  return c;
}

namespace {

constexpr double kRankTolerance = 1e-9;

/// The flag E^{-1} within E^{-2} within ... at a point, with representative
/// fields for each quotient layer and orthonormal complement bases in the
/// auxiliary coordinates (coefficients in the orthonormal frame).
struct Flag {
  std::vector<int> ranks;
  std::vector<std::vector<JetVector>> reps;
  /// Columns: orthonormal basis of the complement of E^{-k+1} in E^{-k}.
  std::vector<Eigen::MatrixXd> basis;
  /// basis vector b of layer k is the class of sum_a coeff(a, b) reps[a].
  std::vector<Eigen::MatrixXd> coeff;
  Eigen::MatrixXd aux;
};

Flag build_flag(const FramedManifold& m, const std::vector<double>& p, int max_step) {
  int n = m.dimension(), r = m.horizontal_rank();
  int order = std::max(1, std::min(max_step, n));
  JetPoint jp = m.jet_point(p, order);
  std::vector<JetVector> fields = m.frame_jets(jp);
  Eigen::MatrixXd f(n, n);
  for (int i = 0; i < n; ++i) f.col(i) = values(fields[i]);
  if (!(std::abs(f.determinant()) > 1e-9)) throw NumericalError("frame is singular at the point");

  Flag flag;
  flag.aux = f.inverse();
  std::vector<JetVector> first(fields.begin(), fields.begin() + r);
  Eigen::MatrixXd q = Eigen::MatrixXd::Identity(n, r);
  flag.ranks.push_back(r);
  flag.reps.push_back(first);
  flag.basis.push_back(q);
  flag.coeff.push_back(Eigen::MatrixXd::Identity(r, r));

  for (int k = 2; k <= max_step && flag.ranks.back() < n; ++k) {
    std::vector<JetVector> cands;
    for (int i = 0; i < r; ++i) {
      for (const JetVector& rep : flag.reps.back()) cands.push_back(bracket(first[i], rep));
    }
    Eigen::MatrixXd raw(n, static_cast<int>(cands.size()));
    for (std::size_t c = 0; c < cands.size(); ++c) raw.col(static_cast<int>(c)) = flag.aux * values(cands[c]);
    double scale = 1.0;
    for (int c = 0; c < raw.cols(); ++c) scale = std::max(scale, raw.col(c).norm());
    Eigen::MatrixXd resid = raw - q * (q.transpose() * raw);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(resid);
    int added = 0;
    for (int i = 0; i < svd.singularValues().size(); ++i) {
      if (svd.singularValues()(i) > kRankTolerance * scale) ++added;
    }
    if (added == 0) {
      // No growth at this point (a rank jump if the flag grows later):
      // keep the whole spanning set for the next layer.
      if (cands.size() > 4096) throw ResourceError("too many bracket candidates in a degenerate flag");
      flag.reps.push_back(std::move(cands));
      flag.basis.push_back(Eigen::MatrixXd(n, 0));
      flag.coeff.push_back(Eigen::MatrixXd(0, 0));
      flag.ranks.push_back(flag.ranks.back());
      continue;
    }

    // Column-pivoted Gram-Schmidt picks the representatives.
    Eigen::MatrixXd work = resid, w(n, added);
    std::vector<int> chosen;
    for (int t = 0; t < added; ++t) {
      int best = 0;
      for (int c = 1; c < work.cols(); ++c) {
        if (work.col(c).norm() > work.col(best).norm()) best = c;
      }
      w.col(t) = work.col(best) / work.col(best).norm();
      chosen.push_back(best);
      work -= w.col(t) * (w.col(t).transpose() * work);
    }
    Eigen::MatrixXd rho(n, added);
    std::vector<JetVector> reps;
    for (int t = 0; t < added; ++t) {
      rho.col(t) = resid.col(chosen[t]);
      reps.push_back(cands[chosen[t]]);
    }
    Eigen::MatrixXd u = w.transpose() * rho;
    flag.coeff.push_back(u.inverse());
    flag.basis.push_back(w);
    flag.reps.push_back(std::move(reps));
    Eigen::MatrixXd q2(n, q.cols() + added);
    q2 << q, w;
    q = q2;
    flag.ranks.push_back(flag.ranks.back() + added);
  }
  return flag;
}

}  // namespace

std::vector<int> growth_flag(const FramedManifold& m, const std::vector<double>& p, int max_step) {
  return build_flag(m, p, max_step).ranks;
}

CarnotAlgebra<double> symbol_at(const FramedManifold& m, const std::vector<double>& p) {
  int n = m.dimension();
  Flag flag = build_flag(m, p, n);
  if (flag.ranks.back() != n) throw PreconditionError("distribution is not bracket-generating at the point");
  int s = static_cast<int>(flag.ranks.size());
  std::vector<int> dims;
  for (int k = 0; k < s; ++k) dims.push_back(flag.ranks[k] - (k ? flag.ranks[k - 1] : 0));
  for (int d : dims) {
    if (d == 0) throw NumericalError("rank jump: the flag is not equiregular at the point");
  }
  NumericAlgebra alg(dims);

  for (int i = 1; i <= s; ++i) {
    for (int j = i; i + j <= s; ++j) {
      int target = i + j;
      const auto& ri = flag.reps[i - 1];
      const auto& rj = flag.reps[j - 1];
      // Brackets of representatives, in auxiliary coordinates.
      std::vector<std::vector<Eigen::VectorXd>> br(ri.size(), std::vector<Eigen::VectorXd>(rj.size()));
      for (std::size_t a = 0; a < ri.size(); ++a) {
        for (std::size_t b = 0; b < rj.size(); ++b) br[a][b] = flag.aux * values(bracket(ri[a], rj[b]));
      }
      const Eigen::MatrixXd& ci = flag.coeff[i - 1];
      const Eigen::MatrixXd& cj = flag.coeff[j - 1];
      const Eigen::MatrixXd& wt = flag.basis[target - 1];
      for (int x = 0; x < dims[i - 1]; ++x) {
        for (int y = 0; y < dims[j - 1]; ++y) {
          int bx = alg.layer_start(i) + x, by = alg.layer_start(j) + y;
          if (bx >= by) continue;
          Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
          for (int a = 0; a < ci.rows(); ++a) {
            for (int b = 0; b < cj.rows(); ++b) v += ci(a, x) * cj(b, y) * br[a][b];
          }
          Eigen::VectorXd comp = wt.transpose() * v;
          std::vector<double> out(alg.dimension(), 0.0);
          for (int z = 0; z < comp.size(); ++z) out[alg.layer_start(target) + z] = comp(z);
          alg.set_bracket(bx, by, out);
        }
      }
    }
  }
  return {alg, Eigen::MatrixXd::Identity(dims[0], dims[0])};
}

bool equiregular(const FramedManifold& m, const std::vector<std::vector<double>>& sample) {
  std::vector<int> first;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    std::vector<int> g = growth_flag(m, sample[i], m.dimension());
    if (i == 0) {
      first = g;
    } else if (g != first) {
      return false;
    }
  }
  return true;
}

SymbolVerdict check_constant_symbol(const FramedManifold& m, const std::vector<std::vector<double>>& sample) {
  SymbolVerdict v;
  if (sample.empty()) throw PreconditionError("empty sample");
  switch (m.structure_class()) {
    case StructureClass::generic:
      throw PreconditionError("constant symbol is undecidable here for the generic class");
    case StructureClass::two_three_five: {
      v.constant = true;
      v.tag = "cartan(2,3,5)";
      for (const auto& p : sample) {
        std::vector<int> g = growth_flag(m, p, m.dimension());
        if (v.growth.empty()) v.growth = g;
        if (g != std::vector<int>{2, 3, 5}) {
          v.constant = false;
          v.growth = g;
        }
      }
      return v;
    }
    case StructureClass::contact: {
      int n = m.dimension();
      std::vector<double> lo, hi;
      v.constant = true;
      for (const auto& p : sample) {
        std::vector<int> g = growth_flag(m, p, n);
        if (v.growth.empty()) v.growth = g;
        if (g.size() != 2 || g[0] != n - 1 || g[1] != n || (n - 1) % 2 != 0) {
          v.constant = false;
          v.growth = g;
          v.tag = "not contact";
          return v;
        }
        std::vector<double> lambda = heisenberg_normal_form(symbol_at(m, p));
        if (v.lambda.empty()) {
          v.lambda = lambda;
          lo = hi = lambda;
        }
        for (std::size_t i = 0; i < lambda.size(); ++i) {
          lo[i] = std::min(lo[i], lambda[i]);
          hi[i] = std::max(hi[i], lambda[i]);
        }
      }
      for (std::size_t i = 0; i < lo.size(); ++i) v.deviation = std::max(v.deviation, hi[i] - lo[i]);
      v.constant = v.deviation <= 1e-6;
      v.tag = "h_" + std::to_string(v.lambda.size()) + "(lambda)";
      return v;
    }
  }
  return v;
}

std::vector<std::vector<double>> sample_points(const ChartBox& box, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::vector<double>> out;
  for (int i = 0; i < count; ++i) {
    std::vector<double> p;
    for (const auto& [lo, hi] : box) {
      double u = std::generate_canonical<double, 53>(rng);
      p.push_back(lo + (hi - lo) * u);
    }
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace carnot
