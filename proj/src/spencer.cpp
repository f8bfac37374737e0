#include "carnot/spencer.hpp"

#include <algorithm>
#include <map>

namespace carnot {

namespace {

void enumerate_subsets(int n, int k, int start, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
  if (static_cast<int>(cur.size()) == k) {
    out.push_back(cur);
    return;
  }
  for (int i = start; i < n; ++i) {
    cur.push_back(i);
    enumerate_subsets(n, k, i + 1, cur, out);
    cur.pop_back();
  }
}

}  // namespace

SpencerComplex::SpencerComplex(const CarnotAlgebra<double>& a, InnerProductConvention convention) {
  const NumericAlgebra& g = a.algebra;
  n_ = g.dimension();
  Eigen::MatrixXd gram = induced_inner_product(a, convention);
  Eigen::LLT<Eigen::MatrixXd> llt(gram);
  if (llt.info() != Eigen::Success) throw NumericalError("cochain inner product is not positive definite");
  // Columns of p: orthonormal basis; gram is block diagonal so p stays graded.
  Eigen::MatrixXd p = llt.matrixU().solve(Eigen::MatrixXd::Identity(n_, n_));
  Eigen::MatrixXd pinv = p.inverse();

  c_.assign(static_cast<std::size_t>(n_) * n_ * n_, 0.0);
  for (int i = 0; i < n_; ++i) {
    for (int j = 0; j < n_; ++j) {
      std::vector<double> u(p.col(i).data(), p.col(i).data() + n_), v(p.col(j).data(), p.col(j).data() + n_);
      std::vector<double> w = g.bracket(u, v);
      Eigen::VectorXd wc = pinv * Eigen::Map<Eigen::VectorXd>(w.data(), n_);
      for (int k = 0; k < n_; ++k) c_[(i * n_ + j) * n_ + k] = wc(k);
    }
  }

  for (const Eigen::MatrixXd& d : isometry_algebra(a)) {
    Eigen::MatrixXd x = pinv * d * p;
    for (const Eigen::MatrixXd& y : d_) x -= (y.cwiseProduct(x)).sum() * y;
    double norm = x.norm();
    if (norm < 1e-10) continue;
    d_.push_back(x / norm);
  }
  m_ = static_cast<int>(d_.size());

  subsets_.resize(n_ + 2);
  for (int k = 0; k <= n_; ++k) {
    std::vector<int> cur;
    enumerate_subsets(n_, k, 0, cur, subsets_[k]);
  }

  const int total = n_ + m_;
  for (int k = 0; k <= n_; ++k) {
    std::map<std::vector<int>, int> rank_in, rank_out;
    for (std::size_t i = 0; i < subsets_[k].size(); ++i) rank_in[subsets_[k][i]] = static_cast<int>(i);
    Eigen::MatrixXd mat = Eigen::MatrixXd::Zero(cochain_dimension(k + 1), cochain_dimension(k));
    if (k < n_) {
      for (std::size_t jr = 0; jr < subsets_[k + 1].size(); ++jr) {
        const std::vector<int>& big = subsets_[k + 1][jr];
        // First sum: (-1)^i [A_{j_i}, alpha(... hat j_i ...)].
        for (int i = 0; i <= k; ++i) {
          std::vector<int> rest = big;
          rest.erase(rest.begin() + i);
          int col_set = rank_in.at(rest);
          double sign = (i % 2) ? -1.0 : 1.0;
          Eigen::VectorXd ai = Eigen::VectorXd::Zero(total);
          ai(big[i]) = 1.0;
          for (int r = 0; r < total; ++r) {
            Eigen::VectorXd xr = Eigen::VectorXd::Zero(total);
            xr(r) = 1.0;
            Eigen::VectorXd br = bracket(ai, xr);
            for (int t = 0; t < total; ++t) {
              if (br(t) != 0.0) mat(jr * total + t, col_set * total + r) += sign * br(t);
            }
          }
        }
        // Second sum: (-1)^{i+l} alpha([A_{j_i}, A_{j_l}], ...).
        for (int i = 0; i <= k; ++i) {
          for (int l = i + 1; l <= k; ++l) {
            std::vector<int> rest;
            for (int q = 0; q <= k; ++q) {
              if (q != i && q != l) rest.push_back(big[q]);
            }
            double sign = ((i + l) % 2) ? -1.0 : 1.0;
            for (int mm = 0; mm < n_; ++mm) {
              double cm = constant(big[i], big[l], mm);
              if (cm == 0.0 || std::find(rest.begin(), rest.end(), mm) != rest.end()) continue;
              int below = static_cast<int>(std::count_if(rest.begin(), rest.end(), [&](int q) { return q < mm; }));
              std::vector<int> set = rest;
              set.insert(std::lower_bound(set.begin(), set.end(), mm), mm);
              int col_set = rank_in.at(set);
              double s = sign * cm * ((below % 2) ? -1.0 : 1.0);
              for (int r = 0; r < total; ++r) mat(jr * total + r, col_set * total + r) += s;
            }
          }
        }
      }
    }
    diff_.push_back(mat);
  }
}

std::size_t SpencerComplex::cochain_dimension(int k) const {
  if (k < 0 || k > n_) return 0;
  return subsets_[k].size() * static_cast<std::size_t>(n_ + m_);
}

Eigen::VectorXd SpencerComplex::bracket(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const {
  Eigen::VectorXd r = Eigen::VectorXd::Zero(n_ + m_);
  Eigen::VectorXd xa = x.head(n_), ya = y.head(n_);
  Eigen::MatrixXd dx = Eigen::MatrixXd::Zero(n_, n_), dy = Eigen::MatrixXd::Zero(n_, n_);
  for (int s = 0; s < m_; ++s) {
    dx += x(n_ + s) * d_[s];
    dy += y(n_ + s) * d_[s];
  }
  for (int a = 0; a < n_; ++a) {
    if (xa(a) == 0.0) continue;
    for (int b = 0; b < n_; ++b) {
      if (ya(b) == 0.0) continue;
      for (int c = 0; c < n_; ++c) r(c) += xa(a) * ya(b) * constant(a, b, c);
    }
  }
  r.head(n_) += dx * ya - dy * xa;
  Eigen::MatrixXd comm = dx * dy - dy * dx;
  for (int s = 0; s < m_; ++s) r(n_ + s) = d_[s].cwiseProduct(comm).sum();
  return r;
}

const Eigen::MatrixXd& SpencerComplex::differential(int k) const {
  if (k < 0 || k > n_) throw PreconditionError("cochain degree out of range");
  return diff_[k];
}

Cochain SpencerComplex::d(const Cochain& alpha) const {
  if (alpha.degree >= n_) return zero(alpha.degree + 1);
  return {alpha.degree + 1, differential(alpha.degree) * alpha.coefficients};
}

Cochain SpencerComplex::dstar(const Cochain& kappa) const {
  if (kappa.degree < 1) throw PreconditionError("codifferential needs degree >= 1");
  return {kappa.degree - 1, differential(kappa.degree - 1).transpose() * kappa.coefficients};
}

double SpencerComplex::inner(const Cochain& a, const Cochain& b) const {
  if (a.degree != b.degree) throw PreconditionError("cochain degrees differ");
  return a.coefficients.dot(b.coefficients);
}

Cochain SpencerComplex::zero(int k) const {
  return {k, Eigen::VectorXd::Zero(static_cast<int>(cochain_dimension(k)))};
}

}  // namespace carnot
